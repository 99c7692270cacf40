import random

import pytest

from tcount.circuit import Circuit, Gate, internal_hadamard_count, parse_qc, t_count
from tcount.optimize import bounded_bound
from tcount.phasepoly import PhasePolynomial, parse_table
from tcount.pipeline import PipelineError, optimize_circuit, optimize_polynomial, optimize_table
from tcount.verify import dense_unitary, equal_up_to_phase, phase_equal

from conftest import CLIFFORD_T, DATA, random_circuit

METHODS = ["tohpe", "todd", "fasttodd", "d-tohpe", "d-fasttodd"]


def load(name):
    return parse_qc((DATA / name).read_text())


@pytest.mark.parametrize("method", METHODS)
def test_ccz_keeps_seven(method):
    result = optimize_circuit(load("ccz.qc"), method, verify=True)
    assert result.t_before == 7 and result.t_after == 7
    assert result.verified
    assert phase_equal(result.circuit, load("ccz.qc"))


@pytest.mark.parametrize("method", ["tohpe", "todd", "fasttodd"])
def test_two_ccz_drop_below_fourteen(method):
    c = load("two_ccz.qc")
    result = optimize_circuit(c, method, verify=True)
    assert result.t_after <= 13
    assert result.verified
    assert phase_equal(result.circuit, c)


@pytest.mark.parametrize("name", ["random_hfree_0.qc", "random_hfree_1.qc", "random_hfree_2.qc"])
def test_hadamard_free_corpus(name):
    c = load(name)
    result = optimize_circuit(c, "fasttodd", verify=True)
    assert result.verified and set(result.checks) == {"tensor", "phase"}
    assert result.t_after <= result.t_before
    assert phase_equal(result.circuit, c)
    assert equal_up_to_phase(dense_unitary(result.circuit), dense_unitary(c))


def test_internal_hadamard_needs_gadgets():
    c = load("t_h_t.qc")
    with pytest.raises(PipelineError):
        optimize_circuit(c, "tohpe")
    result = optimize_circuit(c, "tohpe", use_gadgets=True, verify=True)
    assert result.n_gadgets == 1 and result.verified
    assert result.t_after == 2


def test_outer_hadamards_are_kept():
    c = Circuit(2, [Gate("H", (0,)), Gate("T", (0,)), Gate("CNOT", (0, 1)), Gate("T", (1,)), Gate("H", (1,))])
    result = optimize_circuit(c, "tohpe", verify=True)
    assert equal_up_to_phase(dense_unitary(result.circuit), dense_unitary(c))


def test_clifford_only_circuit():
    c = Circuit(2, [Gate("T", (0,)), Gate("H", (0,)), Gate("S", (1,)), Gate("H", (1,)), Gate("CZ", (0, 1))])
    result = optimize_circuit(c, "fasttodd", use_gadgets=True, verify=True)
    assert result.verified


@pytest.mark.parametrize("name", ["tof_chain.qc", "random_clifford_t_0.qc", "random_clifford_t_1.qc"])
@pytest.mark.parametrize("method", ["tohpe", "fasttodd"])
def test_gadget_corpus(name, method):
    c = load(name)
    result = optimize_circuit(c, method, use_gadgets=True, verify=True)
    assert result.verified
    assert result.n_gadgets == internal_hadamard_count(c)
    assert result.t_after <= result.t_before


def test_bounded_refuses_gadgets():
    with pytest.raises(PipelineError):
        optimize_circuit(load("t_h_t.qc"), "bounded", use_gadgets=True)


def test_unknown_method():
    with pytest.raises(PipelineError):
        optimize_circuit(load("ccz.qc"), "nope")


@pytest.mark.parametrize("seed", range(12))
def test_bounded_random(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 6)
    while True:
        c = random_circuit(rng, n, rng.randint(15, 35), CLIFFORD_T)
        c.gates.insert(0, Gate("T", (0,)))
        c.append(Gate("T", (n - 1,)))
        if 1 <= internal_hadamard_count(c) <= 4:
            break
    result = optimize_circuit(c, "bounded", verify=True)
    h = internal_hadamard_count(c)
    assert result.report.final <= bounded_bound(n, h, 2)
    assert result.checks == {"bound": True, "unitary": True}
    assert internal_hadamard_count(result.circuit) <= h


def test_bounded_without_hadamards():
    c = load("random_hfree_0.qc")
    result = optimize_circuit(c, "bounded", verify=True)
    assert result.verified
    assert result.report.final <= bounded_bound(c.n_wires, 0, 2)


def test_optimize_table_file():
    poly = parse_table((DATA / "random_5x14.tbl").read_text())
    circ, result = optimize_table(poly, "fasttodd", verify=True)
    assert result.verified
    assert t_count(circ) == result.t_after <= result.t_before


def test_optimize_polynomial_keeps_phase():
    rng = random.Random(4)
    p = PhasePolynomial(4, 2, [(rng.randrange(1, 16), rng.randrange(8)) for _ in range(14)])
    new, opt, report = optimize_polynomial(p, "tohpe")
    assert report.final == opt.m
    assert all((p.evaluate(x) - new.evaluate(x)) % 8 == 0 for x in range(16))


def test_level_three_pipeline():
    c = parse_qc((DATA / "rz_level3.qc").read_text())
    result = optimize_circuit(c, "d-fasttodd", d=3, verify=True)
    assert result.verified
    assert phase_equal(result.circuit, c, 3)


def test_level_two_methods_at_other_levels():
    c = parse_qc((DATA / "rz_level3.qc").read_text())
    result = optimize_circuit(c, "tohpe", d=3, verify=True)
    assert result.verified and result.report.method.startswith("d-tohpe")
    with pytest.raises(PipelineError):
        optimize_circuit(c, "todd", d=3)
