import random
from itertools import combinations_with_replacement

import pytest
from hypothesis import given, strategies as st

from tcount.circuit import Circuit, Gate, ccz_gates
from tcount.optimize import tohpe
from tcount.phasepoly import (
    ParityTable,
    PhasePolynomial,
    TensorMismatch,
    cancel_pairs,
    clifford_residue,
    concat,
    expand_parity,
    extract,
    format_table,
    monomial_coefficients,
    parse_table,
    signature_tensor,
    synthesize,
    table_polynomial,
    to_parity_table,
)
from tcount.verify import dense_unitary, equal_up_to_phase, phase_equal, table_tensor_ones, tensors_equal

from conftest import random_circuit, random_columns

CCZ_TERMS = [(1, 1), (2, 1), (4, 1), (3, 7), (5, 7), (6, 7), (7, 1)]


def brute_phase(p: PhasePolynomial, x: int) -> int:
    return sum(a for y, a in p.terms if bin(y & x).count("1") % 2) % p.modulus


def test_ccz_extracts_to_seven_terms():
    p = extract(Circuit(3, ccz_gates(0, 1, 2)))
    assert p.terms == CCZ_TERMS
    assert p.linear == [1, 2, 4] and p.affine == 0
    table = to_parity_table(p)
    assert table.to_strings() == ["1001101", "0101011", "0010111"]


def test_single_t_and_cnot_only():
    p = extract(Circuit(2, [Gate("T", (0,))]))
    assert p.terms == [(1, 1)] and p.linear == [1, 2]
    q = extract(Circuit(2, [Gate("CNOT", (0, 1)), Gate("X", (1,))]))
    assert q.terms == [] and q.linear == [1, 3] and q.affine == 2


def test_extract_rejects_hadamard():
    with pytest.raises(ValueError):
        extract(Circuit(1, [Gate("H", (0,))]))


def test_odd_weights_become_columns():
    p = PhasePolynomial(3, 2, [(1, 2), (2, 3), (3, 4), (5, 5)])
    assert to_parity_table(p).columns == (2, 5)
    assert to_parity_table(PhasePolynomial(2, 2, [(1, 2), (3, 6)])).m == 0


def test_ccz_tensor_is_distinct_indices():
    t = signature_tensor(to_parity_table(extract(Circuit(3, ccz_gates(0, 1, 2)))), 3)
    for idx in combinations_with_replacement(range(3), 3):
        assert t[idx] == int(len(set(idx)) == 3)
    assert signature_tensor(ParityTable(3, ()), 3).is_zero()


@given(st.integers(1, 6), st.integers(0, 12), st.integers(1, 4), st.integers(0, 10**6))
def test_tensor_matches_popcount_oracle(n, m, order, seed):
    cols = random_columns(random.Random(seed), n, m)
    t = signature_tensor(ParityTable(n, cols), order)
    assert set(t.ones) == table_tensor_ones(n, cols, order)


def test_cancel_pairs_and_concat():
    assert cancel_pairs([3, 5, 3, 0, 6, 6, 6]) == [5, 6]
    t = concat(ParityTable(2, (1, 2)), ParityTable(2, (3,)))
    assert t.columns == (1, 2, 3)


@pytest.mark.parametrize("size, d, expected", [
    (1, 2, {1: 1}),
    (2, 2, {1: 1, 2: 6}),
    (3, 2, {1: 1, 2: 6, 3: 4}),
    (4, 2, {1: 1, 2: 6, 3: 4}),
    (3, 1, {1: 1, 2: 2}),
])
def test_expand_parity(size, d, expected):
    assert expand_parity(size, 1, d) == expected


def test_two_xy_identity():
    # 2xy = x + y + 7 (x xor y) mod 8
    coeffs = monomial_coefficients([(1, 1), (2, 1), (3, 7)], 2)
    assert coeffs == {0b11: 2}


@given(st.integers(1, 5), st.integers(0, 10), st.sampled_from([1, 2, 3]), st.integers(0, 10**6))
def test_monomials_evaluate_like_parities(n, m, d, seed):
    rng = random.Random(seed)
    mod = 1 << (d + 1)
    terms = [(y, rng.randrange(mod)) for y in random_columns(rng, n, m)]
    coeffs = monomial_coefficients(terms, d)
    p = PhasePolynomial(n, d, terms)
    for x in range(1 << n):
        value = sum(c for mask, c in coeffs.items() if mask & x == mask) % mod
        assert value == brute_phase(p, x)


def test_residue_of_unchanged_odd_part():
    p = PhasePolynomial(3, 2, [(1, 3), (6, 2), (5, 1)])
    r = clifford_residue(p, to_parity_table(p))
    assert sorted(r.terms) == [(1, 2), (6, 2)]


def test_residue_zero_for_same_table():
    table = to_parity_table(extract(Circuit(3, ccz_gates(0, 1, 2))))
    assert clifford_residue(table_polynomial(table), table).terms == []


def test_residue_refuses_tensor_mismatch():
    p = PhasePolynomial(3, 2, CCZ_TERMS)
    with pytest.raises(TensorMismatch):
        clifford_residue(p, ParityTable(3, (1, 2, 4)))


@pytest.mark.parametrize("seed", range(20))
def test_residue_after_tohpe_restores_phase(seed):
    rng = random.Random(seed)
    n = 4
    p = PhasePolynomial(n, 2, [(y, rng.randrange(8)) for y in random_columns(rng, n, 12)])
    opt, _ = tohpe(to_parity_table(p))
    r = clifford_residue(p, opt)
    assert all(a % 2 == 0 for _, a in r.terms)
    rebuilt = PhasePolynomial(n, 2, [(y, 1) for y in opt.columns] + r.terms)
    assert all(brute_phase(rebuilt, x) == brute_phase(p, x) for x in range(1 << n))


def test_synthesize_ccz_is_ccz():
    c = synthesize(PhasePolynomial(3, 2, CCZ_TERMS))
    assert equal_up_to_phase(dense_unitary(c), dense_unitary(Circuit(3, [Gate("CCZ", (0, 1, 2))])))
    assert synthesize(PhasePolynomial(2, 2)).gates == []


@pytest.mark.parametrize("seed", range(25))
def test_extract_synthesize_roundtrip(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    c = random_circuit(rng, n, rng.randint(0, 40))
    p = extract(c)
    out = synthesize(p)
    assert phase_equal(c, out)
    again = extract(out)
    assert again.linear == p.linear and again.affine == p.affine


def test_synthesize_random_polynomial_five_qubits():
    rng = random.Random(7)
    p = PhasePolynomial(5, 2, [(rng.randrange(1, 32), rng.randrange(8)) for _ in range(20)],
                        [1, 3, 4, 12, 17], 0b10010)
    q = extract(synthesize(p))
    for x in range(32):
        assert (p.evaluate(x) - q.evaluate(x) - p.evaluate(0) + q.evaluate(0)) % 8 == 0
        assert p.output(x) == q.output(x)


def test_higher_level_terms():
    p = PhasePolynomial(2, 3, [(1, 1), (3, 5)])
    c = synthesize(p)
    assert phase_equal(c, synthesize(p), 3)
    assert extract(c, 3).terms == [(1, 1), (3, 5)]


def test_polynomial_validation():
    with pytest.raises(ValueError):
        PhasePolynomial(2, 2, [(4, 1)])
    with pytest.raises(ValueError):
        PhasePolynomial(2, 2, [], [1, 1])


def test_table_text_roundtrip():
    p = PhasePolynomial(3, 2, CCZ_TERMS)
    text = format_table(p)
    assert text.splitlines()[0] == "3 7 2"
    back = parse_table(text)
    assert back.terms == p.terms and back.n == 3


def test_table_text_defaults_and_errors():
    p = parse_table("2 2 2\n10\n11\n")
    assert p.terms == [(3, 1), (2, 1)]
    for bad in ["", "x y\n", "2 2 2\n10\n", "1 2 2\n1x\n", "1 2 2\n11\n1\n"]:
        with pytest.raises(ValueError):
            parse_table(bad)


def test_tensor_oracle_agrees_with_signature():
    rng = random.Random(3)
    cols = random_columns(rng, 4, 9)
    other = ParityTable(4, tuple(cancel_pairs(cols + [5, 5])))
    assert tensors_equal(ParityTable(4, cols), other, 3)
