"""Circuit-level optimization: split, extract, optimize, resynthesize.

A circuit is cut into a Clifford prefix, a core holding every non-Clifford
gate, and a Clifford suffix.  The core's phase polynomial is reduced to its
odd-weight parity table, optimized, and the even-weight difference between
the original and optimized polynomials (a Clifford residue) is added back
before resynthesis.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .bitlin import BitMatrix, inverse
from .circuit import Circuit, Gate, decompose_ccz, t_count
from .gadget import _split_points, defer_corrections, gadgetize
from .optimize import METHODS, OptimizeReport, bounded_bound, d_tohpe, peel_qubit
from .phasepoly import (
    ParityTable,
    PhasePolynomial,
    clifford_residue,
    extract,
    synthesize,
    to_parity_table,
)
from .verify import DENSE_LIMIT, PHASE_LIMIT, dense_unitary, equal_up_to_phase, phase_equal, tensors_equal


class PipelineError(ValueError):
    """The input cannot be handled by the requested method."""


@dataclass
class PipelineResult:
    circuit: Circuit
    report: OptimizeReport
    t_before: int
    t_after: int
    n_gadgets: int = 0
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return all(self.checks.values())


# Level-2 methods and the order-d method that replaces them at other levels.
_LEVEL_TWO_ONLY = {"tohpe": "d-tohpe", "fasttodd": "d-fasttodd", "todd": None}


def optimize_polynomial(poly: PhasePolynomial, method: str) -> tuple[PhasePolynomial, ParityTable, OptimizeReport]:
    """Optimize the odd part of ``poly`` and add back the Clifford residue."""
    if method not in METHODS:
        raise PipelineError(f"unknown method {method!r}")
    if poly.d != 2 and method in _LEVEL_TWO_ONLY:
        if _LEVEL_TWO_ONLY[method] is None:
            raise PipelineError(f"method {method!r} only handles T-level (d=2) rotations")
        method = _LEVEL_TWO_ONLY[method]
    table = to_parity_table(poly)
    opt, report = METHODS[method](table, poly.d)
    residue = clifford_residue(poly, opt)
    terms = [(y, 1) for y in opt.columns] + list(residue.terms)
    out = PhasePolynomial(poly.n, poly.d, terms, list(poly.linear), poly.affine, poly.constant)
    return out, opt, report


def _hadamard_free_split(c: Circuit) -> tuple[list[Gate], list[Gate], list[Gate]]:
    lo, hi = _split_points(c)
    core = c.gates[lo:hi]
    if any(g.kind == "H" for g in core):
        raise PipelineError("circuit has internal Hadamard gates; use --gadgetize or method 'bounded'")
    return c.gates[:lo], core, c.gates[hi:]


def optimize_circuit(c: Circuit, method: str, d: int = 2, use_gadgets: bool = False,
                     verify: bool = False) -> PipelineResult:
    if method == "bounded":
        if use_gadgets:
            raise PipelineError("method 'bounded' works without ancillas and refuses --gadgetize")
        return bounded_circuit(c, d, verify)
    t_before = t_count(decompose_ccz(c), d)
    corrections: list[Gate] = []
    n_gadgets = 0
    if use_gadgets:
        g = defer_corrections(gadgetize(c))
        shell = g.core
        pre, core, post = g.pre.gates, g.core.gates, g.post.gates
        corrections = g.corrections
        n_gadgets = g.n_gadgets
    else:
        shell = c
        pre, core, post = _hadamard_free_split(c)
    core_circuit = shell.copy(list(core))
    poly = extract(core_circuit, d)
    new_poly, opt, report = optimize_polynomial(poly, method)
    body = synthesize(new_poly, shell.names, shell.n_qubits)
    out = shell.copy(list(pre) + body.gates + corrections + list(post))
    result = PipelineResult(out, report, t_before, t_count(out, d), n_gadgets)
    if verify:
        result.checks["tensor"] = tensors_equal(to_parity_table(poly), opt, d + 1)
        if core_circuit.n_wires <= PHASE_LIMIT:
            result.checks["phase"] = phase_equal(core_circuit, body, d)
    return result


def optimize_table(poly: PhasePolynomial, method: str, verify: bool = False) -> tuple[Circuit, PipelineResult]:
    """Optimize a parity table given as a polynomial and synthesize it."""
    t_before = sum(1 for _, a in poly.terms if a & 1)
    new_poly, opt, report = optimize_polynomial(poly, method)
    circ = synthesize(new_poly)
    result = PipelineResult(circ, report, t_before, opt.m)
    if verify:
        result.checks["tensor"] = tensors_equal(to_parity_table(poly), opt, poly.d + 1)
    return circ, result


# ---------------------------------------------------------------------------
# Hadamard-bounded optimization without ancillas

@dataclass
class _Segment:
    linear: list[int]
    affine: int
    terms: list[tuple[int, int]]  # phase on output-frame parities


def _segment(gates: list[Gate], n: int, d: int) -> _Segment:
    """Hadamard-free gates as (affine map, then a diagonal in the output frame)."""
    poly = extract(Circuit(n, list(gates)), d)
    back = inverse(BitMatrix(list(poly.linear), n)).transpose()
    mod = poly.modulus
    terms = []
    for y, a in poly.terms:
        z = back.mul_vec(y)
        # y.x = z.(out xor affine); a constant 1 flips the sign
        if (z & poly.affine).bit_count() & 1:
            a = -a % mod
        terms.append((z, a))
    return _Segment(list(poly.linear), poly.affine, terms)


def _through(terms: list[tuple[int, int]], seg: _Segment, n: int, mod: int) -> list[tuple[int, int]]:
    """Re-express diagonal terms across the affine map of the next segment."""
    back = inverse(BitMatrix(list(seg.linear), n)).transpose()
    out = []
    for y, a in terms:
        z = back.mul_vec(y)
        if (z & seg.affine).bit_count() & 1:
            a = -a % mod
        out.append((z, a))
    return out


def _diagonal_gates(n: int, d: int, terms: list[tuple[int, int]]) -> list[Gate]:
    return synthesize(PhasePolynomial(n, d, terms)).gates


def bounded_circuit(c: Circuit, d: int = 2, verify: bool = False) -> PipelineResult:
    """Peel each segment at the following Hadamard's qubit; no ancillas.

    The rotation count is at most sum_{i<=d} C(n,i) + h (sum_{i<d} C(n-1,i) + 1).
    """
    start = time.perf_counter()
    n = c.n_wires
    mod = 1 << (d + 1)
    t_before = t_count(decompose_ccz(c), d)
    lo, hi = _split_points(c)
    pre, middle, post = c.gates[:lo], c.gates[lo:hi], c.gates[hi:]
    pieces: list[list[Gate]] = [[]]
    h_qubits: list[int] = []
    for g in middle:
        if g.kind == "H":
            h_qubits.append(g.wires[0])
            pieces.append([])
        else:
            pieces[-1].append(g)
    segments = [_segment(p, n, d) for p in pieces]
    out_gates: list[Gate] = list(pre)
    carry: list[tuple[int, int]] = []
    total = 0
    for k, seg in enumerate(segments):
        merged_terms = seg.terms + (_through(carry, seg, n, mod) if carry else [])
        poly = PhasePolynomial(n, d, merged_terms).merged()
        table = to_parity_table(poly)
        if k < len(h_qubits):
            rest, kept = peel_qubit(table, h_qubits[k], d)
            columns = list(kept.columns) + list(rest.columns)
            residue = clifford_residue(poly, table.with_columns(columns))
            here = [(y, 1) for y in kept.columns] + list(residue.terms)
            carry = [(y, 1) for y in rest.columns]
            total += kept.m
        else:
            final, _ = d_tohpe(table, d)
            residue = clifford_residue(poly, final)
            here = [(y, 1) for y in final.columns] + list(residue.terms)
            total += final.m
        out_gates += synthesize(PhasePolynomial(n, d, [], seg.linear, seg.affine)).gates
        out_gates += _diagonal_gates(n, d, here)
        if k < len(h_qubits):
            out_gates.append(Gate("H", (h_qubits[k],)))
    out_gates += post
    out = c.copy(out_gates)
    report = OptimizeReport("bounded", t_before, total, len(segments), time.perf_counter() - start)
    result = PipelineResult(out, report, t_before, t_count(out, d))
    if verify:
        result.checks["bound"] = total <= bounded_bound(n, len(h_qubits), d)
        if n <= DENSE_LIMIT:
            result.checks["unitary"] = equal_up_to_phase(dense_unitary(out), dense_unitary(c))
    return result
