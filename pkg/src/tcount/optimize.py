"""T-count optimizers working on parity tables.

Every optimizer rewrites a table ``P`` (n qubits x m odd-weight parities) into
a table with the same order-(d+1) signature tensor and, ideally, fewer
columns.  The basic move replaces ``P`` by ``P xor z y^T`` (appending ``z``
when ``|y|`` is odd) and then cancels equal columns in pairs.
"""

from __future__ import annotations

import logging
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Callable, Sequence

from .bitlin import BitMatrix, inverse, lex_rank, nullspace
from .phasepoly import ParityTable, cancel_pairs, concat

log = logging.getLogger(__name__)

SUPPORTED_FAST_LEVELS = (1, 2, 3)


@dataclass(frozen=True)
class ReductionMove:
    z: int
    y: int
    score: int


@dataclass
class OptimizeReport:
    method: str
    initial: int
    final: int
    iterations: int = 0
    seconds: float = 0.0
    fixpoint: bool = True

    def to_text(self) -> str:
        lines = [
            f"method={self.method}",
            f"initial={self.initial}",
            f"final={self.final}",
            f"iterations={self.iterations}",
            f"seconds={self.seconds:.6f}",
            f"fixpoint={str(self.fixpoint).lower()}",
        ]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# moves and the objective

def apply_move(p: ParityTable, z: int, y: int) -> ParityTable:
    """``P xor z y^T``, plus column ``z`` when ``|y|`` is odd, with pairs cancelled."""
    return p.with_columns(_moved_columns(p.columns, z, y))


def _moved_columns(columns: Sequence[int], z: int, y: int) -> list[int]:
    cols = [c ^ z if (y >> i) & 1 else c for i, c in enumerate(columns)]
    if y.bit_count() & 1:
        cols.append(z)
    return cancel_pairs(cols)


def move_score(columns: Sequence[int], z: int, y: int) -> int:
    """Objective of a move: columns removed minus the column appended for odd ``|y|``.

    Pairs {i, j} with P_i xor P_j = z score 2 when y_i != y_j; a column equal to
    z scores 1 if y_i = 1 (it becomes zero) or 2 if y_i = 0 and ``|y|`` is odd
    (it cancels against the appended copy).
    """
    odd = y.bit_count() & 1
    position = {c: i for i, c in enumerate(columns)}
    score = -odd
    for i, c in enumerate(columns):
        partner = c ^ z
        yi = (y >> i) & 1
        if partner == 0:
            score += yi + 2 * (1 - yi) * odd
        else:
            j = position.get(partner)
            if j is not None and j > i:
                score += 2 * (yi ^ ((y >> j) & 1))
    return score


def _pairs_by_z(columns: Sequence[int]) -> dict[int, list[tuple[int, int]]]:
    """Candidate set Z, each with its pairs; a single column i appears as (i, -1)."""
    groups: dict[int, list[tuple[int, int]]] = {}
    for i, c in enumerate(columns):
        groups.setdefault(c, []).append((i, -1))
    for i, j in combinations(range(len(columns)), 2):
        groups.setdefault(columns[i] ^ columns[j], []).append((i, j))
    return groups


def _score_from_pairs(pairs: list[tuple[int, int]], y: int) -> int:
    odd = y.bit_count() & 1
    score = -odd
    for i, j in pairs:
        yi = (y >> i) & 1
        if j < 0:
            score += yi + 2 * (1 - yi) * odd
        else:
            score += 2 * (yi ^ ((y >> j) & 1))
    return score


def _best_z_for(columns: Sequence[int], y: int, n: int) -> ReductionMove:
    """Argmax over Z of the objective for fixed y, ties to the lexicographically smallest z."""
    odd = y.bit_count() & 1
    gain: dict[int, int] = {}
    for i, c in enumerate(columns):
        yi = (y >> i) & 1
        gain[c] = gain.get(c, 0) + yi + 2 * (1 - yi) * odd
    for i, j in combinations(range(len(columns)), 2):
        if ((y >> i) ^ (y >> j)) & 1:
            z = columns[i] ^ columns[j]
            gain[z] = gain.get(z, 0) + 2
    best = max(gain.items(), key=lambda kv: (kv[1], -lex_rank(kv[0], n)))
    return ReductionMove(best[0], y, best[1] - odd)


def _admissible(y: int, m: int) -> bool:
    full = (1 << m) - 1
    return y != 0 and (y != full or m % 2 == 0)


# ---------------------------------------------------------------------------
# wedge products

def _index_sets(n: int, d: int) -> list[tuple[int, ...]]:
    """Strictly increasing index tuples of size 1..d in (size, lexicographic) order."""
    return [t for k in range(1, d + 1) for t in combinations(range(n), k)]


def wedge_rows(p: ParityTable, d: int) -> list[int]:
    """Rows of L: the AND of every set of 1..d distinct rows of P."""
    out = []
    full = (1 << p.m) - 1
    for idx in _index_sets(p.n, d):
        acc = full
        for a in idx:
            acc &= p.rows[a]
        out.append(acc)
    return out


def fixpoint_certificate(p: ParityTable, d: int = 2) -> bool:
    """True when no admissible y solves L y = 0 (the d-TOHPE stopping condition)."""
    if p.m == 0:
        return True
    basis = nullspace(BitMatrix(wedge_rows(p, d), p.m))
    return not any(_admissible(v, p.m) for v in _span_candidates(basis))


def _span_candidates(basis: list[int]):
    yield from basis
    for a, b in combinations(basis, 2):
        yield a ^ b


# ---------------------------------------------------------------------------
# row reduction

def _row_reduced(p: ParityTable, run: Callable[[ParityTable], ParityTable]) -> ParityTable:
    """Run ``run`` on a table whose rows are linearly independent.

    Dependent rows are zeroed by an invertible change of basis B and dropped;
    the optimized columns are mapped back through B^-1.  Moves commute with
    the basis change, so the signature tensor is preserved.
    """
    n, m = p.n, p.m
    rows = list(p.rows)
    transform = [1 << i for i in range(n)]
    r = 0
    for col in range(m):
        bit = 1 << col
        sel = next((i for i in range(r, n) if rows[i] & bit), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        transform[r], transform[sel] = transform[sel], transform[r]
        for i in range(n):
            if i != r and rows[i] & bit:
                rows[i] ^= rows[r]
                transform[i] ^= transform[r]
        r += 1
        if r == n:
            break
    if r == n:
        return run(p)
    reduced = ParityTable.from_rows(rows[:r], m, p.d)
    out = run(reduced)
    back = inverse(BitMatrix(transform, n))
    return p.with_columns(back.mul_vec(c) for c in out.columns)


def _timed(method: str, p: ParityTable, body: Callable[[ParityTable], tuple[ParityTable, int, bool]],
           d: int) -> tuple[ParityTable, OptimizeReport]:
    start = time.perf_counter()
    state = {"iterations": 0, "fixpoint": True}

    def run(q: ParityTable) -> ParityTable:
        out, iters, fix = body(q)
        state["iterations"] += iters
        state["fixpoint"] = state["fixpoint"] and fix
        return out

    table = p.with_level(d).normalized()
    result = _row_reduced(table, run) if table.m else table
    report = OptimizeReport(method, p.m, result.m, state["iterations"],
                            time.perf_counter() - start, state["fixpoint"])
    return result, report


def _iteration_cap(m: int) -> int:
    return 10 * max(m, 1)


_limits = threading.local()


@contextmanager
def time_limit(seconds: float | None):
    """Make optimizer loops stop early (keeping their best table) after ``seconds``."""
    previous = getattr(_limits, "deadline", None)
    _limits.deadline = None if seconds is None else time.perf_counter() + seconds
    try:
        yield
    finally:
        _limits.deadline = previous


def _expired() -> bool:
    deadline = getattr(_limits, "deadline", None)
    return deadline is not None and time.perf_counter() > deadline


# ---------------------------------------------------------------------------
# TOHPE and its order-d generalization

def _tohpe_loop(p: ParityTable, d: int) -> tuple[ParityTable, int, bool]:
    cols = list(p.columns)
    n = p.n
    cap = _iteration_cap(len(cols))
    for it in range(cap):
        m = len(cols)
        if m == 0:
            return p.with_columns(cols), it, True
        if _expired():
            return p.with_columns(cols), it, False
        table = p.with_columns(cols)
        basis = nullspace(BitMatrix(wedge_rows(table, d), m))
        y = next((v for v in _span_candidates(basis) if _admissible(v, m)), None)
        if y is None:
            return table, it, True
        move = _best_z_for(cols, y, n)
        new = _moved_columns(cols, move.z, y)
        if len(new) >= m:
            log.warning("tohpe: move did not reduce the column count; stopping")
            return table, it, False
        cols = new
    log.warning("tohpe: iteration cap %d reached", cap)
    return p.with_columns(cols), cap, False


def d_tohpe(p: ParityTable, d: int) -> tuple[ParityTable, OptimizeReport]:
    """Eliminate columns while preserving the order-(d+1) signature tensor.

    At the fixpoint the column count is at most 2*floor(sum_{i=1..d} C(n,i)/2) + 1.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    return _timed(f"d-tohpe(d={d})", p, lambda q: _tohpe_loop(q, d), d)


def tohpe(p: ParityTable) -> tuple[ParityTable, OptimizeReport]:
    out, report = d_tohpe(p, 2)
    report.method = "tohpe"
    return out, report


def d_tohpe_bound(n: int, d: int) -> int:
    return 2 * (sum(comb(n, i) for i in range(1, d + 1)) // 2) + 1


# ---------------------------------------------------------------------------
# TODD

def _todd_matrix(table: ParityTable, z: int) -> list[int]:
    rows = list(table.rows)
    n = table.n
    for a, b, c in combinations(range(n), 3):
        acc = 0
        if (z >> a) & 1:
            acc ^= rows[b] & rows[c]
        if (z >> b) & 1:
            acc ^= rows[a] & rows[c]
        if (z >> c) & 1:
            acc ^= rows[a] & rows[b]
        rows.append(acc)
    return rows


def _todd_loop(p: ParityTable) -> tuple[ParityTable, int, bool]:
    cols = list(p.columns)
    cap = _iteration_cap(len(cols))
    for it in range(cap):
        table = p.with_columns(cols)
        m = len(cols)
        if _expired():
            return table, it, False
        found = None
        for i, j in combinations(range(m), 2):
            z = cols[i] ^ cols[j]
            basis = nullspace(BitMatrix(_todd_matrix(table, z), m))
            y = next((v for v in basis if ((v >> i) ^ (v >> j)) & 1), None)
            if y is not None:
                found = (z, y)
                break
        if found is None:
            return table, it, True
        new = _moved_columns(cols, *found)
        if len(new) >= m:
            return table, it, False
        cols = new
    return p.with_columns(cols), cap, False


def todd(p: ParityTable) -> tuple[ParityTable, OptimizeReport]:
    """Baseline duplicate-and-destroy search over z = P_i xor P_j."""
    return _timed("todd", p, _todd_loop, 2)


# ---------------------------------------------------------------------------
# kernel with offset

class _ColumnEchelon:
    """Fully reduced basis of the column space of L with preimages.

    ``kernel`` collects one vector per column of L that reduced to zero.
    """

    def __init__(self, columns: Sequence[int]):
        self.vec: dict[int, int] = {}
        self.pre: dict[int, int] = {}
        self.mask = 0
        self.kernel: list[int] = []
        for j, col in enumerate(columns):
            r, pre = self.reduce(col, 1 << j)
            if not r:
                self.kernel.append(pre)
                continue
            piv = r & -r
            for p in list(self.vec):
                if self.vec[p] & piv:
                    self.vec[p] ^= r
                    self.pre[p] ^= pre
            self.vec[piv] = r
            self.pre[piv] = pre
            self.mask |= piv

    def reduce(self, v: int, pre: int = 0) -> tuple[int, int]:
        hits = v & self.mask
        while hits:
            piv = hits & -hits
            hits ^= piv
            v ^= self.vec[piv]
            pre ^= self.pre[piv]
        return v, pre


def _offset_generators(ech: _ColumnEchelon, x_cols: Sequence[int], v: int) -> list[tuple[int, int, int]]:
    """Solutions (y, y', b) of L y = X y' + b v beyond ker L, one per dependency."""
    basis: dict[int, tuple[int, int, int, int]] = {}
    out = []
    items = [(c, 1 << l, 0) for l, c in enumerate(x_cols)] + [(v, 0, 1)]
    for col, yp, b in items:
        r, y = ech.reduce(col)
        while r:
            piv = r & -r
            if piv not in basis:
                basis[piv] = (r, y, yp, b)
                break
            br, by, byp, bb = basis[piv]
            r ^= br
            y ^= by
            yp ^= byp
            b ^= bb
        else:
            out.append((y, yp, b))
    return out


def kernel_with_offset(l_mat: BitMatrix, x_mat: BitMatrix, v: int) -> list[tuple[int, int, int]]:
    """Generators of {y : L y xor X y' xor b v = 0 for some y', b}, with witnesses.

    Each entry is ``(y, y', b)``; the y parts span the projection of the joint
    kernel onto the y block.
    """
    ech = _ColumnEchelon([l_mat.column(j) for j in range(l_mat.n_cols)])
    gens = [(y, 0, 0) for y in ech.kernel]
    x_cols = [x_mat.column(j) for j in range(x_mat.n_cols)]
    return gens + _offset_generators(ech, x_cols, v)


# ---------------------------------------------------------------------------
# FastTODD and its order-d generalization

class _OffsetSystem:
    """Row labels of L and the z-dependent X, v of the order-d admissibility test."""

    def __init__(self, n: int, d: int):
        self.n = n
        self.d = d
        self.labels = _index_sets(n, d)
        self.row_of = {t: i for i, t in enumerate(self.labels)}
        # X columns are labelled by tuples T of size 1..d-1; row S strictly
        # containing T holds the product of z over S \ T.  Keeping only
        # |S \ T| = 1 is not enough once d >= 3.
        self.x_labels = _index_sets(n, d - 1) if d >= 2 else []
        self.extensions = []
        for t in self.x_labels:
            ext = []
            t_set = set(t)
            for s in self.labels:
                if len(s) > len(t) and t_set.issubset(s):
                    need = sum(1 << a for a in s if a not in t_set)
                    ext.append((need, 1 << self.row_of[s]))
            self.extensions.append(ext)
        self.subset_bits = [(sum(1 << a for a in t), 1 << i) for i, t in enumerate(self.labels)]

    def l_columns(self, columns: Sequence[int]) -> list[int]:
        out = []
        for c in columns:
            acc = 0
            for mask, bit in self.subset_bits:
                if c & mask == mask:
                    acc |= bit
            out.append(acc)
        return out

    def offset(self, z: int) -> tuple[list[int], int]:
        x_cols = []
        for ext in self.extensions:
            acc = 0
            for need, bit in ext:
                if z & need == need:
                    acc |= bit
            x_cols.append(acc)
        v = 0
        for mask, bit in self.subset_bits:
            if z & mask == mask:
                v |= bit
        return x_cols, v


def _fast_todd_step(cols: list[int], n: int, system: _OffsetSystem) -> ReductionMove | None:
    m = len(cols)
    ech = _ColumnEchelon(system.l_columns(cols))
    best_key = None
    best = None
    for z, pairs in _pairs_by_z(cols).items():
        x_cols, v = system.offset(z)
        gens = [y for y in ech.kernel]
        gens += [y for y, _, _ in _offset_generators(ech, x_cols, v)]
        for y in gens:
            if not y:
                continue
            score = _score_from_pairs(pairs, y)
            if score <= 0 or (best is not None and score < best.score):
                continue
            key = (-score, y.bit_count(), lex_rank(y, m), lex_rank(z, n))
            if best_key is None or key < best_key:
                best_key = key
                best = ReductionMove(z, y, score)
    return best


def _fast_todd_loop(p: ParityTable, d: int) -> tuple[ParityTable, int, bool]:
    system = _OffsetSystem(p.n, d)
    table, iters, fix = _tohpe_loop(p, d)
    cols = list(table.columns)
    cap = _iteration_cap(p.m)
    while iters < cap:
        if _expired():
            return p.with_columns(cols), iters, False
        move = _fast_todd_step(cols, p.n, system) if cols else None
        if move is None:
            return p.with_columns(cols), iters, fix
        new = _moved_columns(cols, move.z, move.y)
        iters += 1
        if len(new) >= len(cols):
            return p.with_columns(cols), iters, fix
        table, more, fix = _tohpe_loop(p.with_columns(new), d)
        iters += more
        cols = list(table.columns)
    log.warning("fast_todd: iteration cap %d reached", cap)
    return p.with_columns(cols), iters, False


def d_fast_todd(p: ParityTable, d: int) -> tuple[ParityTable, OptimizeReport]:
    if d not in SUPPORTED_FAST_LEVELS:
        raise ValueError(f"d_fast_todd supports d in {SUPPORTED_FAST_LEVELS}, got {d}")
    return _timed(f"d-fasttodd(d={d})", p, lambda q: _fast_todd_loop(q, d), d)


def fast_todd(p: ParityTable) -> tuple[ParityTable, OptimizeReport]:
    out, report = d_fast_todd(p, 2)
    report.method = "fasttodd"
    return out, report


# ---------------------------------------------------------------------------
# Hadamard-bounded optimization

def _drop_row(c: int, row: int) -> int:
    low = c & ((1 << row) - 1)
    return low | ((c >> (row + 1)) << row)


def _insert_row(c: int, row: int, bit: int) -> int:
    low = c & ((1 << row) - 1)
    return low | (bit << row) | ((c >> row) << (row + 1))


def peel_qubit(p: ParityTable, qubit: int, d: int) -> tuple[ParityTable, ParityTable]:
    """Split P into (P_rest, P_qubit) with tensor(P) = tensor(P_rest) xor tensor(P_qubit).

    ``P_rest`` has row ``qubit`` equal to zero, so its diagonal gate commutes
    with a Hadamard on that qubit.  ``P_qubit`` has row ``qubit`` all ones and
    at most sum_{i<d} C(n-1, i) + 1 columns.
    """
    if d < 1:
        raise ValueError("peeling needs d >= 1")
    n = p.n
    bit = 1 << qubit
    sub = ParityTable(n - 1, tuple(_drop_row(c, qubit) for c in p.columns if c & bit), d - 1)
    reduced, _ = d_tohpe(sub, d - 1)
    cols = list(reduced.columns)
    if len(cols) % 2 != p.rows[qubit].bit_count() % 2:
        cols.append(0)
    kept = ParityTable(n, tuple(_insert_row(c, qubit, 1) for c in cols), p.d)
    rest = [c & ~bit for c in p.columns + kept.columns]
    return p.with_columns(cancel_pairs(rest)), kept


def bounded_bound(n: int, h: int, d: int) -> int:
    return (sum(comb(n, i) for i in range(d + 1))
            + h * (sum(comb(n - 1, i) for i in range(d)) + 1))


def bounded_optimize(segments: Sequence[ParityTable], h_positions: Sequence[tuple[int, int]],
                     d: int) -> list[ParityTable]:
    """Optimize diagonal segments separated by single Hadamards.

    ``segments`` are in time order and expressed in a common qubit frame;
    ``h_positions`` lists (qubit, k) meaning a Hadamard on ``qubit`` right
    after ``segments[k]``.  Each segment keeps only the part of its table that
    touches the following Hadamard's qubit; the rest is pushed forward, and
    the last segment is reduced with d-TOHPE.
    """
    h = len(segments) - 1
    order = sorted(h_positions, key=lambda qp: qp[1])
    if [k for _, k in order] != list(range(h)):
        raise ValueError("expected exactly one Hadamard between consecutive segments")
    out = []
    carry: ParityTable | None = None
    for (qubit, k) in order:
        merged = segments[k] if carry is None else concat(segments[k], carry)
        moved, kept = peel_qubit(merged.with_level(d).normalized(), qubit, d)
        out.append(kept)
        carry = moved
    last = segments[h] if carry is None else concat(segments[h], carry)
    final, _ = d_tohpe(last.normalized(), d)
    out.append(final)
    return out


METHODS = {
    "tohpe": lambda p, d: tohpe(p),
    "todd": lambda p, d: todd(p),
    "fasttodd": lambda p, d: fast_todd(p),
    "d-tohpe": d_tohpe,
    "d-fasttodd": d_fast_todd,
}
