"""Brute-force oracles.

Nothing here imports the tensor, polynomial or optimizer code it is meant to
check: tensors are recomputed by counting the columns that cover each index
set, phases by stepping through the gate list one basis state at a time.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Sequence

import numpy as np

from .circuit import Circuit, Gate

DENSE_LIMIT = 6
PHASE_LIMIT = 20


def _columns(table) -> list[int]:
    return list(getattr(table, "columns", table))


def _tensor_entries(n: int, columns: Sequence[int], order: int) -> dict[tuple[int, ...], int]:
    out = {}
    for idx in combinations_with_replacement(range(n), order):
        want = 0
        for a in idx:
            want |= 1 << a
        count = sum(1 for col in columns if col & want == want)
        out[idx] = count % 2
    return out


def tensors_equal(p, q, order: int, n: int | None = None) -> bool:
    """Entrywise comparison of the order-k signature tensors of two parity tables."""
    if n is None:
        n = p.n
        if getattr(q, "n", n) != n:
            raise ValueError("tables have different row counts")
    return _tensor_entries(n, _columns(p), order) == _tensor_entries(n, _columns(q), order)


# ---------------------------------------------------------------------------
# classical phase evaluation

_PHASE_EIGHTHS = {"Z": (1, 0), "S": (1, 1), "Sdg": (3, 1), "T": (1, 2), "Tdg": (7, 2)}


def _run_basis_state(c: Circuit, x: int, d: int) -> tuple[int, int]:
    """Return (phase in units of pi/2^d mod 2^(d+1), output basis state)."""
    mod = 1 << (d + 1)
    half = 1 << d
    phase = 0
    state = x
    for g in c.gates:
        if g.control is not None:
            raise ValueError("classically controlled gate")
        bit = [(state >> w) & 1 for w in g.wires]
        kind = g.kind
        if kind == "CNOT":
            if bit[0]:
                state ^= 1 << g.wires[1]
        elif kind == "X":
            state ^= 1 << g.wires[0]
        elif kind in ("CZ", "CCZ"):
            if all(bit):
                phase += half
        elif kind == "H":
            raise ValueError("phase_equal needs Hadamard-free circuits")
        else:
            k, level = (g.k, g.d) if kind == "RZ" else _PHASE_EIGHTHS[kind]
            if bit[0]:
                if level > d:
                    if k % (1 << (level - d)):
                        raise ValueError("rotation finer than the requested level")
                    phase += k >> (level - d)
                else:
                    phase += k << (d - level)
    return phase % mod, state


def phase_function(c: Circuit, d: int = 2) -> list[tuple[int, int]]:
    n = c.n_wires
    if n > PHASE_LIMIT:
        raise ValueError(f"phase evaluation limited to {PHASE_LIMIT} wires")
    return [_run_basis_state(c, x, d) for x in range(1 << n)]


def phase_equal(c1: Circuit, c2: Circuit, d: int = 2, up_to_global_phase: bool = True) -> bool:
    """Same basis-state permutation and same phase function (optionally up to a constant)."""
    if c1.n_wires != c2.n_wires:
        return False
    f1 = phase_function(c1, d)
    f2 = phase_function(c2, d)
    mod = 1 << (d + 1)
    offset = (f1[0][0] - f2[0][0]) % mod if up_to_global_phase else 0
    return all(o1 == o2 and (p1 - p2 - offset) % mod == 0
               for (p1, o1), (p2, o2) in zip(f1, f2))


# ---------------------------------------------------------------------------
# exhaustive minimum column count

def minimal_columns(tensor, max_m: int = 8) -> int | None:
    """Fewest parity-table columns reproducing a signature tensor exactly.

    ``tensor`` needs ``n``, ``order`` and ``ones`` (the sorted index tuples
    whose entry is 1).  Returns ``None`` when more than ``max_m`` columns
    would be needed.  A table's tensor is the XOR of its columns' individual
    tensors, so this is a meet-in-the-middle search over XOR sums of the
    per-vector signatures.
    """
    n, order = tensor.n, tensor.order
    index, reach = _signature_sums(n, order, (max_m + 1) // 2)
    goal = 0
    for idx in tensor.ones:
        goal |= 1 << index[tuple(sorted(idx))]
    half = len(reach) - 1
    for m in range(max_m + 1):
        i = min(m, half)
        j = m - i
        small, big = (reach[i], reach[j]) if len(reach[i]) <= len(reach[j]) else (reach[j], reach[i])
        if any(goal ^ s in big for s in small):
            return m
    return None


@lru_cache(maxsize=16)
def _signature_sums(n: int, order: int, depth: int):
    index = {idx: i for i, idx in enumerate(combinations_with_replacement(range(n), order))}
    sigs = []
    for v in range(1, 1 << n):
        s = 0
        for idx, pos in index.items():
            if all((v >> a) & 1 for a in idx):
                s |= 1 << pos
        sigs.append(s)
    # reach[k]: XOR sums of at most k signatures
    reach = [frozenset({0})]
    for _ in range(depth):
        prev = reach[-1]
        nxt = set(prev)
        for s in prev:
            for t in sigs:
                nxt.add(s ^ t)
        reach.append(frozenset(nxt))
    return index, reach


def table_tensor_ones(n: int, columns: Sequence[int], order: int) -> set[tuple[int, ...]]:
    return {k for k, v in _tensor_entries(n, columns, order).items() if v}


# ---------------------------------------------------------------------------
# dense unitaries

_SQ2 = 1 / np.sqrt(2)


def _single(g: Gate) -> np.ndarray:
    kind = g.kind
    if kind == "H":
        return np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex)
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    k, level = (g.k, g.d) if kind == "RZ" else _PHASE_EIGHTHS[kind]
    return np.diag([1, np.exp(1j * np.pi * k / 2 ** level)])


def dense_unitary(c: Circuit) -> np.ndarray:
    """Matrix of the circuit; basis index bit i is wire i."""
    n = c.n_wires
    if n > DENSE_LIMIT:
        raise ValueError(f"dense simulation limited to {DENSE_LIMIT} wires")
    dim = 1 << n
    u = np.eye(dim, dtype=complex)
    idx = np.arange(dim)
    for g in c.gates:
        if g.control is not None:
            raise ValueError("classically controlled gate")
        if g.kind == "CNOT":
            a, b = g.wires
            perm = np.where((idx >> a) & 1, idx ^ (1 << b), idx)
            u = u[perm, :]
        elif g.kind in ("CZ", "CCZ"):
            hit = np.ones(dim, dtype=bool)
            for w in g.wires:
                hit &= ((idx >> w) & 1).astype(bool)
            u = np.where(hit[:, None], -u, u)
        else:
            w = g.wires[0]
            m = _single(g)
            low = (idx >> w) & 1 == 0
            rows0 = idx[low]
            rows1 = rows0 | (1 << w)
            r0, r1 = u[rows0, :].copy(), u[rows1, :].copy()
            u[rows0, :] = m[0, 0] * r0 + m[0, 1] * r1
            u[rows1, :] = m[1, 0] * r0 + m[1, 1] * r1
    return u


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-10) -> bool:
    if u.shape != v.shape:
        return False
    flat = np.argmax(np.abs(v))
    pos = np.unravel_index(flat, v.shape)
    if abs(v[pos]) < tol:
        return np.allclose(u, v, atol=tol)
    ratio = u[pos] / v[pos]
    if abs(abs(ratio) - 1) > tol:
        return False
    return bool(np.allclose(u, ratio * v, atol=tol))
