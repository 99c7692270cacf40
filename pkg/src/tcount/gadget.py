"""Hadamard gadgetization.

An internal Hadamard on wire ``q`` is traded for a fresh ancilla prepared in
|+>, a CZ between ``q`` and the ancilla, an X-basis measurement of ``q`` and
an X correction on the ancilla conditioned on the outcome.  The logical qubit
continues on the ancilla.  After every internal Hadamard is replaced, the
part of the circuit between the first and last non-Clifford gate is
Hadamard-free and can be handed to the phase-polynomial optimizers.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations

from .bitlin import BitMatrix, iter_bits, solve_particular
from .circuit import Circuit, Gate, is_non_clifford, standard_phase_gates


@dataclass(frozen=True)
class GadgetRecord:
    measured_wire: int
    ancilla: int
    record: int


@dataclass
class GadgetizedCircuit:
    core: Circuit
    pre: Circuit
    post: Circuit
    records: list[GadgetRecord] = field(default_factory=list)
    corrections: list[Gate] = field(default_factory=list)

    @property
    def n_gadgets(self) -> int:
        return len(self.records)

    def full(self) -> Circuit:
        """pre + core + post as one circuit (corrections are kept separately)."""
        return self.core.copy(self.pre.gates + self.core.gates + self.post.gates)


def _split_points(c: Circuit) -> tuple[int, int]:
    """Index ranges [0, lo) for the prefix and [hi, len) for the suffix."""
    gates = c.gates
    hard = [i for i, g in enumerate(gates) if is_non_clifford(g)]
    if not hard:
        # Only Clifford gates: the core is whatever follows the last H.
        lo = max((i + 1 for i, g in enumerate(gates) if g.kind == "H"), default=0)
        return lo, len(gates)
    first, last = hard[0], hard[-1]
    lo = max((i + 1 for i in range(first) if gates[i].kind == "H"), default=0)
    hi = min((i for i in range(last + 1, len(gates)) if gates[i].kind == "H"), default=len(gates))
    return lo, hi


def gadgetize(c: Circuit) -> GadgetizedCircuit:
    """Replace every internal Hadamard by the measurement gadget.

    The core keeps the classically controlled X corrections in place;
    :func:`defer_corrections` moves them out.  Ancillas are appended after the
    original wires in gadget order.
    """
    lo, hi = _split_points(c)
    middle = c.gates[lo:hi]
    n_h = sum(1 for g in middle if g.kind == "H")
    wide = Circuit(c.n_qubits, [], list(c.names), c.n_ancillas)
    ancillas = [wide.add_ancilla() for _ in range(n_h)]
    where = list(range(c.n_wires))

    def moved(g: Gate) -> Gate:
        return replace(g, wires=tuple(where[w] for w in g.wires), tag=None)

    pre = wide.copy([moved(g) for g in c.gates[:lo]] + [Gate("H", (a,)) for a in ancillas])
    core_gates: list[Gate] = []
    records: list[GadgetRecord] = []
    for g in middle:
        if g.kind != "H":
            core_gates.append(moved(g))
            continue
        wire = where[g.wires[0]]
        anc = ancillas[len(records)]
        core_gates.append(Gate("CZ", (wire, anc)))
        core_gates.append(Gate("X", (anc,), control=len(records)))
        records.append(GadgetRecord(wire, anc, len(records)))
        where[g.wires[0]] = anc
    post_gates = [Gate("H", (r.measured_wire,)) for r in records]
    post_gates += [moved(g) for g in c.gates[hi:]]
    return GadgetizedCircuit(wide.copy(core_gates), pre, wide.copy(post_gates), records, [])


# ---------------------------------------------------------------------------
# deferring the X corrections

def _level(core: Circuit) -> int:
    levels = [g.rz_params()[1] for g in core.gates if g.is_phase]
    return max(levels + [2])


class _Frame:
    """Affine forms of every wire in terms of the state at a fixed time."""

    def __init__(self, n: int):
        self.masks = [1 << i for i in range(n)]
        self.consts = [0] * n


def _push_one(core: list[Gate], start: int, x_mask: int, n: int, level: int,
              control: int) -> list[Gate]:
    """Commute X on ``x_mask`` (inserted before ``core[start]``) to the end of ``core``.

    Returns the classically controlled gates to apply after the core:
    diagonal Clifford rotations on output parities, then the moved X gates.
    """
    mod = 1 << (level + 1)
    frame = _Frame(n)
    weights: dict[int, int] = {}

    def add(mask: int, const: int, w: int) -> None:
        # w * pi/2^level on the affine parity mask.y xor const
        w %= mod
        if not w or not mask:
            return
        if const:
            w = -w % mod
        weights[mask] = (weights.get(mask, 0) + w) % mod

    for g in core[start:]:
        if g.control is not None:
            continue
        kind = g.kind
        if kind == "X":
            frame.consts[g.wires[0]] ^= 1
        elif kind == "CNOT":
            a, b = g.wires
            frame.masks[b] ^= frame.masks[a]
            frame.consts[b] ^= frame.consts[a]
            if (x_mask >> a) & 1:
                x_mask ^= 1 << b
        elif kind in ("CZ", "CCZ") or (g.is_phase and g.rz_params()[1] == 0):
            wires = g.wires
            flipped = [w for w in wires if (x_mask >> w) & 1]
            if not flipped:
                continue
            kept = [w for w in wires if not (x_mask >> w) & 1]
            # pi * (prod (l_i xor s_i) - prod l_i): monomials over subsets T
            # of the wires whose complement is entirely flipped.
            for size in range(len(flipped)):
                for t in combinations(flipped, size):
                    _add_product([*kept, *t], frame, add, level)
        elif g.is_phase:
            w = g.wires[0]
            if (x_mask >> w) & 1:
                k, d = g.rz_params()
                add(frame.masks[w], frame.consts[w], -2 * k << (level - d))
        else:
            raise ValueError(f"cannot defer corrections through {kind}")
    out: list[Gate] = []
    if weights:
        basis = BitMatrix(list(frame.masks), n).transpose()
        for mask, w in sorted(weights.items()):
            if not w:
                continue
            nu = solve_particular(basis, mask)
            assert nu is not None
            const = 0
            for i in iter_bits(nu):
                const ^= frame.consts[i]
            if const:
                w = -w % mod
            out.extend(_parity_phase(nu, w, level, control))
    out.extend(Gate("X", (w,), control=control) for w in iter_bits(x_mask))
    return out


def _add_product(wires: list[int], frame: _Frame, add, level: int) -> None:
    """Add pi * prod of the affine forms of ``wires`` (at most two) as single parities."""
    half = 1 << level
    if not wires:
        return
    if len(wires) == 1:
        w = wires[0]
        add(frame.masks[w], frame.consts[w], half)
        return
    if len(wires) == 2:
        a, b = wires
        quarter = half // 2
        # pi*x*y = pi/2 * (x + y - (x xor y))
        add(frame.masks[a], frame.consts[a], quarter)
        add(frame.masks[b], frame.consts[b], quarter)
        add(frame.masks[a] ^ frame.masks[b], frame.consts[a] ^ frame.consts[b], -quarter)
        return
    raise AssertionError("products of three flipped wires never occur")


def _parity_phase(nu: int, w: int, level: int, control: int) -> list[Gate]:
    bits = list(iter_bits(nu))
    target = bits[0]
    ladder = [Gate("CNOT", (j, target), control=control) for j in bits[1:]]
    phase = [replace(g, control=control) for g in standard_phase_gates(w, level, target)]
    return ladder + phase + list(reversed(ladder))


def defer_corrections(gc: GadgetizedCircuit) -> GadgetizedCircuit:
    """Move every classically controlled X out of the core.

    Crossing a rotation R_Z(theta) leaves behind R_Z(-2 theta); crossing a CZ
    or CCZ leaves a Z or CZ on the other wires.  The returned core has no
    classically controlled gates and its unconditioned gates are unchanged.
    """
    core = gc.core
    n = core.n_wires
    level = _level(core)
    corrections = list(gc.corrections)
    for i, g in enumerate(core.gates):
        if g.control is None:
            continue
        if g.kind != "X":
            raise ValueError("only classically controlled X gates can be deferred")
        corrections.extend(_push_one(core.gates, i + 1, 1 << g.wires[0], n, level, g.control))
    plain = core.copy([g for g in core.gates if g.control is None])
    return GadgetizedCircuit(plain, gc.pre, gc.post, list(gc.records), corrections)
