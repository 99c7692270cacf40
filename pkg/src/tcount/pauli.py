"""Pauli products, Clifford conjugation and grouping of Pauli rotations.

A circuit over Clifford gates and diagonal rotations is rewritten as
``e^{i phi} C R_{P_m} ... R_{P_1}`` where each ``R_P(theta) = exp(-i theta P / 2)``
and ``C`` is the product of all the Clifford gates.  Rotations are listed in
the order they act on the state (``R_{P_1}`` first).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .circuit import Circuit, Gate, decompose_ccz, phase_level


def _weight(v: int) -> int:
    return v.bit_count()


@dataclass(frozen=True)
class PauliProduct:
    """Hermitian Pauli ``sign * P_0 (x) P_1 (x) ...`` with P_i fixed by bits (x_i, z_i).

    (0,0) = I, (1,0) = X, (0,1) = Z, (1,1) = Y.
    """

    n: int
    x: int = 0
    z: int = 0
    sign: int = 1

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("mask wider than n")

    @classmethod
    def single(cls, n: int, kind: str, qubit: int) -> PauliProduct:
        bit = 1 << qubit
        x = bit if kind in ("X", "Y") else 0
        z = bit if kind in ("Z", "Y") else 0
        return cls(n, x, z)

    @classmethod
    def from_label(cls, label: str) -> PauliProduct:
        """Parse e.g. ``"-XIZ"``; character i is qubit i."""
        sign = 1
        if label[:1] in "+-":
            sign = -1 if label[0] == "-" else 1
            label = label[1:]
        x = z = 0
        for i, ch in enumerate(label):
            if ch in "XY":
                x |= 1 << i
            if ch in "ZY":
                z |= 1 << i
            if ch not in "IXYZ":
                raise ValueError(f"invalid Pauli letter {ch!r}")
        return cls(len(label), x, z, sign)

    def label(self) -> str:
        letters = "".join("IXZY"[((self.x >> i) & 1) | (((self.z >> i) & 1) << 1)]
                          for i in range(self.n))
        return ("-" if self.sign < 0 else "+") + letters

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    @property
    def is_diagonal(self) -> bool:
        return self.x == 0

    def commutes(self, other: PauliProduct) -> bool:
        return (_weight(self.x & other.z) + _weight(self.z & other.x)) % 2 == 0

    def negate(self) -> PauliProduct:
        return PauliProduct(self.n, self.x, self.z, -self.sign)


# Products are computed in the form i^e X^x Z^z; a Hermitian product with
# sign s has e = |x & z| + (0 if s = 1 else 2).

def _to_phase_form(p: PauliProduct) -> tuple[int, int, int]:
    return (_weight(p.x & p.z) + (0 if p.sign == 1 else 2)) % 4, p.x, p.z


def _multiply(a: tuple[int, int, int], b: tuple[int, int, int]) -> tuple[int, int, int]:
    ea, xa, za = a
    eb, xb, zb = b
    # Z^za X^xb = (-1)^{|za & xb|} X^xb Z^za
    return (ea + eb + 2 * _weight(za & xb)) % 4, xa ^ xb, za ^ zb


def _from_phase_form(n: int, form: tuple[int, int, int]) -> PauliProduct:
    e, x, z = form
    rel = (e - _weight(x & z)) % 4
    if rel % 2:
        raise ArithmeticError("product is not Hermitian")
    return PauliProduct(n, x, z, 1 if rel == 0 else -1)


def _map_through(p: PauliProduct, x_images: Sequence[PauliProduct],
                 z_images: Sequence[PauliProduct]) -> PauliProduct:
    """Image of p under the conjugation fixed by the images of every X_i and Z_i."""
    acc = ((_weight(p.x & p.z) + (0 if p.sign == 1 else 2)) % 4, 0, 0)
    for i in range(p.n):
        if (p.x >> i) & 1:
            acc = _multiply(acc, _to_phase_form(x_images[i]))
    for i in range(p.n):
        if (p.z >> i) & 1:
            acc = _multiply(acc, _to_phase_form(z_images[i]))
    return _from_phase_form(p.n, acc)


# ---------------------------------------------------------------------------
# Clifford gates acting by g^dagger P g

_ONE_QUBIT = {
    # gate: (image of X, image of Z) as (x, z, sign) on the same wire
    "H": ((0, 1, 1), (1, 0, 1)),
    "X": ((1, 0, 1), (0, 1, -1)),
    "Z": ((1, 0, -1), (0, 1, 1)),
    "S": ((1, 1, -1), (0, 1, 1)),
    "Sdg": ((1, 1, 1), (0, 1, 1)),
}


def _clifford_kind(g: Gate) -> str:
    if g.control is not None:
        raise ValueError("classically controlled gates are not supported")
    if g.kind in ("H", "X", "CNOT", "CZ"):
        return g.kind
    if g.kind == "CCZ":
        raise ValueError("CCZ is not a Clifford gate")
    if g.is_phase:
        level = phase_level(g)
        if level >= 2:
            raise ValueError(f"{g.kind} is not a Clifford gate")
        if level < 0:
            return "I"
        if level == 0:
            return "Z"
        k, d = g.rz_params()
        eighths = (k << (2 - d)) % 8 if d <= 2 else (k >> (d - 2)) % 8
        return "S" if eighths == 2 else "Sdg"
    raise ValueError(f"unsupported gate {g.kind}")


def _gate_images(g: Gate, n: int) -> dict[tuple[str, int], PauliProduct]:
    """Images g^dagger Q g for the generators Q that g does not fix."""
    kind = _clifford_kind(g)
    if kind == "I":
        return {}
    if kind in _ONE_QUBIT:
        q = g.wires[0]
        bit = 1 << q
        (xx, xz, xs), (zx, zz, zs) = _ONE_QUBIT[kind]
        return {
            ("X", q): PauliProduct(n, bit * xx, bit * xz, xs),
            ("Z", q): PauliProduct(n, bit * zx, bit * zz, zs),
        }
    a, b = g.wires
    ba, bb = 1 << a, 1 << b
    if kind == "CNOT":
        return {
            ("X", a): PauliProduct(n, ba | bb, 0),
            ("Z", b): PauliProduct(n, 0, ba | bb),
        }
    # CZ
    return {
        ("X", a): PauliProduct(n, ba, bb),
        ("X", b): PauliProduct(n, bb, ba),
    }


def conjugate_pauli(p: PauliProduct, g: Gate) -> PauliProduct:
    """``g^dagger p g`` for a Clifford gate ``g``."""
    images = _gate_images(g, p.n)
    if not images:
        return p
    xs = [images.get(("X", i), PauliProduct.single(p.n, "X", i)) for i in range(p.n)]
    zs = [images.get(("Z", i), PauliProduct.single(p.n, "Z", i)) for i in range(p.n)]
    return _map_through(p, xs, zs)


@dataclass(frozen=True)
class PauliRotation:
    """``R_axis(k * pi / 2^d)``."""

    axis: PauliProduct
    k: int
    d: int

    def __post_init__(self) -> None:
        if self.axis.is_identity:
            raise ValueError("rotation axis must not be the identity")
        if not 0 < self.k < (1 << (self.d + 1)):
            raise ValueError(f"angle numerator {self.k} out of range for level {self.d}")

    def commutes(self, other: PauliRotation) -> bool:
        return self.axis.commutes(other.axis)


def conjugate(r: PauliRotation, g: Gate) -> PauliRotation:
    """``g^dagger R_P(theta) g = R_{g^dagger P g}(theta)``."""
    return PauliRotation(conjugate_pauli(r.axis, g), r.k, r.d)


class CliffordTableau:
    """The map ``P -> C^dagger P C`` stored as the images of X_i and Z_i."""

    def __init__(self, n: int):
        self.n = n
        self.x_images = [PauliProduct.single(n, "X", i) for i in range(n)]
        self.z_images = [PauliProduct.single(n, "Z", i) for i in range(n)]

    def apply(self, p: PauliProduct) -> PauliProduct:
        return _map_through(p, self.x_images, self.z_images)

    def then(self, g: Gate) -> None:
        """Replace C by g C, so the map becomes P -> C^dagger g^dagger P g C."""
        images = {key: self.apply(image) for key, image in _gate_images(g, self.n).items()}
        for (kind, q), image in images.items():
            target = self.x_images if kind == "X" else self.z_images
            target[q] = image

    def is_identity(self) -> bool:
        return (all(p == PauliProduct.single(self.n, "X", i) for i, p in enumerate(self.x_images))
                and all(p == PauliProduct.single(self.n, "Z", i) for i, p in enumerate(self.z_images)))

    def is_linear(self) -> bool:
        """True when C is in the group generated by CNOT and X (permutes basis states)."""
        return all(p.z == 0 for p in self.x_images) and all(p.x == 0 for p in self.z_images)

    def symplectic_ok(self) -> bool:
        n = self.n
        for i in range(n):
            for j in range(n):
                if not self.x_images[i].commutes(self.x_images[j]):
                    return False
                if not self.z_images[i].commutes(self.z_images[j]):
                    return False
                if self.x_images[i].commutes(self.z_images[j]) != (i != j):
                    return False
        return True


def circuit_to_rotations(c: Circuit) -> tuple[list[PauliRotation], CliffordTableau, Fraction]:
    """Rotations in application order, the Clifford tableau, and the global phase / pi.

    CCZ gates are decomposed into T gates first.  A rotation gate
    diag(1, e^{i k pi/2^d}) equals e^{i k pi/2^(d+1)} R_Z(k pi/2^d).
    """
    n = c.n_wires
    tableau = CliffordTableau(n)
    rotations: list[PauliRotation] = []
    phase = Fraction(0)
    for g in decompose_ccz(c).gates:
        if g.control is not None:
            raise ValueError("classically controlled gates are not supported")
        if g.is_phase and phase_level(g) >= 2:
            k, d = g.rz_params()
            axis = tableau.apply(PauliProduct.single(n, "Z", g.wires[0]))
            rotations.append(PauliRotation(axis, k, d))
            phase += Fraction(k, 1 << (d + 1))
        else:
            tableau.then(g)
    return rotations, tableau, phase % 2


def group_rotations(rs: Sequence[PauliRotation]) -> list[list[PauliRotation]]:
    """Layers of mutually commuting rotations.

    Each rotation goes right after the last layer holding a rotation it
    anticommutes with.
    """
    layers: list[list[PauliRotation]] = []
    for r in rs:
        j = 0
        for idx in range(len(layers) - 1, -1, -1):
            if any(not r.commutes(o) for o in layers[idx]):
                j = idx + 1
                break
        if j == len(layers):
            layers.append([])
        layers[j].append(r)
    return layers


def measurement_depth(c: Circuit) -> int:
    rotations, _, _ = circuit_to_rotations(c)
    return max(len(group_rotations(rotations)) - 1, 0)
