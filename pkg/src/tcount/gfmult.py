"""GF(2^n) multiplier circuits with a Karatsuba-style CCZ count.

The multiplier adds ``a * b mod p(x)`` into a third register ``c``.  After
conjugating the c register by Hadamards this is a diagonal gate whose phase
is ``(-1)^F`` with ``F`` trilinear in (a, b, c); every CCZ on parities
(u.a, v.b, w.c) contributes one trilinear term.  The recursion below splits
``F`` into three half-size instances, tracking every operand as a GF(2)
combination of the original wires.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .bitlin import BitMatrix, iter_bits, lex_rank
from .circuit import Circuit, Gate, TOFFOLI_TAG
from .phasepoly import SignatureTensor

# ---------------------------------------------------------------------------
# polynomials over GF(2), stored as ints (bit i = coefficient of x^i)


def poly_mulmod(a: int, b: int, mod: int) -> int:
    deg = mod.bit_length() - 1
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if (a >> deg) & 1:
            a ^= mod
    return out


def poly_mod(a: int, mod: int) -> int:
    deg = mod.bit_length() - 1
    while a.bit_length() - 1 >= deg:
        a ^= mod << (a.bit_length() - 1 - deg)
    return a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def is_irreducible(poly: int) -> bool:
    """Distinct-degree test: p of degree n is irreducible iff gcd(x^(2^i) - x, p) = 1 for i <= n/2."""
    n = poly.bit_length() - 1
    if n < 1:
        return False
    if n == 1:
        return True
    if not poly & 1:
        return False
    x_pow = 0b10
    for _ in range(n // 2):
        x_pow = poly_mulmod(x_pow, x_pow, poly)
        if poly_gcd(poly, x_pow ^ 0b10) != 1:
            return False
    return True


def default_modulus(n: int) -> int:
    """Smallest irreducible polynomial of degree n with nonzero constant term.

    The constant-term condition only matters for n = 1, where it picks x + 1
    over x so that multiplication by x stays invertible.
    """
    if n < 1:
        raise ValueError("degree must be positive")
    for low in range(1, 1 << n, 2):
        cand = (1 << n) | low
        if is_irreducible(cand):
            return cand
    raise AssertionError("no irreducible polynomial found")


def format_poly(poly: int) -> str:
    terms = []
    for i in sorted(iter_bits(poly), reverse=True):
        terms.append("1" if i == 0 else "x" if i == 1 else f"x^{i}")
    return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# field description

@dataclass(frozen=True)
class GfMultSpec:
    n: int
    modulus: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.modulus.bit_length() - 1 != self.n:
            raise ValueError(f"modulus degree must be {self.n}")
        if not is_irreducible(self.modulus):
            raise ValueError(f"modulus {format_poly(self.modulus)} is reducible")

    @classmethod
    def default(cls, n: int) -> GfMultSpec:
        return cls(n, default_modulus(n))

    @cached_property
    def reduction(self) -> BitMatrix:
        """Column i holds x^(n+i) mod p; maps high product coefficients back into the field."""
        cols = []
        power = poly_mod(1 << self.n, self.modulus)
        for _ in range(self.n):
            cols.append(power)
            power = poly_mulmod(power, 0b10, self.modulus)
        rows = [sum(((cols[i] >> l) & 1) << i for i in range(self.n)) for l in range(self.n)]
        return BitMatrix(rows, self.n)

    @cached_property
    def c_prime_map(self) -> BitMatrix:
        """Basis change c' = M^T c used for the high half of the product."""
        return self.reduction.transpose()


@dataclass(frozen=True)
class CczTriple:
    u: int
    v: int
    w: int

    def __post_init__(self) -> None:
        if not (self.u and self.v and self.w):
            raise ValueError("triple combinations must be nonzero")


def _xor(x: Sequence[int], y: Sequence[int]) -> list[int]:
    return [p ^ q for p, q in zip(x, y)]


def _recurse(a: list[int], b: list[int], c: list[int], cp: list[int],
             out: list[tuple[int, int, int]]) -> None:
    n = len(a)
    if n == 1:
        if a[0] and b[0] and c[0]:
            out.append((a[0], b[0], c[0]))
        return
    if n % 2:
        a = a + [0]
        b = b + [0]
        c = c + [cp[0]]
        cp = cp[1:] + [0, 0]
        n += 1
    h = n // 2
    a_lo, a_hi = a[:h], a[h:]
    b_lo, b_hi = b[:h], b[h:]
    c_lo, c_hi = c[:h], c[h:]
    p_lo, p_hi = cp[:h], cp[h:]
    _recurse(_xor(a_lo, a_hi), _xor(b_lo, b_hi), c_hi, p_lo, out)
    _recurse(a_hi, b_hi, _xor(p_lo, c_hi), _xor(p_lo, p_hi), out)
    _recurse(a_lo, b_lo, _xor(c_lo, c_hi), _xor(p_lo, c_hi), out)


def multiplier_triples(spec: GfMultSpec) -> list[CczTriple]:
    n = spec.n
    unit = [1 << i for i in range(n)]
    c_prime = spec.c_prime_map.rows
    raw: list[tuple[int, int, int]] = []
    _recurse(list(unit), list(unit), list(unit), list(c_prime), raw)
    # CCZ(u, v, w1) CCZ(u, v, w2) = CCZ(u, v, w1 xor w2): merge on (u, v).
    merged: dict[tuple[int, int], int] = {}
    for u, v, w in raw:
        merged[(u, v)] = merged.get((u, v), 0) ^ w
    triples = [CczTriple(u, v, w) for (u, v), w in merged.items() if w]
    triples.sort(key=lambda t: (lex_rank(t.u, n), lex_rank(t.v, n), lex_rank(t.w, n)))
    return triples


def register_names(n: int) -> list[str]:
    return [f"a{i}" for i in range(n)] + [f"b{i}" for i in range(n)] + [f"c{i}" for i in range(n)]


def _parity_ladder(combo: int, offset: int) -> tuple[int, list[Gate]]:
    bits = [offset + i for i in iter_bits(combo)]
    return bits[0], [Gate("CNOT", (j, bits[0])) for j in bits[1:]]


def ccz_core(spec: GfMultSpec, triples: Sequence[CczTriple]) -> Circuit:
    """Hadamard-free core: one CCZ per triple between CNOT parity ladders."""
    n = spec.n
    c = Circuit(3 * n, [], register_names(n))
    for t in triples:
        ta, ga = _parity_ladder(t.u, 0)
        tb, gb = _parity_ladder(t.v, n)
        tc, gc = _parity_ladder(t.w, 2 * n)
        ladder = ga + gb + gc
        c.extend(ladder)
        c.append(Gate("CCZ", (ta, tb, tc)))
        c.extend(reversed(ladder))
    return c


def toffoli_circuit(spec: GfMultSpec, triples: Sequence[CczTriple]) -> Circuit:
    """Full multiplier c ^= a*b: Toffolis onto the c register.

    Conjugating the c register by Hadamards turns CNOT(j -> t) into CNOT(t -> j),
    so the c-side ladder is reversed and the CCZ becomes a Toffoli on its target.
    """
    n = spec.n
    c = Circuit(3 * n, [], register_names(n))
    for t in triples:
        ta, ga = _parity_ladder(t.u, 0)
        tb, gb = _parity_ladder(t.v, n)
        tc, gc = _parity_ladder(t.w, 2 * n)
        spread = [Gate("CNOT", (g.wires[1], g.wires[0])) for g in gc]
        c.extend(ga + gb + spread)
        c.extend([
            Gate("H", (tc,), tag=TOFFOLI_TAG),
            Gate("CCZ", (ta, tb, tc), tag=TOFFOLI_TAG),
            Gate("H", (tc,), tag=TOFFOLI_TAG),
        ])
        c.extend(reversed(ga + gb + spread))
    return c


def generate(spec: GfMultSpec) -> tuple[list[CczTriple], Circuit]:
    triples = multiplier_triples(spec)
    return triples, ccz_core(spec, triples)


def format_triples(spec: GfMultSpec, triples: Sequence[CczTriple]) -> str:
    n = spec.n
    bits = lambda v: "".join("1" if (v >> i) & 1 else "0" for i in range(n))
    return "".join(f"{bits(t.u)}|{bits(t.v)}|{bits(t.w)}\n" for t in triples)


# ---------------------------------------------------------------------------
# reference forms

def trilinear_form(a: Sequence[int], b: Sequence[int], c: Sequence[int], cp: Sequence[int]) -> int:
    """g(a,b,c) xor h(a,b,c') for 0/1 vectors of equal length n."""
    n = len(a)
    acc = 0
    for i in range(n):
        for j in range(i + 1):
            acc ^= a[j] & b[i - j] & c[i]
    for i in range(n - 1):
        for j in range(i + 1, n):
            acc ^= a[j] & b[n + i - j] & cp[i]
    return acc


def gf_reference_tensor(spec: GfMultSpec) -> SignatureTensor:
    """Order-3 tensor over wires a0..,b0..,c0.. of the multiplier's phase 4*F."""
    n = spec.n
    ones: set[tuple[int, int, int]] = set()

    def toggle(j: int, k: int, l: int) -> None:
        key = (j, n + k, 2 * n + l)
        ones.symmetric_difference_update({key})

    for i in range(n):
        for j in range(i + 1):
            toggle(j, i - j, i)
    mt = spec.c_prime_map
    for i in range(n - 1):
        for j in range(i + 1, n):
            for l in iter_bits(mt.rows[i]):
                toggle(j, n + i - j, l)
    return SignatureTensor(3 * n, 3, frozenset(ones))


def field_multiply(spec: GfMultSpec, a: int, b: int) -> int:
    return poly_mulmod(a, b, spec.modulus)
