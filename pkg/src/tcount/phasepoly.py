"""Phase polynomials of Hadamard-free circuits, parity tables and signature tensors.

A Hadamard-free circuit on ``n`` wires acts on a basis state as

    |x>  ->  exp(i*pi*f(x)/2^d) |g(x)>

with ``f(x) = sum_j a_j * (y_j . x)`` taken mod 2^(d+1) and ``g`` affine.  The
``level`` d is 2 for Clifford+T.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Sequence

from .bitlin import BitMatrix, bit_string, is_invertible, iter_bits, parse_bit_string
from .circuit import Circuit, Gate, reduce_angle, standard_phase_gates


# ---------------------------------------------------------------------------
# parity tables

@dataclass(frozen=True)
class ParityTable:
    """An n x m GF(2) matrix stored as column and row bitmasks.

    ``columns[j]`` has bit ``alpha`` set when qubit alpha appears in parity j;
    ``rows[alpha]`` has bit ``j`` set for the same entry.
    """

    n: int
    columns: tuple[int, ...]
    d: int = 2
    rows: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))
        limit = 1 << self.n
        rows = [0] * self.n
        for j, col in enumerate(self.columns):
            if col < 0 or col >= limit:
                raise ValueError(f"column {j} does not fit in {self.n} rows")
            for a in iter_bits(col):
                rows[a] |= 1 << j
        object.__setattr__(self, "rows", tuple(rows))

    @property
    def m(self) -> int:
        return len(self.columns)

    @classmethod
    def from_rows(cls, rows: Sequence[int], m: int, d: int = 2) -> ParityTable:
        cols = []
        for j in range(m):
            c = 0
            for a, r in enumerate(rows):
                if (r >> j) & 1:
                    c |= 1 << a
            cols.append(c)
        return cls(len(rows), tuple(cols), d)

    @classmethod
    def from_strings(cls, rows: Sequence[str], d: int = 2) -> ParityTable:
        m = len(rows[0]) if rows else 0
        return cls.from_rows([parse_bit_string(r) for r in rows], m, d)

    def to_strings(self) -> list[str]:
        return [bit_string(r, self.m) for r in self.rows]

    def normalized(self) -> ParityTable:
        return ParityTable(self.n, tuple(cancel_pairs(self.columns)), self.d)

    def with_columns(self, columns: Iterable[int]) -> ParityTable:
        return ParityTable(self.n, tuple(columns), self.d)

    def with_level(self, d: int) -> ParityTable:
        return ParityTable(self.n, self.columns, d)


def cancel_pairs(columns: Iterable[int]) -> list[int]:
    """Remove zero columns and equal columns in pairs; keeps first-seen order."""
    odd: dict[int, bool] = {}
    for c in columns:
        if c:
            odd[c] = not odd.get(c, False)
    return [c for c, keep in odd.items() if keep]


def concat(*tables: ParityTable) -> ParityTable:
    n, d = tables[0].n, tables[0].d
    cols: list[int] = []
    for t in tables:
        if t.n != n:
            raise ValueError("row counts differ")
        cols.extend(t.columns)
    return ParityTable(n, tuple(cols), d)


# ---------------------------------------------------------------------------
# signature tensors

@dataclass(frozen=True)
class SignatureTensor:
    """Symmetric GF(2) tensor stored sparsely as the set of sorted index tuples equal to 1."""

    n: int
    order: int
    ones: frozenset[tuple[int, ...]]

    def __getitem__(self, index: Sequence[int]) -> int:
        return int(tuple(sorted(index)) in self.ones)

    def is_zero(self) -> bool:
        return not self.ones


def signature_tensor(p: ParityTable, order: int) -> SignatureTensor:
    ones = set()
    all_cols = (1 << p.m) - 1
    for idx in combinations_with_replacement(range(p.n), order):
        acc = all_cols
        for a in idx:
            acc &= p.rows[a]
        if acc.bit_count() & 1:
            ones.add(idx)
    return SignatureTensor(p.n, order, frozenset(ones))


# ---------------------------------------------------------------------------
# phase polynomials

@dataclass
class PhasePolynomial:
    n: int
    d: int
    terms: list[tuple[int, int]] = field(default_factory=list)
    linear: list[int] | None = None
    affine: int = 0
    constant: int = 0

    def __post_init__(self) -> None:
        mod = self.modulus
        if self.linear is None:
            self.linear = [1 << i for i in range(self.n)]
        if len(self.linear) != self.n or not is_invertible(BitMatrix(list(self.linear), self.n)):
            raise ValueError("output map must be an invertible n x n matrix")
        clean = []
        for y, a in self.terms:
            if y <= 0 or y >= (1 << self.n):
                raise ValueError("term parity must be a nonzero n-bit vector")
            clean.append((y, a % mod))
        self.terms = clean
        self.constant %= mod

    @property
    def modulus(self) -> int:
        return 1 << (self.d + 1)

    def evaluate(self, x: int) -> int:
        """Phase f(x) in units of pi/2^d, including the global constant."""
        total = self.constant
        for y, a in self.terms:
            if (y & x).bit_count() & 1:
                total += a
        return total % self.modulus

    def output(self, x: int) -> int:
        out = self.affine
        for i, row in enumerate(self.linear):
            if (row & x).bit_count() & 1:
                out ^= 1 << i
        return out

    def merged(self) -> PhasePolynomial:
        """Combine equal parities and drop zero weights (first-seen order)."""
        acc: dict[int, int] = {}
        for y, a in self.terms:
            acc[y] = (acc.get(y, 0) + a) % self.modulus
        return PhasePolynomial(self.n, self.d, [(y, a) for y, a in acc.items() if a],
                               list(self.linear), self.affine, self.constant)

    def plus(self, other: PhasePolynomial) -> PhasePolynomial:
        if other.d != self.d or other.n != self.n:
            raise ValueError("cannot add polynomials of different level or width")
        return PhasePolynomial(self.n, self.d, self.terms + other.terms, list(self.linear),
                               self.affine, self.constant + other.constant)


def _canonical_order(terms: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    return sorted(terms, key=lambda t: (t[0].bit_count(), t[0]))


class _FormTracker:
    """Wire states as affine GF(2) forms, accumulating phase terms."""

    def __init__(self, n: int, d: int):
        self.n = n
        self.d = d
        self.mod = 1 << (d + 1)
        self.masks = [1 << i for i in range(n)]
        self.consts = [0] * n
        self.weights: dict[int, int] = {}
        self.constant = 0

    def add(self, mask: int, const: int, w: int) -> None:
        w %= self.mod
        if not w:
            return
        if const:
            self.constant += w
            w = -w
        if mask:
            self.weights[mask] = (self.weights.get(mask, 0) + w) % self.mod

    def form(self, wire: int) -> tuple[int, int]:
        return self.masks[wire], self.consts[wire]

    def add_product(self, wires: Sequence[int]) -> None:
        """Phase pi * prod(x_w) via inclusion-exclusion over XORs of the wire forms."""
        k = len(wires)
        if self.d < k - 1:
            raise ValueError(f"a {k}-qubit controlled-Z needs level d >= {k - 1}")
        base = 1 << (self.d - k + 1)
        for size in range(1, k + 1):
            sign = 1 if size % 2 else -1
            for subset in combinations(wires, size):
                mask = const = 0
                for w in subset:
                    mask ^= self.masks[w]
                    const ^= self.consts[w]
                self.add(mask, const, sign * base)

    def apply(self, g: Gate) -> None:
        if g.control is not None:
            raise ValueError("classically controlled gates cannot be extracted")
        if g.kind == "H":
            raise ValueError("circuit is not Hadamard-free")
        if g.kind == "CNOT":
            c, t = g.wires
            self.masks[t] ^= self.masks[c]
            self.consts[t] ^= self.consts[c]
        elif g.kind == "X":
            self.consts[g.wires[0]] ^= 1
        elif g.kind == "CZ" or g.kind == "CCZ":
            self.add_product(g.wires)
        else:
            k, level = reduce_angle(*g.rz_params())
            if level > self.d:
                raise ValueError(f"rotation at level {level} exceeds polynomial level {self.d}")
            if level >= 0:
                self.add(*self.form(g.wires[0]), k << (self.d - level))


def extract(c: Circuit, d: int = 2) -> PhasePolynomial:
    """Phase polynomial and affine output map of a Hadamard-free circuit."""
    tracker = _FormTracker(c.n_wires, d)
    for g in c.gates:
        tracker.apply(g)
    terms = _canonical_order((y, a) for y, a in tracker.weights.items() if a)
    affine = 0
    for i, const in enumerate(tracker.consts):
        affine |= const << i
    return PhasePolynomial(c.n_wires, d, terms, tracker.masks, affine, tracker.constant)


def to_parity_table(p: PhasePolynomial) -> ParityTable:
    return ParityTable(p.n, tuple(cancel_pairs(y for y, a in p.terms if a & 1)), p.d)


def table_polynomial(t: ParityTable, weights: Sequence[int] | None = None) -> PhasePolynomial:
    if weights is None:
        weights = [1] * t.m
    return PhasePolynomial(t.n, t.d, list(zip(t.columns, weights)))


# ---------------------------------------------------------------------------
# monomial expansion

def expand_parity(size: int, weight: int, d: int) -> dict[int, int]:
    """Coefficient of each order-k monomial in ``weight * (x_1 xor ... xor x_size)``.

    Uses x_1 xor ... xor x_s = sum_k (-2)^(k-1) e_k(x), where e_k is the k-th
    elementary symmetric polynomial; orders above d+1 vanish mod 2^(d+1).
    """
    mod = 1 << (d + 1)
    return {k: weight * (-2) ** (k - 1) % mod for k in range(1, min(size, d + 1) + 1)}


def _subsets_up_to(y: int, max_size: int) -> Iterable[tuple[int, int]]:
    bits = list(iter_bits(y))
    for k in range(1, min(len(bits), max_size) + 1):
        for combo in combinations(bits, k):
            mask = 0
            for b in combo:
                mask |= 1 << b
            yield k, mask


def monomial_coefficients(terms: Iterable[tuple[int, int]], d: int) -> dict[int, int]:
    """Multilinear coefficients (keyed by variable-subset mask) of sum a * parity(y)."""
    mod = 1 << (d + 1)
    coeffs: dict[int, int] = {}
    cache: dict[int, dict[int, int]] = {}
    for y, a in terms:
        size = y.bit_count()
        if size not in cache:
            cache[size] = expand_parity(size, 1, d)
        factors = cache[size]
        for k, mask in _subsets_up_to(y, d + 1):
            coeffs[mask] = (coeffs.get(mask, 0) + a * factors[k]) % mod
    return {m: c for m, c in coeffs.items() if c}


class TensorMismatch(ValueError):
    pass


def clifford_residue(original: PhasePolynomial, optimized: ParityTable) -> PhasePolynomial:
    """Even-weight polynomial r with ``optimized (weights 1) + r == original``.

    The returned polynomial carries the original's output map and constant.
    Raises :class:`TensorMismatch` when no even-weight r exists, which happens
    exactly when the order-(d+1) signature tensors disagree.
    """
    d, mod = original.d, original.modulus
    if optimized.n != original.n:
        raise ValueError("width mismatch")
    residue: list[tuple[int, int]] = []
    odd_terms: list[tuple[int, int]] = []
    for y, a in original.terms:
        if a & 1:
            odd_terms.append((y, 1))
            if a - 1:
                residue.append((y, a - 1))
        elif a:
            residue.append((y, a))
    diff = monomial_coefficients(odd_terms + [(y, -1) for y in optimized.columns], d)
    # Clear monomials from the highest order down; a parity over the support S
    # touches only monomials on subsets of S.
    for k in range(d + 1, 0, -1):
        for mask in sorted(s for s in diff if s.bit_count() == k):
            delta = diff[mask] % mod
            if not delta:
                continue
            if delta % (1 << k):
                raise TensorMismatch("optimized table does not reproduce the signature tensor")
            w = (delta >> (k - 1)) * (-1) ** (k - 1) % (1 << (d + 2 - k))
            residue.append((mask, w))
            factors = expand_parity(k, w, d)
            for j, sub in _subsets_up_to(mask, k):
                diff[sub] = (diff.get(sub, 0) - factors[j]) % mod
    return PhasePolynomial(original.n, d, residue, list(original.linear), original.affine,
                           original.constant).merged()


# ---------------------------------------------------------------------------
# synthesis

def linear_network(rows: Sequence[int], n: int) -> list[Gate]:
    """CNOT circuit whose output wire i carries parity ``rows[i]`` of the inputs."""
    a = list(rows)
    ops: list[tuple[int, int]] = []
    for i in range(n):
        bit = 1 << i
        if not a[i] & bit:
            j = next(j for j in range(i + 1, n) if a[j] & bit)
            a[i] ^= a[j]
            ops.append((j, i))
        for r in range(n):
            if r != i and a[r] & bit:
                a[r] ^= a[i]
                ops.append((i, r))
    return [Gate("CNOT", (c, t)) for c, t in reversed(ops)]


def synthesize(p: PhasePolynomial, names: list[str] | None = None,
               n_qubits: int | None = None) -> Circuit:
    """CNOT ladder plus one rotation per term, then the output network."""
    n = p.n
    n_q = n if n_qubits is None else n_qubits
    c = Circuit(n_q, [], list(names) if names else [], n - n_q)
    for y, a in p.terms:
        if not a % p.modulus:
            continue
        bits = list(iter_bits(y))
        target = bits[0]
        ladder = [Gate("CNOT", (j, target)) for j in bits[1:]]
        c.extend(ladder)
        c.extend(standard_phase_gates(a, p.d, target))
        c.extend(reversed(ladder))
    c.extend(linear_network(p.linear, n))
    for i in iter_bits(p.affine):
        c.append(Gate("X", (i,)))
    return c


# ---------------------------------------------------------------------------
# text format

def format_table(p: PhasePolynomial) -> str:
    """``n m d`` header, n rows of m bits (row = qubit), then the m weights."""
    m = len(p.terms)
    lines = [f"{p.n} {m} {p.d}"]
    for a in range(p.n):
        lines.append("".join("1" if (y >> a) & 1 else "0" for y, _ in p.terms))
    lines.append(" ".join(str(w) for _, w in p.terms))
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> PhasePolynomial:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty parity table")
    try:
        n, m, d = (int(t) for t in lines[0].split())
    except ValueError:
        raise ValueError("header must be 'n m d'") from None
    if len(lines) < n + 1:
        raise ValueError("parity table truncated")
    rows = lines[1:n + 1]
    for a, r in enumerate(rows):
        if len(r) != m or set(r) - {"0", "1"}:
            raise ValueError(f"row {a} must be {m} characters of 0/1")
    weights = [1] * m
    if len(lines) > n + 1:
        weights = [int(t) for t in lines[n + 1].split()]
        if len(weights) != m:
            raise ValueError("weight count does not match column count")
    table = ParityTable.from_strings(rows, d) if n else ParityTable(0, (), d)
    terms = [(y, w) for y, w in zip(table.columns, weights) if y]
    return PhasePolynomial(n, d, terms)
