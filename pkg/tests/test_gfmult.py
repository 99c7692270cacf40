import random
from itertools import product
from math import ceil, log2

import pytest
from hypothesis import given, strategies as st

from tcount.circuit import decompose_ccz
from tcount.gfmult import (
    CczTriple,
    GfMultSpec,
    default_modulus,
    field_multiply,
    format_poly,
    format_triples,
    generate,
    gf_reference_tensor,
    is_irreducible,
    multiplier_triples,
    poly_mulmod,
    toffoli_circuit,
    trilinear_form,
)
from tcount.phasepoly import extract, signature_tensor, to_parity_table
from tcount.verify import dense_unitary

COUNTS = {1: 1, 2: 3, 3: 6, 4: 9, 5: 14, 6: 18, 7: 23, 8: 27, 9: 38, 10: 42, 16: 81, 32: 243, 64: 729}


def g_form(a, b, c):
    n = len(a)
    return sum(a[j] & b[i - j] & c[i] for i in range(n) for j in range(i + 1)) % 2


def h_form(a, b, cp):
    n = len(a)
    return sum(a[j] & b[n + i - j] & cp[i] for i in range(n - 1) for j in range(i + 1, n)) % 2


def xor(x, y):
    return [p ^ q for p, q in zip(x, y)]


def reducible_by_trial(poly: int) -> bool:
    deg = poly.bit_length() - 1
    for f in range(2, 1 << (deg // 2 + 1)):
        if f.bit_length() - 1 < 1:
            continue
        # polynomial remainder
        r = poly
        while r.bit_length() >= f.bit_length():
            r ^= f << (r.bit_length() - f.bit_length())
        if r == 0:
            return True
    return False


@pytest.mark.parametrize("n, count", sorted(COUNTS.items()))
def test_triple_counts(n, count):
    triples = multiplier_triples(GfMultSpec.default(n))
    assert len(triples) == count
    assert count <= 3 ** ceil(log2(n)) if n > 1 else count == 1


def test_base_case():
    assert multiplier_triples(GfMultSpec.default(1)) == [CczTriple(1, 1, 1)]


@pytest.mark.parametrize("n, poly", [(2, 0b111), (3, 0b1011), (4, 0b10011), (8, 0b100011011)])
def test_default_modulus(n, poly):
    assert default_modulus(n) == poly
    assert is_irreducible(poly)


def test_default_modulus_is_smallest():
    for n in range(2, 9):
        m = default_modulus(n)
        for low in range(1, m - (1 << n), 1):
            assert reducible_by_trial((1 << n) | low)
        assert not reducible_by_trial(m)


@given(st.integers(2, 1 << 10))
def test_irreducibility_against_trial_division(poly):
    assert is_irreducible(poly) == (not reducible_by_trial(poly) and poly.bit_length() > 1)


def test_reducible_modulus_rejected():
    with pytest.raises(ValueError):
        GfMultSpec(2, 0b101)
    with pytest.raises(ValueError):
        GfMultSpec(3, 0b111)


def test_format_poly():
    assert format_poly(0b1011) == "x^3 + x + 1"
    assert format_poly(0b10) == "x"


def test_field_multiply_small():
    spec = GfMultSpec.default(2)
    # x * (x + 1) = x^2 + x = 1 mod x^2 + x + 1
    assert field_multiply(spec, 0b10, 0b11) == 1
    assert poly_mulmod(0b10, 0b10, 0b111) == 0b11


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7, 8])
def test_core_tensor_matches_reference(n):
    spec = GfMultSpec.default(n)
    _, core = generate(spec)
    table = to_parity_table(extract(decompose_ccz(core)))
    assert signature_tensor(table, 3) == gf_reference_tensor(spec)


def test_reference_tensor_n2_by_expansion():
    spec = GfMultSpec.default(2)
    ones = set()
    for j, k, l in product(range(2), range(2), range(2)):
        # coefficient of a_j b_k c_l in c . (a * b mod p)
        prod_bit = (field_multiply(spec, 1 << j, 1 << k) >> l) & 1
        if prod_bit:
            ones.add((j, 2 + k, 4 + l))
    assert set(gf_reference_tensor(spec).ones) == ones


def run_classically(circuit, state):
    """Basis-state simulation where each H-CCZ-H group acts as a Toffoli."""
    gates = circuit.gates
    i = 0
    while i < len(gates):
        g = gates[i]
        if g.kind == "CNOT":
            if (state >> g.wires[0]) & 1:
                state ^= 1 << g.wires[1]
        elif g.kind == "H":
            ccz = gates[i + 1]
            a, b, t = ccz.wires
            if (state >> a) & 1 and (state >> b) & 1:
                state ^= 1 << t
            i += 2
        else:
            raise AssertionError(g.kind)
        i += 1
    return state


def test_toffoli_circuit_dense_n2():
    spec = GfMultSpec.default(2)
    triples, _ = generate(spec)
    u = dense_unitary(toffoli_circuit(spec, triples))
    for col in range(1 << 6):
        row = int(abs(u[:, col]).argmax())
        assert abs(u[row, col]) == pytest.approx(1)
        assert row == run_classically(toffoli_circuit(spec, triples), col)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_toffoli_circuit_multiplies(n):
    spec = GfMultSpec.default(n)
    triples, _ = generate(spec)
    circuit = toffoli_circuit(spec, triples)
    mask = (1 << n) - 1
    for a, b, c in product(range(1 << n), repeat=3):
        out = run_classically(circuit, a | (b << n) | (c << 2 * n))
        assert out & mask == a and (out >> n) & mask == b
        assert out >> 2 * n == c ^ field_multiply(spec, a, b)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_recursion_identities(n):
    rng = random.Random(n)
    h = n // 2
    for _ in range(2000):
        a, b, c, cp = ([rng.randint(0, 1) for _ in range(n)] for _ in range(4))
        al, ar, bl, br = a[:h], a[h:], b[:h], b[h:]
        cl, cr, pl, pr = c[:h], c[h:], cp[:h], cp[h:]
        assert g_form(a, b, c) == (g_form(xor(al, ar), xor(bl, br), cr) ^ g_form(ar, br, cr)
                                   ^ g_form(al, bl, xor(cl, cr)) ^ h_form(al, bl, cr))
        assert h_form(a, b, cp) == (h_form(xor(al, ar), xor(bl, br), pl) ^ g_form(ar, br, pl)
                                    ^ h_form(ar, br, xor(pl, pr)) ^ h_form(al, bl, pl))
        assert trilinear_form(a, b, c, cp) == g_form(a, b, c) ^ h_form(a, b, cp)


@pytest.mark.parametrize("n", range(1, 10, 2))
def test_padding_identity(n):
    rng = random.Random(100 + n)
    for _ in range(500):
        a, b, c, cp = ([rng.randint(0, 1) for _ in range(n)] for _ in range(4))
        padded = trilinear_form(a + [0], b + [0], c + [cp[0]], cp[1:] + [0, 0])
        assert padded == trilinear_form(a, b, c, cp)


def test_format_triples():
    spec = GfMultSpec.default(2)
    lines = format_triples(spec, multiplier_triples(spec)).splitlines()
    assert len(lines) == 3
    assert all(len(line) == 8 and line.count("|") == 2 for line in lines)


def test_triples_canonically_ordered_and_nonzero():
    spec = GfMultSpec.default(6)
    triples = multiplier_triples(spec)
    assert all(t.u and t.v and t.w for t in triples)
    assert triples == multiplier_triples(spec)
    with pytest.raises(ValueError):
        CczTriple(0, 1, 1)


def test_other_modulus_gives_correct_tensor():
    spec = GfMultSpec(4, 0b11001)
    _, core = generate(spec)
    table = to_parity_table(extract(decompose_ccz(core)))
    assert signature_tensor(table, 3) == gf_reference_tensor(spec)
