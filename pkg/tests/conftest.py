import random
from pathlib import Path

import pytest
from hypothesis import settings

from tcount.circuit import Circuit, Gate

DATA = Path(__file__).parent / "data"

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ARITY = {"CNOT": 2, "CZ": 2, "CCZ": 3}
HADAMARD_FREE = ["T", "Tdg", "S", "Sdg", "Z", "X", "CNOT", "CNOT", "CZ", "CCZ", "T"]
CLIFFORD_T = HADAMARD_FREE + ["H", "H"]


def random_circuit(rng: random.Random, n: int, count: int, kinds=HADAMARD_FREE) -> Circuit:
    c = Circuit(n)
    while len(c.gates) < count:
        kind = rng.choice(kinds)
        arity = ARITY.get(kind, 1)
        if arity > n:
            continue
        c.append(Gate(kind, tuple(rng.sample(range(n), arity))))
    return c


def random_columns(rng: random.Random, n: int, m: int) -> list[int]:
    return [rng.randrange(1, 1 << n) for _ in range(m)]


@pytest.fixture
def data_dir() -> Path:
    return DATA
