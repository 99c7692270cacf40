"""Circuit representation, ``.qc`` text I/O and simple gate statistics."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

ARITY = {
    "CNOT": 2,
    "H": 1,
    "X": 1,
    "Z": 1,
    "S": 1,
    "Sdg": 1,
    "T": 1,
    "Tdg": 1,
    "CZ": 2,
    "CCZ": 3,
    "RZ": 1,
}

# Single-qubit diagonal gates as R_Z(k*pi/2^d) with phase convention diag(1, e^{i k pi/2^d}).
PHASE_PARAMS = {
    "Z": (1, 0),
    "S": (1, 1),
    "Sdg": (3, 1),
    "T": (1, 2),
    "Tdg": (7, 2),
}

TOFFOLI_TAG = "tof"


class QcParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class Gate:
    kind: str
    wires: tuple[int, ...]
    k: int = 0
    d: int = 0
    control: int | None = None
    tag: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.wires) != ARITY[self.kind]:
            raise ValueError(f"{self.kind} expects {ARITY[self.kind]} wires, got {len(self.wires)}")
        if len(set(self.wires)) != len(self.wires):
            raise ValueError(f"{self.kind} applied to repeated wires {self.wires}")
        if self.kind == "RZ":
            if self.d < 0 or not 0 <= self.k < (1 << (self.d + 1)):
                raise ValueError(f"RZ({self.k},{self.d}) out of range")

    @property
    def is_phase(self) -> bool:
        return self.kind == "RZ" or self.kind in PHASE_PARAMS

    def rz_params(self) -> tuple[int, int]:
        """The (k, d) pair with this gate equal to R_Z(k*pi/2^d)."""
        if self.kind == "RZ":
            return self.k, self.d
        return PHASE_PARAMS[self.kind]


def rz(k: int, d: int, wire: int) -> Gate:
    return Gate("RZ", (wire,), k=k % (1 << (d + 1)), d=d)


def reduce_angle(k: int, d: int) -> tuple[int, int]:
    """Lowest-level representation of k*pi/2^d; returns (0, -1) for the identity."""
    k %= 1 << (d + 1)
    if k == 0:
        return 0, -1
    while d > 0 and k % 2 == 0:
        k //= 2
        d -= 1
    return k, d


def phase_level(g: Gate) -> int:
    """Clifford-hierarchy style level of a diagonal gate: 2 for T, 1 for S, 0 for Z."""
    return reduce_angle(*g.rz_params())[1]


def is_non_clifford(g: Gate) -> bool:
    return g.kind == "CCZ" or (g.is_phase and phase_level(g) >= 2)


def standard_phase_gates(k: int, d: int, wire: int) -> list[Gate]:
    """Realize R_Z(k*pi/2^d) with named gates when the angle is a multiple of pi/4."""
    k, d = reduce_angle(k, d)
    if d < 0:
        return []
    if d > 2:
        return [rz(k, d, wire)]
    eighths = k << (2 - d)
    named = {1: ["T"], 2: ["S"], 3: ["S", "T"], 4: ["Z"], 5: ["Z", "T"], 6: ["Sdg"], 7: ["Tdg"]}
    return [Gate(name, (wire,)) for name in named[eighths]]


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)
    names: list[str] = field(default_factory=list)
    n_ancillas: int = 0

    def __post_init__(self) -> None:
        total = self.n_qubits + self.n_ancillas
        if not self.names:
            self.names = [f"q{i}" for i in range(self.n_qubits)]
            self.names += [f"anc{i}" for i in range(self.n_ancillas)]
        if len(self.names) != total:
            raise ValueError("wire name count does not match wire count")
        for g in self.gates:
            self._check(g)

    @property
    def n_wires(self) -> int:
        return self.n_qubits + self.n_ancillas

    def _check(self, g: Gate) -> None:
        if any(w < 0 or w >= self.n_wires for w in g.wires):
            raise ValueError(f"gate {g} touches a wire outside 0..{self.n_wires - 1}")

    def append(self, g: Gate) -> None:
        self._check(g)
        self.gates.append(g)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def add_ancilla(self) -> int:
        name = f"anc{self.n_ancillas}"
        self.names.append(name)
        self.n_ancillas += 1
        return self.n_wires - 1

    def copy(self, gates: list[Gate] | None = None) -> Circuit:
        return Circuit(self.n_qubits, list(self.gates if gates is None else gates),
                       list(self.names), self.n_ancillas)

    def gate_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for g in self.gates:
            counts[g.kind] = counts.get(g.kind, 0) + 1
        return counts


# ---------------------------------------------------------------------------
# .qc format

def _mnemonic_gates(op: str, wires: list[int], line_no: int) -> list[Gate]:
    n = len(wires)
    single = {"h": "H", "x": "X", "t": "T", "t*": "Tdg", "tdg": "Tdg",
              "s": "S", "s*": "Sdg", "sdg": "Sdg"}
    try:
        if op in single and n == 1:
            return [Gate(single[op], tuple(wires))]
        if op == "z":
            kind = {1: "Z", 2: "CZ", 3: "CCZ"}.get(n)
            if kind:
                return [Gate(kind, tuple(wires))]
        elif op in ("tof", "cnot", "cx"):
            if n == 1 and op == "tof":
                return [Gate("X", tuple(wires))]
            if n == 2:
                return [Gate("CNOT", tuple(wires))]
            if n == 3 and op == "tof":
                target = wires[2]
                return [
                    Gate("H", (target,), tag=TOFFOLI_TAG),
                    Gate("CCZ", tuple(wires), tag=TOFFOLI_TAG),
                    Gate("H", (target,), tag=TOFFOLI_TAG),
                ]
        elif op == "cz" and n == 2:
            return [Gate("CZ", tuple(wires))]
        elif op == "ccz" and n == 3:
            return [Gate("CCZ", tuple(wires))]
    except ValueError as exc:
        raise QcParseError(line_no, str(exc)) from None
    raise QcParseError(line_no, f"unsupported gate {op!r} with {n} wire(s)")


def parse_qc(text: str) -> Circuit:
    """Parse the ``.qc`` circuit format.

    Mnemonics are case-insensitive.  ``tof a b c`` is stored as
    ``H(c) CCZ(a,b,c) H(c)`` with all three gates tagged so it can be emitted
    back as a Toffoli.  Besides the usual gate lines, ``RZ k d a`` denotes
    R_Z(k*pi/2^d) on wire ``a``.
    """
    names: list[str] | None = None
    index: dict[str, int] = {}
    gates: list[Gate] = []
    in_body = False
    ended = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head.startswith("."):
            if in_body:
                raise QcParseError(line_no, "header directive inside body")
            if head == ".v":
                names = tokens[1:]
                if len(set(names)) != len(names):
                    raise QcParseError(line_no, "duplicate wire name")
                index = {name: i for i, name in enumerate(names)}
            elif head in (".i", ".o", ".c", ".ol"):
                pass
            else:
                raise QcParseError(line_no, f"unknown directive {head}")
            continue
        upper = head.upper()
        if upper == "BEGIN":
            if names is None:
                raise QcParseError(line_no, "BEGIN before .v declaration")
            in_body = True
            continue
        if upper == "END":
            if not in_body:
                raise QcParseError(line_no, "END without BEGIN")
            in_body = False
            ended = True
            continue
        if not in_body:
            raise QcParseError(line_no, "gate outside BEGIN/END")
        op = head.lower()
        args = tokens[1:]
        if op == "rz":
            if len(args) != 3:
                raise QcParseError(line_no, "RZ expects: RZ <k> <d> <wire>")
            try:
                k, d = int(args[0]), int(args[1])
                gate = Gate("RZ", (index[args[2]],), k=k, d=d)
            except KeyError:
                raise QcParseError(line_no, f"undeclared wire {args[2]!r}") from None
            except ValueError as exc:
                raise QcParseError(line_no, str(exc)) from None
            gates.append(gate)
            continue
        wires = []
        for a in args:
            if a not in index:
                raise QcParseError(line_no, f"undeclared wire {a!r}")
            wires.append(index[a])
        gates.extend(_mnemonic_gates(op, wires, line_no))
    if names is None:
        raise QcParseError(0, "missing .v declaration")
    if in_body or not ended:
        raise QcParseError(0, "missing END")
    # Ancillas are recognised as a trailing block of anc<k> names.
    n_anc = 0
    for name in reversed(names):
        if not (name.startswith("anc") and name[3:].isdigit()):
            break
        n_anc += 1
    return Circuit(len(names) - n_anc, gates, list(names), n_anc)


def _gate_line(g: Gate, names: list[str]) -> str:
    w = [names[i] for i in g.wires]
    if g.kind == "RZ":
        return f"RZ {g.k} {g.d} {w[0]}"
    mnemonic = {
        "H": "H", "X": "X", "Z": "Z", "S": "S", "Sdg": "S*", "T": "T", "Tdg": "T*",
        "CNOT": "tof", "CZ": "Z", "CCZ": "Z",
    }[g.kind]
    return " ".join([mnemonic, *w])


def emit_qc(c: Circuit, corrections: Iterable[Gate] = ()) -> str:
    """Serialize to ``.qc``.  Classically controlled gates become comment lines."""
    out = [".v " + " ".join(c.names), "BEGIN"]
    gates = c.gates
    i = 0
    while i < len(gates):
        g = gates[i]
        if (g.kind == "H" and g.tag == TOFFOLI_TAG and i + 2 < len(gates)
                and gates[i + 1].kind == "CCZ" and gates[i + 1].tag == TOFFOLI_TAG
                and gates[i + 2].kind == "H" and gates[i + 2].tag == TOFFOLI_TAG
                and gates[i + 1].wires[2] == g.wires[0] == gates[i + 2].wires[0]):
            out.append("tof " + " ".join(c.names[w] for w in gates[i + 1].wires))
            i += 3
            continue
        line = _gate_line(g, c.names)
        if g.control is not None:
            line = f"# cc[r{g.control}] {line}"
        out.append(line)
        i += 1
    for g in corrections:
        out.append(f"# cc[r{g.control}] {_gate_line(g, c.names)}")
    out.append("END")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# statistics and rewrites

def t_count(c: Circuit, d: int = 2) -> int:
    """Number of rotations whose angle is an odd multiple of pi/2^d."""
    total = 0
    for g in c.gates:
        if g.is_phase and phase_level(g) == d:
            total += 1
    return total


def _t_positions(c: Circuit) -> list[int]:
    return [i for i, g in enumerate(c.gates) if is_non_clifford(g)]


def internal_hadamard_count(c: Circuit, exclude_cancelled: bool = False) -> int:
    """H gates strictly between the first and last non-Clifford gate (CCZ included).

    With ``exclude_cancelled`` an H immediately followed (on its wire) by
    another H is not counted, together with its partner.
    """
    pos = _t_positions(c)
    if not pos:
        return 0
    first, last = pos[0], pos[-1]
    internal = [i for i in range(first + 1, last) if c.gates[i].kind == "H"]
    if not exclude_cancelled:
        return len(internal)
    cancelled: set[int] = set()
    last_on_wire: dict[int, int] = {}
    for i in range(first + 1, last):
        g = c.gates[i]
        for w in g.wires:
            prev = last_on_wire.get(w)
            if (g.kind == "H" and prev is not None and prev not in cancelled
                    and c.gates[prev].kind == "H"):
                cancelled.update((prev, i))
                last_on_wire.pop(w)
            else:
                last_on_wire[w] = i
    return len([i for i in internal if i not in cancelled])


def ccz_gates(a: int, b: int, c: int) -> list[Gate]:
    """Seven-T, six-CNOT realization of CCZ(a, b, c)."""
    return [
        Gate("T", (a,)), Gate("T", (b,)), Gate("T", (c,)),
        Gate("CNOT", (a, b)), Gate("Tdg", (b,)), Gate("CNOT", (a, b)),
        Gate("CNOT", (a, c)), Gate("Tdg", (c,)),
        Gate("CNOT", (b, c)), Gate("T", (c,)),
        Gate("CNOT", (a, c)), Gate("Tdg", (c,)),
        Gate("CNOT", (b, c)),
    ]


def decompose_ccz(c: Circuit) -> Circuit:
    gates: list[Gate] = []
    for g in c.gates:
        if g.kind == "CCZ":
            gates.extend(ccz_gates(*g.wires))
        elif g.tag is not None:
            gates.append(replace(g, tag=None))
        else:
            gates.append(g)
    return c.copy(gates)
