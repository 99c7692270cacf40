"""T-count optimization by symmetric tensor decomposition over GF(2)."""

from .circuit import Circuit, Gate, emit_qc, parse_qc, t_count
from .optimize import d_fast_todd, d_tohpe, fast_todd, todd, tohpe
from .phasepoly import ParityTable, PhasePolynomial, extract, synthesize

__all__ = [
    "Circuit",
    "Gate",
    "ParityTable",
    "PhasePolynomial",
    "d_fast_todd",
    "d_tohpe",
    "emit_qc",
    "extract",
    "fast_todd",
    "parse_qc",
    "synthesize",
    "t_count",
    "todd",
    "tohpe",
]

__version__ = "0.1.0"
