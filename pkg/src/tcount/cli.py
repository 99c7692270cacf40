"""Command-line interface: ``tcount optimize | gen-gfmult | stats | bench``.

Exit codes: 0 on success, 1 for unreadable or unsupported input, 2 when a
requested verification fails.
"""

from __future__ import annotations

import re
import sys
import time
from pathlib import Path

import click

from .circuit import Circuit, Gate, decompose_ccz, emit_qc, internal_hadamard_count, parse_qc, phase_level, t_count
from .gfmult import GfMultSpec, format_poly, format_triples, generate, is_irreducible, toffoli_circuit
from .optimize import METHODS, time_limit
from .pauli import measurement_depth
from .phasepoly import PhasePolynomial, TensorMismatch, extract, parse_table, synthesize
from .pipeline import PipelineError, optimize_circuit, optimize_polynomial, optimize_table

EXIT_INPUT = 1
EXIT_VERIFY = 2

ALL_METHODS = sorted(METHODS) + ["bounded"]
_TABLE_HEADER = re.compile(r"^\s*\d+\s+\d+\s+\d+\s*$")


def _fail(message: str, code: int = EXIT_INPUT) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _is_table(text: str) -> bool:
    for line in text.splitlines():
        if line.strip() and not line.lstrip().startswith("#"):
            return bool(_TABLE_HEADER.match(line))
    return False


def _load(path: str) -> tuple[str, Circuit | PhasePolynomial]:
    text = Path(path).read_text()
    if _is_table(text):
        return "table", parse_table(text)
    return "qc", parse_qc(text)


def _read_input(path: str) -> tuple[str, Circuit | PhasePolynomial]:
    try:
        return _load(path)
    except OSError as exc:
        _fail(f"cannot read {path}: {exc.strerror}")
    except ValueError as exc:
        _fail(f"{path}: {exc}")
    raise AssertionError


def _write(path: str | None, text: str) -> None:
    if path is None:
        click.echo(text, nl=False)
    else:
        Path(path).write_text(text)


@click.group()
def main() -> None:
    """T-count optimization of Clifford+T circuits via parity tables."""


@main.command("optimize")
@click.argument("input_path", metavar="INPUT")
@click.option("--method", "-m", type=click.Choice(ALL_METHODS), default="fasttodd", show_default=True)
@click.option("--gadgetize", "use_gadgets", is_flag=True, help="Replace internal Hadamards by ancilla gadgets.")
@click.option("--d", "level", type=int, default=2, show_default=True, help="Rotation level: R_Z(pi/2^d) is counted.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Write the optimized .qc here.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Write key=value report here.")
@click.option("--verify", is_flag=True, help="Check tensors (always) and phases (small inputs).")
def cmd_optimize(input_path, method, use_gadgets, level, out_path, report_path, verify):
    """Optimize a .qc circuit or a parity-table file."""
    if level < 0:
        _fail("--d must be non-negative")
    kind, data = _read_input(input_path)
    try:
        if kind == "table":
            if method == "bounded":
                _fail("method 'bounded' needs a circuit, not a parity table")
            poly = data
            if level != poly.d:
                poly = PhasePolynomial(poly.n, level, [(y, a % (1 << (level + 1))) for y, a in poly.terms])
            circ, result = optimize_table(poly, method, verify)
        else:
            result = optimize_circuit(data, method, level, use_gadgets, verify)
            circ = result.circuit
    except (PipelineError, TensorMismatch) as exc:
        _fail(str(exc))
    except ValueError as exc:
        _fail(str(exc))
    _write(out_path, emit_qc(circ))
    lines = [result.report.to_text().rstrip("\n"),
             f"t_before={result.t_before}", f"t_after={result.t_after}",
             f"gadgets={result.n_gadgets}"]
    for name, ok in result.checks.items():
        lines.append(f"verify_{name}={str(ok).lower()}")
    report = "\n".join(lines) + "\n"
    if report_path:
        Path(report_path).write_text(report)
    else:
        click.echo(report, err=True, nl=False)
    if verify and not result.verified:
        _fail("verification failed", EXIT_VERIFY)


def _parse_modulus(text: str, n: int) -> int:
    """Coefficients from the highest degree down, e.g. ``1011`` for x^3 + x + 1."""
    bits = text.strip()
    if bits.startswith("0b"):
        bits = bits[2:]
    if not bits or set(bits) - {"0", "1"}:
        _fail(f"modulus must be a string of 0/1 coefficients, got {text!r}")
    value = int(bits, 2)
    if value.bit_length() - 1 != n:
        _fail(f"modulus {bits} does not have degree {n}")
    if not is_irreducible(value):
        _fail(f"modulus {format_poly(value)} is reducible")
    return value


@main.command("gen-gfmult")
@click.argument("n", type=int)
@click.option("--modulus", help="Irreducible polynomial as coefficient bits, highest degree first.")
@click.option("--optimize", "method", type=click.Choice(sorted(METHODS)), help="Optimize the CCZ core.")
@click.option("--triples", is_flag=True, help="Print the CCZ triples as u|v|w lines instead of a circuit.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False))
def cmd_gen_gfmult(n, modulus, method, triples, out_path):
    """Generate a GF(2^n) multiplier c ^= a*b."""
    if n < 1:
        _fail("n must be positive")
    spec = GfMultSpec(n, _parse_modulus(modulus, n)) if modulus else GfMultSpec.default(n)
    trip, core = generate(spec)
    click.echo(f"modulus={format_poly(spec.modulus)}", err=True)
    click.echo(f"ccz={len(trip)}", err=True)
    if triples:
        _write(out_path, format_triples(spec, trip))
        return
    if method is None:
        click.echo(f"t_count={7 * len(trip)}", err=True)
        _write(out_path, emit_qc(toffoli_circuit(spec, trip)))
        return
    poly = extract(decompose_ccz(core))
    new_poly, opt, report = optimize_polynomial(poly, method)
    body = synthesize(new_poly, core.names, core.n_qubits)
    c_wires = range(2 * n, 3 * n)
    full = core.copy([Gate("H", (w,)) for w in c_wires] + body.gates + [Gate("H", (w,)) for w in c_wires])
    click.echo(f"t_before={7 * len(trip)}", err=True)
    click.echo(f"t_count={opt.m}", err=True)
    click.echo(f"seconds={report.seconds:.3f}", err=True)
    _write(out_path, emit_qc(full))


@main.command("stats")
@click.argument("input_path", metavar="INPUT")
def cmd_stats(input_path):
    """Print size, T-count, internal Hadamards and measurement depth."""
    kind, data = _read_input(input_path)
    if kind == "table":
        odd = sum(1 for _, a in data.terms if a & 1)
        click.echo(f"n={data.n} m={len(data.terms)} d={data.d} t={odd}")
        return
    c = data
    counts = c.gate_counts()
    try:
        depth = measurement_depth(c)
    except ValueError:
        depth = -1
    click.echo(f"n={c.n_wires} gates={len(c.gates)} t={t_count(c)} "
               f"h_internal={internal_hadamard_count(c)} measurement_depth={depth}")
    click.echo(" ".join(f"{k}={counts[k]}" for k in sorted(counts)) or "empty")


def circuit_level(c: Circuit) -> int:
    """Finest rotation level in the circuit, at least 2 (T)."""
    return max([phase_level(g) for g in c.gates if g.is_phase] + [2])


def _bench_one(path: Path, methods: list[str], timeout: float | None) -> list[str]:
    try:
        kind, data = _load(str(path))
    except (OSError, ValueError) as exc:
        return [path.name, "-", "-", "-"] + ["-", "0.000", f"error:{type(exc).__name__}"] * len(methods)
    if kind == "table":
        n, h = data.n, 0
        before = sum(1 for _, a in data.terms if a & 1)
    else:
        n, h = data.n_wires, internal_hadamard_count(data)
        level = circuit_level(data)
        before = t_count(decompose_ccz(data), level)
    row = [path.name, str(n), str(h), str(before)]
    for method in methods:
        start = time.perf_counter()
        status = "ok"
        try:
            with time_limit(timeout):
                if kind == "table":
                    if method == "bounded":
                        raise PipelineError("bounded needs a circuit")
                    _, result = optimize_table(data, method)
                else:
                    result = optimize_circuit(data, method, level, use_gadgets=(h > 0 and method != "bounded"))
            after = str(result.t_after)
            if timeout is not None and time.perf_counter() - start > timeout:
                status = "timeout"
        except (PipelineError, ValueError) as exc:
            after, status = "-", f"error:{type(exc).__name__}"
        row += [after, f"{time.perf_counter() - start:.3f}", status]
    return row


@main.command("bench")
@click.argument("corpus", type=click.Path(exists=True, file_okay=False))
@click.option("--methods", default="tohpe,fasttodd", show_default=True, help="Comma-separated method names.")
@click.option("--timeout", type=float, default=None, help="Per-circuit, per-method time limit in seconds.")
def cmd_bench(corpus, methods, timeout):
    """Run every .qc / .tbl file of a directory through the optimizers; TSV output."""
    chosen = [m.strip() for m in methods.split(",") if m.strip()]
    unknown = [m for m in chosen if m not in ALL_METHODS]
    if unknown:
        _fail(f"unknown method(s): {', '.join(unknown)}")
    header = ["name", "n", "h", "t_before"]
    for m in chosen:
        header += [f"{m}_t", f"{m}_seconds", f"{m}_status"]
    click.echo("\t".join(header))
    files = sorted(p for p in Path(corpus).iterdir() if p.suffix in (".qc", ".tbl"))
    for path in files:
        click.echo("\t".join(_bench_one(path, chosen, timeout)))


if __name__ == "__main__":
    main()
