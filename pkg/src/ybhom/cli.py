"""Batch command line for ybhom.

Every option can also be set through an environment variable named
``YBHOM_<COMMAND>_<OPTION>``, e.g. ``YBHOM_TABLE_THREADS=4`` or
``YBHOM_HOMOLOGY_COEFF=q``.
"""

from __future__ import annotations

import csv
import io
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass
from pathlib import Path

import click

from .biquandle import (
    Biquandle,
    BiquandleError,
    as_map,
    check_axioms,
    check_property_I,
    parse_spec,
)
from .chain_complex import Variant, boundary_matrix, inject_face_fault
from .homology import (
    PreconditionError,
    compute_cohomology,
    compute_homology,
    cocycle_basis,
    orbit_representative,
    parse_coefficients,
    verify_betti,
    verify_conjecture,
    verify_equivariance,
    verify_splitting,
    verify_torsion_bound,
)
from .intlinalg import AbelianGroup, Budget, BudgetExceeded, write_sms
from . import __version__
from .table import EXPECTED, cell_key, cells

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


class BudgetError(click.ClickException):
    exit_code = EXIT_BUDGET


@dataclass(frozen=True)
class RunConfig:
    spec: str
    degrees: tuple[int, ...]
    variants: tuple[str, ...]
    coeff: str
    fmt: str
    threads: int
    budget_entries: int
    max_seconds: float | None
    export: str | None

    @property
    def budget(self) -> Budget:
        return Budget(max_entries=self.budget_entries, max_seconds=self.max_seconds)


def parse_range(text: str) -> tuple[int, ...]:
    """``"3"`` or ``"1..5"`` as a tuple of degrees."""
    match = re.fullmatch(r"\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?", text)
    if not match:
        raise InputError(f"bad degree range {text!r}; use N or A..B")
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) else lo
    if lo < 1 or hi < lo:
        raise InputError(f"degree range {text!r} must satisfy 1 <= A <= B")
    return tuple(range(lo, hi + 1))


def parse_variants(text: str) -> tuple[str, ...]:
    if text.lower() == "all":
        return ("YB", "D", "NYB")
    try:
        return tuple(dict.fromkeys(Variant.parse(v.strip()).value for v in text.split(",")))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def load_spec(spec: str):
    try:
        return parse_spec(spec)
    except (BiquandleError, ValueError, OSError) as exc:
        raise InputError(str(exc)) from None


def cyclic_order(spec: str) -> int:
    match = re.fullmatch(r"cyclic:(\d+)", spec.strip())
    if not match:
        raise InputError(f"this check needs a cyclic biquandle spec (cyclic:<m>), got {spec!r}")
    load_spec(spec)
    return int(match.group(1))


def check_size(m: int, degrees, budget_entries: int) -> None:
    top = max(degrees)
    if m ** (top + 1) > budget_entries:
        raise BudgetError(
            f"degree {top} needs a basis of {m}^{top + 1} = {m ** (top + 1)} tuples, "
            f"over the entry budget {budget_entries}"
        )


def _coeff_or_fail(text: str) -> str:
    try:
        return parse_coefficients(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def group_text(free: int, torsion) -> str:
    return str(AbelianGroup(free, tuple(torsion)))


def csv_group(free: int, torsion) -> str:
    text = f"rank={free}"
    if torsion:
        text += ";torsion=" + "|".join(str(t) for t in torsion)
    return text


# ---------------------------------------------------------------------------
# cell workers (module level so a process pool can pickle them)


def _homology_cell(spec, n, variant, coeff, kind, budget_entries, max_seconds, fault, export):
    B = parse_spec(spec)
    budget = Budget(max_entries=budget_entries, max_seconds=max_seconds)
    with inject_face_fault() if fault else nullcontext():
        fn = compute_cohomology if kind == "cohomology" else compute_homology
        report = fn(B, n, variant, coeff, budget)
        if export:
            for deg in (n, n + 1):
                path = Path(export) / f"{_label(spec)}_{variant}_d{deg}.sms"
                write_sms(boundary_matrix(B, deg, variant, budget), path)
    return report.to_json()


def _table_cell(m, n, variant, fault, budget_entries, max_seconds):
    from .biquandle import make_cyclic

    budget = Budget(max_entries=budget_entries, max_seconds=max_seconds)
    try:
        with inject_face_fault() if fault else nullcontext():
            report = compute_homology(make_cyclic(m), n, variant, "Z", budget)
    except AssertionError as exc:
        return None, str(exc)
    return report.free_rank, list(report.torsion)


def _label(spec: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", Path(spec).stem if spec.endswith(".json") else spec).strip("_")


def run_cells(fn, jobs: list[tuple], threads: int):
    """Yield ``(job, result)`` in job order; results may finish in any order."""
    if threads <= 1 or len(jobs) <= 1:
        for job in jobs:
            yield job, fn(*job)
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, *job) for job in jobs]
        for job, fut in zip(jobs, futures):
            yield job, fut.result()


def _guard(fn):
    """Map library errors onto the documented exit codes."""
    try:
        return fn()
    except BudgetExceeded as exc:
        raise BudgetError(str(exc)) from None
    except (BiquandleError, PreconditionError, ValueError, OSError) as exc:
        raise InputError(str(exc)) from None


# ---------------------------------------------------------------------------
# commands


common_threads = click.option("--threads", type=int, default=1, show_default=True, help="Worker processes.")
common_budget = click.option(
    "--budget-entries", type=int, default=50_000_000, show_default=True, help="Largest tuple basis / matrix allowed."
)
common_seconds = click.option("--max-seconds", type=float, default=None, help="Wall-clock ceiling per cell.")
common_format = click.option(
    "--format", "format", type=click.Choice(["json", "csv", "plain"]), default="plain", show_default=True
)


@click.group(context_settings={"auto_envvar_prefix": "YBHOM", "help_option_names": ["-h", "--help"]})
@click.version_option(version=__version__, prog_name="ybhom")
def main():
    """Yang-Baxter (co)homology of finite biquandles."""


@main.command()
@click.argument("spec")
@click.option("--format", "format", type=click.Choice(["json", "plain"]), default="plain")
def axioms(spec, format):
    fmt = format
    """Check every axiom of SPEC; exit 0 iff it is a biquandle."""
    R = as_map(load_spec(spec))
    cert = check_axioms(R)
    verdicts = {name: getattr(cert, name) for name in cert.ORDER}
    verdicts["property_I"] = check_property_I(R)
    if fmt == "json":
        click.echo(json.dumps({"spec": spec, "verdicts": verdicts, "witnesses": cert.as_dict()["witnesses"]}, sort_keys=True))
    else:
        for name, ok in verdicts.items():
            line = f"{name:18s} {'pass' if ok else 'FAIL'}"
            if not ok and name in cert.witnesses:
                line += f"  witness {cert.witnesses[name]}"
            click.echo(line)
        click.echo(f"biquandle: {'yes' if cert.is_biquandle else 'no'}")
    sys.exit(EXIT_OK if cert.is_biquandle else EXIT_MISMATCH)


@main.command()
@click.argument("spec")
@click.option("--n", "degree_range", default="1..5", show_default=True, help="Degree N or range A..B.")
@click.option("--variant", default="all", show_default=True, help="yb, d, nyb, all or a comma list.")
@click.option("--coeff", default="z", show_default=True, help="z, q or zp:<p>.")
@click.option("--cohomology", is_flag=True, help="Report H^n instead of H_n.")
@common_format
@common_threads
@common_budget
@common_seconds
@click.option("--export", type=click.Path(file_okay=False), default=None, help="Also write boundary matrices here.")
def homology(spec, degree_range, variant, coeff, cohomology, format, threads, budget_entries, max_seconds, export):
    """Compute (co)homology of SPEC for each degree and variant."""
    fmt = format
    config = RunConfig(
        spec, parse_range(degree_range), parse_variants(variant), _coeff_or_fail(coeff),
        fmt, threads, budget_entries, max_seconds, export,
    )
    B = load_spec(spec)
    if not isinstance(B, Biquandle) and set(config.variants) & {"D", "NYB"}:
        cert = check_axioms(B)
        if not cert.is_biquandle:
            name, witness = cert.first_failure()
            raise InputError(f"degenerate variants need a biquandle; axiom {name} fails at {witness}")
    check_size(as_map(B).m, config.degrees, budget_entries)
    if export:
        Path(export).mkdir(parents=True, exist_ok=True)
    kind = "cohomology" if cohomology else "homology"
    jobs = [
        (spec, n, v, config.coeff, kind, budget_entries, max_seconds, False, export)
        for n in config.degrees
        for v in config.variants
    ]
    writer = _Emitter(fmt, ["spec", "kind", "m", "n", "variant", "coeff", "group"])

    def go():
        for job, data in run_cells(_homology_cell, jobs, threads):
            data = {"spec": spec, "kind": kind, **data}
            writer.emit(data, _report_row(data))

    _guard(go)
    writer.close()


def _report_row(data: dict) -> dict:
    out = {k: data[k] for k in ("spec", "kind", "m", "n", "variant", "coeff")}
    if data["coeff"] == "Z":
        out["group"] = group_text(data["free_rank"], data["torsion"])
        out["csv"] = csv_group(data["free_rank"], data["torsion"])
    else:
        out["group"] = f"dim {data['free_rank']}"
        out["csv"] = f"rank={data['free_rank']}"
    return out


class _Emitter:
    """Streams records as JSON lines, CSV rows or plain text."""

    def __init__(self, fmt: str, columns: list[str]):
        self.fmt = fmt
        self.columns = columns
        self.started = False

    def emit(self, data: dict, row: dict) -> None:
        if self.fmt == "json":
            click.echo(json.dumps(data, sort_keys=True))
        elif self.fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            if not self.started:
                w.writerow(self.columns)
            w.writerow([row.get("csv", row.get(c)) if c == "group" else row.get(c) for c in self.columns])
            click.echo(buf.getvalue(), nl=False)
        else:
            sym = "H^" if row.get("kind") == "cohomology" else "H_"
            if "group" in row:
                click.echo(f"{row['spec']} {sym}{row['n']} {row['variant']} ({row['coeff']}): {row['group']}")
            else:
                click.echo(" ".join(f"{k}={v}" for k, v in row.items()))
        self.started = True

    def close(self) -> None:
        pass


@main.command()
@click.option("--subset", default=None, help="Restrict to one size, e.g. C_3.")
@common_format
@common_threads
@common_budget
@common_seconds
@click.option("--inject-fault", is_flag=True, hidden=True)
def table(subset, format, threads, budget_entries, max_seconds, inject_fault):
    """Recompute the reference grid of cyclic biquandle homology and diff it."""
    fmt = format
    try:
        grid = cells(subset)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    jobs = [(m, n, v, inject_fault, budget_entries, max_seconds) for m, n, v in grid]
    lines, matched = table_lines(jobs, threads, fmt)
    for line in lines:
        click.echo(line)
    sys.exit(EXIT_OK if matched == len(grid) else EXIT_MISMATCH)


def table_lines(jobs, threads, fmt):
    rows = []

    def go():
        for job, (free, torsion) in run_cells(_table_cell, jobs, threads):
            # an engine assertion is recorded as a failed cell with its message
            rows.append((job[:3], torsion if free is None else AbelianGroup(free, tuple(torsion))))

    _guard(go)
    rows.sort(key=lambda r: cell_key(r[0]))
    matched = sum(EXPECTED[c] == g for c, g in rows)
    total = len(rows)
    out = []
    if fmt == "json":
        for (m, n, v), g in rows:
            exp = EXPECTED[(m, n, v)]
            out.append(json.dumps({
                "m": m, "n": n, "variant": v,
                "computed": _group_json(g),
                "expected": {"free_rank": exp.free_rank, "torsion": list(exp.torsion)},
                "match": g == exp,
            }, sort_keys=True))
        out.append(json.dumps({"matched": matched, "total": total}, sort_keys=True))
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "n", "variant", "computed", "expected", "match"])
        for (m, n, v), g in rows:
            exp = EXPECTED[(m, n, v)]
            got = csv_group(g.free_rank, g.torsion) if isinstance(g, AbelianGroup) else f"error={g}"
            w.writerow([m, n, v, got, csv_group(exp.free_rank, exp.torsion), g == exp])
        out.extend(buf.getvalue().splitlines())
    else:
        for (m, n, v), g in rows:
            exp = EXPECTED[(m, n, v)]
            mark = "ok" if g == exp else f"DIFF expected {exp}"
            shown = str(g) if isinstance(g, AbelianGroup) else "error"
            out.append(f"C_{m} H_{n} {v:3s} {shown:16s} {mark}")
        out.append(f"{matched}/{total} match")
    return out, matched


def _group_json(g):
    if isinstance(g, AbelianGroup):
        return {"free_rank": g.free_rank, "torsion": list(g.torsion)}
    return {"error": g}


VERIFY_KINDS = ("betti", "torsion", "conjecture", "splitting", "equivariance", "property-i")


@main.command()
@click.argument("which", type=click.Choice(VERIFY_KINDS))
@click.argument("spec")
@click.option("--n", "degree_range", default="1..3", show_default=True)
@common_budget
@common_seconds
def verify(which, spec, degree_range, budget_entries, max_seconds):
    """Check a structural statement on SPEC; prints one JSON line per cell."""
    degrees = parse_range(degree_range)
    budget = Budget(max_entries=budget_entries, max_seconds=max_seconds)
    ok = True

    def emit(report: dict):
        nonlocal ok
        ok = ok and report["passed"]
        click.echo(json.dumps(report, sort_keys=True))

    if which == "property-i":
        R = as_map(load_spec(spec))
        emit({"check": "property_I", "spec": spec, "m": R.m, "passed": check_property_I(R)})
        sys.exit(EXIT_OK if ok else EXIT_MISMATCH)
    if which == "equivariance":
        B = load_spec(spec)
        check_size(as_map(B).m, [d + 1 for d in degrees], budget_entries)
        if not check_property_I(as_map(B)):
            raise InputError("equivariance needs property (I), which this operator lacks")
        for n in degrees:
            emit(_guard(lambda: verify_equivariance(B, n, budget)).to_json())
        sys.exit(EXIT_OK if ok else EXIT_MISMATCH)
    m = cyclic_order(spec)
    check_size(m, degrees, budget_entries)
    fn = {
        "betti": verify_betti,
        "torsion": verify_torsion_bound,
        "conjecture": verify_conjecture,
        "splitting": verify_splitting,
    }[which]
    for n in degrees:
        emit(_guard(lambda: fn(m, n, budget)).to_json())
    sys.exit(EXIT_OK if ok else EXIT_MISMATCH)


@main.command()
@click.argument("spec")
@click.option("--n", "degree", type=int, required=True, help="Degree of the boundary matrix.")
@click.option("--variant", default="yb", show_default=True)
@click.option("--export", type=click.Path(file_okay=False), default=".", show_default=True)
@common_budget
def export(spec, degree, variant, export, budget_entries):
    """Write the boundary matrix of SPEC in degree N as an SMS file."""
    if degree < 1:
        raise InputError("degree must be at least 1")
    (v,) = parse_variants(variant)[:1]
    B = load_spec(spec)
    check_size(as_map(B).m, [degree - 1], budget_entries)
    budget = Budget(max_entries=budget_entries)
    mat = _guard(lambda: boundary_matrix(B, degree, v, budget))
    Path(export).mkdir(parents=True, exist_ok=True)
    path = Path(export) / f"{_label(spec)}_{v}_d{degree}.sms"
    write_sms(mat, path)
    click.echo(f"{path} {mat.rows}x{mat.cols} nnz={mat.nnz}")


@main.command()
@click.argument("m", type=int)
@click.argument("n", type=int)
@click.option("--export", type=click.Path(file_okay=False), default=None, help="Write one JSON file per cocycle.")
@common_budget
def cocycles(m, n, export, budget_entries):
    """Dump the orbit cocycle basis of the cyclic biquandle of order M in degree N."""
    if m < 1 or n < 1:
        raise InputError("m and n must be positive")
    check_size(m, [n - 1], budget_entries)
    if export:
        Path(export).mkdir(parents=True, exist_ok=True)
    for i, F in enumerate(cocycle_basis(m, n)):
        rep = orbit_representative(_first_tuple(F), m)
        record = {"index": i, "representative": list(rep), **F.to_json()}
        text = json.dumps(record, sort_keys=True)
        if export:
            (Path(export) / f"cocycle_m{m}_n{n}_{i}.json").write_text(text + "\n")
        click.echo(text)


def _first_tuple(F):
    from .chain_complex import decode

    return decode(min(F.values), F.m, F.n)


if __name__ == "__main__":
    main()
