"""Command-line front end: ``antidist analyze|sweep|generate|verify|thresholds``.

Exit codes: 0 success, 1 usage or input error, 2 certificate rejected,
3 solver undecided.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path

import click
import numpy as np

from .analysis import (
    METHODS,
    SWEEP_COLUMNS,
    analyze,
    gamma_grid,
    sweep_equiangular,
)
from .certificates import (
    VERIFY_TOL,
    Decision,
    certificate_from_json,
    certificate_to_json,
    verify_certificate,
)
from .criteria import phase_boundaries
from .exceptions import AntidistError
from .formats import (
    gram_to_json,
    load_hermitian,
    load_input,
    read_json,
    states_to_json,
    write_json,
)
from .gram import (
    circulant_from_eigenvalues,
    gram_from_states,
    make_d4_example,
    make_equiangular,
    make_trine,
    states_from_gram,
)
from .sdp import ZERO_TOL, SolverConfig

EXIT_USAGE = 1
EXIT_REJECTED = 2
EXIT_UNDECIDED = 3


class _Group(click.Group):
    """Maps errors onto the documented exit codes (click defaults usage errors to 2)."""

    def main(self, args=None, prog_name=None, **extra):
        try:
            rv = super().main(args=args, prog_name=prog_name, standalone_mode=False, **extra)
        except click.exceptions.Exit as exc:
            sys.exit(exc.exit_code)
        except click.UsageError as exc:
            exc.show()
            sys.exit(EXIT_USAGE)
        except click.ClickException as exc:
            exc.show()
            sys.exit(exc.exit_code)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)
        sys.exit(rv or 0)


def _fail(exc: Exception) -> click.ClickException:
    err = click.ClickException(str(exc))
    err.exit_code = EXIT_USAGE
    return err


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _emit_text(path: str, text: str) -> None:
    if path == "-":
        click.echo(text, nl=False)
    else:
        Path(path).write_text(text)


@click.group(cls=_Group)
def main():
    """Decide antidistinguishability of pure quantum states and certify the answer."""


@main.command("analyze")
@click.argument("input_path", metavar="INPUT", type=click.Path(dir_okay=False))
@click.option("--method", type=click.Choice(METHODS), default="auto", show_default=True)
@click.option("--tol", type=float, default=VERIFY_TOL, show_default=True, help="Certificate verification tolerance.")
@click.option("--zero-tol", type=float, default=ZERO_TOL, show_default=True, help="SDP value counted as zero.")
@click.option("--max-iter", type=click.IntRange(min=1), default=SolverConfig.max_iter, show_default=True)
@click.option("--json", "fmt", flag_value="json", default=True, help="JSON report (default).")
@click.option("--csv", "fmt", flag_value="csv", help="One-row CSV summary.")
@click.option("--cert", "cert_path", type=click.Path(dir_okay=False), help="Also write the certificate here.")
@click.option("--no-timings", is_flag=True, help="Omit stage timings (byte-stable output).")
@click.option("-o", "--output", default="-", show_default=True, help="Report destination.")
def analyze_cmd(input_path, method, tol, zero_tol, max_iter, fmt, cert_path, no_timings, output):
    """Analyze a Gram-matrix or state-set file."""
    try:
        g, _ = load_input(input_path)
        rep = analyze(g, method=method, cfg=SolverConfig(max_iter=max_iter), zero_tol=zero_tol, tol=tol)
    except AntidistError as exc:
        raise _fail(exc) from exc
    if fmt == "csv":
        cols = ("n", "decision", "decided_by", "sdp_value", "error_probability")
        row = rep.to_json(timings=False)
        _emit_text(output, _csv_text(cols, [row]))
    else:
        write_json(output, rep.to_json(timings=not no_timings))
    if cert_path and rep.certificate is not None:
        write_json(cert_path, certificate_to_json(rep.certificate))
    if rep.decision is Decision.UNDECIDED:
        return EXIT_UNDECIDED
    return 0


@main.command("sweep")
@click.option("--family", type=click.Choice(["equiangular"]), default="equiangular", show_default=True)
@click.option("--n-min", type=click.IntRange(min=2), default=2, show_default=True)
@click.option("--n-max", type=click.IntRange(min=2), default=10, show_default=True)
@click.option("--gamma-min", type=click.FloatRange(0, 1), default=0.0, show_default=True)
@click.option("--gamma-max", type=click.FloatRange(0, 1), default=1.0, show_default=True)
@click.option("--gamma-step", type=float, default=0.01, show_default=True)
@click.option("--zero-tol", type=float, default=ZERO_TOL, show_default=True)
@click.option("--max-iter", type=click.IntRange(min=1), default=SolverConfig.max_iter, show_default=True)
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker threads (capped by ANTIDIST_THREADS).")
@click.option("-o", "--output", default="-", show_default=True, help="CSV destination.")
def sweep_cmd(family, n_min, n_max, gamma_min, gamma_max, gamma_step, zero_tol, max_iter, threads, output):
    """Optimal exclusion error across a grid of equiangular sets."""
    if n_max < n_min:
        raise _fail(ValueError(f"--n-max {n_max} is below --n-min {n_min}"))
    try:
        gammas = gamma_grid(gamma_min, gamma_max, gamma_step)
        rows = sweep_equiangular(
            range(n_min, n_max + 1), gammas, SolverConfig(max_iter=max_iter), zero_tol, threads
        )
    except AntidistError as exc:
        raise _fail(exc) from exc
    _emit_text(output, _csv_text(SWEEP_COLUMNS, rows))
    unconverged = sum(not r["converged"] for r in rows)
    if unconverged:
        click.echo(f"warning: {unconverged} rows did not converge", err=True)
    return 0


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}") from exc


@main.command("generate")
@click.argument("family", type=click.Choice(["trine", "equiangular", "d4", "circulant-spectrum"]))
@click.option("--n", "n", type=int, help="Number of states (equiangular).")
@click.option("--gamma", type=float, help="Common inner product (equiangular).")
@click.option("--eps", type=float, help="Perturbation size (d4).")
@click.option("--lams", help="Comma-separated eigenvalues summing to n (circulant-spectrum).")
@click.option("--states", "as_states", is_flag=True, help="Emit a state set instead of a Gram matrix.")
@click.option("-o", "--output", default="-", show_default=True, help="Destination; for d4 a filename prefix.")
def generate_cmd(family, n, gamma, eps, lams, as_states, output):
    """Write an example Gram matrix (or state set) to a file."""
    try:
        if family == "trine":
            s = make_trine()
            write_json(output, states_to_json(s) if as_states else gram_to_json(gram_from_states(s)))
            return 0
        if family == "d4":
            if eps is None:
                raise click.UsageError("d4 needs --eps")
            g, g_eps = make_d4_example(eps)
            prefix = "d4" if output == "-" else output
            for suffix, mat in (("_G.json", g), ("_G_eps.json", g_eps)):
                path = prefix + suffix
                write_json(path, _encode(mat, as_states))
                click.echo(path, err=True)
            return 0
        if family == "equiangular":
            if n is None or gamma is None:
                raise click.UsageError("equiangular needs --n and --gamma")
            g = make_equiangular(n, gamma)
        else:
            if lams is None:
                raise click.UsageError("circulant-spectrum needs --lams")
            g = circulant_from_eigenvalues(_parse_floats(lams))
        write_json(output, _encode(g, as_states))
    except AntidistError as exc:
        raise _fail(exc) from exc
    return 0


def _encode(g, as_states: bool) -> dict:
    return states_to_json(states_from_gram(g)) if as_states else gram_to_json(g)


@main.command("verify")
@click.argument("gram_path", metavar="GRAM", type=click.Path(dir_okay=False))
@click.argument("cert_path", metavar="CERTIFICATE", type=click.Path(dir_okay=False))
@click.option("--tol", type=float, default=VERIFY_TOL, show_default=True)
def verify_cmd(gram_path, cert_path, tol):
    """Check a stored certificate against a Gram matrix."""
    try:
        g = load_hermitian(gram_path)
        obj = read_json(cert_path)
        declared = obj.get("n")
        cert = certificate_from_json(obj)
        if declared is not None and declared != g.shape[0]:
            raise ValueError(f"certificate is for n={declared}, matrix has n={g.shape[0]}")
        rep = verify_certificate(g, cert, tol)
    except (AntidistError, ValueError, KeyError, TypeError) as exc:
        raise _fail(exc) from exc
    margins = {k: (bool(v) if isinstance(v, (bool, np.bool_)) else v) for k, v in rep.margins.items()}
    click.echo(json.dumps({"kind": rep.kind, "accepted": rep.accepted, "margins": margins, "reason": rep.reason}, indent=2))
    return 0 if rep.accepted else EXIT_REJECTED


@main.command("thresholds")
@click.option("--n-min", type=click.IntRange(min=2), default=2, show_default=True)
@click.option("--n-max", type=click.IntRange(min=2), default=10, show_default=True)
@click.option("-o", "--output", default="-", show_default=True)
def thresholds_cmd(n_min, n_max, output):
    """Inner-product thresholds of the pairwise rules, one CSV row per n."""
    rows = phase_boundaries(range(n_min, n_max + 1))
    _emit_text(output, _csv_text(("n", "anti_at_or_below", "not_anti_above"), rows))
    return 0


if __name__ == "__main__":
    main()
