"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 budget exceeded, 3 oracle mismatch.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from pathlib import Path

import click

from .asymptotics import LemmaParams, appendix_expression, lemma_ratio
from .errors import BudgetExceeded, SafeSqError
from .exact import (
    SCAN_BUDGET,
    SUBSET_BUDGET,
    VARIANCE_CELL_BUDGET,
    PlacementModel,
    brute_force_distribution,
    default_piece_count,
    distribution_moments,
    exact_variance,
    expected_safe_fraction,
)
from .geometry import BoardSpec, PieceSpec
from .limits import catalog
from .montecarlo import TrialConfig, run_trials
from .sweep import CSV_HEADER, SweepPlan, compute_row, fmt, monotone_decreasing, run_sweep

EXIT_USAGE, EXIT_BUDGET, EXIT_ORACLE = 1, 2, 3


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated integers, got {text!r}") from exc


def board_options(f):
    f = click.option("--budget-cells", type=int, default=VARIANCE_CELL_BUDGET, show_default=True,
                     help="Largest board for pairwise variance.")(f)
    f = click.option("--variant", type=click.Choice(["default", "half-rooks"]), default="default",
                     help="Placement-count rule when --pieces is not given.")(f)
    f = click.option("--pieces", "pieces", type=int, default=None,
                     help="Number of pieces placed (default per piece scope).")(f)
    f = click.option("--scope", type=click.Choice(["line", "hyper"]), default="line", show_default=True)(f)
    f = click.option("--piece", type=click.Choice(["rook", "bishop", "queen"]), required=True)(f)
    f = click.option("--side", "-n", type=int, required=True, help="Side length n.")(f)
    f = click.option("--dims", "-k", type=int, default=2, show_default=True, help="Dimensions k.")(f)
    return f


def _model(dims, side, piece, scope, pieces, variant) -> PlacementModel:
    board = BoardSpec(dims, side)
    spec = PieceSpec(piece, scope)
    p = default_piece_count(board, spec, variant) if pieces is None else pieces
    return PlacementModel(board, spec, p)


def _emit_rows(rows: list[dict], fmt_name: str, out: str | None) -> None:
    """Write sweep-style rows as a table, CSV or JSON to stdout or a file."""
    if fmt_name == "json":
        text = json.dumps([{k: float(fmt(v)) if isinstance(v, float) else v for k, v in r.items()}
                           for r in rows], indent=2) + "\n"
    elif fmt_name == "csv":
        lines = [",".join(CSV_HEADER)]
        for r in rows:
            lines.append(",".join(fmt(r[c]) if isinstance(r[c], float) else
                                  ("" if r[c] is None else str(r[c])) for c in CSV_HEADER))
        text = "\n".join(lines) + "\n"
    else:
        cols = CSV_HEADER + [c for c in ("in_bounds", "oracle", "variance") if any(c in r for r in rows)]
        cells = [[fmt(r.get(c)) if isinstance(r.get(c), float) else str(r.get(c, "-")) for c in cols]
                 for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
        lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
        text = "\n".join(lines).replace("None", "-") + "\n"
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Expected proportion of safe squares under random rook, bishop and queen placements."""


@cli.command()
@board_options
@click.option("--variance/--no-variance", default=False, help="Also compute the exact variance.")
@click.option("--format", "fmt_name", type=click.Choice(["table", "csv", "json"]), default="table")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def exact(dims, side, piece, scope, pieces, variant, budget_cells, variance, fmt_name, out):
    """Exact expected safe fraction with its per-class breakdown."""
    model = _model(dims, side, piece, scope, pieces, variant)
    result = expected_safe_fraction(model)
    if fmt_name != "table":
        plan = SweepPlan([side], dims, [model.piece], engines=["exact"],
                         p_rule=variant if pieces is None else "explicit", explicit_p=[model.p])
        row = compute_row(plan, model.board, model.piece, model.p)
        if variance:
            row["variance"] = float(exact_variance(model, max_cells=budget_cells))
        _emit_rows([row], fmt_name, out)
        return 0
    N = model.board.cells
    click.echo(f"board {model.board} (N={N})  piece {model.piece}  p={model.p}")
    if result.mu_exact is not None:
        click.echo(f"mu = {result.mu_exact} ~ {fmt(result.mu)}")
    else:
        click.echo(f"mu = {fmt(result.mu)}")
    click.echo(f"expected safe cells = {fmt(result.expected_safe)}")
    click.echo(f"{'A':>10} {'cells':>10} {'P(safe)':>20}")
    for a, m, prob in result.per_class:
        click.echo(f"{a:>10} {m:>10} {fmt(prob):>20}")
    if variance:
        click.echo(f"Var(S/N) = {fmt(float(exact_variance(model, max_cells=budget_cells)))}")
    return 0


@cli.command()
@board_options
@click.option("--trials", "-t", type=int, default=10_000, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--format", "fmt_name", type=click.Choice(["table", "csv", "json"]), default="table")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def simulate(dims, side, piece, scope, pieces, variant, budget_cells, trials, seed, workers, fmt_name, out):
    """Monte Carlo estimate of the safe fraction."""
    model = _model(dims, side, piece, scope, pieces, variant)
    if fmt_name != "table":
        plan = SweepPlan([side], dims, [model.piece], engines=["mc"],
                         p_rule=variant if pieces is None else "explicit", explicit_p=[model.p],
                         trials=trials, master_seed=seed, workers=workers)
        _emit_rows([compute_row(plan, model.board, model.piece, model.p)], fmt_name, out)
        return 0
    res = run_trials(TrialConfig(model, trials, seed), workers=workers)
    click.echo(f"board {model.board}  piece {model.piece}  p={model.p}  trials={trials}  seed={seed}")
    click.echo(f"mean safe fraction = {fmt(res.mean_fraction)} +- {fmt(res.standard_error)}")
    click.echo(f"sample variance    = {fmt(res.sample_variance)}")
    return 0


@cli.command()
@click.option("--dims", "-k", type=int, default=2, show_default=True)
@click.option("--sides", required=True, help="Comma-separated, strictly increasing side lengths.")
@click.option("--piece", "piece_names", multiple=True, required=True,
              help="rook|bishop|queen, optionally suffixed -line/-hyper; repeatable.")
@click.option("--scope", type=click.Choice(["line", "hyper"]), default="line", show_default=True)
@click.option("--pieces", "pieces", default=None, help="Explicit piece counts (one, or one per side).")
@click.option("--variant", type=click.Choice(["default", "half-rooks"]), default="default")
@click.option("--engines", default="exact", show_default=True, help="Subset of exact,mc,oracle.")
@click.option("--trials", "-t", type=int, default=1000, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--format", "fmt_name", type=click.Choice(["table", "csv", "json"]), default="csv",
              help="What to echo to stdout; CSV and JSON files are always written.")
@click.option("--out", type=click.Path(file_okay=False), envvar="SAFESQ_OUT_DIR", default=".",
              show_default=True, help="Output directory (env SAFESQ_OUT_DIR).")
@click.option("--budget-cells", type=int, default=SCAN_BUDGET, hidden=True)
@click.option("--budget-subsets", type=int, default=SUBSET_BUDGET, show_default=True)
def sweep(dims, sides, piece_names, scope, pieces, variant, engines, trials, seed, workers,
          fmt_name, out, budget_cells, budget_subsets):
    """Convergence table over side lengths; writes CSV and JSON run records."""
    specs = []
    for name in piece_names:
        specs.append(PieceSpec.parse(name if "-" in name else f"{name}-{scope}"))
    plan = SweepPlan(
        sides=_int_list(sides),
        k=dims,
        pieces=specs,
        p_rule="explicit" if pieces else variant,
        explicit_p=_int_list(pieces) if pieces else [],
        engines=[e.strip() for e in engines.split(",") if e.strip()],
        trials=trials,
        master_seed=seed,
        workers=workers,
        scan_budget=budget_cells,
        subset_budget=budget_subsets,
    )
    record, (csv_path, json_path) = run_sweep(plan, Path(out))
    if fmt_name == "csv":
        click.echo(csv_path.read_text(), nl=False)
    elif fmt_name == "json":
        click.echo(json_path.read_text(), nl=False)
    else:
        _emit_rows(record.rows, "table", None)
    click.echo(f"wrote {csv_path} and {json_path}", err=True)
    if any(r.get("oracle") == "FAIL" for r in record.rows):
        return EXIT_ORACLE
    return 0


@cli.command()
@board_options
@click.option("--budget-subsets", type=int, default=SUBSET_BUDGET, show_default=True)
def oracle(dims, side, piece, scope, pieces, variant, budget_cells, budget_subsets):
    """Cross-check exact mean and variance against exhaustive enumeration."""
    model = _model(dims, side, piece, scope, pieces, variant)
    dist = brute_force_distribution(model, budget=budget_subsets)
    mean, var = distribution_moments(dist)
    N = model.board.cells
    mu = expected_safe_fraction(model, exact=True).mu_exact
    v = exact_variance(model, exact=True, max_cells=budget_cells)
    click.echo(f"board {model.board}  piece {model.piece}  p={model.p}  placements={math.comb(N, model.p)}")
    click.echo("distribution: " + ", ".join(f"{s}: {q}" for s, q in dist.items()))
    ok_mean = mean / N == mu
    ok_var = var / (N * N) == v
    click.echo(f"{'PASS' if ok_mean else 'FAIL'} mean      oracle {mean / N}  exact {mu}")
    click.echo(f"{'PASS' if ok_var else 'FAIL'} variance  oracle {var / (N * N)}  exact {v}")
    return 0 if ok_mean and ok_var else EXIT_ORACLE


def _convergence_table(rows: list[tuple[int, float]], limit: float, fmt_name: str) -> None:
    errors = [abs(v - limit) for _, v in rows]
    if fmt_name == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["n", "value", "limit", "abs_err"])
        for (n, v), e in zip(rows, errors):
            writer.writerow([n, fmt(v), fmt(limit), fmt(e)])
    else:
        click.echo(f"{'n':>12} {'value':>20} {'|value - limit|':>20}")
        for (n, v), e in zip(rows, errors):
            click.echo(f"{n:>12} {fmt(v):>20} {fmt(e):>20}")
    trend = "decreasing" if monotone_decreasing(errors) else "not monotone"
    click.echo(f"# limit {fmt(limit)}; error {trend} over {len(rows)} sizes", err=fmt_name == "csv")


@cli.command()
@click.option("--a", "a", type=int, required=True)
@click.option("--b", "b", type=int, default=0, show_default=True)
@click.option("--c", "c", type=int, required=True)
@click.option("--d", "d", type=int, default=1, show_default=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--m", "m", type=int, required=True)
@click.option("--sides", default="10,100,1000", show_default=True)
@click.option("--format", "fmt_name", type=click.Choice(["table", "csv"]), default="table")
def lemma(a, b, c, d, k, m, sides, fmt_name):
    """Finite-n binomial ratio against its exp(-d a) limit."""
    params = LemmaParams(a=a, b=b, c=c, d=d, k=k, m=m)
    rows = [(n, lemma_ratio(params, n)) for n in _int_list(sides)]
    _convergence_table(rows, params.limit, fmt_name)
    return 0


@cli.command()
@click.option("--variant", type=click.Choice(["A1", "A2"]), required=True)
@click.option("--sides", default="1000,10000,100000,1000000", show_default=True)
@click.option("--format", "fmt_name", type=click.Choice(["table", "csv"]), default="table")
def appendix(variant, sides, fmt_name):
    """Finite-n appendix expressions against their limit 1/4."""
    rows = [(n, appendix_expression(n, variant)) for n in _int_list(sides)]
    _convergence_table(rows, 0.25, fmt_name)
    return 0


@cli.command()
def limits():
    """Print the catalogue of limit constants and bounds."""
    click.echo(f"{'piece':<14} {'k':>2} {'variant':<11} {'lower':>16} {'upper':>16}  description")
    for piece, k, variant, lim in catalog():
        click.echo(f"{piece.name:<14} {k:>2} {variant:<11} {fmt(lim.lower):>16} {fmt(lim.upper):>16}  {lim.description}")
    return 0


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and map failures onto the documented exit codes."""
    try:
        rv = cli.main(args=argv, prog_name="safesq", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except BudgetExceeded as exc:
        click.echo(f"budget exceeded: {exc}", err=True)
        return EXIT_BUDGET
    except (SafeSqError, ValueError, TypeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    return rv if isinstance(rv, int) else 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
