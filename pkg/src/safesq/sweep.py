"""Convergence sweeps: plan validation, row computation and run persistence."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import BudgetExceeded, NotCatalogued, UniverseTooLarge
from .exact import (
    LINE_COUNT_BUDGET,
    SCAN_BUDGET,
    SUBSET_BUDGET,
    PlacementModel,
    brute_force_distribution,
    default_piece_count,
    distribution_moments,
    expected_safe_fraction,
)
from .geometry import BoardSpec, Family, PieceSpec, families_meet_only_at_origin
from .limits import limit_constant
from .montecarlo import MC_CELL_BUDGET, TrialConfig, run_trials

CSV_HEADER = ["k", "n", "piece", "scope", "p", "exact_mu", "mc_mean", "mc_se", "limit_lo", "limit_hi", "abs_err"]
ENGINES = ("exact", "mc", "oracle")
SIG_DIGITS = 12


def fmt(x: float | None) -> str:
    """12 significant digits; empty for missing values."""
    if x is None:
        return ""
    return format(x, f".{SIG_DIGITS}g")


def _rounded(x: float | None) -> float | None:
    return None if x is None else float(fmt(x))


def check_exact_budget(board: BoardSpec, piece: PieceSpec, scan_budget: int = SCAN_BUDGET) -> None:
    """Raise if :func:`attack_histogram` would exceed its budget on this board."""
    if piece.family is Family.ROOK or board.k == 2:
        return
    if families_meet_only_at_origin(piece, board):
        if board.cells > LINE_COUNT_BUDGET:
            raise UniverseTooLarge(f"{board.cells} cells exceeds the ray-count budget")
        return
    half = (board.n + 1) // 2
    orbits = math.comb(half + board.k - 1, board.k)
    if orbits * board.cells > scan_budget:
        raise UniverseTooLarge(f"scan of {orbits} orbits x {board.cells} cells exceeds {scan_budget}")


@dataclass
class SweepPlan:
    sides: list[int]
    k: int
    pieces: list[PieceSpec]
    p_rule: str = "default"  # "default", "half-rooks" or "explicit"
    explicit_p: list[int] = field(default_factory=list)
    engines: list[str] = field(default_factory=lambda: ["exact"])
    trials: int = 1000
    master_seed: int = 0
    workers: int = 1
    scan_budget: int = SCAN_BUDGET
    subset_budget: int = SUBSET_BUDGET

    def validate(self) -> None:
        """Reject the plan up front if any row is malformed or over budget."""
        if not self.sides:
            raise ValueError("sweep needs at least one side length")
        if any(b <= a for a, b in zip(self.sides, self.sides[1:])):
            raise ValueError(f"side lengths must be strictly increasing: {self.sides}")
        if not self.pieces:
            raise ValueError("sweep needs at least one piece")
        bad = set(self.engines) - set(ENGINES)
        if bad or not self.engines:
            raise ValueError(f"engines must be a nonempty subset of {ENGINES}, got {self.engines}")
        if self.p_rule == "explicit" and len(self.explicit_p) not in (1, len(self.sides)):
            raise ValueError("explicit piece counts must be one value or one per side length")
        if self.p_rule not in ("default", "half-rooks", "explicit"):
            raise ValueError(f"unknown p-rule {self.p_rule!r}")
        for board, piece, p in self.rows():
            PlacementModel(board, piece, p)
            if "exact" in self.engines:
                check_exact_budget(board, piece, self.scan_budget)
            if "mc" in self.engines and board.cells > MC_CELL_BUDGET:
                raise UniverseTooLarge(f"{board} exceeds the Monte Carlo cell budget")
            if "oracle" in self.engines and math.comb(board.cells, p) > self.subset_budget:
                raise BudgetExceeded(f"C({board.cells}, {p}) placements exceeds {self.subset_budget}")

    def rows(self):
        for i, n in enumerate(self.sides):
            board = BoardSpec(self.k, n)
            for piece in self.pieces:
                if self.p_rule == "explicit":
                    p = self.explicit_p[i if len(self.explicit_p) > 1 else 0]
                else:
                    p = default_piece_count(board, piece, self.p_rule)
                yield board, piece, p

    def echo(self) -> dict:
        d = asdict(self)
        d["pieces"] = [p.name for p in self.pieces]
        return d

    @property
    def digest(self) -> str:
        blob = json.dumps(self.echo(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class RunRecord:
    plan: dict
    rows: list[dict]
    started: str
    finished: str
    version: str
    master_seed: int
    failed: bool = False


def compute_row(plan: SweepPlan, board: BoardSpec, piece: PieceSpec, p: int) -> dict:
    model = PlacementModel(board, piece, p)
    row: dict = {
        "k": board.k,
        "n": board.n,
        "piece": piece.family.value,
        "scope": piece.scope.value,
        "p": p,
        "exact_mu": None,
        "mc_mean": None,
        "mc_se": None,
        "limit_lo": None,
        "limit_hi": None,
        "abs_err": None,
    }
    exact = None
    if "exact" in plan.engines or "oracle" in plan.engines:
        exact = expected_safe_fraction(model, exact=True if "oracle" in plan.engines else None)
        row["exact_mu"] = exact.mu
    if "mc" in plan.engines:
        mc = run_trials(TrialConfig(model, plan.trials, plan.master_seed), workers=plan.workers)
        row["mc_mean"], row["mc_se"] = mc.mean_fraction, mc.standard_error
    if "oracle" in plan.engines:
        mean, _ = distribution_moments(brute_force_distribution(model, budget=plan.subset_budget))
        row["oracle"] = "PASS" if exact.mu_exact == mean / board.cells else "FAIL"
    variant = plan.p_rule if plan.p_rule == "half-rooks" else "default"
    try:
        limit = limit_constant(piece, board.k, variant)
    except NotCatalogued:
        return row
    row["limit_lo"], row["limit_hi"] = limit.lower, limit.upper
    value = row["exact_mu"] if row["exact_mu"] is not None else row["mc_mean"]
    if limit.kind == "exact":
        row["abs_err"] = abs(value - limit.value)
    else:
        row["in_bounds"] = limit.contains(value)
    return row


def _csv_cells(row: dict) -> list[str]:
    if row.get("error"):
        return [str(row[c]) for c in CSV_HEADER[:5]] + ["FAILED"] + [""] * 5
    out = []
    for col in CSV_HEADER:
        v = row.get(col)
        if col == "abs_err" and "in_bounds" in row:
            out.append("in_bounds" if row["in_bounds"] else "out_of_bounds")
        elif isinstance(v, float):
            out.append(fmt(v))
        else:
            out.append("" if v is None else str(v))
    return out


def _json_row(row: dict) -> dict:
    return {k: _rounded(v) if isinstance(v, float) else v for k, v in row.items()}


def write_record(record: RunRecord, out_dir: Path, stem: str) -> tuple[Path, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{stem}.csv"
    json_path = out_dir / f"{stem}.json"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in record.rows:
            writer.writerow(_csv_cells(row))
    payload = asdict(record)
    payload["rows"] = [_json_row(r) for r in record.rows]
    json_path.write_text(json.dumps(payload, indent=2) + "\n")
    return csv_path, json_path


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_sweep(plan: SweepPlan, out_dir: Path) -> tuple[RunRecord, tuple[Path, Path]]:
    """Compute every row and persist CSV + JSON named by plan digest and seed.

    On an engine error the rows computed so far are written together with a
    failure marker row, then the error is re-raised.
    """
    plan.validate()
    stem = f"sweep-{plan.digest}-seed{plan.master_seed}"
    record = RunRecord(plan.echo(), [], _now(), "", __version__, plan.master_seed)
    try:
        for board, piece, p in plan.rows():
            try:
                record.rows.append(compute_row(plan, board, piece, p))
            except Exception as exc:
                record.rows.append({
                    "k": board.k, "n": board.n, "piece": piece.family.value,
                    "scope": piece.scope.value, "p": p, "error": f"{type(exc).__name__}: {exc}",
                })
                record.failed = True
                raise
    finally:
        record.finished = _now()
        paths = write_record(record, out_dir, stem)
    return record, paths


def monotone_decreasing(values: list[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))

