"""Exact expectation and variance of the number of safe cells.

A cell whose attackers occupy ``A`` cells stays safe with probability
``C(N - A, p) / C(N, p)`` when ``p`` pieces are placed uniformly on distinct
cells.  Expectations therefore only need the histogram of per-cell attack
counts; variances need the histogram of pairwise union sizes.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import (
    ArgumentOutOfRange,
    EnumerationBudgetExceeded,
    UniverseTooLarge,
)
from .geometry import (
    BoardSpec,
    Family,
    PieceSpec,
    Scope,
    attack_keys,
    attacks,
    closed_form_attack_count,
    families_meet_only_at_origin,
    hit_mask,
    line_attack_counts,
    orbit_representatives,
    ring_size_2d,
)

SCAN_BUDGET = 2 * 10**9  # cell-pair predicate evaluations for symmetry-reduced scans
LINE_COUNT_BUDGET = 64_000_000  # cells for vectorised line-piece counting
VARIANCE_CELL_BUDGET = 4096
SUBSET_BUDGET = 10**7
EXACT_AUTO_CELLS = 4096
_CHUNK = 1 << 20


# --------------------------------------------------------------------------
# safe probability


def _check_counts(N: int, A: int, p: int) -> None:
    if N < 1 or not 0 <= A <= N or not 0 <= p <= N:
        raise ArgumentOutOfRange(f"need 0 <= A, p <= N with N >= 1; got N={N}, A={A}, p={p}")


def log_falling_ratio(N: int, terms: int, drop: int) -> float:
    """log of prod_{i < terms} (1 - drop / (N - i)), summed with fsum."""
    parts = []
    for start in range(0, terms, _CHUNK):
        i = np.arange(start, min(terms, start + _CHUNK), dtype=np.float64)
        parts.append(math.fsum(np.log1p(-drop / (N - i))))
    return math.fsum(parts)


def safe_probability(N: int, A: int, p: int) -> float:
    """``C(N - A, p) / C(N, p)``, the chance ``p`` random pieces avoid ``A`` cells.

    The ratio is symmetric in ``A`` and ``p``, so the product runs over the
    shorter of the two.
    """
    _check_counts(N, A, p)
    if A == 0 or p == 0:
        return 1.0
    if N - A < p:
        return 0.0
    short, long_ = min(A, p), max(A, p)
    return math.exp(log_falling_ratio(N, short, long_))


def safe_probability_exact(N: int, A: int, p: int) -> Fraction:
    _check_counts(N, A, p)
    return Fraction(math.comb(N - A, p), math.comb(N, p))


# --------------------------------------------------------------------------
# histograms


@dataclass(frozen=True)
class AttackHistogram:
    """Map from attack count ``A`` to the number of cells with that count."""

    board: BoardSpec
    piece: PieceSpec
    entries: dict[int, int]

    def __post_init__(self):
        entries = {int(a): int(m) for a, m in sorted(self.entries.items()) if m}
        if sum(entries.values()) != self.board.cells:
            raise ValueError("histogram multiplicities must sum to the cell count")
        if entries and (min(entries) < 1 or max(entries) > self.board.cells):
            raise ValueError("attack counts must lie in [1, N]")
        object.__setattr__(self, "entries", entries)

    def items(self):
        return self.entries.items()


def _counts_to_histogram(counts: Iterable[tuple[int, int]]) -> dict[int, int]:
    hist: dict[int, int] = {}
    for a, m in counts:
        hist[a] = hist.get(a, 0) + m
    return hist


def _ring_histogram(board: BoardSpec, piece: PieceSpec) -> dict[int, int]:
    n = board.n
    half = (n - 1) // 2 if n % 2 else n // 2 - 1
    rows = []
    for r in range(half + 1):
        # a cell on the diagonal from the centre sits in ring r
        cell = (n + 1) // 2 + r if n % 2 else n // 2 + 1 + r
        a = closed_form_attack_count(piece, board, (cell, cell))
        rows.append((a, ring_size_2d(r, n)))
    return _counts_to_histogram(rows)


def _reduced_scan_histogram(board: BoardSpec, piece: PieceSpec, budget: int) -> dict[int, int]:
    reps = list(orbit_representatives(board))
    if len(reps) * board.cells > budget:
        raise UniverseTooLarge(
            f"scan of {len(reps)} orbits x {board.cells} cells exceeds budget {budget}"
        )
    grid = board.grid()
    return _counts_to_histogram((int(hit_mask(piece, rep, grid).sum()), size) for rep, size in reps)


def _full_scan_histogram(board: BoardSpec, piece: PieceSpec, budget: int) -> dict[int, int]:
    if board.cells**2 > budget:
        raise UniverseTooLarge(f"full scan of {board.cells}^2 pairs exceeds budget {budget}")
    grid = board.grid()
    counts = [int(hit_mask(piece, c, grid).sum()) for c in grid]
    return _counts_to_histogram((a, 1) for a in counts)


def attack_histogram(
    board: BoardSpec,
    piece: PieceSpec,
    *,
    method: str = "auto",
    scan_budget: int = SCAN_BUDGET,
) -> AttackHistogram:
    """Histogram of per-cell attack counts.

    ``method`` selects ``"closed"`` (catalogued formulas: rooks everywhere,
    2D rings), ``"rays"`` (vectorised ray counting for line pieces),
    ``"reduced"`` (predicate scan of one cell per symmetry orbit), ``"full"``
    (predicate scan of every cell) or ``"auto"``, which picks the cheapest
    applicable one.
    """
    if method == "auto":
        if piece.family is Family.ROOK or board.k == 2:
            method = "closed"
        elif families_meet_only_at_origin(piece, board):
            method = "rays"
        else:
            method = "reduced"
    if method == "closed":
        if piece.family is Family.ROOK:
            a = closed_form_attack_count(piece, board, (1,) * board.k)
            entries = {a: board.cells}
        elif board.k == 2:
            entries = _ring_histogram(board, piece)
        else:
            raise ValueError(f"no closed-form histogram for {piece} on a {board.k}-D board")
    elif method == "rays":
        if board.cells > LINE_COUNT_BUDGET:
            raise UniverseTooLarge(f"{board.cells} cells exceeds the ray-count budget")
        a, m = np.unique(line_attack_counts(piece, board), return_counts=True)
        entries = dict(zip(a.tolist(), m.tolist()))
    elif method == "reduced":
        entries = _reduced_scan_histogram(board, piece, scan_budget)
    elif method == "full":
        entries = _full_scan_histogram(board, piece, scan_budget)
    else:
        raise ValueError(f"unknown method {method!r}")
    return AttackHistogram(board, piece, entries)


# --------------------------------------------------------------------------
# placement model and expectation


@dataclass(frozen=True)
class PlacementModel:
    """``p`` pieces of one kind on distinct, uniformly chosen cells."""

    board: BoardSpec
    piece: PieceSpec
    p: int

    def __post_init__(self):
        if not 0 <= self.p <= self.board.cells:
            raise ArgumentOutOfRange(f"p={self.p} outside [0, {self.board.cells}]")

    @classmethod
    def default(cls, board: BoardSpec, piece: PieceSpec, variant: str = "default") -> "PlacementModel":
        return cls(board, piece, default_piece_count(board, piece, variant))


def default_piece_count(board: BoardSpec, piece: PieceSpec, variant: str = "default") -> int:
    """n on 2D boards, n^(k-1) line pieces, n hyper pieces, n^2 // 2 half-rooks."""
    n, k = board.n, board.k
    if variant == "half-rooks":
        return n * n // 2
    if variant != "default":
        raise ValueError(f"unknown placement variant {variant!r}")
    if k == 2 or piece.scope is Scope.HYPER:
        return n
    return n ** (k - 1)


@dataclass
class ExactResult:
    mu: float
    N: int
    p: int
    per_class: list[tuple[int, int, float]] = field(default_factory=list)
    mu_exact: Fraction | None = None

    @property
    def expected_safe(self) -> float:
        return self.mu * self.N


def expected_safe_fraction(
    model: PlacementModel,
    *,
    histogram: AttackHistogram | None = None,
    exact: bool | None = None,
) -> ExactResult:
    """Expected proportion of safe cells, from the attack-count histogram.

    With ``exact`` (default: only for boards of at most 4096 cells) the
    result also carries the exact rational value.
    """
    hist = histogram or attack_histogram(model.board, model.piece)
    N, p = model.board.cells, model.p
    if exact is None:
        exact = N <= EXACT_AUTO_CELLS
    per_class = [(a, m, safe_probability(N, a, p)) for a, m in hist.items()]
    mu = math.fsum(m * prob for _, m, prob in per_class) / N
    mu_exact = None
    if exact:
        total = sum(m * math.comb(N - a, p) for a, m in hist.items())
        mu_exact = Fraction(total, N * math.comb(N, p))
        mu = float(mu_exact)
    return ExactResult(mu=mu, N=N, p=p, per_class=per_class, mu_exact=mu_exact)


# --------------------------------------------------------------------------
# variance


def attack_matrix(board: BoardSpec, piece: PieceSpec) -> np.ndarray:
    """Boolean ``(N, N)`` matrix, ``M[s, t]`` true iff a piece on s attacks t."""
    keys = attack_keys(piece, board)
    M = np.zeros((board.cells, board.cells), dtype=bool)
    for key in keys:
        M |= key[:, None] == key[None, :]
    return M


def union_size_histogram(board: BoardSpec, piece: PieceSpec) -> dict[int, int]:
    """Counts of ``|A(s) | A(t)|`` over all ordered pairs, diagonal included."""
    # float32 products are exact for counts below 2**24
    M = attack_matrix(board, piece).astype(np.float32)
    sizes = M.sum(axis=1)
    overlap = M @ M.T
    union = np.rint(sizes[:, None] + sizes[None, :] - overlap).astype(np.int64)
    u, c = np.unique(union, return_counts=True)
    return dict(zip(u.tolist(), c.tolist()))


def exact_variance(
    model: PlacementModel,
    *,
    exact: bool = False,
    max_cells: int = VARIANCE_CELL_BUDGET,
) -> float | Fraction:
    """Variance of the safe fraction S/N over uniform placements.

    Sums ``P(s and t safe) - P(s safe) P(t safe)`` over all ordered pairs;
    both probabilities depend only on attack-set and union sizes, so the sum
    is carried out exactly in integers.
    """
    board, p = model.board, model.p
    N = board.cells
    if N > max_cells:
        raise UniverseTooLarge(f"pairwise variance needs N <= {max_cells}, got {N}")
    unions = union_size_histogram(board, model.piece)
    singles = attack_histogram(board, model.piece)
    total = math.comb(N, p)
    joint = sum(c * math.comb(N - u, p) for u, c in unions.items())
    marginal = sum(m * math.comb(N - a, p) for a, m in singles.items())
    var_s = Fraction(joint * total - marginal * marginal, total * total)
    var = var_s / (N * N)
    return var if exact else float(var)


# --------------------------------------------------------------------------
# exhaustive oracle


def brute_force_distribution(
    model: PlacementModel, *, budget: int = SUBSET_BUDGET
) -> dict[int, Fraction]:
    """Exact distribution of the safe-cell count over all C(N, p) placements.

    Attack sets come from the scalar movement predicate as int bitmasks, so
    this path shares no code with the histogram machinery.
    """
    board, p = model.board, model.p
    N = board.cells
    subsets = math.comb(N, p)
    if subsets > budget:
        raise EnumerationBudgetExceeded(f"C({N}, {p}) = {subsets} placements exceeds {budget}")
    coords = [board.coord(i) for i in range(N)]
    masks = [
        sum(1 << j for j, dst in enumerate(coords) if attacks(model.piece, src, dst, board))
        for src in coords
    ]
    tally: dict[int, int] = {}
    for combo in itertools.combinations(range(N), p):
        covered = 0
        for i in combo:
            covered |= masks[i]
        safe = N - covered.bit_count()
        tally[safe] = tally.get(safe, 0) + 1
    return {s: Fraction(c, subsets) for s, c in sorted(tally.items())}


def distribution_moments(dist: dict[int, Fraction]) -> tuple[Fraction, Fraction]:
    """(mean, variance) of a finite distribution given as value -> probability."""
    mean = sum(s * q for s, q in dist.items())
    second = sum(s * s * q for s, q in dist.items())
    return mean, second - mean * mean
