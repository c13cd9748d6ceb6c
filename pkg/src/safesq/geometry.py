"""Boards, pieces and attack geometry on k-dimensional hypercubic boards.

Coordinates are 1-based tuples ``(x_1, ..., x_k)``; linear indices are
0-based in C order (last axis fastest).  Every piece is considered to make
its own square unavailable, so ``attacks(p, s, s)`` is always true.

Three independent routes to an attack set exist and are cross-checked in
the tests:

* :func:`attacks` -- the scalar movement predicate, straight from the piece
  definitions;
* ray walking for line pieces (:func:`attack_set` with ``method="ray"``);
* "key families" (:func:`attack_keys`) -- each piece attacks exactly the
  cells that share at least one key with it, e.g. the same row, the same
  diagonal offset in some coordinate plane, or the same signed coordinate
  sum for hyper-bishops.  These power the vectorised counting and the Monte
  Carlo marking.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    CoordinateOutOfRange,
    DimensionOutOfRange,
    UniverseOverflow,
    UniverseTooLarge,
    WrongDimension,
)

# int64 linear indices, with headroom for the key encodings below
MAX_CELLS = 2**40
DEFAULT_SCAN_CAP = 4_000_000

Coord = tuple[int, ...]


class Family(str, Enum):
    ROOK = "rook"
    BISHOP = "bishop"
    QUEEN = "queen"


class Scope(str, Enum):
    LINE = "line"
    HYPER = "hyper"


@dataclass(frozen=True)
class PieceSpec:
    family: Family
    scope: Scope = Scope.LINE

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "scope", Scope(self.scope))

    @classmethod
    def parse(cls, text: str) -> "PieceSpec":
        """Parse ``"bishop"``, ``"bishop-hyper"`` or ``"rook-line"``."""
        family, _, scope = text.strip().lower().partition("-")
        return cls(Family(family), Scope(scope or "line"))

    @property
    def name(self) -> str:
        return f"{self.family.value}-{self.scope.value}"

    @property
    def moves_like_rook(self) -> bool:
        return self.family in (Family.ROOK, Family.QUEEN)

    @property
    def moves_like_bishop(self) -> bool:
        return self.family in (Family.BISHOP, Family.QUEEN)

    def __str__(self) -> str:
        return self.name


ROOK_LINE = PieceSpec(Family.ROOK, Scope.LINE)
ROOK_HYPER = PieceSpec(Family.ROOK, Scope.HYPER)
BISHOP_LINE = PieceSpec(Family.BISHOP, Scope.LINE)
BISHOP_HYPER = PieceSpec(Family.BISHOP, Scope.HYPER)
QUEEN_LINE = PieceSpec(Family.QUEEN, Scope.LINE)
QUEEN_HYPER = PieceSpec(Family.QUEEN, Scope.HYPER)
ALL_PIECES = (ROOK_LINE, ROOK_HYPER, BISHOP_LINE, BISHOP_HYPER, QUEEN_LINE, QUEEN_HYPER)


@dataclass(frozen=True)
class BoardSpec:
    """A hypercubic board with ``k`` axes of side ``n``."""

    k: int
    n: int

    def __post_init__(self):
        for name in ("k", "n"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.k < 2:
            raise DimensionOutOfRange(f"boards need k >= 2 dimensions, got k={self.k}")
        if self.n < 1:
            raise DimensionOutOfRange(f"side length must be >= 1, got n={self.n}")
        if self.n**self.k > MAX_CELLS:
            raise UniverseOverflow(f"{self.n}^{self.k} cells exceeds the index range {MAX_CELLS}")

    @property
    def cells(self) -> int:
        """Size N = n^k of the cell universe."""
        return self.n**self.k

    @property
    def strides(self) -> tuple[int, ...]:
        return tuple(self.n ** (self.k - 1 - i) for i in range(self.k))

    def check(self, coord: Sequence[int]) -> Coord:
        coord = tuple(int(c) for c in coord)
        if len(coord) != self.k:
            raise CoordinateOutOfRange(f"expected {self.k} coordinates, got {coord}")
        if any(c < 1 or c > self.n for c in coord):
            raise CoordinateOutOfRange(f"{coord} is off the {self.n}^{self.k} board")
        return coord

    def index(self, coord: Sequence[int]) -> int:
        coord = self.check(coord)
        return sum((c - 1) * s for c, s in zip(coord, self.strides))

    def coord(self, index: int) -> Coord:
        if not 0 <= index < self.cells:
            raise CoordinateOutOfRange(f"index {index} outside [0, {self.cells})")
        out = []
        for s in self.strides:
            q, index = divmod(index, s)
            out.append(q + 1)
        return tuple(out)

    def grid(self) -> np.ndarray:
        """All coordinates as an ``(N, k)`` int64 array in linear-index order."""
        return _grid(self.k, self.n)

    def __str__(self) -> str:
        return "x".join([str(self.n)] * self.k)


def make_board(k: int, n: int) -> BoardSpec:
    return BoardSpec(k, n)


@lru_cache(maxsize=4)
def _grid(k: int, n: int) -> np.ndarray:
    g = np.indices((n,) * k, dtype=np.int64).reshape(k, -1).T + 1
    g.setflags(write=False)
    return g


# --------------------------------------------------------------------------
# movement predicate


def _signed_zero_sum(values: Sequence[int]) -> bool:
    """True if some choice of signs makes ``sum(+-v)`` zero (subset sum)."""
    total = sum(values)
    if total % 2:
        return False
    reach = 1
    for v in values:
        reach |= reach << v
    return bool((reach >> (total // 2)) & 1)


def attacks(piece: PieceSpec, src: Sequence[int], dst: Sequence[int], board: BoardSpec) -> bool:
    """Whether ``dst`` is unavailable because of ``piece`` standing on ``src``."""
    src = board.check(src)
    dst = board.check(dst)
    delta = [abs(b - a) for a, b in zip(src, dst)]
    moved = [d for d in delta if d]
    if piece.moves_like_rook:
        if piece.scope is Scope.LINE and len(moved) <= 1:
            return True
        if piece.scope is Scope.HYPER and len(moved) < board.k:
            return True
    if piece.moves_like_bishop:
        if piece.scope is Scope.LINE:
            if not moved or (len(moved) == 2 and moved[0] == moved[1]):
                return True
        elif _signed_zero_sum(delta):
            return True
    return False


def _sign_vectors(k: int) -> np.ndarray:
    """Sign vectors with a leading +1; ``eps`` and ``-eps`` give the same locus."""
    rest = itertools.product((1, -1), repeat=k - 1)
    return np.array([(1, *r) for r in rest], dtype=np.int64)


def hit_mask(piece: PieceSpec, src: Sequence[int], coords: np.ndarray) -> np.ndarray:
    """Vectorised :func:`attacks` of one origin against many target cells."""
    delta = np.asarray(coords, dtype=np.int64) - np.asarray(src, dtype=np.int64)
    moved = np.count_nonzero(delta, axis=1)
    k = delta.shape[1]
    hit = np.zeros(len(delta), dtype=bool)
    if piece.moves_like_rook:
        hit |= moved <= 1 if piece.scope is Scope.LINE else moved < k
    if piece.moves_like_bishop:
        if piece.scope is Scope.LINE:
            a = np.abs(delta)
            hit |= (moved == 0) | ((moved == 2) & (a.sum(axis=1) == 2 * a.max(axis=1)))
        else:
            hit |= (delta @ _sign_vectors(k).T == 0).any(axis=1)
    return hit


# --------------------------------------------------------------------------
# attack sets


def _directions(piece: PieceSpec, k: int) -> list[tuple[int, ...]]:
    dirs = []
    if piece.moves_like_rook:
        for i in range(k):
            for s in (1, -1):
                d = [0] * k
                d[i] = s
                dirs.append(tuple(d))
    if piece.moves_like_bishop:
        for i, j in itertools.combinations(range(k), 2):
            for si, sj in itertools.product((1, -1), repeat=2):
                d = [0] * k
                d[i], d[j] = si, sj
                dirs.append(tuple(d))
    return dirs


def _ray_length(src: Coord, direction: Sequence[int], n: int) -> int:
    return min(n - x if d > 0 else x - 1 for x, d in zip(src, direction) if d)


def _ray_walk(piece: PieceSpec, src: Coord, board: BoardSpec) -> set[Coord]:
    cells = {src}
    for d in _directions(piece, board.k):
        for step in range(1, _ray_length(src, d, board.n) + 1):
            cells.add(tuple(x + step * dx for x, dx in zip(src, d)))
    return cells


def _uses_rays(piece: PieceSpec, board: BoardSpec) -> bool:
    # line and hyper movement coincide on 2D boards
    return piece.scope is Scope.LINE or board.k == 2


def attack_set(
    piece: PieceSpec,
    src: Sequence[int],
    board: BoardSpec,
    *,
    method: str = "auto",
    scan_cap: int = DEFAULT_SCAN_CAP,
) -> frozenset[Coord]:
    """Every cell made unavailable by ``piece`` on ``src`` (including ``src``).

    ``method`` is ``"ray"`` (line pieces, or any piece on a 2D board),
    ``"scan"`` (full board scan with the movement predicate) or ``"auto"``.
    """
    src = board.check(src)
    if method == "auto":
        method = "ray" if _uses_rays(piece, board) else "scan"
    if method == "ray":
        if not _uses_rays(piece, board):
            raise ValueError(f"{piece} does not move along rays on a {board.k}-D board")
        return frozenset(_ray_walk(piece, src, board))
    if method != "scan":
        raise ValueError(f"unknown method {method!r}")
    if board.cells > scan_cap:
        raise UniverseTooLarge(f"full scan of {board.cells} cells exceeds cap {scan_cap}")
    grid = board.grid()
    return frozenset(map(tuple, grid[hit_mask(piece, src, grid)].tolist()))


def attack_count(
    piece: PieceSpec,
    src: Sequence[int],
    board: BoardSpec,
    *,
    method: str = "auto",
    scan_cap: int = DEFAULT_SCAN_CAP,
) -> int:
    """``len(attack_set(...))`` without materialising the set."""
    src = board.check(src)
    if method == "auto":
        method = "ray" if _uses_rays(piece, board) else "scan"
    if method == "ray":
        if not _uses_rays(piece, board):
            raise ValueError(f"{piece} does not move along rays on a {board.k}-D board")
        return 1 + sum(_ray_length(src, d, board.n) for d in _directions(piece, board.k))
    if method != "scan":
        raise ValueError(f"unknown method {method!r}")
    if board.cells > scan_cap:
        raise UniverseTooLarge(f"full scan of {board.cells} cells exceeds cap {scan_cap}")
    return int(hit_mask(piece, src, board.grid()).sum())


# --------------------------------------------------------------------------
# key families


def attack_keys(piece: PieceSpec, board: BoardSpec, coords: np.ndarray | None = None) -> list[np.ndarray]:
    """Per-family integer keys; a piece attacks exactly the cells sharing a key.

    Returns one nonnegative int64 array per family, aligned with ``coords``
    (default: every cell in linear-index order).
    """
    n, k = board.n, board.k
    x = (board.grid() if coords is None else np.asarray(coords, dtype=np.int64)) - 1
    strides = np.array(board.strides, dtype=np.int64)
    idx = x @ strides
    keys = []
    if piece.moves_like_rook:
        for i in range(k):
            if piece.scope is Scope.LINE:
                keys.append(idx - x[:, i] * strides[i])
            else:
                keys.append(x[:, i].copy())
    if piece.moves_like_bishop:
        if piece.scope is Scope.LINE:
            for i, j in itertools.combinations(range(k), 2):
                rest = (idx - x[:, i] * strides[i] - x[:, j] * strides[j]) * (2 * n - 1)
                keys.append(rest + (x[:, i] - x[:, j] + n - 1))
                keys.append(rest + (x[:, i] + x[:, j]))
        else:
            for eps in _sign_vectors(k):
                keys.append(x @ eps + int((eps < 0).sum()) * (n - 1))
    return keys


def families_meet_only_at_origin(piece: PieceSpec, board: BoardSpec) -> bool:
    """True when the key families of one origin intersect only in the origin.

    Holds for line pieces in any dimension and for every piece in 2D, which
    makes the per-cell count a plain sum over families.
    """
    return _uses_rays(piece, board)


def line_attack_counts(piece: PieceSpec, board: BoardSpec) -> np.ndarray:
    """Attack count of every cell (linear-index order) for ray-moving pieces."""
    if not families_meet_only_at_origin(piece, board):
        raise ValueError(f"{piece} families overlap on a {board.k}-D board; use a scan")
    counts = np.ones(board.cells, dtype=np.int64)
    for key in attack_keys(piece, board):
        counts += np.bincount(key)[key] - 1
    return counts


def orbit_representatives(board: BoardSpec) -> Iterator[tuple[Coord, int]]:
    """One cell per orbit of the board's symmetry group, with the orbit size.

    The group is generated by axis permutations and per-axis reflections
    ``x -> n + 1 - x``; all movement predicates here are invariant under it.
    """
    n, k = board.n, board.k
    half = (n + 1) // 2
    for rep in itertools.combinations_with_replacement(range(1, half + 1), k):
        perms = math.factorial(k)
        for _, group in itertools.groupby(rep):
            perms //= math.factorial(len(list(group)))
        flips = sum(1 for v in rep if 2 * v != n + 1)
        yield rep, perms * 2**flips


# --------------------------------------------------------------------------
# rings


def _axis_ring(x: int, n: int) -> int:
    if n % 2:
        return abs(x - (n + 1) // 2)
    return max(n // 2 - x, x - (n // 2 + 1), 0)


def ring_index_2d(coord: Sequence[int], board: BoardSpec) -> int:
    """Chebyshev ring around the centre (the 2x2 centre block for even ``n``)."""
    if board.k != 2:
        raise WrongDimension(f"2D ring index asked on a {board.k}-D board")
    i, j = board.check(coord)
    return max(_axis_ring(i, board.n), _axis_ring(j, board.n))


def ring_size_2d(r: int, n: int) -> int:
    if n % 2:
        return 1 if r == 0 else 8 * r
    return 4 * (2 * r + 1)


@dataclass(frozen=True)
class RingVector:
    """Ring indices ``(r_2, ..., r_k)`` of a cell; ``deficit`` is the sum s."""

    r: tuple[int, ...]

    def __post_init__(self):
        r = tuple(int(v) for v in self.r)
        if any(v < 0 for v in r):
            raise ValueError(f"ring indices must be nonnegative: {r}")
        if any(a > b for a, b in zip(r, r[1:])):
            raise ValueError(f"ring indices must be nondecreasing: {r}")
        object.__setattr__(self, "r", r)

    @property
    def deficit(self) -> int:
        s = 0
        for i, ri in enumerate(self.r, start=2):
            s += (2 if i == 2 else math.factorial(i) - math.factorial(i - 1)) * ri
        return s


def ring_vector(coord: Sequence[int], board: BoardSpec) -> RingVector:
    """Ring vector for 2D and 3D boards.

    r_2 is the innermost 2D ring over the axis-plane projections, r_3 the 3D
    Chebyshev ring.  Higher dimensions are not supported.
    """
    coord = board.check(coord)
    if board.k == 2:
        return RingVector((ring_index_2d(coord, board),))
    if board.k != 3:
        raise WrongDimension("ring vectors are only assigned for k = 2 and k = 3")
    d = [_axis_ring(x, board.n) for x in coord]
    r2 = min(max(d[a], d[b]) for a, b in itertools.combinations(range(3), 2))
    return RingVector((r2, max(d)))


def bishop_plane_counts(k: int) -> tuple[int, int]:
    """(axis planes a line-bishop moves in, the k!/2 figure quoted for them)."""
    return math.comb(k, 2), math.factorial(k) // 2


def closed_form_attack_count(piece: PieceSpec, board: BoardSpec, coord: Sequence[int]) -> int | None:
    """Catalogued attack count for the cell, or ``None`` when none is known.

    ``None`` means callers should fall back to a scan.
    """
    coord = board.check(coord)
    n, k = board.n, board.k
    odd = n % 2 == 1
    if piece.family is Family.ROOK:
        if piece.scope is Scope.LINE:
            return k * (n - 1) + 1
        return n**k - (n - 1) ** k
    if k == 2:
        r = ring_index_2d(coord, board)
        bishop = 2 * n - 2 * r - (1 if odd else 2)
        return bishop if piece.family is Family.BISHOP else bishop + 2 * n - 2
    if k == 3 and piece.scope is Scope.LINE:
        s = ring_vector(coord, board).deficit
        bishop = 6 * n - (5 if odd else 8) - s
        return bishop if piece.family is Family.BISHOP else bishop + 3 * (n - 1)
    if k == 3 and piece.family is Family.BISHOP:
        if odd and all(x == (n + 1) // 2 for x in coord):
            return 3 * n * n - 6 * n + 4
        if all(x in (1, n) for x in coord):
            return 3 * (n * n - n) // 2 + 1
    return None
