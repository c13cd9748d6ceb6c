"""Catalogue of limiting safe fractions (exact values or bound pairs)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NotCatalogued
from .geometry import Family, PieceSpec, Scope

E = math.e
_LINE_BISHOP_NUM = -1 + 9 * E**2 - 2 * E**3


@dataclass(frozen=True)
class LimitConstant:
    lower: float
    upper: float
    description: str

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound above upper bound")

    @classmethod
    def exact(cls, value: float, description: str) -> "LimitConstant":
        if not 0 < value <= 1:
            raise ValueError(f"limit {value} is not a proportion")
        return cls(value, value, description)

    @property
    def kind(self) -> str:
        return "exact" if self.lower == self.upper else "bounds"

    @property
    def value(self) -> float:
        if self.kind != "exact":
            raise ValueError("bound-type limit has no single value")
        return self.lower

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= x <= self.upper + slack


def limit_constant(piece: PieceSpec, k: int, variant: str = "default") -> LimitConstant:
    """Limit of the expected safe fraction for ``piece`` on ``k``-D boards.

    ``variant`` is ``"default"``, ``"half-rooks"`` (3D line-rooks with
    n^2/2 pieces) or ``"naive"`` (the centre/edge bounds for 2D bishops).
    """
    fam, scope = piece.family, piece.scope
    if variant == "half-rooks":
        if fam is Family.ROOK and scope is Scope.LINE and k == 3:
            return LimitConstant.exact(math.exp(-1.5), "3D line-rooks, n^2/2 pieces: e^-3/2")
    elif variant == "naive":
        if fam is Family.BISHOP and k == 2:
            return LimitConstant(math.exp(-2), math.exp(-1), "2D bishops, centre/edge bounds")
    elif variant == "default":
        if fam is Family.ROOK and k >= 2:
            return LimitConstant.exact(math.exp(-k), f"{k}D {scope.value}-rooks: e^-{k}")
        if k == 2 and fam is Family.BISHOP:
            return LimitConstant.exact(2 * math.exp(-2), "2D bishops: 2/e^2")
        if k == 2 and fam is Family.QUEEN:
            return LimitConstant.exact(2 * math.exp(-4), "2D queens: 2/e^4")
        if k == 3 and scope is Scope.LINE and fam is Family.BISHOP:
            return LimitConstant.exact(
                _LINE_BISHOP_NUM / (3 * E**6), "3D line-bishops: (-1+9e^2-2e^3)/(3e^6)"
            )
        if k == 3 and scope is Scope.LINE and fam is Family.QUEEN:
            return LimitConstant.exact(
                _LINE_BISHOP_NUM / (3 * E**9), "3D line-queens: (-1+9e^2-2e^3)/(3e^9)"
            )
        if k == 3 and scope is Scope.HYPER and fam is Family.BISHOP:
            return LimitConstant(math.exp(-3), math.exp(-1.5), "3D hyper-bishops: [e^-3, e^-3/2]")
        if k == 3 and scope is Scope.HYPER and fam is Family.QUEEN:
            return LimitConstant(math.exp(-6), math.exp(-4.5), "3D hyper-queens: [e^-6, e^-9/2]")
    raise NotCatalogued(f"no limit catalogued for {piece} in {k} dimensions ({variant})")


def catalog() -> list[tuple[PieceSpec, int, str, LimitConstant]]:
    """Every catalogued (piece, k, variant) combination for k in 2..4."""
    rows = []
    for fam in Family:
        for scope in Scope:
            piece = PieceSpec(fam, scope)
            for k in (2, 3, 4):
                for variant in ("default", "half-rooks", "naive"):
                    if k == 2 and scope is Scope.HYPER:
                        continue  # identical to the line piece in 2D
                    try:
                        rows.append((piece, k, variant, limit_constant(piece, k, variant)))
                    except NotCatalogued:
                        pass
    return rows
