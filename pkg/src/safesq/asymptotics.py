"""Finite-n evaluators for the binomial-ratio limit and the two 1/4 limits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .errors import ArgumentOutOfRange, HypothesisViolated
from .exact import log_falling_ratio

APPENDIX_DPS = 60


@dataclass(frozen=True)
class LemmaParams:
    """Shape of C(n^k - a n^m + b n^(k-c), d n^(k-m)) / C(n^k, d n^(k-m)).

    ``a n^m - b n^(k-c)`` plays the attack count, ``d n^(k-m)`` the number of
    pieces; the ratio tends to ``exp(-d a)`` when ``k > m > k - c``.
    """

    a: int
    b: int
    c: int
    d: int
    k: int
    m: int

    def __post_init__(self):
        for name in ("a", "c", "d", "k", "m"):
            if getattr(self, name) < 1:
                raise HypothesisViolated(f"{name} must be a positive integer")
        if not self.k > self.m > self.k - self.c:
            raise HypothesisViolated(
                f"need k > m > k - c, got k={self.k}, m={self.m}, c={self.c}"
            )

    @property
    def limit(self) -> float:
        return math.exp(-self.d * self.a)

    def sizes(self, n: int) -> tuple[int, int, int]:
        """(cells, attacked, pieces) at side length ``n``."""
        cells = n**self.k
        attacked = self.a * n**self.m - self.b * n ** (self.k - self.c)
        pieces = self.d * n ** (self.k - self.m)
        return cells, attacked, pieces


def lemma_ratio(params: LemmaParams, n: int) -> float:
    """The ratio as the product prod_i (1 - d n^(k-m) / (n^k - i)) over attacked cells."""
    if n < 1:
        raise ArgumentOutOfRange(f"n must be positive, got {n}")
    cells, attacked, pieces = params.sizes(n)
    if attacked < 0 or attacked > cells or cells - attacked < pieces:
        raise ArgumentOutOfRange(
            f"n={n}: need 0 <= attacked <= cells and cells - attacked >= pieces "
            f"(cells={cells}, attacked={attacked}, pieces={pieces})"
        )
    return math.exp(log_falling_ratio(cells, attacked, pieces))


def appendix_expression(n: int, variant: str) -> float:
    """Evaluate the A1 (x = 1 - 1/n) or A2 (x = 1 - n/(n^2 - 2n)) expression.

    Both equal x^-2 ((n-1)/2 x^(-n-1) - (n+1)/2 x^(-n+1) + 1) / (n^2 (1 - x^-2)^2)
    and tend to 1/4.  The denominator cancels catastrophically, so the
    evaluation runs in 60-digit arithmetic.
    """
    if n < 3:
        raise ArgumentOutOfRange(f"appendix expressions need n >= 3, got {n}")
    with mpmath.workdps(APPENDIX_DPS):
        N = mpmath.mpf(n)
        if variant == "A1":
            x = 1 - 1 / N
        elif variant == "A2":
            x = 1 - N / (N * N - 2 * N)
        else:
            raise ValueError(f"unknown appendix variant {variant!r}")
        if x == 0:
            raise ArgumentOutOfRange(f"{variant} is undefined at n={n}")
        bracket = (N - 1) / 2 * x ** (-N - 1) - (N + 1) / 2 * x ** (-N + 1) + 1
        value = x**-2 * bracket / (N * N * (1 - x**-2) ** 2)
        return float(value)
