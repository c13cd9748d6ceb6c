import itertools
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from safesq.asymptotics import LemmaParams, appendix_expression, lemma_ratio
from safesq.errors import (
    ArgumentOutOfRange,
    EnumerationBudgetExceeded,
    HypothesisViolated,
    NotCatalogued,
    UniverseTooLarge,
)
from safesq.exact import (
    AttackHistogram,
    PlacementModel,
    attack_histogram,
    brute_force_distribution,
    default_piece_count,
    distribution_moments,
    exact_variance,
    expected_safe_fraction,
    safe_probability,
    safe_probability_exact,
    union_size_histogram,
)
from safesq.geometry import (
    ALL_PIECES,
    BISHOP_HYPER,
    BISHOP_LINE,
    QUEEN_HYPER,
    QUEEN_LINE,
    ROOK_HYPER,
    ROOK_LINE,
    attack_set,
    make_board,
)
from safesq.limits import catalog, limit_constant

PLANAR = [ROOK_LINE, BISHOP_LINE, QUEEN_LINE]


def mp_safe_probability(N, A, p):
    """High-precision C(N-A, p) / C(N, p) through log-gamma."""
    with mpmath.workdps(50):
        lg = mpmath.loggamma
        return float(mpmath.exp(lg(N - A + 1) - lg(N - A - p + 1) - lg(N + 1) + lg(N - p + 1)))


# --- safe probability ---------------------------------------------------------


def test_safe_probability_examples():
    assert safe_probability(9, 5, 3) == pytest.approx(1 / 21, rel=1e-14)
    assert safe_probability(10, 0, 4) == 1.0
    assert safe_probability(16, 14, 3) == 0.0
    assert safe_probability(16, 3, 0) == 1.0
    with pytest.raises(ArgumentOutOfRange):
        safe_probability(10, 11, 1)
    with pytest.raises(ArgumentOutOfRange):
        safe_probability(10, 1, -1)


@pytest.mark.parametrize(
    "N,A,p",
    [(10**6, 2998, 1000), (10**9, 3 * 10**6, 10**6), (8 * 10**6, 60_000, 40_000), (10**12, 5, 10**6)],
)
def test_safe_probability_large_arguments(N, A, p):
    assert safe_probability(N, A, p) == pytest.approx(mp_safe_probability(N, A, p), rel=1e-9)


@given(st.integers(1, 60).flatmap(lambda N: st.tuples(st.just(N), st.integers(0, N), st.integers(0, N))))
def test_safe_probability_matches_rational(args):
    N, A, p = args
    expected = Fraction(math.comb(N - A, p), math.comb(N, p))
    assert safe_probability_exact(N, A, p) == expected
    assert safe_probability(N, A, p) == pytest.approx(float(expected), rel=1e-10, abs=1e-300)


@given(st.integers(2, 400).flatmap(lambda N: st.tuples(st.just(N), st.integers(0, N - 1), st.integers(0, N - 1))))
def test_safe_probability_monotone(args):
    N, A, p = args
    here = safe_probability(N, A, p)
    assert safe_probability(N, A + 1, p) <= here
    assert safe_probability(N, A, p + 1) <= here


# --- histograms ---------------------------------------------------------------


def test_histogram_examples():
    assert dict(attack_histogram(make_board(2, 3), BISHOP_LINE).items()) == {3: 8, 5: 1}
    assert dict(attack_histogram(make_board(3, 5), ROOK_HYPER).items()) == {61: 125}
    with pytest.raises(ValueError):
        AttackHistogram(make_board(2, 3), BISHOP_LINE, {3: 8})


@pytest.mark.parametrize("k,n", [(2, 1), (2, 5), (2, 6), (3, 3), (3, 4), (4, 3)])
@pytest.mark.parametrize("piece", ALL_PIECES)
def test_histogram_methods_agree(k, n, piece):
    board = make_board(k, n)
    full = dict(attack_histogram(board, piece, method="full").items())
    assert dict(attack_histogram(board, piece, method="reduced").items()) == full
    assert dict(attack_histogram(board, piece).items()) == full


def test_histogram_budget():
    with pytest.raises(UniverseTooLarge):
        attack_histogram(make_board(3, 30), BISHOP_HYPER, scan_budget=1000)


# --- expectation --------------------------------------------------------------


def test_expected_fraction_examples():
    board = make_board(2, 3)
    assert expected_safe_fraction(PlacementModel(board, ROOK_LINE, 3)).mu_exact == Fraction(1, 21)
    assert expected_safe_fraction(PlacementModel(board, BISHOP_LINE, 3)).mu_exact == Fraction(41, 189)
    res = expected_safe_fraction(PlacementModel(make_board(3, 5), ROOK_HYPER, 5))
    assert res.mu_exact == Fraction(math.comb(64, 5), math.comb(125, 5))
    assert res.mu == pytest.approx(4032 / 124025, rel=1e-14)
    empty = expected_safe_fraction(PlacementModel(board, QUEEN_LINE, 0))
    assert empty.mu == 1.0 and empty.expected_safe == 9


def test_placement_model_rejects_bad_counts():
    with pytest.raises(ArgumentOutOfRange):
        PlacementModel(make_board(2, 3), ROOK_LINE, 10)
    with pytest.raises(ArgumentOutOfRange):
        PlacementModel(make_board(2, 3), ROOK_LINE, -1)


def test_default_piece_counts():
    assert default_piece_count(make_board(2, 8), QUEEN_LINE) == 8
    assert default_piece_count(make_board(3, 8), ROOK_LINE) == 64
    assert default_piece_count(make_board(3, 8), BISHOP_HYPER) == 8
    assert default_piece_count(make_board(3, 9), ROOK_LINE, "half-rooks") == 40


@pytest.mark.parametrize("k,n", [(2, 12), (3, 6)])
@pytest.mark.parametrize("piece", ALL_PIECES)
def test_float_path_matches_rational_path(k, n, piece):
    model = PlacementModel.default(make_board(k, n), piece)
    res = expected_safe_fraction(model, exact=False)
    assert res.mu_exact is None
    assert res.mu == pytest.approx(float(expected_safe_fraction(model, exact=True).mu_exact), rel=1e-12)
    assert res.mu == pytest.approx(math.fsum(m * q for _, m, q in res.per_class) / res.N, rel=1e-15)


# --- variance -----------------------------------------------------------------


def test_variance_examples():
    assert exact_variance(PlacementModel(make_board(2, 2), ROOK_LINE, 1)) == 0.0
    assert exact_variance(PlacementModel(make_board(2, 3), BISHOP_LINE, 1), exact=True) == Fraction(32, 6561)
    assert exact_variance(PlacementModel(make_board(2, 4), QUEEN_LINE, 16)) == 0.0
    with pytest.raises(UniverseTooLarge):
        exact_variance(PlacementModel(make_board(2, 80), ROOK_LINE, 80))


@pytest.mark.parametrize("k,n", [(2, 4), (3, 3)])
@pytest.mark.parametrize("piece", ALL_PIECES)
def test_union_sizes_match_set_unions(k, n, piece):
    board = make_board(k, n)
    sets = [attack_set(piece, board.coord(i), board, method="scan") for i in range(board.cells)]
    tally = {}
    for a, b in itertools.product(sets, repeat=2):
        u = len(a | b)
        tally[u] = tally.get(u, 0) + 1
    assert union_size_histogram(board, piece) == tally


# --- exhaustive oracle ---------------------------------------------------------


def test_brute_force_examples():
    assert brute_force_distribution(PlacementModel(make_board(2, 2), ROOK_LINE, 1)) == {1: 1}
    dist = brute_force_distribution(PlacementModel(make_board(2, 3), BISHOP_LINE, 3))
    assert distribution_moments(dist)[0] == Fraction(41, 21)
    assert sum(dist.values()) == 1
    assert brute_force_distribution(PlacementModel(make_board(2, 3), QUEEN_LINE, 0)) == {9: 1}
    with pytest.raises(EnumerationBudgetExceeded):
        brute_force_distribution(PlacementModel(make_board(2, 10), ROOK_LINE, 10), budget=10**6)


ORACLE_CASES = [
    (make_board(2, n), piece, p) for n in (2, 3, 4) for piece in PLANAR for p in (1, 2, 3)
] + [(make_board(3, 2), piece, p) for piece in ALL_PIECES for p in (1, 2, 3)]


@pytest.mark.parametrize("board,piece,p", ORACLE_CASES, ids=str)
def test_oracle_equality(board, piece, p):
    model = PlacementModel(board, piece, p)
    mean, var = distribution_moments(brute_force_distribution(model))
    N = board.cells
    assert expected_safe_fraction(model, exact=True).mu_exact == mean / N
    assert exact_variance(model, exact=True) == var / (N * N)


# --- finite-n behaviour ---------------------------------------------------------


@pytest.mark.parametrize("n", range(3, 201))
def test_bishop_fraction_between_centre_and_edge_bounds(n):
    mu = expected_safe_fraction(PlacementModel(make_board(2, n), BISHOP_LINE, n)).mu
    assert limit_constant(BISHOP_LINE, 2, "naive").contains(mu, slack=5 / n)


@pytest.mark.parametrize("piece", [ROOK_LINE, ROOK_HYPER])
def test_3d_rook_scopes_converge_to_same_limit(piece):
    errs = []
    for n in (25, 50, 100, 200):
        mu = expected_safe_fraction(PlacementModel.default(make_board(3, n), piece)).mu
        errs.append(abs(mu - math.exp(-3)))
    assert all(b < a for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("piece", PLANAR)
@pytest.mark.parametrize("m", [5, 10, 25, 50, 100])
def test_parity_does_not_matter(piece, m):
    mu = [expected_safe_fraction(PlacementModel.default(make_board(2, n), piece)).mu for n in (2 * m, 2 * m + 1)]
    assert abs(mu[0] - mu[1]) <= 10 / m


# --- limits catalogue -----------------------------------------------------------


def test_limit_examples():
    assert limit_constant(BISHOP_LINE, 2).value == pytest.approx(0.270671, abs=1e-6)
    assert limit_constant(QUEEN_LINE, 2).value == pytest.approx(0.036631, abs=1e-6)
    assert limit_constant(BISHOP_LINE, 3).value == pytest.approx(0.020929, abs=1e-6)
    assert limit_constant(QUEEN_LINE, 3).value == pytest.approx(0.001042, abs=5e-7)
    assert limit_constant(ROOK_LINE, 3, "half-rooks").value == pytest.approx(0.223130, abs=1e-6)
    hb = limit_constant(BISHOP_HYPER, 3)
    assert hb.kind == "bounds" and (hb.lower, hb.upper) == (math.exp(-3), math.exp(-1.5))
    with pytest.raises(ValueError):
        hb.value
    with pytest.raises(NotCatalogued):
        limit_constant(BISHOP_LINE, 4)
    with pytest.raises(NotCatalogued):
        limit_constant(QUEEN_HYPER, 4)


def test_catalog_entries_are_proportions():
    rows = catalog()
    assert len(rows) >= 10
    for _, _, _, lim in rows:
        assert 0 < lim.lower <= lim.upper <= 1


# --- lemma and appendix ---------------------------------------------------------


def test_lemma_ratio_examples():
    p = LemmaParams(a=2, b=1, c=2, d=1, k=2, m=1)
    assert p.limit == pytest.approx(math.exp(-2))
    assert abs(lemma_ratio(p, 1000) - math.exp(-2)) <= 2e-3
    q = LemmaParams(a=1, b=0, c=2, d=1, k=3, m=2)
    assert abs(lemma_ratio(q, 100) - math.exp(-1)) < abs(lemma_ratio(q, 10) - math.exp(-1))


@given(st.integers(1, 3), st.integers(0, 2), st.integers(1, 2), st.integers(2, 40))
@settings(max_examples=50)
def test_lemma_ratio_is_a_binomial_ratio(a, b, d, n):
    params = LemmaParams(a=a, b=b, c=2, d=d, k=2, m=1)
    cells, attacked, pieces = params.sizes(n)
    if attacked < 0 or cells - attacked < pieces:
        with pytest.raises(ArgumentOutOfRange):
            lemma_ratio(params, n)
        return
    expected = Fraction(math.comb(cells - attacked, pieces), math.comb(cells, pieces))
    assert lemma_ratio(params, n) == pytest.approx(float(expected), rel=1e-10)


def test_lemma_limit_depends_only_on_product():
    shapes = [LemmaParams(3, 0, 3, 1, 3, 1), LemmaParams(1, 0, 2, 3, 3, 2), LemmaParams(3, 1, 2, 1, 2, 1)]
    for params in shapes:
        errs = [abs(lemma_ratio(params, n) - math.exp(-3)) for n in (10, 100, 1000)]
        assert errs[2] < errs[1] < errs[0]


def test_lemma_hypothesis_enforced():
    with pytest.raises(HypothesisViolated):
        LemmaParams(a=1, b=0, c=1, d=1, k=3, m=2)  # m == k - c
    with pytest.raises(HypothesisViolated):
        LemmaParams(a=1, b=0, c=2, d=1, k=2, m=2)
    with pytest.raises(HypothesisViolated):
        LemmaParams(a=0, b=0, c=2, d=1, k=2, m=1)
    with pytest.raises(ArgumentOutOfRange):
        lemma_ratio(LemmaParams(2, 1, 2, 1, 2, 1), 0)


def test_appendix_examples():
    for variant in ("A1", "A2"):
        assert abs(appendix_expression(10**6, variant) - 0.25) <= 1e-3
    with pytest.raises(ArgumentOutOfRange):
        appendix_expression(2, "A1")
    with pytest.raises(ArgumentOutOfRange):
        appendix_expression(3, "A2")
    with pytest.raises(ValueError):
        appendix_expression(10, "A3")


def test_appendix_a1_against_rational_evaluation():
    # x = (n-1)/n is rational, so the expression is an exact fraction
    for n in (3, 7, 40):
        x = Fraction(n - 1, n)
        bracket = Fraction(n - 1, 2) * x ** (-n - 1) - Fraction(n + 1, 2) * x ** (-n + 1) + 1
        value = x**-2 * bracket / (n * n * (1 - x**-2) ** 2)
        assert appendix_expression(n, "A1") == pytest.approx(float(value), rel=1e-14)
