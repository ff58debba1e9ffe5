import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvwitness.criteria import (
    ModePartition,
    QuadCombination,
    bipartitions,
    certify_genuine,
    commutator_coefficient,
    evaluate_condition,
    fitted_condition_set,
    fitted_gain,
    genuine_threshold,
    ghz_condition_set,
    ghz_condition_variance,
    optimal_gain,
    pair_condition,
    partition_bound,
    set_partitions,
    set_threshold,
    symmetric_single_condition,
    total_variance,
    weakest_bipartition,
)
from cvwitness.errors import DimensionError, DomainError
from cvwitness.gaussian import CovarianceMatrix, direct_sum
from cvwitness.states import (
    GhzFamilyParams,
    ghz_family_analytic,
    two_mode_squeezed,
    unbiased_r1,
)

from helpers import random_state

S2 = 1 / math.sqrt(2)
SYM3 = QuadCombination((1, -S2, -S2), (1, S2, S2))
P = ModePartition.parse


def coefficient_vectors(n):
    return st.lists(st.floats(-3, 3, allow_nan=False), min_size=n, max_size=n)


@st.composite
def combinations(draw, min_modes=2, max_modes=5):
    n = draw(st.integers(min_modes, max_modes))
    h = draw(coefficient_vectors(n))
    g = draw(coefficient_vectors(n))
    if not any(h) and not any(g):
        h[0] = 1.0
    return QuadCombination(tuple(h), tuple(g))


# --- partitions ---------------------------------------------------------


@pytest.mark.parametrize("n,bell", [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203)])
def test_set_partition_counts(n, bell):
    parts = list(set_partitions(n))
    assert len(parts) == bell
    assert len(set(parts)) == bell


@pytest.mark.parametrize("n", range(2, 9))
def test_bipartition_count_and_oracle(n):
    parts = list(bipartitions(n))
    assert len(parts) == 2 ** (n - 1) - 1
    brute = {p for p in set_partitions(n) if len(p.blocks) == 2}
    assert set(parts) == brute


def test_partition_canonical_form_and_text():
    p = ModePartition((frozenset({3}), frozenset({2, 1})))
    assert str(p) == "1,2|3"
    assert P("3|1,2") == p
    assert p.separates(1, 3) and not p.separates(1, 2)
    assert hash(p) == hash(P("1,2|3"))


@pytest.mark.parametrize("text", ["1,2|2,3", "1|3", "1,2|"])
def test_partition_rejects_invalid(text):
    with pytest.raises((DomainError, ValueError)):
        P(text)


def test_refinement_relation():
    assert P("1|2|3").refines(P("1,2|3"))
    assert P("1,2|3").refines(P("1,2,3"))
    assert not P("1,3|2").refines(P("1,2|3"))


# --- combinations and variances ------------------------------------------


def test_combination_validation():
    with pytest.raises(DimensionError):
        QuadCombination((1, 2), (1,))
    with pytest.raises(DomainError):
        QuadCombination((0, 0), (0, 0))


def test_total_variance_vacuum():
    c = QuadCombination((1, -1, 0), (1, 1, 0))
    assert total_variance(CovarianceMatrix.vacuum(3), c) == 1.0


@pytest.mark.parametrize("r", [0.0, 0.3, 1.0, 2.0])
def test_total_variance_two_mode_squeezed(r):
    c = QuadCombination((1, -1), (1, 1))
    t = total_variance(two_mode_squeezed(r), c)
    assert t == pytest.approx(math.exp(-2 * r), rel=1e-13)
    if r > 0:
        assert t < partition_bound(c, P("1|2")) == 1.0


def test_total_variance_minimized_at_zero_gain_for_vacuum():
    v = ghz_family_analytic(GhzFamilyParams(3, 0, 0))
    gains = np.linspace(-1, 1, 201)
    values = [total_variance(v, QuadCombination((1, -1, 0), (1, 1, g))) for g in gains]
    assert gains[int(np.argmin(values))] == pytest.approx(0.0, abs=1e-12)
    assert min(values) == 1.0


def test_total_variance_dimension_mismatch():
    with pytest.raises(DimensionError):
        total_variance(CovarianceMatrix.vacuum(2), SYM3)


@settings(max_examples=40, deadline=None)
@given(combinations(1, 4), st.integers(0, 2**32 - 1))
def test_total_variance_nonnegative(c, seed):
    v = random_state(c.n_modes, np.random.default_rng(seed))
    assert total_variance(v, c) >= 0.0


# --- bounds ---------------------------------------------------------------


def test_symmetric_three_mode_bounds():
    assert partition_bound(SYM3, P("1,2|3")) == pytest.approx(0.5, abs=1e-15)
    assert partition_bound(SYM3, P("1,3|2")) == pytest.approx(0.5, abs=1e-15)
    assert partition_bound(SYM3, P("2,3|1")) == pytest.approx(1.0, abs=1e-15)


def test_two_one_one_combination_bounds():
    c = QuadCombination((2, -1, -1), (1, 1, 1))
    assert partition_bound(c, P("1,2|3")) == 1.0
    assert partition_bound(c, P("1,3|2")) == 1.0
    assert partition_bound(c, P("2,3|1")) == 2.0
    assert partition_bound(c, P("1|2|3")) == 2.0
    assert genuine_threshold(c) == 1.0


def test_fully_separable_and_inseparable_forms():
    c = QuadCombination((1, -2, 0.5), (3, 1, -1))
    w = [3, -2, -0.5]
    assert partition_bound(c, P("1|2|3")) == pytest.approx(sum(abs(x) for x in w) / 2)
    assert partition_bound(c, P("1,2,3")) == pytest.approx(abs(sum(w)) / 2)


def test_two_party_criterion_recovered():
    assert partition_bound(QuadCombination((1, -1), (1, 1)), P("1|2")) == 1.0


@settings(max_examples=60, deadline=None)
@given(combinations())
def test_bounds_monotone_under_refinement(c):
    parts = list(set_partitions(c.n_modes))
    bounds = {p: partition_bound(c, p) for p in parts}
    for fine, coarse in itertools.product(parts, parts):
        if fine.refines(coarse):
            assert bounds[fine] >= bounds[coarse] - 1e-12
    singletons = ModePartition(tuple(frozenset({j}) for j in range(1, c.n_modes + 1)))
    assert all(bounds[singletons] >= b - 1e-12 for b in bounds.values())
    assert all(b >= 0 for b in bounds.values())


@settings(max_examples=40, deadline=None)
@given(combinations(), st.floats(0.1, 4), st.floats(0.1, 4), st.booleans(), st.booleans())
def test_bound_scaling(c, alpha, beta, flip_a, flip_b):
    alpha, beta = (-alpha if flip_a else alpha), (-beta if flip_b else beta)
    scaled = QuadCombination(tuple(alpha * x for x in c.h), tuple(beta * x for x in c.g))
    # the minimizing bipartition of c still minimizes after scaling
    assert partition_bound(scaled, weakest_bipartition(c)) == pytest.approx(
        genuine_threshold(scaled), rel=1e-9, abs=1e-12
    )
    for p in bipartitions(c.n_modes):
        assert partition_bound(scaled, p) == pytest.approx(
            abs(alpha * beta) * partition_bound(c, p), rel=1e-9, abs=1e-12
        )


# --- genuine threshold -----------------------------------------------------


def brute_threshold(c):
    return min(partition_bound(c, p) for p in bipartitions(c.n_modes))


def test_threshold_symmetric_three():
    assert genuine_threshold(SYM3) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("n", range(3, 11))
def test_threshold_symmetric_general(n):
    c = symmetric_single_condition(n)
    assert genuine_threshold(c) == pytest.approx(1 / (n - 1), abs=1e-12)
    assert brute_threshold(c) == pytest.approx(1 / (n - 1), abs=1e-12)


def test_threshold_pair_only_combination():
    c = QuadCombination((1, -1, 0), (1, 1, 0))
    assert genuine_threshold(c) == 0.0
    assert partition_bound(c, weakest_bipartition(c)) == 0.0


@settings(max_examples=150, deadline=None)
@given(
    st.integers(2, 7).flatmap(
        lambda n: st.tuples(
            st.lists(st.sampled_from([0.0, 0.0, 1.0, -1.0, 0.5, 2.0, -0.3]), min_size=n, max_size=n),
            st.lists(st.sampled_from([0.0, 1.0, -1.0, 0.7, 3.0]), min_size=n, max_size=n),
        )
    )
)
def test_threshold_fast_path_matches_enumeration(hg):
    h, g = hg
    if not any(h) and not any(g):
        return
    c = QuadCombination(tuple(h), tuple(g))
    assert genuine_threshold(c) == pytest.approx(brute_threshold(c), abs=1e-12)
    assert partition_bound(c, weakest_bipartition(c)) == pytest.approx(genuine_threshold(c), abs=1e-12)


def test_threshold_needs_two_modes():
    with pytest.raises(DomainError):
        genuine_threshold(QuadCombination((1,), (1,)))


# --- commutators ------------------------------------------------------------


def test_commutator_coefficients():
    assert commutator_coefficient(SYM3) == pytest.approx(0.0, abs=1e-15)
    assert commutator_coefficient(QuadCombination((2, -1, -1), (1, 1, 1))) == 0.0
    assert commutator_coefficient(QuadCombination((1, 0, 0), (1, 0, 0))) == 1.0


# --- canonical condition sets ---------------------------------------------


def test_three_mode_set_matches_conditions_one_and_two():
    g = (0.3, 0.6, 0.9)
    first, second = ghz_condition_set(3, g)
    assert first == QuadCombination((1, -1, 0), (1, 1, 0.9))
    assert second == QuadCombination((0, 1, -1), (0.3, 1, 1))


def test_four_mode_set_matches_chosen_triple():
    g = (0.1, 0.2, 0.3, 0.4)
    conds = ghz_condition_set(4, g)
    assert conds == [
        QuadCombination((1, -1, 0, 0), (1, 1, 0.3, 0.4)),
        QuadCombination((0, 1, -1, 0), (0.1, 1, 1, 0.4)),
        QuadCombination((0, 0, 1, -1), (0.1, 0.2, 1, 1)),
    ]


def test_condition_set_rejects_small_n():
    with pytest.raises(DomainError):
        ghz_condition_set(2, 0.5)
    with pytest.raises(DimensionError):
        ghz_condition_set(3, [0.1, 0.2])


@pytest.mark.parametrize("n", [3, 4, 5])
def test_condition_bounds_exhaustive(n, rng):
    gains = rng.uniform(-2, 2, size=n)
    for k, c in enumerate(ghz_condition_set(n, gains), start=1):
        assert commutator_coefficient(c) == 0.0
        for p in bipartitions(n):
            b = partition_bound(c, p)
            if p.separates(k, k + 1):
                assert b == 1.0
            else:
                assert b < 1.0


@pytest.mark.parametrize("n", range(3, 9))
def test_canonical_set_threshold_is_one(n):
    assert set_threshold(ghz_condition_set(n, 0.7)) == 1.0


# Which conditions carry a boundary of one for each partially separable
# three- and four-mode form (the remaining conditions have boundary zero).
THREE_MODE_TABLE = {"1,2|3": {"II", "III"}, "1,3|2": {"I", "II"}, "1|2,3": {"I", "III"}}
THREE_PAIRS = {"I": (1, 2), "II": (2, 3), "III": (1, 3)}
FOUR_PAIRS = {"I": (1, 2), "II": (2, 3), "III": (1, 3), "IV": (3, 4), "V": (2, 4), "VI": (1, 4)}
ALL4 = set(FOUR_PAIRS)
FOUR_MODE_TABLE = {
    "1,2,3|4": {"IV", "V", "VI"},
    "1,2,4|3": {"II", "III", "IV"},
    "1,3,4|2": {"I", "II", "V"},
    "1|2,3,4": {"I", "III", "VI"},
    "1,2|3,4": {"II", "III", "V", "VI"},
    "1,3|2,4": {"I", "II", "IV", "VI"},
    "1,4|2,3": {"I", "III", "IV", "V"},
    "1,2|3|4": ALL4 - {"I"},
    "1,3|2|4": ALL4 - {"III"},
    "1,4|2|3": ALL4 - {"VI"},
    "1|2,3|4": ALL4 - {"II"},
    "1|2,4|3": ALL4 - {"V"},
    "1|2|3,4": ALL4 - {"IV"},
    "1|2|3|4": ALL4,
}


@pytest.mark.parametrize(
    "n,pairs,table", [(3, THREE_PAIRS, THREE_MODE_TABLE), (4, FOUR_PAIRS, FOUR_MODE_TABLE)]
)
def test_partial_separability_statements(n, pairs, table, rng):
    gains = rng.uniform(-1, 1, size=n)
    for text, expected in table.items():
        part = P(text)
        hit = set()
        for name, (m, k) in pairs.items():
            b = partition_bound(pair_condition(n, m, k, gains), part)
            assert b in (0.0, 1.0)
            if b == 1.0:
                hit.add(name)
        assert hit == expected, text


# --- gains and closed-form variances --------------------------------------


def test_optimal_gain_limits():
    assert optimal_gain(3, 0, 0) == 0.0
    assert optimal_gain(5, 15, 15) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        optimal_gain(2, 0.5, 0.5)


def test_optimal_gain_is_stationary():
    g = optimal_gain(3, 0.5, 0.5)
    h = 1e-4
    fd = (ghz_condition_variance(3, 0.5, 0.5, g + h) - ghz_condition_variance(3, 0.5, 0.5, g - h)) / (2 * h)
    assert abs(fd) < 1e-6
    grid = np.linspace(g - 0.5, g + 0.5, 1001)
    assert min(ghz_condition_variance(3, 0.5, 0.5, x) for x in grid) >= ghz_condition_variance(3, 0.5, 0.5, g) - 1e-15


@pytest.mark.parametrize("n", [3, 4, 5, 8, 30])
def test_condition_variance_vacuum(n):
    assert ghz_condition_variance(n, 0, 0, 0) == pytest.approx(1.0, abs=1e-15)


def test_condition_variance_fig_points():
    assert ghz_condition_variance(3, 1, 1, optimal_gain(3, 1, 1)) < 1
    r = 2.0
    equal = ghz_condition_variance(30, r, r, optimal_gain(30, r, r))
    r1 = unbiased_r1(30, r)
    unbiased = ghz_condition_variance(30, r1, r, optimal_gain(30, r1, r))
    assert equal > unbiased


@pytest.mark.parametrize("n", [3, 4, 6, 9])
@pytest.mark.parametrize("r1,r2", [(0, 0), (0.3, 1.0), (1.0, 0.3), (1.2, 1.2)])
@pytest.mark.parametrize("gain", [-0.5, 0.0, 0.4, 1.0])
def test_condition_variance_matches_covariance(n, r1, r2, gain):
    v = ghz_family_analytic(GhzFamilyParams(n, r1, r2))
    expected = ghz_condition_variance(n, r1, r2, gain)
    for c in ghz_condition_set(n, gain):
        assert abs(total_variance(v, c) - expected) < 1e-10


@pytest.mark.parametrize("n,r1,r2", [(3, 0.5, 0.5), (5, 1.0, 0.2), (8, 0.1, 0.9)])
def test_fitted_gain_reproduces_optimal_gain(n, r1, r2):
    v = ghz_family_analytic(GhzFamilyParams(n, r1, r2))
    g = optimal_gain(n, r1, r2)
    assert fitted_gain(v, 1, 2) == pytest.approx(g, rel=1e-12)
    for fitted, exact in zip(fitted_condition_set(v), ghz_condition_set(n, g)):
        assert fitted.h == exact.h
        np.testing.assert_allclose(fitted.g, exact.g, rtol=1e-12)


def test_zero_commutator_variance_vanishes_for_unbiased_states():
    for n in (3, 5, 30):
        r1 = unbiased_r1(n, 5.0)
        assert ghz_condition_variance(n, r1, 5.0, optimal_gain(n, r1, 5.0)) < 0.01


# --- certification --------------------------------------------------------


def test_certify_ghz_family():
    v = ghz_family_analytic(GhzFamilyParams(3, 0.5, 0.5))
    report = certify_genuine(v, ghz_condition_set(3, optimal_gain(3, 0.5, 0.5)))
    assert report.genuine
    assert len(report.excluded) == 3 and not report.surviving


def test_certify_product_state_keeps_true_split():
    v = direct_sum(two_mode_squeezed(1.0), CovarianceMatrix.vacuum(1))
    for gains in (0.0, 0.5, 1.0, -1.0):
        conds = ghz_condition_set(3, gains) + [pair_condition(3, 1, 3, gains), SYM3]
        report = certify_genuine(v, conds)
        assert not report.genuine
        assert P("1,2|3") in report.surviving


def test_certify_vacuum():
    report = certify_genuine(CovarianceMatrix.vacuum(3), ghz_condition_set(3, 0.0))
    assert not report.genuine
    assert report.excluded == []


def test_certify_errors():
    v = CovarianceMatrix.vacuum(3)
    with pytest.raises(DomainError):
        certify_genuine(v, [])
    with pytest.raises(DimensionError):
        certify_genuine(v, [QuadCombination((1, -1), (1, 1))])
    with pytest.raises(DomainError, match="bipartitions"):
        certify_genuine(CovarianceMatrix.vacuum(21), ghz_condition_set(21, 0.0))


def test_certify_refinements_follow_bipartitions():
    # every finer partition is excluded by some condition once all bipartitions are
    v = ghz_family_analytic(GhzFamilyParams(4, 1.0, 1.0))
    conds = ghz_condition_set(4, optimal_gain(4, 1.0, 1.0))
    assert certify_genuine(v, conds).genuine
    for p in set_partitions(4):
        if len(p.blocks) > 1:
            assert any(total_variance(v, c) < partition_bound(c, p) for c in conds)


def test_soundness_random_products(rng):
    for _ in range(40):
        n = int(rng.integers(2, 6))
        k = int(rng.integers(1, n))
        v = direct_sum(random_state(k, rng), random_state(n - k, rng))
        order = [int(m) for m in rng.permutation(np.arange(1, n + 1))]
        v = v.permute_modes(order)
        # new label of old mode order[i] is i + 1
        first = frozenset(i + 1 for i, m in enumerate(order) if m <= k)
        split = ModePartition.bipartition(first, n)
        for _ in range(10):
            c = QuadCombination(tuple(rng.normal(size=n)), tuple(rng.normal(size=n)))
            assert total_variance(v, c) >= partition_bound(c, split) - 1e-9


def test_evaluate_condition_and_json():
    v = ghz_family_analytic(GhzFamilyParams(3, 1.0, 1.0))
    verdict = evaluate_condition(v, SYM3)
    assert verdict.commutator_coefficient == pytest.approx(0.0, abs=1e-15)
    assert verdict.violated == {p for p, b in verdict.bounds.items() if verdict.total_variance < b}
    doc = verdict.to_dict()
    assert {e["partition"] for e in doc["bounds"]} == {"1,3|2", "1,2|3", "1|2,3"}
    assert doc["genuine"] == (verdict.total_variance < 0.5)
    single = evaluate_condition(v, SYM3, [P("1|2|3")])
    assert list(single.bounds.values()) == [pytest.approx(1.0)]
