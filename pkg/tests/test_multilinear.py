import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from submax.fixtures import random_coverage, random_graph_cut, single_edge_cut, triangle_cut
from submax.multilinear import (
    Estimator,
    MultilinearEvaluator,
    Point,
    check_correlated_marginals_bound,
    check_lemma_general_properties,
    check_linearization_bound,
    check_random_subset_bound,
    check_union_bound_symmetric,
    eval_exact,
    evaluate,
    partial_derivative,
    sample_set,
)
from submax.rng import substream
from submax.setfn import hardness_instance


# ---------------------------------------------------------------------------
# Point
# ---------------------------------------------------------------------------


def test_point_algebra():
    x = Point([0.2, 0.8])
    y = Point([0.5, 0.1])
    assert np.allclose(x.vee(y).coords, [0.5, 0.8])
    assert np.allclose(x.wedge(y).coords, [0.2, 0.1])
    assert np.allclose((x + y).coords, [0.7, 0.9])
    assert np.allclose((0.5 * x).coords, [0.1, 0.4])
    assert x.mass() == pytest.approx(1.0)


def test_point_clamps_noise_but_rejects_garbage():
    p = Point([1.0 + 5e-13, -5e-13])
    assert p[0] == 1.0 and p[1] == 0.0
    with pytest.raises(ValueError):
        Point([1.1, 0.0])
    with pytest.raises(ValueError):
        Point([[0.1, 0.2]])


def test_point_indicator_and_support():
    p = Point.indicator([0, 2], 3)
    assert np.allclose(p.coords, [1, 0, 1])
    assert p.is_integral()
    assert p.support_mask() == 0b101


# ---------------------------------------------------------------------------
# sample_set
# ---------------------------------------------------------------------------


def test_sample_set_degenerate_points():
    rng = substream(0, 1)
    assert sample_set(Point.ones(4), rng) == 0b1111
    assert sample_set(Point.zeros(4), rng) == 0


def test_sample_set_binomial_mean():
    rng = substream(7, 2)
    x = Point([0.5] * 4)
    sizes = [bin(sample_set(x, rng)).count("1") for _ in range(100_000)]
    sigma = 1.0 / math.sqrt(len(sizes))  # std of |R| is 1 at p=1/2, n=4
    assert abs(np.mean(sizes) - 2.0) <= 3 * sigma


# ---------------------------------------------------------------------------
# eval_exact / evaluate
# ---------------------------------------------------------------------------


def test_eval_exact_single_edge():
    f = single_edge_cut()
    assert eval_exact(f, [0.5, 0.5]) == pytest.approx(0.5, abs=1e-12)


@given(mask=st.integers(min_value=0, max_value=7))
def test_eval_exact_agrees_on_vertices(mask):
    f = triangle_cut()
    x = Point.indicator(mask, 3)
    assert eval_exact(f, x) == pytest.approx(f.eval(mask), abs=1e-12)


def test_eval_exact_hardness_closed_form():
    f = hardness_instance(1, 2)
    rng = substream(3, 0)
    for z in np.linspace(0, 1, 11):
        x = rng.random(4)
        x[0] = x[3] = z
        assert eval_exact(f, x) == pytest.approx(2 * z * (1 - z), abs=1e-12)


def test_eval_exact_rejects_large_ground_sets():
    f = random_graph_cut(18, seed=0)
    with pytest.raises(ValueError):
        eval_exact(f, np.full(18, 0.5))


def test_evaluate_sampled_close_to_exact():
    f = single_edge_cut()
    est = Estimator(mode="sampled", samples=1_000_000, seed=11)
    got = evaluate(f, Point([0.5, 0.5]), est)
    assert abs(got - 0.5) <= 0.002  # 4 sigma at sigma = 0.5/sqrt(samples)


def test_evaluate_integral_points_short_circuit():
    f = triangle_cut()
    est = Estimator(mode="sampled", samples=1000, seed=0)
    before = f.query_count
    got = evaluate(f, Point.indicator([0], 3), est)
    assert got == f.eval([0])
    assert f.query_count == before + 2  # one short-circuit call + the reference eval


def test_sampled_estimates_match_exact_within_4_sigma():
    for f in (triangle_cut(), random_graph_cut(8, seed=4), random_coverage(6, seed=5)):
        rng = substream(9, f.n)
        x = rng.random(f.n)
        exact = eval_exact(f, x)
        samples = 100_000
        est = Estimator(mode="sampled", samples=samples, seed=21)
        ev = MultilinearEvaluator(f, est)
        got = ev.value(x, stream=(0,))
        # bound the deviation by 4 sigma of the empirical draw
        masks = ev._sample_masks(np.asarray(x), ev._thresholds((0,), samples))
        sigma = float(f.eval_many(masks).std(ddof=1)) / math.sqrt(samples)
        assert abs(got - exact) <= 4 * sigma + 1e-12


# ---------------------------------------------------------------------------
# partial derivatives
# ---------------------------------------------------------------------------


def test_partial_derivative_single_edge():
    f = single_edge_cut()
    assert partial_derivative(f, [0.3, 0.5], 0) == pytest.approx(0.0, abs=1e-12)
    assert partial_derivative(f, [0.3, 0.0], 0) == pytest.approx(1.0, abs=1e-12)


@given(mask=st.integers(min_value=0, max_value=7), u=st.integers(min_value=0, max_value=2))
def test_partial_derivative_vertex_marginals(mask, u):
    f = triangle_cut()
    x = Point.indicator(mask, 3)
    expected = f.eval(mask | (1 << u)) - f.eval(mask & ~(1 << u))
    assert partial_derivative(f, x, u) == pytest.approx(expected, abs=1e-12)


def test_partial_derivative_matches_finite_difference():
    f = random_graph_cut(6, seed=8)
    rng = substream(5, 1)
    x = rng.random(6) * 0.9  # keep room for +h
    h = 1e-6
    ev = MultilinearEvaluator(f)
    for u in range(6):
        xp = x.copy()
        xp[u] += h
        fd = (ev.value(xp) - ev.value(x)) / h
        assert ev.partial(x, u) == pytest.approx(fd, abs=1e-7)


def test_finite_difference_exactness_on_unit_scale_fixture():
    # F is linear in each coordinate, so at unit value scale the quotient
    # agrees with the partial to float precision
    f = single_edge_cut()
    ev = MultilinearEvaluator(f)
    x = np.array([0.3, 0.4])
    h = 1e-6
    for u in range(2):
        xp = x.copy()
        xp[u] += h
        fd = (ev.value(xp) - ev.value(x)) / h
        assert ev.partial(x, u) == pytest.approx(fd, abs=1e-9)


def test_value_and_partials_consistent_with_partial():
    f = random_coverage(6, seed=2)
    rng = substream(6, 2)
    x = rng.random(6)
    ev = MultilinearEvaluator(f)
    value, grad, sigma = ev.value_and_partials(x)
    assert sigma is None
    assert value == pytest.approx(ev.value(x), abs=1e-12)
    for u in range(6):
        assert grad[u] == pytest.approx(ev.partial(x, u), abs=1e-9)


def test_sampled_partial_uses_common_random_numbers():
    # with CRN the u-derivative of the single edge is exactly 1 - 2 b1 per
    # draw; the estimate must land within 4 sigma of 1 - 2 x1
    f = single_edge_cut()
    est = Estimator(mode="sampled", samples=40_000, seed=3)
    got = partial_derivative(f, [0.2, 0.3], 0, est)
    sigma = 1.0 / math.sqrt(40_000)
    assert abs(got - 0.4) <= 4 * sigma


# ---------------------------------------------------------------------------
# box vertices
# ---------------------------------------------------------------------------


def test_box_vertex_values_enumerates_scaled_indicators():
    f = triangle_cut()
    ev = MultilinearEvaluator(f)
    x = np.array([0.3, 0.6, 0.9])
    values = ev.box_vertex_values(x)
    for mask in range(8):
        scaled = np.array([x[u] if (mask >> u) & 1 else 0.0 for u in range(3)])
        assert values[mask] == pytest.approx(ev.value(scaled), abs=1e-12)


# ---------------------------------------------------------------------------
# lemma checks
# ---------------------------------------------------------------------------


def test_general_properties_on_symmetric_fixture():
    rep = check_lemma_general_properties(triangle_cut(), trials=30, seed=0)
    assert rep.passed and rep.details["symmetry_checked"]


def test_general_properties_on_coverage_skips_symmetry():
    rep = check_lemma_general_properties(random_coverage(5, seed=1), trials=30, seed=0)
    assert rep.passed and not rep.details["symmetry_checked"]


def test_shift_inequality_trivial_at_origin():
    f = triangle_cut()
    ev = MultilinearEvaluator(f)
    zero = np.zeros(3)
    lhs = ev.value(zero) - ev.value(zero)
    rhs = ev.value(zero) - ev.value(zero)
    assert lhs <= rhs + 1e-12


def test_union_bound_examples():
    f = single_edge_cut()
    rep = check_union_bound_symmetric(f, Point([0.5, 0.0]), [0])
    assert rep.passed and rep.status == "ok"
    # x = 0 reduces to f(S) >= f(S) - f(empty)
    rep0 = check_union_bound_symmetric(triangle_cut(), Point.zeros(3), [0, 1])
    assert rep0.passed and rep0.status == "ok"


def test_union_bound_reports_unmet_precondition():
    # x = (0.5, 1): the vertex (0, 1) of its box has F = 1 > F(x) = 0.5
    f = single_edge_cut()
    rep = check_union_bound_symmetric(f, Point([0.5, 1.0]), [0])
    assert rep.status == "precondition_unmet"
    assert rep.passed  # unmet precondition is not a failure


def test_union_bound_requires_symmetric_flag():
    with pytest.raises(ValueError):
        check_union_bound_symmetric(random_coverage(4, seed=0), Point.zeros(4), [0])


def test_linearization_bound_on_fixtures():
    for f in (triangle_cut(), random_graph_cut(8, seed=3), random_coverage(6, seed=4)):
        rep = check_linearization_bound(f, trials=40, seed=1)
        assert rep.passed, rep.details


def test_statistical_subset_bounds():
    f = random_graph_cut(8, seed=6)
    assert check_random_subset_bound(f, p=0.5, trials=50_000, seed=2).passed
    assert check_random_subset_bound(f, A=[0, 1, 2], p=0.25, trials=50_000, seed=3).passed
    assert check_correlated_marginals_bound(f, p=0.5, trials=50_000, seed=4).passed


def test_estimator_validation():
    with pytest.raises(ValueError):
        Estimator(mode="other")
    with pytest.raises(ValueError):
        Estimator(mode="sampled", samples=0)
    assert Estimator().resolved_samples(5) == 250
