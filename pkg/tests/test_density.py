import numpy as np
import pytest

from rieszeq import (
    CellMeasure,
    CodedPoint,
    InvalidInputError,
    PointOffAttractorError,
    ahlfors_constants,
    build_cell_tree,
    d_tilde_constant,
    natural_measure,
    normalized_potential_limit,
    order_two_density,
    sample_coded_points,
    theta_profile,
)
from rieszeq.density import averages_of_log_profile

D_CANTOR = np.log(2) / np.log(3)
# frozen by the full pipeline (deep-window order-two estimates at typical
# points of the middle-thirds set); used as a cross-module regression anchor
D_TILDE_CANTOR = 0.967


def deep_eps(ifs):
    return ifs.attractor_diam * np.geomspace(1e-6, 1e-40, 16)


# ---------------------------------------------------------------------------
# average density profiles


def test_theta_exact_at_self_similar_radii(cantor_lam8):
    rs = np.array([3.0**-k for k in range(8, 0, -1)])
    prof = theta_profile(cantor_lam8, CodedPoint(()), rs)
    assert prof.theta == pytest.approx(np.ones_like(rs), rel=1e-12)


def test_theta_at_full_radius(cantor_lam8):
    prof = theta_profile(cantor_lam8, CodedPoint(()), np.array([1.0]))
    assert prof.theta[0] == pytest.approx(1.0, rel=1e-12)


def test_theta_oscillates_persistently(cantor_lam8):
    rs = np.geomspace(1e-10, 1.0, 600)
    prof = theta_profile(cantor_lam8, CodedPoint(()), rs)
    # the corner profile swings between 2^{-d} and 1 at every scale
    assert prof.theta.max() - prof.theta.min() > 0.3
    deep = prof.theta[rs < 1e-5]
    assert deep.max() - deep.min() > 0.3


def test_theta_off_attractor_rejected(cantor_lam8):
    with pytest.raises(PointOffAttractorError):
        theta_profile(cantor_lam8, np.array([0.5]), np.geomspace(0.01, 1.0, 8))


def test_theta_accepts_float_points_on_attractor(cantor_lam8):
    rs = np.geomspace(1e-4, 1.0, 50)
    prof = theta_profile(cantor_lam8, np.array([1.0]), rs)
    assert np.all(prof.theta > 0.0)


# ---------------------------------------------------------------------------
# order-two averages


def test_log_average_of_constant_profile_is_exact():
    ln_r = np.linspace(-30.0, 0.0, 500)
    theta = np.full_like(ln_r, 0.73)
    eps_idx = np.array([0, 100, 250])
    out = averages_of_log_profile(ln_r, theta, eps_idx)
    assert out == pytest.approx([0.73, 0.73, 0.73], rel=1e-14)


def test_averaging_damps_oscillation(cantor_lam8, cantor_ifs):
    rng = np.random.default_rng(9)
    p = sample_coded_points(cantor_lam8.tree, 1, rng)[0]
    est = order_two_density(cantor_lam8, p, deep_eps(cantor_ifs))
    rs = np.geomspace(1e-8, 1.0, 500)
    prof = theta_profile(cantor_lam8, p, rs)
    amp_theta = prof.theta.max() - prof.theta.min()
    amp_avg = est.averages.max() - est.averages.min()
    assert amp_avg < 0.25 * amp_theta


def test_order_two_linearity_in_measure(cantor_lam8, cantor_ifs):
    rng = np.random.default_rng(10)
    p = sample_coded_points(cantor_lam8.tree, 1, rng)[0]
    eps = deep_eps(cantor_ifs)
    full = order_two_density(cantor_lam8, p, eps).extrapolated
    half = order_two_density(cantor_lam8.scaled(0.5), p, eps).extrapolated
    assert half == pytest.approx(0.5 * full, rel=1e-12)


def test_order_two_local_density_factor(cantor_lam8, cantor_ifs):
    # twice the natural measure restricted to the left half: at left-half
    # points the order-two density doubles
    tree = cantor_lam8.tree
    w = cantor_lam8.weights.copy()
    w[tree.n_cells // 2 :] = 0.0
    mu = CellMeasure(tree, 2.0 * w)
    rng = np.random.default_rng(12)
    tail = sample_coded_points(tree, 1, rng, word_length=400)[0]
    p = CodedPoint((1,) + tail.word)
    eps = deep_eps(cantor_ifs)
    a_mu = order_two_density(mu, p, eps).extrapolated
    a_lam = order_two_density(cantor_lam8, p, eps).extrapolated
    assert a_mu == pytest.approx(2.0 * a_lam, rel=1e-9)


def test_order_two_requires_two_eps(cantor_lam8):
    with pytest.raises(InvalidInputError):
        order_two_density(cantor_lam8, CodedPoint(()), [1e-3])


def test_order_two_floor_for_float_points(cantor_lam8):
    with pytest.raises(InvalidInputError):
        order_two_density(cantor_lam8, np.array([0.0]), [1e-3, 1e-20])


def test_corner_value_below_typical(cantor_lam8, cantor_ifs):
    # the all-ones coding is a one-sided corner: its order-two density is a
    # genuinely different (smaller) limit than at typical points
    eps = deep_eps(cantor_ifs)
    corner = order_two_density(cantor_lam8, CodedPoint(()), eps).extrapolated
    assert corner == pytest.approx(0.815, abs=0.01)
    assert corner < 0.9


# ---------------------------------------------------------------------------
# the constant of the natural measure


def test_d_tilde_constancy_and_value(cantor_tree8):
    est = d_tilde_constant(cantor_tree8, n_points=8, rng=np.random.default_rng(5))
    assert est.value == pytest.approx(D_TILDE_CANTOR, abs=0.02)
    assert est.uncertainty < 0.02
    dev = np.max(np.abs(est.per_point - est.value)) / est.value
    assert dev < 0.05


def test_d_tilde_level_invariant_for_natural_measure(cantor_ifs):
    # the natural measure's ball masses are computed exactly at any tree
    # level (the virtual split is the measure itself), so the estimator
    # does not depend on M
    t6 = build_cell_tree(cantor_ifs, 6)
    t8 = build_cell_tree(cantor_ifs, 8)
    e6 = d_tilde_constant(t6, n_points=4, rng=np.random.default_rng(5))
    e8 = d_tilde_constant(t8, n_points=4, rng=np.random.default_rng(5))
    assert e6.value == pytest.approx(e8.value, rel=1e-12)
    assert e6.uncertainty == pytest.approx(e8.uncertainty, rel=1e-9, abs=1e-12)


def test_d_tilde_symmetric_endpoints(cantor_lam8, cantor_ifs):
    # the two extreme fixed points are mirror images; their corner
    # order-two densities agree
    eps = deep_eps(cantor_ifs)
    left = order_two_density(cantor_lam8, CodedPoint(()), eps).extrapolated
    right = order_two_density(cantor_lam8, CodedPoint((2,) * 60), eps).extrapolated
    assert left == pytest.approx(right, rel=1e-2)


# ---------------------------------------------------------------------------
# normalized potential limit


def test_potential_limit_positive_and_matches_density(cantor_lam8, cantor_ifs):
    d = D_CANTOR
    gaps = np.array([0.2, 0.1, 0.05, 0.025])
    rng = np.random.default_rng(21)
    pts = sample_coded_points(cantor_lam8.tree, 2, rng)
    eps = deep_eps(cantor_ifs)
    for p in pts:
        est = normalized_potential_limit(cantor_lam8, p, d - gaps)
        assert np.all(est.values > 0.0)
        d2 = order_two_density(cantor_lam8, p, eps).extrapolated
        assert est.limit == pytest.approx(d * d2, rel=0.05)


def test_potential_limit_weighted_measure(cantor_lam8, cantor_ifs):
    # density 3/2 on the left half: the limit at left-half points scales by
    # the local density
    tree = cantor_lam8.tree
    d = D_CANTOR
    f = np.where(np.arange(tree.n_cells) < tree.n_cells // 2, 1.5, 0.5)
    mu = CellMeasure(tree, f * cantor_lam8.weights)
    rng = np.random.default_rng(9)
    tail = sample_coded_points(tree, 1, rng, word_length=400)[0]
    p = CodedPoint((1,) + tail.word)
    est = normalized_potential_limit(mu, p, d - np.array([0.2, 0.1, 0.05, 0.025]))
    assert est.limit == pytest.approx(1.5 * d * D_TILDE_CANTOR, rel=0.06)


def test_potential_limit_grid_validation(cantor_lam8):
    with pytest.raises(InvalidInputError):
        normalized_potential_limit(cantor_lam8, CodedPoint(()), [0.5])
    with pytest.raises(InvalidInputError):
        normalized_potential_limit(cantor_lam8, CodedPoint(()), [0.5, 0.7])


# ---------------------------------------------------------------------------
# Ahlfors constants


def test_ahlfors_two_sided(cantor_tree8):
    est = ahlfors_constants(cantor_tree8, rng=np.random.default_rng(2))
    assert 0.0 < est.c_lower <= est.c_upper < np.inf
    # theta = 1 is attained at self-similar radii, so the bracket straddles 1
    assert est.c_lower <= 1.0 + 1e-9
    assert est.c_upper >= 1.0 - 1e-9


def test_ahlfors_stable_across_levels(cantor_ifs):
    t6 = build_cell_tree(cantor_ifs, 6)
    t8 = build_cell_tree(cantor_ifs, 8)
    e6 = ahlfors_constants(t6, rng=np.random.default_rng(2))
    e8 = ahlfors_constants(t8, rng=np.random.default_rng(2))
    assert e6.c_lower == pytest.approx(e8.c_lower, rel=0.10)
    assert e6.c_upper == pytest.approx(e8.c_upper, rel=0.10)
