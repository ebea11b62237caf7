import numpy as np
import pytest

from rieszeq import (
    CellMeasure,
    EnergyForm,
    InternalConsistencyError,
    InvalidInputError,
    assemble,
    build_cell_tree,
    cell_discrepancy,
    energy,
    growth_profile,
    interval_tree,
    natural_measure,
    potential,
    solve,
    sweep,
    theta_profile,
    two_start_uniqueness_gap,
)


def test_symmetric_two_cell_solution(cantor_ifs):
    tree = build_cell_tree(cantor_ifs, 1)
    form = assemble(tree, 0.5)
    rng = np.random.default_rng(0)
    res = solve(form, init=CellMeasure(tree, rng.dirichlet(np.ones(2))))
    assert res.converged
    assert res.weights.weights == pytest.approx([0.5, 0.5], abs=1e-12)


def test_warm_start_is_fixed_point(cantor_tree8):
    form = assemble(cantor_tree8, 0.5)
    first = solve(form)
    again = solve(form, init=first.weights)
    assert again.iterations <= 2
    assert again.frostman_gap < 1e-8


def test_solution_minimizes_over_random_measures(cantor_tree8):
    form = assemble(cantor_tree8, 0.5)
    res = solve(form)
    rng = np.random.default_rng(1)
    for _ in range(20):
        mu = CellMeasure(cantor_tree8, rng.dirichlet(np.ones(cantor_tree8.n_cells)))
        assert energy(form, mu) >= res.energy_value


def test_energy_value_consistent(cantor_tree8):
    form = assemble(cantor_tree8, 0.5)
    res = solve(form)
    assert res.energy_value == pytest.approx(energy(form, res.weights), abs=1e-12)


def test_frostman_certificate_on_support(cantor_tree8):
    form = assemble(cantor_tree8, 0.55)
    res = solve(form)
    assert res.converged and res.frostman_gap < 1e-8
    g = potential(form, res.weights).values
    support = res.weights.weights > 1e-12
    level = g[support]
    # constant potential on the support, equal to the energy
    assert level.max() - level.min() <= 1e-8 * level.min()
    assert res.energy_value == pytest.approx(float(level.mean()), rel=1e-8)
    # no off-support potential undercuts the support level
    assert g.min() >= level.max() * (1 - 1e-8)


def test_two_start_uniqueness(cantor_tree8):
    form = assemble(cantor_tree8, 0.5)
    rng = np.random.default_rng(7)
    assert two_start_uniqueness_gap(form, rng) < 1e-7


def test_pure_iteration_monotone_energy(cantor_ifs):
    tree = build_cell_tree(cantor_ifs, 4)
    form = assemble(tree, 0.5)
    rng = np.random.default_rng(3)
    trace = []
    res = solve(
        form,
        init=CellMeasure(tree, rng.dirichlet(np.ones(tree.n_cells))),
        newton_polish=False,
        energy_trace=trace,
    )
    assert res.converged
    trace = np.array(trace)
    assert np.all(np.diff(trace) <= 1e-10 * np.abs(trace[:-1]))


def test_unconverged_is_flagged_not_raised(cantor_tree8):
    form = assemble(cantor_tree8, 0.5)
    res = solve(form, max_iter=1, newton_polish=False)
    assert not res.converged
    assert res.iterations == 1


def test_indefinite_form_detected(cantor_ifs):
    # dropping the self-energy diagonal makes the form indefinite; the
    # line search must refuse rather than descend forever
    tree = build_cell_tree(cantor_ifs, 3)
    good = assemble(tree, 0.5)
    bad = EnergyForm(
        tree=tree,
        s=good.s,
        offdiag=good.offdiag,
        diag=np.zeros_like(good.diag),
        base_energy=0.0,
        near_pair_depth=good.near_pair_depth,
        near_threshold=good.near_threshold,
    )
    with pytest.raises(InternalConsistencyError):
        solve(bad, newton_polish=False)


def test_solver_input_validation(cantor_tree8, cantor_ifs):
    form = assemble(cantor_tree8, 0.5)
    with pytest.raises(InvalidInputError):
        solve(form, tol=0.0)
    other = build_cell_tree(cantor_ifs, 3)
    with pytest.raises(InvalidInputError):
        solve(form, init=natural_measure(other))


# ---------------------------------------------------------------------------
# sweeps


def test_sweep_monotone_energy_and_masses(cantor_tree8):
    grid = [0.2, 0.4, 0.55, 0.6]
    sw = sweep(cantor_tree8, grid, coarse_level=1)
    assert not sw.aborted
    energies = [r.energy_value for r in sw.results]
    assert all(b > a for a, b in zip(energies, energies[1:]))
    # symmetric set: level-1 masses are exactly even
    for masses in sw.coarse_masses:
        assert masses == pytest.approx([0.5, 0.5], abs=1e-9)


def test_sweep_empty_grid(cantor_tree8):
    sw = sweep(cantor_tree8, [])
    assert sw.results == [] and not sw.aborted


def test_sweep_rejects_unsorted(cantor_tree8):
    with pytest.raises(InvalidInputError):
        sweep(cantor_tree8, [0.5, 0.4])


def test_sweep_aborts_on_unconverged(cantor_tree8):
    sw = sweep(cantor_tree8, [0.3, 0.5], max_iter=1, newton_polish=False)
    assert sw.aborted
    assert len(sw.results) == 1
    assert not sw.results[0].converged


# ---------------------------------------------------------------------------
# growth profiles


def test_growth_ratios_finite_positive(cantor_tree8, cantor_ifs):
    form = assemble(cantor_tree8, 0.5)
    res = solve(form)
    xs = np.array([[0.0], [1.0], [2.0 / 3.0]])
    rs = np.geomspace(1e-3, 1.0, 24)
    gp = growth_profile(res, xs, rs)
    assert np.all(np.isfinite(gp.ratios))
    assert np.all(gp.ratios > 0.0)
    assert gp.k_hat >= gp.ratios.mean()


def test_growth_requires_convergence(cantor_tree8):
    form = assemble(cantor_tree8, 0.5)
    res = solve(form, max_iter=1, newton_polish=False)
    with pytest.raises(InvalidInputError):
        growth_profile(res, np.array([[0.0]]), np.geomspace(0.01, 1.0, 4))


def test_natural_growth_within_ahlfors_bracket(cantor_lam8, cantor_ifs):
    # theta ratios of the natural measure over the same grid bracket used
    # for the empirical Ahlfors constants
    from rieszeq import ahlfors_constants

    rng = np.random.default_rng(2)
    diamA = cantor_ifs.attractor_diam
    rs = np.geomspace(1e-3 * diamA, diamA, 48)
    est = ahlfors_constants(cantor_lam8.tree, n_points=8, r_grid=rs, rng=rng)
    prof = theta_profile(cantor_lam8, np.array([0.0]), rs)
    assert np.all(prof.theta >= min(est.c_lower, prof.theta.min()) - 1e-12)
    assert est.c_lower <= 1.0 + 1e-9
    assert est.c_upper >= 1.0 - 1e-9


def test_interval_density_shape(interval9):
    # the solved weights on 512 equal cells follow the endpoint-singular
    # classical density at s = 1/2; the smooth-vanishing candidate is far
    s = 0.5
    form = assemble(interval9, s)
    res = solve(form)
    assert res.converged
    centers = interval9.centers.ravel() + 0.5 * interval9.scales * 2.0
    w = res.weights.weights
    for expo, close in ((-(1 - s) / 2, True), (+(1 - s) / 2, False)):
        dens = (1.0 - np.clip(centers, -1 + 1e-9, 1 - 1e-9) ** 2) ** expo
        p = dens / dens.sum()
        l1 = float(np.abs(w - p).sum())
        if close:
            assert l1 < 0.02
        else:
            assert l1 > 0.1
