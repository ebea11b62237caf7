"""Equilibrium weights: minimize w^T Q w over the probability simplex.

The solver is Frank-Wolfe with away steps and exact line search (closed
form for quadratics).  The stopping certificate is the discrete Frostman
condition: the gradient g = 2 Q w must be constant on the support and no
smaller anywhere else, measured by

    frostman_gap = (max_{support} g - min_all g) / min_all g,

which orders the KKT conditions correctly (max over support cells, min
over all cells).  Vertex steps identify sparse support cleanly and the
same gap doubles as the duality certificate.

An active-set polish accelerates the endgame: once the support is
identified, the equality-constrained KKT system is solved directly and the
candidate is accepted only if it passes the same Frostman test.  The pure
iteration is available with newton_polish=False.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalConsistencyError, InvalidInputError
from .energy import EnergyForm, assemble
from .fractal import CellTree
from .measure import CellMeasure, aggregate_to_level, ball_mass_profile

W_FLOOR = 1e-12
POLISH_TRIGGER_GAP = 1e-3
POLISH_RETRY_ITERS = 500
RECOMPUTE_EVERY = 4096


@dataclass
class SolveResult:
    weights: CellMeasure
    energy_value: float
    frostman_gap: float
    iterations: int
    s: float
    level: int
    converged: bool

    def as_record(self) -> dict:
        return {
            "s": self.s,
            "level": self.level,
            "energy": self.energy_value,
            "frostman_gap": self.frostman_gap,
            "iterations": self.iterations,
            "converged": self.converged,
        }


@dataclass
class SweepResult:
    """Ordered solves over an increasing s-grid plus coarse cell masses."""

    results: list
    coarse_level: int
    coarse_masses: np.ndarray
    aborted: bool = False

    @property
    def s_values(self) -> np.ndarray:
        return np.array([r.s for r in self.results])


def _frostman_gap(g: np.ndarray, w: np.ndarray, w_floor: float) -> float:
    gmin = float(g.min())
    support = w > w_floor
    gmax_supp = float(g[support].max())
    return (gmax_supp - gmin) / gmin


def _column(form: EnergyForm, j: int) -> np.ndarray:
    col = form.offdiag[:, j].copy()
    col[j] += form.diag[j]
    return col


def _active_set_polish(form: EnergyForm, w: np.ndarray, tol: float, w_floor: float):
    """Solve the KKT equalities on the current support candidate.

    Repeatedly drops nonpositive weights and admits off-support cells whose
    gradient undercuts the support level; returns polished weights or None.
    """
    n = form.n_cells
    active = np.nonzero(w > w_floor)[0]
    if active.size == 0:
        return None
    for _ in range(60):
        k = active.size
        Q_aa = form.offdiag[np.ix_(active, active)] + np.diag(form.diag[active])
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = 2.0 * Q_aa
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs = np.zeros(k + 1)
        rhs[k] = 1.0
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            return None
        w_act = sol[:k]
        if np.any(w_act <= 0.0):
            keep = w_act > 0.0
            if not np.any(keep):
                return None
            active = active[keep]
            continue
        w_new = np.zeros(n)
        w_new[active] = w_act
        g = 2.0 * form.matvec(w_new)
        if _frostman_gap(g, w_new, w_floor) < tol:
            return w_new
        # admit the worst off-support violator and re-solve
        off = np.ones(n, dtype=bool)
        off[active] = False
        if not np.any(off):
            return None
        j = int(np.argmin(np.where(off, g, np.inf)))
        if g[j] >= float(g[active].max()):
            return None
        active = np.sort(np.append(active, j))
    return None


def solve(
    form: EnergyForm,
    init: CellMeasure | None = None,
    tol: float = 1e-8,
    max_iter: int | None = None,
    w_floor: float = W_FLOOR,
    newton_polish: bool = True,
    energy_trace: list | None = None,
) -> SolveResult:
    """Minimize the energy form over probability weights.

    Unconverged runs return converged=False, never a silent success.
    Negative curvature along a step direction means the form is indefinite
    and raises InternalConsistencyError (increase the tree level).
    """
    if tol <= 0.0:
        raise InvalidInputError("tol must be positive")
    n = form.n_cells
    if max_iter is None:
        max_iter = 200 * n

    if init is None:
        w = form.tree.natural_weights.copy()
    else:
        if init.tree is not form.tree and not form.tree.compatible_with(init.tree):
            raise InvalidInputError("init measure lives on a different tree")
        w = init.weights.copy()
        total = w.sum()
        if total <= 0.0:
            raise InvalidInputError("init weights must carry mass")
        w = w / total

    q = form.matvec(w)
    f = float(w @ q)
    g = 2.0 * q
    iterations = 0
    polish_done_at = -POLISH_RETRY_ITERS
    converged = False

    while True:
        gap = _frostman_gap(g, w, w_floor)
        if energy_trace is not None:
            energy_trace.append(f)
        if gap < tol:
            converged = True
            break
        if iterations >= max_iter:
            break

        if (
            newton_polish
            and gap < POLISH_TRIGGER_GAP
            and iterations - polish_done_at >= POLISH_RETRY_ITERS
        ):
            polish_done_at = iterations
            w_new = _active_set_polish(form, w, tol, w_floor)
            if w_new is not None:
                w = w_new
                q = form.matvec(w)
                f = float(w @ q)
                g = 2.0 * q
                converged = True
                break

        # toward the vertex with the least gradient; np.argmin breaks ties
        # toward the lowest word index
        v = int(np.argmin(g))
        gw = float(g @ w)
        gap_fw = gw - float(g[v])

        support = np.nonzero(w > w_floor)[0]
        a = int(support[np.argmax(g[support])])
        gap_aw = float(g[a]) - gw

        if gap_aw > gap_fw and w[a] < 1.0 - 1e-14:
            vertex, gap_dir, away = a, gap_aw, True
            gamma_max = w[a] / (1.0 - w[a])
        else:
            vertex, gap_dir, away = v, gap_fw, False
            gamma_max = 1.0

        # d^T Q d for d = +/-(e_vertex - w)
        dqd = f - 2.0 * float(q[vertex]) + float(form.diag[vertex])
        if dqd <= 0.0:
            raise InternalConsistencyError(
                "negative curvature along a simplex direction: the form is "
                "indefinite at this discretization; increase the tree level"
            )
        gamma = min(gap_dir / (2.0 * dqd), gamma_max)
        col = _column(form, vertex)
        if away:
            q += gamma * (q - col)
            w *= 1.0 + gamma
            w[vertex] -= gamma
            if gamma >= gamma_max * (1.0 - 1e-12):
                w[vertex] = 0.0  # drop step
        else:
            q += gamma * (col - q)
            w *= 1.0 - gamma
            w[vertex] += gamma
        np.maximum(w, 0.0, out=w)
        f = f - gamma * gap_dir + gamma * gamma * dqd
        g = 2.0 * q
        iterations += 1

        if iterations % RECOMPUTE_EVERY == 0:
            q = form.matvec(w)
            f = float(w @ q)
            g = 2.0 * q

    # exact final diagnostics
    w = w / w.sum()
    q = form.matvec(w)
    f = float(w @ q)
    g = 2.0 * q
    gap = _frostman_gap(g, w, w_floor)
    measure = CellMeasure(form.tree, w)
    return SolveResult(
        weights=measure,
        energy_value=f,
        frostman_gap=gap,
        iterations=iterations,
        s=form.s,
        level=form.tree.level,
        converged=gap < tol,
    )


def sweep(
    tree: CellTree,
    s_grid,
    tol: float = 1e-8,
    coarse_level: int = 1,
    assemble_kwargs: dict | None = None,
    **solve_kwargs,
) -> SweepResult:
    """Solve along an increasing s-grid, warm-starting from the previous
    solution; a failed warm start is retried cold once.  The sweep aborts
    on the first unconverged solve, returning the partial results flagged.
    """
    s_vals = list(s_grid)
    if any(b <= a for a, b in zip(s_vals, s_vals[1:])):
        raise InvalidInputError("s-grid must be strictly increasing")
    assemble_kwargs = assemble_kwargs or {}
    results = []
    masses = []
    warm = None
    aborted = False
    for s in s_vals:
        form = assemble(tree, float(s), **assemble_kwargs)
        res = solve(form, init=warm, tol=tol, **solve_kwargs)
        if not res.converged and warm is not None:
            res = solve(form, init=None, tol=tol, **solve_kwargs)
        results.append(res)
        masses.append(aggregate_to_level(res.weights, coarse_level))
        if not res.converged:
            aborted = True
            break
        warm = res.weights
    coarse = np.array(masses) if masses else np.zeros((0, 0))
    return SweepResult(
        results=results,
        coarse_level=coarse_level,
        coarse_masses=coarse,
        aborted=aborted,
    )


@dataclass
class GrowthProfile:
    """Ball-mass growth ratios mu(B(x,r)) / r^s over samples and radii."""

    s: float
    x_samples: np.ndarray
    r_grid: np.ndarray
    ratios: np.ndarray  # shape (n_points, n_radii)

    @property
    def k_hat(self) -> float:
        return float(self.ratios.max())


def growth_profile(
    result: SolveResult,
    x_samples,
    r_grid,
    resolution: float = 1e-3,
) -> GrowthProfile:
    """Evaluate the growth ratios of a converged equilibrium solution; the
    supremum k_hat estimates the growth constant at this s."""
    if not result.converged:
        raise InvalidInputError("growth profile requires a converged solve")
    xs = np.atleast_2d(np.asarray(x_samples, dtype=float))
    rs = np.asarray(r_grid, dtype=float)
    ratios = np.empty((xs.shape[0], rs.size))
    for i, x in enumerate(xs):
        masses = ball_mass_profile(result.weights, x, rs, resolution)
        ratios[i] = masses / rs**result.s
    return GrowthProfile(s=result.s, x_samples=xs, r_grid=rs, ratios=ratios)


def two_start_uniqueness_gap(
    form: EnergyForm,
    rng: np.random.Generator,
    tol: float = 1e-8,
    level: int | None = None,
    **solve_kwargs,
) -> float:
    """Solve twice from independent random simplex points and return the
    largest cell-mass discrepancy; strict convexity makes it vanish."""
    n = form.n_cells
    outs = []
    for _ in range(2):
        w0 = rng.dirichlet(np.ones(n))
        init = CellMeasure(form.tree, w0)
        res = solve(form, init=init, tol=tol, **solve_kwargs)
        if not res.converged:
            raise InternalConsistencyError("uniqueness check solve unconverged")
        outs.append(res.weights.weights)
    return float(np.max(np.abs(outs[0] - outs[1])))
