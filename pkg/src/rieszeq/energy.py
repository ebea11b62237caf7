"""Riesz s-energy quadratic forms on cell measures.

The form on level-M weights w is  w^T Q w  with

  Q[a,b] = kernel coupling between distinct cells a, b   (off-diagonal),
  Q[a,a] = scale_a^{-s} * E_s                            (diagonal),

where the off-diagonal entry is |c_a - c_b|^{-s} for well-separated pairs
and a sub-cell average for near pairs, and E_s solves the self-similar
fixed point

  E_s = OffDiag(lambda) / (1 - sum_a lambda_a^2 scale_a^{-s}).

The fixed point encodes that each cell is a scaled copy of the whole set,
so the within-cell self-energy of the natural measure scales like
scale^{-s} times the total energy; the denominator is positive for s < d
because sum_a L_a^{2d-s} < 1.  Dropping the diagonal instead would make the
form indefinite and collapse the minimizer onto a point mass.

Kernels are evaluated as exp(-s log|.|) so s acts as a continuous
parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InternalConsistencyError,
    InvalidInputError,
    ResourceBudgetError,
)
from .fractal import CellTree
from .measure import CellMeasure, _ball_profile

DEFAULT_NEAR_DEPTH = 3
DEFAULT_NEAR_THRESHOLD = 4.0
MATRIX_BUDGET = 2 * 10**7


@dataclass
class EnergyForm:
    """Assembled s-energy form; immutable once built."""

    tree: CellTree
    s: float
    offdiag: np.ndarray
    diag: np.ndarray
    base_energy: float
    near_pair_depth: int
    near_threshold: float

    @property
    def n_cells(self) -> int:
        return self.diag.shape[0]

    def matvec(self, w: np.ndarray) -> np.ndarray:
        return self.offdiag @ w + self.diag * w


@dataclass(frozen=True)
class PotentialField:
    """Potential values at the cell representatives, units length^{-s}."""

    s: float
    values: np.ndarray


def _kernel(dist: np.ndarray, s: float) -> np.ndarray:
    return np.exp(-s * np.log(dist))


def _subcell_geometry(tree: CellTree, depth: int):
    """Centers (from the tree's base point) and natural weights of the
    depth-`depth` descendants of the whole set, used to refine near pairs."""
    ifs = tree.ifs
    pts = np.asarray(tree.base_point, dtype=float)[None, :]
    scales = np.ones(1)
    for _ in range(depth):
        pts = np.concatenate([m.apply(pts) for m in ifs.maps], axis=0)
        scales = np.concatenate([m.scale * scales for m in ifs.maps])
    lam = scales**ifs.dimension
    lam = lam / lam.sum()
    return pts, lam


def assemble(
    tree: CellTree,
    s: float,
    near_pair_depth: int = DEFAULT_NEAR_DEPTH,
    near_threshold: float = DEFAULT_NEAR_THRESHOLD,
    matrix_budget: int = MATRIX_BUDGET,
) -> EnergyForm:
    """Build the s-energy form on the tree's cells.

    Pairs with center distance below near_threshold * (diam_a + diam_b) are
    expanded `near_pair_depth` levels and the kernel is averaged with the
    natural sub-weights; the refinement is local, so its cost stays linear
    in the number of cells.
    """
    d = tree.dimension
    if not (0.0 < s < d):
        raise InvalidInputError(f"s must lie in (0, {d}), got {s}")
    n = tree.n_cells
    if n * n > matrix_budget:
        raise ResourceBudgetError(
            f"{n}^2 matrix entries exceed the budget of {matrix_budget}"
        )

    C = tree.centers
    sq = np.sum(C * C, axis=1)
    dist2 = sq[:, None] + sq[None, :] - 2.0 * (C @ C.T)
    np.maximum(dist2, 0.0, out=dist2)
    dist = np.sqrt(dist2)
    with np.errstate(divide="ignore"):
        K = _kernel(dist, s)
    np.fill_diagonal(K, 0.0)

    if near_pair_depth > 0:
        D = tree.diams
        near = dist < near_threshold * (D[:, None] + D[None, :])
        np.fill_diagonal(near, False)
        ii, jj = np.nonzero(np.triu(near, k=1))
        if ii.size:
            sub_c, sub_lam = _subcell_geometry(tree, near_pair_depth)
            cells = np.unique(np.concatenate([ii, jj]))
            # descendant centers of cell a are its composed map applied to
            # the whole-set descendant centers
            local = {}
            for a in cells:
                Ra = tree.rotations[a]
                local[a] = tree.scales[a] * sub_c @ Ra.T + tree.translations[a]
            for a, b in zip(ii, jj):
                pa, pb = local[a], local[b]
                dd = np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=-1)
                val = float(sub_lam @ _kernel(dd, s) @ sub_lam)
                K[a, b] = val
                K[b, a] = val

    lam = tree.natural_weights
    off_energy = float(lam @ K @ lam)
    scale_pow = np.exp(-s * np.log(tree.scales))
    denom = 1.0 - float(np.sum(lam * lam * scale_pow))
    if denom <= 0.0:
        raise InternalConsistencyError(
            "self-energy fixed point has nonpositive denominator; "
            "this cannot happen for s < d"
        )
    E = off_energy / denom
    diag = scale_pow * E
    if not np.all(np.isfinite(K)) or not np.all(np.isfinite(diag)):
        raise InternalConsistencyError("non-finite kernel entries")

    K.flags.writeable = False
    diag.flags.writeable = False
    return EnergyForm(
        tree=tree,
        s=float(s),
        offdiag=K,
        diag=diag,
        base_energy=E,
        near_pair_depth=near_pair_depth,
        near_threshold=near_threshold,
    )


def _check_tree(form: EnergyForm, mu: CellMeasure):
    if form.tree is not mu.tree and not form.tree.compatible_with(mu.tree):
        raise InvalidInputError("form and measure live on different trees")


def energy(form: EnergyForm, mu: CellMeasure) -> float:
    """I_s(mu) = w^T Q w; strictly positive."""
    _check_tree(form, mu)
    w = mu.weights
    return float(w @ form.offdiag @ w + form.diag @ (w * w))


def bilinear(form: EnergyForm, mu: CellMeasure, nu: CellMeasure) -> float:
    """Symmetric energy pairing I_s(mu, nu); I_s(mu, mu) = energy(mu)."""
    _check_tree(form, mu)
    _check_tree(form, nu)
    return float(mu.weights @ form.matvec(nu.weights))


def potential(form: EnergyForm, mu: CellMeasure) -> PotentialField:
    """U_s at every cell representative: the matvec Q w.

    On the support of an equilibrium solution these values are constant and
    equal to the energy, up to the Frostman gap.
    """
    _check_tree(form, mu)
    vals = form.matvec(mu.weights)
    return PotentialField(s=form.s, values=vals)


# ---------------------------------------------------------------------------
# ball-mass integral potential (independent oracle)


@dataclass(frozen=True)
class BallMassPotential:
    """U_s(x) from the layer-cake identity, with the truncation error bar.

    value = s * int_{r_min}^{r_max} mu(B(x,r)) r^{-s-1} dr  +  tail,
    where the tail uses mu(B) = total mass beyond r_max exactly.  The
    near-field below r_min is not integrated; `head_bound` reports
    mu(B(x, r_min)) * r_min^{-s}, the scale of what was left out.
    """

    value: float
    head_bound: float
    r_min: float
    r_max: float
    s: float


def potential_by_ballmass(
    mu: CellMeasure,
    x,
    s: float,
    r_min: float,
    r_max: float,
    nodes_per_decade: int = 128,
    resolution: float = 1e-3,
) -> BallMassPotential:
    """Potential via  U_s(x) = s * int_0^inf mu(B(x,r)) r^{-s-1} dr.

    Trapezoid quadrature on a log-radius grid; r_max must cover the whole
    measure (every cell inside B(x, r_max)) so the tail is exact.
    """
    if not (0.0 < r_min < r_max):
        raise InvalidInputError("need 0 < r_min < r_max")
    if s <= 0.0:
        raise InvalidInputError("s must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    covering = float(
        np.max(np.linalg.norm(mu.tree.centers - x[None, :], axis=1) + mu.tree.diams)
    )
    if r_max < covering:
        raise InvalidInputError(
            f"r_max={r_max} does not cover the measure (need >= {covering})"
        )
    decades = math.log10(r_max / r_min)
    n_nodes = max(int(math.ceil(decades * nodes_per_decade)) + 1, 16)
    rs = np.geomspace(r_min, r_max, n_nodes)
    masses = _ball_profile(mu.tree, mu.weights, x, rs, resolution)
    u = np.log(rs)
    integrand = s * masses * np.exp(-s * u)
    value = float(np.trapezoid(integrand, u))
    tail = mu.total_mass * r_max ** (-s)
    head_bound = float(masses[0] * r_min ** (-s))
    return BallMassPotential(
        value=value + tail, head_bound=head_bound, r_min=r_min, r_max=r_max, s=s
    )


# ---------------------------------------------------------------------------
# normalized energy limit


@dataclass
class EnergyCurve:
    """(d-s) I_s(mu) along an s-grid with a linear-in-(d-s) extrapolation.

    `limit` is the intercept of the fit a + b (d-s) through the last
    `n_fit` grid points (closest to d); `residual` is the fit RMS, reported
    always, never hidden.
    """

    s_values: np.ndarray
    energies: np.ndarray
    normalized: np.ndarray
    limit: float
    slope: float
    residual: float
    n_fit: int


def extrapolate_linear(gaps: np.ndarray, values: np.ndarray):
    """Least-squares fit values ~ a + b * gaps; returns (a, b, rms)."""
    A = np.stack([np.ones_like(gaps), gaps], axis=1)
    coef, *_ = np.linalg.lstsq(A, values, rcond=None)
    resid = values - A @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    return float(coef[0]), float(coef[1]), rms


def normalized_energy_curve(
    tree: CellTree,
    mu: CellMeasure,
    s_grid,
    n_fit: int | None = None,
    **assemble_kwargs,
) -> EnergyCurve:
    """Assemble and evaluate (d-s) I_s(mu) on an increasing s-grid."""
    s_vals = np.asarray(list(s_grid), dtype=float)
    if s_vals.size == 0 or np.any(np.diff(s_vals) <= 0.0):
        raise InvalidInputError("s-grid must be strictly increasing")
    d = tree.dimension
    if s_vals[0] <= 0.0 or s_vals[-1] >= d:
        raise InvalidInputError(f"s-grid must lie inside (0, {d})")
    energies = np.empty_like(s_vals)
    for k, s in enumerate(s_vals):
        form = assemble(tree, float(s), **assemble_kwargs)
        energies[k] = energy(form, mu)
    gaps = d - s_vals
    normalized = gaps * energies
    if n_fit is None:
        n_fit = min(s_vals.size, max(3, s_vals.size // 2))
    n_fit = max(2, min(n_fit, s_vals.size))
    a, b, rms = extrapolate_linear(gaps[-n_fit:], normalized[-n_fit:])
    return EnergyCurve(
        s_values=s_vals,
        energies=energies,
        normalized=normalized,
        limit=a,
        slope=b,
        residual=rms,
        n_fit=n_fit,
    )
