"""Average densities, order-two (Bedford-Fisher) densities, Ahlfors
constants, and the normalized potential limit.

The average density  theta(r) = mu(B(x,r)) / r^d  oscillates without limit
as r -> 0 on a self-similar set, but its logarithmic average

    A(eps) = (1 / ln(R/eps)) * int_eps^R theta(r) dr / r

converges; the limit (the order-two density) is positive, finite, and a.e.
constant for the natural measure.  The normalized potential
(d-s) U_s(x) tends to d times that constant, which this module checks by
two independent routes.

Deep radii.  The limits localize at radii far below what floating-point
point coordinates can resolve, so on-attractor sample points are carried
as symbolic codings (CodedPoint).  For a coded point the ball mass at tiny
radius is computed exactly by self-similar rescaling: if r is below the
isolation radius gap * scale(prefix_m) of the depth-m cell containing x,
then

    mu(B(x,r)) = f * lambda(prefix_m) * lambda(B(x_m, r / scale_m)),

where x_m is the point coded by the remaining suffix and f is the cell
density of mu at the tree level (the natural-split model, exact for the
natural measure).  All masses are handled as logarithms, so radii like
e^{-300} are routine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, PointOffAttractorError
from .fractal import CellTree, Word, point_at
from .measure import CellMeasure, _ball_profile, natural_measure
from .energy import extrapolate_linear

NODES_PER_DECADE = 64
DEFAULT_RESOLUTION = 1e-3
_LOG_FLOOR = -680.0  # below exp underflow with headroom


# ---------------------------------------------------------------------------
# coded points and the deep mass evaluator


@dataclass(frozen=True)
class CodedPoint:
    """Attractor point given by its coding, coarse symbol first (1-based).

    The coding continues implicitly with symbol 1, so the point is the
    image of the smallest-scale map's fixed point under the word.
    """

    word: tuple

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(int(i) for i in self.word))

    def position(self, tree: CellTree) -> np.ndarray:
        fp = tree.ifs.maps[0].fixed_point()
        return point_at(tree.ifs, Word(self.word), base=fp)


class _MassEvaluator:
    """log mu(B(x, e^u)) for one (measure, coded point) pair.

    Radii above `direct_floor` are answered by the ordinary tree sweep at
    the floating-point position; smaller radii route through the exact
    self-similar rescaling described in the module docstring.
    """

    def __init__(
        self,
        mu: CellMeasure,
        point: CodedPoint,
        resolution: float = DEFAULT_RESOLUTION,
        suffix_depth: int = 40,
    ):
        tree = mu.tree
        ifs = tree.ifs
        if ifs.separation_gap <= 0.0:
            raise InvalidInputError(
                "deep density queries need a validated separation gap"
            )
        self.mu = mu
        self.tree = tree
        self.ifs = ifs
        self.resolution = resolution
        self.suffix_depth = suffix_depth
        self.point = point
        self.x_float = point.position(tree)

        M = tree.level
        word = point.word
        if len(word) < M:
            word = word + (1,) * (M - len(word))
        self.word = word
        self.ln_gap = math.log(ifs.separation_gap)
        lnL = [math.log(ifs.maps[i - 1].scale) for i in word]
        self.prefix_lnS = np.concatenate([[0.0], np.cumsum(lnL)])
        self.lnL_tail = math.log(ifs.maps[0].scale)
        # density of mu against the natural weights on the level-M cell
        idx = tree.index_of(Word(word[:M]))
        lam_cell = float(tree.natural_weights[idx])
        w_cell = float(mu.weights[idx])
        self.ln_f = (
            math.log(w_cell / lam_cell) if w_cell > 0.0 else -math.inf
        )
        self.natural = natural_measure(tree)
        smin = float(tree.scales.min())
        self.direct_floor_ln = math.log(
            min(1e-8, 0.5 * ifs.separation_gap * smin)
        )
        self._suffix_cache: dict = {}

    def _ln_prefix_scale(self, m: int) -> float:
        W = len(self.word)
        if m <= W:
            return float(self.prefix_lnS[m])
        return float(self.prefix_lnS[W] + (m - W) * self.lnL_tail)

    def _depth_for(self, ln_r: float) -> int:
        """Largest m with gap * scale(prefix_m) > r; then B(x,r) stays in
        the depth-m cell containing x."""
        W = len(self.word)
        target = ln_r - self.ln_gap
        if self.prefix_lnS[W] > target:
            extra = (target - self.prefix_lnS[W]) / self.lnL_tail
            return W + max(int(math.floor(extra)), 0)
        return int(np.searchsorted(-self.prefix_lnS, -target, side="left")) - 1

    def _suffix_point(self, m: int) -> np.ndarray:
        key = m if m < len(self.word) else -1
        if key not in self._suffix_cache:
            if key == -1:
                pt = self.ifs.maps[0].fixed_point()
            else:
                suffix = self.word[m : m + self.suffix_depth]
                pt = point_at(self.ifs, Word(suffix), base=self.ifs.maps[0].fixed_point())
            self._suffix_cache[key] = pt
        return self._suffix_cache[key]

    def log_mass(self, ln_r: np.ndarray) -> np.ndarray:
        """ln mu(B(x, e^{ln_r})) for an ascending grid of log radii."""
        ln_r = np.asarray(ln_r, dtype=float)
        out = np.full(ln_r.shape, -math.inf)

        direct = ln_r >= self.direct_floor_ln
        if np.any(direct):
            rs = np.exp(ln_r[direct])
            masses = _ball_profile(
                self.tree, self.mu.weights, self.x_float, rs, self.resolution
            )
            with np.errstate(divide="ignore"):
                out[direct] = np.log(masses)

        deep_idx = np.nonzero(~direct)[0]
        if deep_idx.size and self.ln_f > -math.inf:
            d = self.tree.dimension
            depths = np.array([self._depth_for(float(ln_r[i])) for i in deep_idx])
            for m in np.unique(depths):
                sel = deep_idx[depths == m]
                lnS = self._ln_prefix_scale(int(m))
                rho = np.exp(ln_r[sel] - lnS)
                y = self._suffix_point(int(m))
                masses = _ball_profile(
                    self.tree,
                    self.natural.weights,
                    y,
                    rho,
                    self.resolution,
                )
                with np.errstate(divide="ignore"):
                    out[sel] = self.ln_f + d * lnS + np.log(masses)
        return out


def _as_evaluator(mu: CellMeasure, x, resolution: float):
    """Accept a CodedPoint or a plain position; plain positions only reach
    radii the float coordinates can support."""
    if isinstance(x, CodedPoint):
        return _MassEvaluator(mu, x, resolution=resolution), x.position(mu.tree)
    pos = np.atleast_1d(np.asarray(x, dtype=float))
    return None, pos


# ---------------------------------------------------------------------------
# average density profiles


@dataclass
class DensityProfile:
    x: np.ndarray
    r_grid: np.ndarray
    theta: np.ndarray


def theta_profile(
    mu: CellMeasure,
    x,
    r_grid,
    resolution: float = DEFAULT_RESOLUTION,
    check_on_attractor: bool = True,
) -> DensityProfile:
    """theta(r) = mu(B(x,r)) / r^d along a radius grid."""
    rs = np.asarray(r_grid, dtype=float)
    if rs.size == 0 or np.any(rs <= 0.0) or np.any(np.diff(rs) < 0.0):
        raise InvalidInputError("radius grid must be positive and ascending")
    evaluator, pos = _as_evaluator(mu, x, resolution)
    d = mu.tree.dimension
    if evaluator is None:
        if check_on_attractor and mu.tree.ifs.distance_to_attractor(pos) > 1e-8 * (
            mu.tree.ifs.attractor_diam
        ):
            raise PointOffAttractorError(
                "theta profiles are meaningful only on the attractor"
            )
        masses = _ball_profile(mu.tree, mu.weights, pos, rs, resolution)
        theta = masses / rs**d
    else:
        ln_r = np.log(rs)
        theta = np.exp(evaluator.log_mass(ln_r) - d * ln_r)
    return DensityProfile(x=pos, r_grid=rs, theta=theta)


# ---------------------------------------------------------------------------
# order-two density


@dataclass
class OrderTwoEstimate:
    x: np.ndarray
    epsilons: np.ndarray
    averages: np.ndarray
    extrapolated: float
    slope: float
    residual: float


def averages_of_log_profile(
    ln_r: np.ndarray, theta: np.ndarray, eps_index: np.ndarray
) -> np.ndarray:
    """Trailing log-averages A(eps_j) = mean of theta over [ln eps_j, ln R]
    by trapezoid; `eps_index` marks the grid positions of the eps values.
    If theta is constant the averages equal it exactly."""
    ln_r = np.asarray(ln_r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    n = ln_r.size
    du = np.diff(ln_r)
    seg = 0.5 * (theta[1:] + theta[:-1]) * du
    tail = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    out = np.empty(len(eps_index))
    for k, j in enumerate(eps_index):
        span = ln_r[n - 1] - ln_r[j]
        out[k] = tail[j] / span
    return out


def _quadrature_grid(eps_sorted: np.ndarray, upper: float, nodes_per_decade: int):
    """Log grid from min(eps) to `upper` containing every eps exactly."""
    knots = np.concatenate([eps_sorted, [upper]])
    pieces = [np.array([knots[0]])]
    for a, b in zip(knots[:-1], knots[1:]):
        decades = math.log10(b / a)
        n = max(int(math.ceil(decades * nodes_per_decade)), 2)
        pieces.append(np.geomspace(a, b, n + 1)[1:])
    grid = np.concatenate(pieces)
    eps_index = np.searchsorted(grid, eps_sorted)
    grid[eps_index] = eps_sorted  # exact placement
    return grid, eps_index


def order_two_density(
    mu: CellMeasure,
    x,
    eps_sequence,
    nodes_per_decade: int = NODES_PER_DECADE,
    resolution: float = DEFAULT_RESOLUTION,
    upper: float | None = None,
) -> OrderTwoEstimate:
    """Bedford-Fisher average of theta down to each eps, extrapolated in
    1 / ln(R/eps).

    The integral runs up to R = diam A (rather than a normalized 1); the
    change shifts A(eps) by O(1/ln(1/eps)), which the extrapolation
    removes.  The fit residual is always reported.
    """
    eps = np.asarray(sorted(set(float(e) for e in eps_sequence)), dtype=float)
    if eps.size < 2:
        raise InvalidInputError("need at least two eps values to extrapolate")
    if upper is None:
        upper = mu.tree.ifs.attractor_diam
    if eps[-1] >= upper:
        raise InvalidInputError("eps values must lie below the upper radius")

    evaluator, pos = _as_evaluator(mu, x, resolution)
    floor = math.exp(_LOG_FLOOR) if evaluator is not None else 1e-10 * upper
    if eps[0] < floor:
        raise InvalidInputError(
            f"smallest eps {eps[0]:.3e} is below the resolution floor {floor:.3e}"
        )

    grid, eps_index = _quadrature_grid(eps, upper, nodes_per_decade)
    profile = theta_profile(
        mu, x, grid, resolution=resolution, check_on_attractor=False
    )
    ln_r = np.log(grid)
    averages = averages_of_log_profile(ln_r, profile.theta, eps_index)

    # descending eps for reporting: deepest average last
    order = np.argsort(-eps)
    eps_desc = eps[order]
    avg_desc = averages[order]
    xvar = 1.0 / np.log(upper / eps_desc)
    a, b, rms = extrapolate_linear(xvar, avg_desc)
    return OrderTwoEstimate(
        x=pos,
        epsilons=eps_desc,
        averages=avg_desc,
        extrapolated=a,
        slope=b,
        residual=rms,
    )


# ---------------------------------------------------------------------------
# the natural-measure constant


@dataclass
class ConstantEstimate:
    value: float
    uncertainty: float
    per_point: np.ndarray
    points: list


def sample_coded_points(
    tree: CellTree, n_points: int, rng: np.random.Generator, word_length: int = 600
) -> list:
    """Natural-measure-typical coded points: symbols drawn with the natural
    weights; long words keep the implicit tail far below probed scales."""
    ifs = tree.ifs
    probs = ifs.natural_map_weights
    probs = probs / probs.sum()
    pts = []
    for _ in range(n_points):
        draws = rng.choice(ifs.n_maps, size=word_length, p=probs)
        pts.append(CodedPoint(tuple(int(i) + 1 for i in draws)))
    return pts


def d_tilde_constant(
    tree: CellTree,
    n_points: int = 12,
    rng: np.random.Generator | None = None,
    eps_sequence=None,
    nodes_per_decade: int = NODES_PER_DECADE,
    resolution: float = DEFAULT_RESOLUTION,
    word_length: int = 600,
) -> ConstantEstimate:
    """Order-two density of the natural measure, in natural-measure units:
    the median over sampled typical points, with the median absolute
    deviation as the uncertainty."""
    if rng is None:
        rng = np.random.default_rng(0)
    if eps_sequence is None:
        # deep window: the 1/ln(eps) transients of individual codings decay
        # slowly, so shallow windows leave several-percent point-to-point
        # scatter; depth 1e-40 brings it under ~2.5%
        diamA = tree.ifs.attractor_diam
        eps_sequence = diamA * np.geomspace(1e-6, 1e-40, 16)
    lam = natural_measure(tree)
    points = sample_coded_points(tree, n_points, rng, word_length)
    vals = np.array(
        [
            order_two_density(
                lam, p, eps_sequence, nodes_per_decade, resolution
            ).extrapolated
            for p in points
        ]
    )
    med = float(np.median(vals))
    mad = float(np.median(np.abs(vals - med)))
    return ConstantEstimate(value=med, uncertainty=mad, per_point=vals, points=points)


# ---------------------------------------------------------------------------
# normalized potential limit


@dataclass
class NormalizedPotentialEstimate:
    s_values: np.ndarray
    values: np.ndarray
    head_bounds: np.ndarray
    limit: float
    slope: float
    residual: float


def normalized_potential_limit(
    mu: CellMeasure,
    x,
    s_grid,
    nodes_per_decade: int = NODES_PER_DECADE,
    resolution: float = DEFAULT_RESOLUTION,
    tail_cut: float = 6.0,
    suffix_depth: int = 40,
) -> NormalizedPotentialEstimate:
    """(d-s) U_s(x) along an s-grid increasing toward d, extrapolated
    linearly in (d-s).

    Each value integrates the layer-cake identity in log radius:
    (d-s) U_s = (d-s) s int theta(u) e^{(d-s) u} du  (u = ln r), truncated
    at u_min = -tail_cut/(d-s) where the exponential weight has decayed to
    e^{-tail_cut}; the neglected head is bounded by s * max(theta) *
    e^{-tail_cut} and reported per point.  The integrand is O(1) in exact
    arithmetic at any depth, so s may approach d closely.
    """
    s_vals = np.asarray(list(s_grid), dtype=float)
    d = mu.tree.dimension
    if s_vals.size < 2 or np.any(np.diff(s_vals) <= 0.0):
        raise InvalidInputError("s-grid must be strictly increasing")
    if s_vals[0] <= 0.0 or s_vals[-1] >= d:
        raise InvalidInputError(f"s-grid must lie inside (0, {d})")

    if isinstance(x, CodedPoint):
        evaluator = _MassEvaluator(mu, x, resolution=resolution, suffix_depth=suffix_depth)
        pos = evaluator.x_float
        log_mass = evaluator.log_mass
    else:
        pos = np.atleast_1d(np.asarray(x, dtype=float))

        def log_mass(ln_r):
            rs = np.exp(np.asarray(ln_r, dtype=float))
            masses = _ball_profile(mu.tree, mu.weights, pos, rs, resolution)
            with np.errstate(divide="ignore"):
                return np.log(masses)

    covering = float(
        np.max(np.linalg.norm(mu.tree.centers - pos[None, :], axis=1) + mu.tree.diams)
    )
    u_max = math.log(covering) + 1e-9
    total = mu.total_mass

    values = np.empty_like(s_vals)
    heads = np.empty_like(s_vals)
    for k, s in enumerate(s_vals):
        delta = d - s
        u_min = u_max - tail_cut / delta
        n_nodes = max(int(math.ceil((u_max - u_min) / math.log(10.0) * nodes_per_decade)), 16)
        u = np.linspace(u_min, u_max, n_nodes)
        lm = log_mass(u)
        integrand = s * np.exp(np.where(np.isfinite(lm), lm - s * u, -np.inf))
        integrand[~np.isfinite(integrand)] = 0.0
        val = float(np.trapezoid(integrand, u))
        tail = total * math.exp(-s * u_max)
        values[k] = delta * (val + tail)
        theta_max = float(np.max(np.exp(lm - d * u))) if np.any(np.isfinite(lm)) else 0.0
        heads[k] = s * theta_max * math.exp(delta * u_min)
    gaps = d - s_vals
    a, b, rms = extrapolate_linear(gaps, values)
    return NormalizedPotentialEstimate(
        s_values=s_vals,
        values=values,
        head_bounds=heads,
        limit=a,
        slope=b,
        residual=rms,
    )


# ---------------------------------------------------------------------------
# Ahlfors regularity constants


@dataclass
class AhlforsEstimate:
    c_lower: float
    c_upper: float
    r_grid: np.ndarray
    n_points: int


def ahlfors_constants(
    tree: CellTree,
    n_points: int = 16,
    r_grid=None,
    rng: np.random.Generator | None = None,
    resolution: float = DEFAULT_RESOLUTION,
    word_length: int = 30,
) -> AhlforsEstimate:
    """Empirical two-sided density bounds: min and max of theta over sampled
    on-attractor centers and a log radius grid inside (0, diam A)."""
    if rng is None:
        rng = np.random.default_rng(0)
    diamA = tree.ifs.attractor_diam
    if r_grid is None:
        r_grid = np.geomspace(1e-3 * diamA, diamA, 48)
    r_grid = np.asarray(r_grid, dtype=float)
    lam = natural_measure(tree)
    points = sample_coded_points(tree, n_points, rng, word_length)
    lo, hi = math.inf, 0.0
    for p in points:
        prof = theta_profile(lam, p, r_grid, resolution=resolution)
        lo = min(lo, float(prof.theta.min()))
        hi = max(hi, float(prof.theta.max()))
    return AhlforsEstimate(c_lower=lo, c_upper=hi, r_grid=r_grid, n_points=n_points)
