"""Probability measures as nonnegative weights on level-M cells.

Ball masses are answered by sweeping the cell tree once per query point:
cells wholly inside the closed ball contribute their full weight, cells
wholly outside contribute nothing, and straddling cells are split into
virtual children (weights in the natural proportions L_i^d) until the cell
diameter drops below resolution * r, after which representative-point
membership decides.  For the natural measure the virtual split is exact at
every depth; for other measures it is the documented discretization model,
with error absorbed into the resolution parameter.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .fractal import CellTree, Word

PROB_TOL = 1e-10
DEFAULT_RESOLUTION = 1e-3


@dataclass
class CellMeasure:
    """Weights over the level-M cells of a tree.

    Probability measures sum to 1 within PROB_TOL; sub-probability
    restrictions are allowed when flagged.  Weights are read-only after
    construction.
    """

    tree: CellTree
    weights: np.ndarray
    subprobability: bool = False

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).copy()
        if w.shape != (self.tree.n_cells,):
            raise InvalidInputError(
                f"expected {self.tree.n_cells} weights, got shape {w.shape}"
            )
        if np.any(w < -1e-15) or not np.all(np.isfinite(w)):
            raise InvalidInputError("weights must be nonnegative and finite")
        w[w < 0.0] = 0.0
        total = float(w.sum())
        if not self.subprobability and abs(total - 1.0) > PROB_TOL:
            raise InvalidInputError(
                f"probability weights sum to {total!r}; flag subprobability "
                "to allow restrictions"
            )
        if self.subprobability and total > 1.0 + PROB_TOL:
            raise InvalidInputError("sub-probability mass exceeds 1")
        w.flags.writeable = False
        self.weights = w

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def scaled(self, factor: float) -> "CellMeasure":
        if factor < 0.0:
            raise InvalidInputError("scaling factor must be nonnegative")
        return CellMeasure(self.tree, self.weights * factor, subprobability=True)


@dataclass(frozen=True)
class BallQuery:
    """Closed ball B(center, radius) with a relative splitting tolerance."""

    center: np.ndarray
    radius: float
    resolution: float = DEFAULT_RESOLUTION

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if self.radius <= 0.0:
            raise InvalidInputError("ball radius must be positive")
        if not 0.0 < self.resolution < 1.0:
            raise InvalidInputError("resolution must lie in (0,1)")
        object.__setattr__(self, "center", c)


def natural_measure(tree: CellTree) -> CellMeasure:
    """The self-similar measure giving each cell mass scale^d."""
    return CellMeasure(tree, tree.natural_weights)


def aggregate_to_level(mu: CellMeasure, m: int) -> np.ndarray:
    """Masses of the level-m cells: sum the level-M weights by word prefix.

    Prefix blocks are contiguous in lexicographic order, so this is one
    reshape.
    """
    M = mu.tree.level
    if not 0 <= m <= M:
        raise InvalidInputError(f"aggregation level {m} outside 0..{M}")
    N = mu.tree.ifs.n_maps
    return mu.weights.reshape(N**m, -1).sum(axis=1)


def _check_same_tree(a: CellMeasure, b: CellMeasure):
    if a.tree is not b.tree and not a.tree.compatible_with(b.tree):
        raise InvalidInputError("measures live on different trees")


def cell_discrepancy(mu: CellMeasure, nu: CellMeasure, level: int) -> float:
    """max over length-`level` words of |mu(cell) - nu(cell)|.

    This is the metric certifying weak-star closeness at one coarse level.
    """
    _check_same_tree(mu, nu)
    return float(
        np.max(np.abs(aggregate_to_level(mu, level) - aggregate_to_level(nu, level)))
    )


def radon_nikodym_wrt_natural(mu: CellMeasure) -> np.ndarray:
    """Cellwise density f with mu = f * natural; sum f^2 * lambda is the
    discrete square-integral of the density."""
    return mu.weights / mu.tree.natural_weights


# ---------------------------------------------------------------------------
# ball masses


def _refine_cell(ifs, rs, diff, x, state, lo, hi, resolution, base, diam):
    """Recursive virtual split of one straddling cell.

    `state` is (scale, rotation, translation, weight) of the composed cell
    map; only radii rs[lo:hi] are still undecided for this cell.
    """
    scale, R, t, w = state
    for m, lam_i in zip(ifs.maps, ifs.natural_map_weights):
        # child cell = cell map composed with phi_i on the inside
        s2 = scale * m.scale
        R2 = R @ m.orthogonal
        t2 = scale * (R @ m.translation) + t
        c2 = s2 * (R2 @ base) + t2
        w2 = w * lam_i
        D2 = s2 * diam
        dist = float(np.linalg.norm(c2 - x))

        idx_in = min(max(int(np.searchsorted(rs, dist + D2, side="left")), lo), hi)
        idx_out = min(max(int(np.searchsorted(rs, dist - D2, side="left")), lo), hi)
        # full inclusion on [idx_in, hi)
        if idx_in < hi:
            diff[idx_in] += w2
            diff[hi] -= w2
        if idx_out >= idx_in:
            continue
        idx_term = min(
            max(int(np.searchsorted(rs, D2 / resolution, side="right")), lo), hi
        )
        if idx_term < idx_in:  # representative rule on [idx_term, idx_in)
            start = max(idx_term, int(np.searchsorted(rs, dist, side="left")), idx_out)
            if start < idx_in:
                diff[start] += w2
                diff[idx_in] -= w2
        deep_hi = min(idx_in, idx_term)
        if idx_out < deep_hi:
            _refine_cell(
                ifs, rs, diff, x, (s2, R2, t2, w2), idx_out, deep_hi,
                resolution, base, diam,
            )


def _ball_profile(
    tree: CellTree,
    weights: np.ndarray,
    x: np.ndarray,
    rs: np.ndarray,
    resolution: float = DEFAULT_RESOLUTION,
) -> np.ndarray:
    """mu(B(x, r)) for an ascending radius grid, in one tree sweep.

    Inclusion tests are closed-ball (ties count in).  All level-M cells are
    classified against the whole grid with vectorized binary searches; only
    cells needing sub-cell resolution recurse in Python.
    """
    rs = np.asarray(rs, dtype=float)
    if rs.size == 0:
        return np.zeros(0)
    if np.any(rs <= 0.0) or np.any(np.diff(rs) < 0.0):
        raise InvalidInputError("radius grid must be positive and ascending")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    nr = rs.size
    diff = np.zeros(nr + 1)

    live = weights > 0.0
    centers = tree.centers[live]
    D = tree.diams[live]
    w = weights[live]
    dist = np.linalg.norm(centers - x[None, :], axis=1)

    idx_in = np.searchsorted(rs, dist + D, side="left")
    idx_out = np.searchsorted(rs, dist - D, side="left")
    idx_term = np.searchsorted(rs, D / resolution, side="right")
    idx_rep = np.searchsorted(rs, dist, side="left")

    np.add.at(diff, idx_in, w)
    diff[nr] -= w.sum()

    straddle = idx_out < idx_in
    term_start = np.maximum(np.maximum(idx_term, idx_rep), idx_out)
    term_ok = straddle & (term_start < idx_in)
    np.add.at(diff, term_start[term_ok], w[term_ok])
    np.add.at(diff, idx_in[term_ok], -w[term_ok])

    deep_hi = np.minimum(idx_in, idx_term)
    deep = np.nonzero(idx_out < deep_hi)[0]
    if deep.size:
        ifs = tree.ifs
        base = np.asarray(tree.base_point, dtype=float)
        diam = ifs.attractor_diam
        sc = tree.scales[live]
        Rt = tree.rotations[live]
        tr = tree.translations[live]
        for k in deep:
            _refine_cell(
                ifs, rs, diff, x,
                (float(sc[k]), Rt[k], tr[k], float(w[k])),
                int(idx_out[k]), int(deep_hi[k]),
                resolution, base, diam,
            )

    masses = np.cumsum(diff[:nr])
    return np.clip(masses, 0.0, float(weights.sum()))


def ball_mass_profile(
    mu: CellMeasure, x, rs, resolution: float = DEFAULT_RESOLUTION
) -> np.ndarray:
    """Vector of mu(B(x, r)) over an ascending radius grid."""
    return _ball_profile(mu.tree, mu.weights, x, np.asarray(rs, float), resolution)


def ball_mass(mu: CellMeasure, query: BallQuery) -> float:
    """mu of the closed ball described by the query.

    Nondecreasing in the radius up to O(resolution) terminal-rule effects;
    exact whenever the ball boundary avoids straddling cells.
    """
    out = _ball_profile(
        mu.tree, mu.weights, query.center, np.array([query.radius]), query.resolution
    )
    return float(out[0])


# ---------------------------------------------------------------------------
# CSV interchange


def save_measure_csv(mu: CellMeasure, path):
    """Write `word,weight` rows; weights use shortest round-trip floats, so
    loading reproduces the measure bit for bit."""
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["word", "weight"])
        for k in range(mu.tree.n_cells):
            writer.writerow([str(mu.tree.word_of(k)), repr(float(mu.weights[k]))])


def load_measure_csv(tree: CellTree, path, subprobability: bool = False) -> CellMeasure:
    weights = np.zeros(tree.n_cells)
    seen = 0
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["word", "weight"]:
            raise InvalidInputError("measure CSV must start with 'word,weight'")
        for row in reader:
            if not row:
                continue
            word = Word.parse(row[0])
            weights[tree.index_of(word)] = float(row[1])
            seen += 1
    if seen != tree.n_cells:
        raise InvalidInputError(
            f"measure CSV has {seen} rows for a tree of {tree.n_cells} cells"
        )
    return CellMeasure(tree, weights, subprobability=subprobability)
