"""Strictly separated self-similar fractals.

An iterated function system (IFS) of N similitudes with contraction ratios
L_1 <= ... <= L_N generates a compact attractor A.  When the images of A
under the maps are pairwise disjoint, A carries Hausdorff dimension d solving
the Moran equation  sum_i L_i^d = 1, and every point of A has a unique
symbolic coding.

Word convention (canonical throughout the package)
--------------------------------------------------
A word (a_1, ..., a_M) lists map indices from coarse to fine: it addresses
the cell

    cell(a_1, ..., a_M) = phi_{a_1}(phi_{a_2}( ... phi_{a_M}(A) ... )),

i.e. the composition applies the *last* index innermost.  Consequently a
word's prefix addresses the enclosing coarser cell, the coding of a point
starts with the index of the level-1 cell containing it, and aggregating
level-M weights by word prefix reproduces coarse cell masses.  Symbols are
1-based.  Cells at one level are enumerated lexicographically, so the cells
sharing a prefix form one contiguous block.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    InternalConsistencyError,
    InvalidInputError,
    PointOffAttractorError,
    ResourceBudgetError,
    SeparationViolationError,
)

ORTHOGONALITY_TOL = 1e-10
MORAN_TOL = 1e-12
DEFAULT_CELL_BUDGET = 2**18
_PROBE_CLOUD_BUDGET = 4096


# ---------------------------------------------------------------------------
# similitudes


@dataclass(frozen=True)
class Similitude:
    """Contractive similarity map  x -> scale * R x + t  with R orthogonal.

    `scale` must lie in (0, 1); `orthogonal` is validated against
    R^T R = I to within ORTHOGONALITY_TOL, never assumed.
    """

    scale: float
    orthogonal: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        scale = float(self.scale)
        if not (0.0 < scale < 1.0) or not math.isfinite(scale):
            raise InvalidInputError(f"similitude scale must lie in (0,1), got {scale}")
        R = np.atleast_2d(np.asarray(self.orthogonal, dtype=float))
        t = np.atleast_1d(np.asarray(self.translation, dtype=float))
        p = t.shape[0]
        if R.shape != (p, p):
            raise InvalidInputError(
                f"orthogonal part has shape {R.shape}, expected ({p}, {p})"
            )
        defect = np.max(np.abs(R.T @ R - np.eye(p)))
        if defect >= ORTHOGONALITY_TOL:
            raise InvalidInputError(
                f"orthogonality defect {defect:.3e} exceeds {ORTHOGONALITY_TOL:.0e}"
            )
        R = R.copy()
        t = t.copy()
        R.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "orthogonal", R)
        object.__setattr__(self, "translation", t)

    @property
    def dim(self) -> int:
        return self.translation.shape[0]

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Apply the map to one point (p,) or a batch (n, p)."""
        pts = np.asarray(points, dtype=float)
        return self.scale * pts @ self.orthogonal.T + self.translation

    def inverse_apply(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return (pts - self.translation) @ self.orthogonal / self.scale

    def fixed_point(self) -> np.ndarray:
        p = self.dim
        return np.linalg.solve(np.eye(p) - self.scale * self.orthogonal, self.translation)


def _compose(sim: Similitude, scale, rot, trans):
    """phi ∘ T for composed affine data T = (scale, rot, trans), vectorised."""
    s = sim.scale * scale
    R = sim.orthogonal @ rot
    t = sim.scale * (trans @ sim.orthogonal.T) + sim.translation
    return s, R, t


# ---------------------------------------------------------------------------
# Moran dimension


def moran_dimension(scales, tol: float = MORAN_TOL) -> float:
    """Unique d > 0 with sum_i L_i^d = 1 for contraction ratios L_i in (0,1).

    The map d -> sum L_i^d is strictly decreasing from N > 1 to 0, so the
    root is bracketed by doubling and polished with safeguarded Newton
    until |sum L_i^d - 1| < tol.
    """
    L = np.asarray(list(scales), dtype=float)
    if L.size < 2:
        raise InvalidInputError("need at least two contraction ratios")
    if np.any(~np.isfinite(L)) or np.any(L <= 0.0) or np.any(L >= 1.0):
        raise InvalidInputError("contraction ratios must lie in (0,1)")

    lnL = np.log(L)

    def f(d):
        return math.fsum(np.exp(d * lnL)) - 1.0

    lo, hi = 0.0, 1.0
    while f(hi) > 0.0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e4:  # unreachable for valid ratios
            raise InvalidInputError("Moran equation failed to bracket")
    d = 0.5 * (lo + hi)
    for _ in range(200):
        val = f(d)
        if abs(val) < tol:
            break
        deriv = float(np.sum(np.exp(d * lnL) * lnL))
        step = val / deriv
        d_new = d - step
        if not (lo < d_new < hi):  # Newton left the bracket: bisect
            if val > 0.0:
                lo = d
            else:
                hi = d
            d_new = 0.5 * (lo + hi)
        else:
            if val > 0.0:
                lo = d
            else:
                hi = d
        d = d_new
    if abs(f(d)) >= tol:  # pragma: no cover
        raise InternalConsistencyError("Moran solve did not reach tolerance")
    return float(d)


# ---------------------------------------------------------------------------
# the IFS record


@dataclass
class Ifs:
    """A validated-or-validatable IFS together with derived constants.

    `maps` is sorted ascending by contraction ratio.  `separation_gap` is a
    certified lower bound on min_i dist(phi_i(A), A \\ phi_i(A)); it is 0.0
    until `validate_strict_separation` fills it.  `attractor_diam` is a
    certified upper bound on diam A.  All arrays are read-only; instances
    are safe to share across threads once constructed.
    """

    maps: tuple[Similitude, ...]
    ambient_dim: int
    dimension: float
    base_point: np.ndarray
    attractor_diam: float
    separation_gap: float = 0.0
    _probe_cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_maps(self) -> int:
        return len(self.maps)

    @property
    def scales(self) -> np.ndarray:
        return np.array([m.scale for m in self.maps])

    @property
    def natural_map_weights(self) -> np.ndarray:
        return self.scales**self.dimension

    def barycenter(self) -> np.ndarray:
        """Mean of the natural self-similar measure, solving
        b = sum_i L_i^d (L_i R_i b + t_i)."""
        p = self.ambient_dim
        lam = self.natural_map_weights
        M = np.eye(p) - sum(
            w * m.scale * m.orthogonal for w, m in zip(lam, self.maps)
        )
        rhs = sum(w * m.translation for w, m in zip(lam, self.maps))
        return np.linalg.solve(M, rhs)

    def fingerprint(self) -> tuple:
        return (
            self.n_maps,
            self.ambient_dim,
            tuple(float(m.scale) for m in self.maps),
            tuple(tuple(np.round(m.translation, 15)) for m in self.maps),
        )

    # probe cloud: representative points at a fixed depth, used by coding
    # queries and off-attractor detection.
    def _probe_cloud(self):
        key = "cloud"
        if key not in self._probe_cache:
            lvl = max(2, int(math.log(_PROBE_CLOUD_BUDGET) / math.log(self.n_maps)))
            pts = np.asarray(self.base_point, dtype=float)[None, :]
            for _ in range(lvl):
                pts = np.concatenate([m.apply(pts) for m in self.maps], axis=0)
            max_diam = max(m.scale for m in self.maps) ** lvl * self.attractor_diam
            pts.flags.writeable = False
            self._probe_cache[key] = (pts, max_diam)
        return self._probe_cache[key]

    def distance_to_attractor(self, x: np.ndarray) -> float:
        """Distance from x to A, within +/- one probe-cloud cell diameter."""
        cloud, slack = self._probe_cloud()
        x = np.asarray(x, dtype=float)
        d = float(np.min(np.linalg.norm(cloud - x, axis=1)))
        return max(d - slack, 0.0)


def _max_pairwise_distance(points: np.ndarray, chunk: int = 1024) -> float:
    sq = np.sum(points**2, axis=1)
    best = 0.0
    n = points.shape[0]
    for i in range(0, n, chunk):
        block = points[i : i + chunk]
        d2 = sq[i : i + chunk, None] + sq[None, :] - 2.0 * block @ points.T
        best = max(best, float(d2.max()))
    return math.sqrt(max(best, 0.0))


def _estimate_attractor_diam(maps, base_point, level: int) -> float:
    """Certified upper bound on diam A.

    Every point of A is within one cell diameter of some level-`level`
    representative, so diam A <= D_reps + 2 * Lmax^level * diam A; the bound
    is the fixed point of that inequality.  `level` is raised if the
    contraction at the requested depth is too weak to close the bound.
    """
    Lmax = max(m.scale for m in maps)
    while 2.0 * Lmax**level >= 0.5:
        level += 1
    pts = np.asarray(base_point, dtype=float)[None, :]
    for _ in range(level):
        pts = np.concatenate([m.apply(pts) for m in maps], axis=0)
        if pts.shape[0] > _PROBE_CLOUD_BUDGET * 4:
            break
    depth_reached = round(math.log(pts.shape[0]) / math.log(len(maps)))
    if 2.0 * Lmax**depth_reached >= 1.0:  # pragma: no cover
        raise ResourceBudgetError(
            "diameter bound cannot be certified within the point budget"
        )
    d_reps = _max_pairwise_distance(pts)
    return d_reps / (1.0 - 2.0 * Lmax**depth_reached)


def make_ifs(
    maps,
    base: str | np.ndarray = "fixed",
    diam_level: int = 6,
    attractor_diam: float | None = None,
) -> Ifs:
    """Assemble an `Ifs`: sort maps by scale, solve the Moran equation, pick
    the representative base point, and bound the attractor diameter.

    `base` is "fixed" (the fixed point of the smallest-scale map, exactly on
    the attractor), "barycenter" (mean of the natural measure), or an
    explicit point.  Strict separation is *not* checked here; call
    `validate_strict_separation` before relying on coding operations.
    """
    maps = tuple(sorted((m for m in maps), key=lambda m: m.scale))
    if len(maps) < 2:
        raise InvalidInputError("an IFS needs at least two maps")
    p = maps[0].dim
    if any(m.dim != p for m in maps):
        raise InvalidInputError("all maps must share one ambient dimension")
    d = moran_dimension([m.scale for m in maps])

    if isinstance(base, str):
        if base == "fixed":
            base_point = maps[0].fixed_point()
        elif base == "barycenter":
            lam = np.array([m.scale for m in maps]) ** d
            M = np.eye(p) - sum(
                w * m.scale * m.orthogonal for w, m in zip(lam, maps)
            )
            rhs = sum(w * m.translation for w, m in zip(lam, maps))
            base_point = np.linalg.solve(M, rhs)
        else:
            raise InvalidInputError(f"unknown base point rule {base!r}")
    else:
        base_point = np.asarray(base, dtype=float)
        if base_point.shape != (p,):
            raise InvalidInputError("base point has wrong dimension")

    if attractor_diam is None:
        attractor_diam = _estimate_attractor_diam(maps, base_point, diam_level)
    base_point = base_point.copy()
    base_point.flags.writeable = False
    return Ifs(
        maps=maps,
        ambient_dim=p,
        dimension=d,
        base_point=base_point,
        attractor_diam=float(attractor_diam),
    )


def ifs_from_dict(spec: dict, **kwargs) -> Ifs:
    """Build an Ifs from the JSON interchange format:

        {"ambient_dim": p,
         "maps": [{"scale": L, "orthogonal": [[...]], "translation": [...]}, ...]}

    The orthogonal part is optional and defaults to the identity.
    """
    try:
        p = int(spec["ambient_dim"])
        raw_maps = spec["maps"]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed fractal definition: {exc}") from exc
    sims = []
    for entry in raw_maps:
        if "scale" not in entry or "translation" not in entry:
            raise InvalidInputError("each map needs 'scale' and 'translation'")
        R = np.asarray(entry.get("orthogonal", np.eye(p)), dtype=float)
        sims.append(Similitude(entry["scale"], R, entry["translation"]))
    ifs = make_ifs(sims, **kwargs)
    if ifs.ambient_dim != p:
        raise InvalidInputError("translation dimension disagrees with ambient_dim")
    return ifs


def load_ifs(path, **kwargs) -> Ifs:
    with open(Path(path)) as fh:
        return ifs_from_dict(json.load(fh), **kwargs)


# ---------------------------------------------------------------------------
# separation certificate


def validate_strict_separation(ifs: Ifs, probe_level: int = 4) -> float:
    """Certified lower bound on min_i dist(phi_i(A), A \\ phi_i(A)).

    Exhaustive pairwise distances between level-`probe_level` cell
    representatives, minus both cell diameter bounds: every attractor point
    lies within its cell's diameter of the representative, so the result is
    a rigorous lower bound.  A positive value certifies strict separation
    and is stored on the Ifs; a nonpositive one rejects the system.
    """
    if probe_level < 2:
        raise InvalidInputError("probe_level must be at least 2")
    N = ifs.n_maps
    if N**probe_level > DEFAULT_CELL_BUDGET:
        raise ResourceBudgetError("probe level exceeds the cell budget")

    pts = np.asarray(ifs.base_point, dtype=float)[None, :]
    scales = np.ones(1)
    for _ in range(probe_level):
        pts = np.concatenate([m.apply(pts) for m in ifs.maps], axis=0)
        scales = np.concatenate([m.scale * scales for m in ifs.maps])
    diams = scales * ifs.attractor_diam

    block = N ** (probe_level - 1)
    bound = math.inf
    for i in range(N):
        pi = pts[i * block : (i + 1) * block]
        di = diams[i * block : (i + 1) * block]
        for j in range(i + 1, N):
            pj = pts[j * block : (j + 1) * block]
            dj = diams[j * block : (j + 1) * block]
            dist = np.linalg.norm(pi[:, None, :] - pj[None, :, :], axis=-1)
            gap = dist - di[:, None] - dj[None, :]
            bound = min(bound, float(gap.min()))
    if bound <= 0.0:
        raise SeparationViolationError(
            f"certified separation bound {bound:.3e} is not positive; "
            "the map images touch or overlap"
        )
    ifs.separation_gap = bound
    return bound


# ---------------------------------------------------------------------------
# words and cell trees


@dataclass(frozen=True)
class Word:
    """Multi-index addressing a cell; symbols are 1-based, coarse first."""

    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    @property
    def level(self) -> int:
        return len(self.indices)

    def prefix(self, m: int) -> "Word":
        return Word(self.indices[:m])

    def child(self, i: int) -> "Word":
        return Word(self.indices + (i,))

    def scale(self, ifs: Ifs) -> float:
        out = 1.0
        for i in self.indices:
            out *= ifs.maps[i - 1].scale
        return out

    def __str__(self) -> str:
        return ".".join(str(i) for i in self.indices)

    @staticmethod
    def parse(text: str) -> "Word":
        text = text.strip()
        if not text:
            return Word(())
        return Word(tuple(int(tok) for tok in text.split(".")))


def composed_map(ifs: Ifs, word: Word):
    """Composed similitude data (scale, rotation, translation) of a word:
    the last symbol's map is applied first."""
    p = ifs.ambient_dim
    s, R, t = 1.0, np.eye(p), np.zeros(p)
    for i in reversed(word.indices):
        s, R, t = _compose(ifs.maps[i - 1], s, R, t)
    return s, R, t


def point_at(ifs: Ifs, word: Word, base: np.ndarray | None = None) -> np.ndarray:
    """Representative point of a cell: the composed map applied to base."""
    base = ifs.base_point if base is None else np.asarray(base, dtype=float)
    s, R, t = composed_map(ifs, word)
    return s * (R @ base) + t


@dataclass
class CellTree:
    """All N^M cells at one level, plus the coarser levels used to build them.

    Arrays are aligned with the lexicographic word order, so the cells of a
    common prefix occupy a contiguous slice.  `scales`, `rotations`,
    `translations` hold the composed similitude of each cell; `centers` are
    the composed maps applied to the base point; `natural_weights` are
    scale^d and sum to 1 by the Moran equation.
    """

    ifs: Ifs
    level: int
    base_point: np.ndarray
    scales: np.ndarray
    rotations: np.ndarray
    translations: np.ndarray
    centers: np.ndarray
    natural_weights: np.ndarray
    level_scales: list
    level_centers: list

    @property
    def n_cells(self) -> int:
        return self.scales.shape[0]

    @property
    def dimension(self) -> float:
        return self.ifs.dimension

    @property
    def diams(self) -> np.ndarray:
        return self.scales * self.ifs.attractor_diam

    def word_of(self, index: int) -> Word:
        N = self.ifs.n_maps
        digits = []
        for _ in range(self.level):
            digits.append(index % N + 1)
            index //= N
        return Word(tuple(reversed(digits)))

    def index_of(self, word: Word) -> int:
        if word.level != self.level:
            raise InvalidInputError("word level does not match the tree level")
        N = self.ifs.n_maps
        idx = 0
        for a in word.indices:
            if not 1 <= a <= N:
                raise InvalidInputError(f"symbol {a} out of range 1..{N}")
            idx = idx * N + (a - 1)
        return idx

    def compatible_with(self, other: "CellTree") -> bool:
        return (
            self.level == other.level
            and self.ifs.fingerprint() == other.ifs.fingerprint()
            and np.allclose(self.base_point, other.base_point)
        )


def build_cell_tree(
    ifs: Ifs,
    level: int,
    base_point: np.ndarray | None = None,
    max_cells: int = DEFAULT_CELL_BUDGET,
) -> CellTree:
    """Enumerate all words of the given length in lexicographic order.

    Built level by level: the cells whose word starts with symbol i are the
    i-th map applied to the previous level's cells, which keeps the prefix
    blocks contiguous.
    """
    if level < 0:
        raise InvalidInputError("level must be nonnegative")
    N = ifs.n_maps
    if N**level > max_cells:
        raise ResourceBudgetError(
            f"{N}^{level} cells exceed the budget of {max_cells}"
        )
    p = ifs.ambient_dim
    base = ifs.base_point if base_point is None else np.asarray(base_point, dtype=float)

    scales = np.ones(1)
    rots = np.eye(p)[None, :, :]
    trans = np.zeros((1, p))
    level_scales = [scales]
    level_centers = [base[None, :].copy()]
    for _ in range(level):
        new_s, new_R, new_t = [], [], []
        for m in ifs.maps:
            s, R, t = _compose(m, scales, rots, trans)
            new_s.append(s)
            new_R.append(R)
            new_t.append(t)
        scales = np.concatenate(new_s)
        rots = np.concatenate(new_R)
        trans = np.concatenate(new_t)
        level_scales.append(scales)
        level_centers.append(
            scales[:, None] * np.einsum("nij,j->ni", rots, base) + trans
        )

    centers = level_centers[-1]
    d = ifs.dimension
    weights = scales**d
    for arr in (scales, rots, trans, centers, weights):
        arr.flags.writeable = False
    return CellTree(
        ifs=ifs,
        level=level,
        base_point=base,
        scales=scales,
        rotations=rots,
        translations=trans,
        centers=centers,
        natural_weights=weights,
        level_scales=level_scales,
        level_centers=level_centers,
    )


def interval_tree(level: int, a: float = -1.0, b: float = 1.0) -> CellTree:
    """Cell tree of 2^level equal subintervals of [a, b].

    The interval is the attractor of two half-scale maps whose images touch,
    so it fails strict separation; separation-dependent operations (coding,
    covering cells) are unavailable, but trees, measures and energy forms
    work unchanged with dimension d = 1.
    """
    if level < 0:
        raise InvalidInputError("level must be nonnegative")
    if not b > a:
        raise InvalidInputError("need b > a")
    eye = np.eye(1)
    maps = [
        Similitude(0.5, eye, np.array([a / 2.0])),
        Similitude(0.5, eye, np.array([b / 2.0])),
    ]
    ifs = make_ifs(maps, base=np.array([a]), attractor_diam=float(b - a))
    return build_cell_tree(ifs, level)


# ---------------------------------------------------------------------------
# point coding and covering cells


def _greedy_step(ifs: Ifs, y: np.ndarray):
    """Pick the child whose inverse image keeps y nearest the attractor."""
    cloud, slack = ifs._probe_cloud()
    best_i, best_d, best_y = 0, math.inf, None
    for i, m in enumerate(ifs.maps):
        yi = m.inverse_apply(y)
        di = float(np.min(np.linalg.norm(cloud - yi, axis=1)))
        if di < best_d:  # strict: ties keep the lowest index
            best_i, best_d, best_y = i, di, yi
    return best_i, best_d - slack, best_y


def code_point(ifs: Ifs, x, depth: int, tol: float | None = None) -> Word:
    """Length-`depth` coding of a point: symbol k is the index of the level-k
    cell containing x, found by greedy descent through inverse images.

    The point must lie within `tol` of the attractor (default
    1e-8 * diam A); otherwise PointOffAttractorError is raised.  The
    distance test is certified through the probe cloud: claimed containment
    dist(x, cell) <= tol is checked as scale(prefix) * dist(preimage, A).
    """
    if depth < 1:
        raise InvalidInputError("depth must be at least 1")
    if tol is None:
        tol = 1e-8 * ifs.attractor_diam
    y = np.asarray(x, dtype=float)
    if y.shape != (ifs.ambient_dim,):
        y = y.reshape(ifs.ambient_dim)
    if ifs.distance_to_attractor(y) > tol:
        raise PointOffAttractorError(
            f"point {y} is {ifs.distance_to_attractor(y):.3e} from the attractor"
        )
    symbols = []
    acc_scale = 1.0
    for _ in range(depth):
        i, d_excess, y = _greedy_step(ifs, y)
        acc_scale *= ifs.maps[i].scale
        if acc_scale * max(d_excess, 0.0) > tol:
            raise PointOffAttractorError(
                "no child cell contains the point within tolerance "
                f"(residual {acc_scale * d_excess:.3e})"
            )
        symbols.append(i + 1)
    return Word(tuple(symbols))


def copies_diameter_bound(ifs: Ifs) -> float:
    """Factor W with diam(covering cell) < W * r for `copies_cell`:
    W = 2 diam A / (L_1 * separation_gap)."""
    if ifs.separation_gap <= 0.0:
        raise InvalidInputError("validate_strict_separation must run first")
    return 2.0 * ifs.attractor_diam / (ifs.maps[0].scale * ifs.separation_gap)


def copies_cell(ifs: Ifs, x, r: float) -> Word:
    """Smallest convenient self-similar copy A' = cell(word) with
    B(x, r) ∩ A ⊆ A' and diam A' < W r.

    For r >= L_1 * gap the whole attractor is returned (empty word).
    Otherwise, with (j_1, j_2, ...) the coding of x, take the prefix of
    length M-1 where M is minimal with scale(prefix_M) * gap < r: any
    attractor point within r of x shares that prefix, because codings that
    split at depth m are at least scale(prefix_{m-1}) * gap apart.
    """
    if r <= 0.0:
        raise InvalidInputError("radius must be positive")
    gap = ifs.separation_gap
    if gap <= 0.0:
        raise InvalidInputError("validate_strict_separation must run first")
    L1 = ifs.maps[0].scale
    if r >= L1 * gap:
        return Word(())

    tol = 1e-8 * ifs.attractor_diam
    y = np.asarray(x, dtype=float).reshape(ifs.ambient_dim)
    if ifs.distance_to_attractor(y) > tol:
        raise PointOffAttractorError("copies_cell requires a point on the attractor")
    symbols = []
    acc_scale = 1.0
    # scale(prefix) decays geometrically, so the loop terminates
    while acc_scale * gap >= r:
        i, d_excess, y = _greedy_step(ifs, y)
        acc_scale *= ifs.maps[i].scale
        if acc_scale * max(d_excess, 0.0) > tol:
            raise PointOffAttractorError("coding descent left the attractor")
        symbols.append(i + 1)
    return Word(tuple(symbols[:-1]))


def random_word(ifs: Ifs, length: int, rng: np.random.Generator) -> Word:
    """Word with symbols drawn from the natural weights L_i^d; the image of
    the base point under such a word approximates a natural-measure sample."""
    probs = ifs.natural_map_weights
    probs = probs / probs.sum()
    draws = rng.choice(ifs.n_maps, size=length, p=probs)
    return Word(tuple(int(i) + 1 for i in draws))
