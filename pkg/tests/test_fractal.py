import math

import numpy as np
import pytest

from rieszeq import (
    InvalidInputError,
    PointOffAttractorError,
    ResourceBudgetError,
    SeparationViolationError,
    Similitude,
    Word,
    build_cell_tree,
    code_point,
    composed_map,
    copies_cell,
    copies_diameter_bound,
    ifs_from_dict,
    make_ifs,
    moran_dimension,
    point_at,
    random_word,
    validate_strict_separation,
)
from conftest import EYE1, cantor_maps, square_corner_maps, twoscale_maps


# ---------------------------------------------------------------------------
# Moran dimension


def test_moran_half_half():
    assert moran_dimension([0.5, 0.5]) == pytest.approx(1.0, abs=1e-12)


def test_moran_cantor():
    assert moran_dimension([1 / 3, 1 / 3]) == pytest.approx(
        math.log(2) / math.log(3), abs=1e-10
    )


def test_moran_two_scale_golden():
    # substitute t = 2^{-d}: t + t^2 = 1, so t is the inverse golden ratio
    t = (math.sqrt(5) - 1) / 2
    expected = -math.log(t) / math.log(2)
    assert moran_dimension([0.5, 0.25]) == pytest.approx(expected, abs=1e-10)


def test_moran_equal_scales_property():
    rng = np.random.default_rng(0)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        L = float(rng.uniform(0.05, 0.9))
        d = moran_dimension([L] * n)
        assert d == pytest.approx(math.log(n) / math.log(1 / L), abs=1e-10)


def test_moran_residual_tolerance():
    d = moran_dimension([0.5, 0.25, 0.1])
    assert abs(0.5**d + 0.25**d + 0.1**d - 1.0) < 1e-12


@pytest.mark.parametrize("bad", [[], [0.5], [0.5, 1.0], [0.5, 0.0], [0.2, -0.1]])
def test_moran_invalid_inputs(bad):
    with pytest.raises(InvalidInputError):
        moran_dimension(bad)


# ---------------------------------------------------------------------------
# similitudes


def test_similitude_scaling_property():
    rng = np.random.default_rng(1)
    th = 0.3
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    sim = Similitude(0.4, R, np.array([0.2, -0.1]))
    for _ in range(20):
        x, y = rng.normal(size=2), rng.normal(size=2)
        lhs = np.linalg.norm(sim.apply(x) - sim.apply(y))
        assert lhs == pytest.approx(0.4 * np.linalg.norm(x - y), rel=1e-12)


def test_similitude_rejects_bad_orthogonal():
    with pytest.raises(InvalidInputError):
        Similitude(0.5, np.array([[1.0, 0.1], [0.0, 1.0]]), np.zeros(2))


@pytest.mark.parametrize("scale", [0.0, 1.0, 1.5, -0.2])
def test_similitude_rejects_bad_scale(scale):
    with pytest.raises(InvalidInputError):
        Similitude(scale, EYE1, np.zeros(1))


def test_fixed_point():
    sim = cantor_maps()[1]
    fp = sim.fixed_point()
    assert sim.apply(fp) == pytest.approx(fp)
    assert fp[0] == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# separation certificates


def test_separation_cantor_window(cantor_ifs):
    gap = cantor_ifs.separation_gap
    assert 1 / 3 - 2 * (1 / 3) ** 4 - 1e-12 <= gap <= 1 / 3 + 1e-12


def test_separation_touching_halves_rejected():
    maps = [
        Similitude(0.5, EYE1, np.array([0.0])),
        Similitude(0.5, EYE1, np.array([0.5])),
    ]
    ifs = make_ifs(maps)
    with pytest.raises(SeparationViolationError):
        validate_strict_separation(ifs, probe_level=4)


def test_separation_planar_corners(planar_ifs):
    # exact inter-image distance is 0.6; certified bound subtracts two
    # probe-cell diameters (<= 2 * 0.2^4 * sqrt(2) with a diameter margin)
    gap = planar_ifs.separation_gap
    assert 0.59 <= gap <= 0.6 + 1e-9


def test_separation_requires_probe_depth(cantor_ifs):
    with pytest.raises(InvalidInputError):
        validate_strict_separation(cantor_ifs, probe_level=1)


# ---------------------------------------------------------------------------
# cell trees


def test_tree_level1_base_half(cantor_ifs):
    tree = build_cell_tree(cantor_ifs, 1, base_point=np.array([0.5]))
    assert tree.centers.ravel() == pytest.approx([1 / 6, 5 / 6])
    assert tree.natural_weights == pytest.approx([0.5, 0.5])


def test_tree_word_center_composition(cantor_ifs):
    # the word lists symbols coarse to fine, so (2, 1) is the cell
    # phi_2(phi_1(A)); its representative from base 1/2 is
    # phi_2(phi_1(1/2)) = 13/18
    tree = build_cell_tree(cantor_ifs, 2, base_point=np.array([0.5]))
    idx = tree.index_of(Word((2, 1)))
    assert tree.centers[idx, 0] == pytest.approx(13 / 18, abs=1e-15)
    assert tree.scales[idx] == pytest.approx(1 / 9)
    assert tree.natural_weights[idx] == pytest.approx(0.25)


def test_tree_level0(cantor_ifs):
    tree = build_cell_tree(cantor_ifs, 0)
    assert tree.n_cells == 1
    assert tree.natural_weights[0] == pytest.approx(1.0)
    assert tree.word_of(0) == Word(())


def test_tree_weight_sum_and_parent_partition(twoscale_ifs):
    tree = build_cell_tree(twoscale_ifs, 6)
    assert abs(tree.natural_weights.sum() - 1.0) < 1e-12
    lam = tree.natural_weights.reshape(2, -1)
    coarse = tree.level_scales[1] ** twoscale_ifs.dimension
    assert lam.sum(axis=1) == pytest.approx(coarse, abs=1e-13)


def test_tree_separation_invariant(cantor_ifs):
    # representatives lie inside pairwise disjoint cells, so two distinct
    # same-level representatives are at least the common-prefix scale times
    # the separation gap apart (positive); subtracting both cell diameters
    # still lower-bounds the distance, though that weaker form can go
    # negative for siblings
    tree = build_cell_tree(cantor_ifs, 4)
    gap = cantor_ifs.separation_gap
    c = tree.centers.ravel()
    for i in range(tree.n_cells):
        for j in range(i + 1, tree.n_cells):
            wi, wj = tree.word_of(i).indices, tree.word_of(j).indices
            m = 0
            while wi[m] == wj[m]:
                m += 1
            prefix_scale = (1 / 3) ** m
            sep = prefix_scale * gap
            assert abs(c[i] - c[j]) >= sep - 1e-15
            assert sep > 0
            assert abs(c[i] - c[j]) >= sep - tree.diams[i] - tree.diams[j]


def test_word_index_roundtrip(twoscale_ifs):
    tree = build_cell_tree(twoscale_ifs, 5)
    for k in [0, 1, 7, 13, 31]:
        assert tree.index_of(tree.word_of(k)) == k
    with pytest.raises(InvalidInputError):
        tree.index_of(Word((1, 2)))  # wrong level


def test_tree_budget(cantor_ifs):
    with pytest.raises(ResourceBudgetError):
        build_cell_tree(cantor_ifs, 10, max_cells=512)


def test_composition_associativity(twoscale_ifs):
    rng = np.random.default_rng(3)
    word = random_word(twoscale_ifs, 7, rng)
    x = twoscale_ifs.base_point
    # apply one map at a time, innermost (last symbol) first
    y = x.copy()
    for i in reversed(word.indices):
        y = twoscale_ifs.maps[i - 1].apply(y)
    assert point_at(twoscale_ifs, word) == pytest.approx(y, abs=1e-14)
    s, _, _ = composed_map(twoscale_ifs, word)
    assert s == pytest.approx(word.scale(twoscale_ifs), rel=1e-14)


# ---------------------------------------------------------------------------
# coding


def test_code_point_fixed_point(cantor_ifs):
    assert code_point(cantor_ifs, np.array([0.0]), 3) == Word((1, 1, 1))


def test_code_point_two_thirds(cantor_ifs):
    # 2/3 = phi_2(0): level-1 cell is the right one, then all-left
    assert code_point(cantor_ifs, np.array([2 / 3]), 2) == Word((2, 1))


def test_code_point_off_attractor(cantor_ifs):
    with pytest.raises(PointOffAttractorError):
        code_point(cantor_ifs, np.array([0.5]), 2)


def test_code_point_right_fixed_point(cantor_ifs):
    assert code_point(cantor_ifs, np.array([1.0]), 4) == Word((2, 2, 2, 2))


def test_code_point_planar_rotated():
    th = math.pi / 6
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    maps = [
        Similitude(0.3, R, np.array([0.0, 0.0])),
        Similitude(0.3, np.eye(2), np.array([1.0, 0.0])),
    ]
    ifs = make_ifs(maps)
    validate_strict_separation(ifs, probe_level=4)
    w = Word((2, 1, 2, 1))
    x = point_at(ifs, w)
    assert code_point(ifs, x, 4) == w


def test_code_point_consistent_with_cells(cantor_ifs):
    rng = np.random.default_rng(5)
    for _ in range(20):
        w = random_word(cantor_ifs, 6, rng)
        x = point_at(cantor_ifs, w)
        assert code_point(cantor_ifs, x, 6) == w


# ---------------------------------------------------------------------------
# covering cells


def test_copies_whole_set(cantor_ifs):
    gap = cantor_ifs.separation_gap
    L1 = cantor_ifs.maps[0].scale
    assert copies_cell(cantor_ifs, np.array([0.0]), L1 * gap) == Word(())
    assert copies_cell(cantor_ifs, np.array([0.0]), 0.9) == Word(())


def test_copies_hand_example(cantor_ifs):
    # with r = 0.9 * (1/3) * (1/3): M = 2 is the first depth where
    # scale(prefix) * gap < r, so the covering cell is the length-1 prefix
    r = 0.9 * (1 / 3) * (1 / 3)
    assert copies_cell(cantor_ifs, np.array([0.0]), r) == Word((1,))


def test_copies_containment_randomized(cantor_ifs):
    rng = np.random.default_rng(11)
    W = copies_diameter_bound(cantor_ifs)
    sample_depth = 10
    sample_words = [random_word(cantor_ifs, sample_depth, rng) for _ in range(200)]
    sample_pts = np.array([point_at(cantor_ifs, w) for w in sample_words])
    L1 = cantor_ifs.maps[0].scale
    gap = cantor_ifs.separation_gap
    for _ in range(100):
        w = random_word(cantor_ifs, 8, rng)
        x = point_at(cantor_ifs, w)
        r = float(np.exp(rng.uniform(np.log(1e-4), np.log(L1 * gap * 0.99))))
        word = copies_cell(cantor_ifs, x, r)
        prefix = word.indices
        diam_cell = word.scale(cantor_ifs) * cantor_ifs.attractor_diam
        assert diam_cell < W * r
        inside = np.abs(sample_pts[:, 0] - x[0]) <= r
        for k in np.nonzero(inside)[0]:
            assert sample_words[k].indices[: len(prefix)] == prefix


def test_copies_requires_validation():
    ifs = make_ifs(cantor_maps())  # not validated
    with pytest.raises(InvalidInputError):
        copies_cell(ifs, np.array([0.0]), 0.01)


# ---------------------------------------------------------------------------
# JSON interchange


def test_ifs_from_dict_defaults_identity():
    spec = {
        "ambient_dim": 2,
        "maps": [
            {"scale": 0.2, "translation": [0.0, 0.0]},
            {"scale": 0.2, "translation": [0.8, 0.8]},
        ],
    }
    ifs = ifs_from_dict(spec)
    assert ifs.ambient_dim == 2
    assert np.allclose(ifs.maps[0].orthogonal, np.eye(2))


def test_ifs_from_dict_malformed():
    with pytest.raises(InvalidInputError):
        ifs_from_dict({"maps": [{"scale": 0.5}]})
    with pytest.raises(InvalidInputError):
        ifs_from_dict({"ambient_dim": 1, "maps": [{"scale": 0.5}]})
