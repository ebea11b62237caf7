import numpy as np
import pytest

from rieszeq import (
    Similitude,
    build_cell_tree,
    interval_tree,
    make_ifs,
    natural_measure,
    validate_strict_separation,
)

EYE1 = np.eye(1)


def cantor_maps():
    return [
        Similitude(1 / 3, EYE1, np.array([0.0])),
        Similitude(1 / 3, EYE1, np.array([2 / 3])),
    ]


def twoscale_maps():
    return [
        Similitude(1 / 4, EYE1, np.array([0.0])),
        Similitude(1 / 2, EYE1, np.array([0.5])),
    ]


def square_corner_maps(scale=0.2):
    eye = np.eye(2)
    shifts = [(0.0, 0.0), (0.8, 0.0), (0.0, 0.8), (0.8, 0.8)]
    return [Similitude(scale, eye, np.array(t)) for t in shifts]


@pytest.fixture(scope="session")
def cantor_ifs():
    ifs = make_ifs(cantor_maps())
    validate_strict_separation(ifs, probe_level=4)
    return ifs


@pytest.fixture(scope="session")
def cantor_tree8(cantor_ifs):
    return build_cell_tree(cantor_ifs, 8)


@pytest.fixture(scope="session")
def cantor_lam8(cantor_tree8):
    return natural_measure(cantor_tree8)


@pytest.fixture(scope="session")
def twoscale_ifs():
    ifs = make_ifs(twoscale_maps())
    validate_strict_separation(ifs, probe_level=4)
    return ifs


@pytest.fixture(scope="session")
def planar_ifs():
    ifs = make_ifs(square_corner_maps())
    validate_strict_separation(ifs, probe_level=4)
    return ifs


@pytest.fixture(scope="session")
def interval9():
    return interval_tree(9)
