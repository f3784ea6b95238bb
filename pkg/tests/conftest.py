import pathlib

import numpy as np
import pytest

from flagcurv.lie import LieAlgebraSpec, MetricStructure
from flagcurv.space import bundled_names, bundled_space

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

SU2 = [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)]


def su2(h=()):
    return LieAlgebraSpec(3, SU2, h_indices=h)


def u2():
    return LieAlgebraSpec(4, SU2, ("e1", "e2", "e3", "z"))


def structure(n, psi=None):
    return MetricStructure(np.eye(n), psi)


def random_spd(rng, n, spread=0.4):
    A = rng.normal(size=(n, n))
    return np.eye(n) + spread * (A @ A.T) / n


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=bundled_names())
def bundled(request):
    return bundled_space(request.param)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
