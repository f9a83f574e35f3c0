import numpy as np
import pytest

from metric_graphs.fixtures import load_fixture
from metric_graphs.metrics import Norm, PointCloud, ToleranceConfig, from_points


@pytest.fixture
def four_point():
    """x, y, z, t with xy=1 xz=3 xt=4 yz=2 yt=5 zt=3."""
    return load_fixture("four_point_matrix")


@pytest.fixture
def t_shape():
    return load_fixture("t_shape")


@pytest.fixture
def unit_square():
    return load_fixture("unit_square")


@pytest.fixture
def grid_3x3():
    return load_fixture("grid_3x3")


@pytest.fixture(params=[Norm.L1, Norm.L2, Norm.LINF], ids=lambda n: n.value)
def any_norm(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_space(rng):
    def make(m=12, dim=3, norm=Norm.L2, tolerance=None):
        cloud = PointCloud(points=rng.uniform(0.0, 1.0, size=(m, dim)), norm=norm)
        return from_points(cloud, tolerance or ToleranceConfig())

    return make
