import numpy as np
import pytest

from curvlab.curvature import kahler_from_sym2, wedge_rank_one


@pytest.fixture
def diagonal_tensor():
    """n=2 tensor with R[0,0,0,0]=1, R[1,1,1,1]=2 and zeros elsewhere."""
    return kahler_from_sym2(2, np.diag([1.0, 0.0, 2.0]))


@pytest.fixture
def wedge_tensor():
    """The standard n=2 antisymmetric-square fixture (w01 = 1)."""
    return wedge_rank_one(2, np.array([[0.0, 1.0], [-1.0, 0.0]]))


def unit_vector(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)
