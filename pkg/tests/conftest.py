import numpy as np
import pytest
from hypothesis import settings

from translab.geometry import make_test_interface
from translab.potential import single_layer_solve

settings.register_profile("translab", max_examples=50, deadline=None)
settings.load_profile("translab")


@pytest.fixture(scope="session")
def flat2():
    return make_test_interface("flat", 2)


@pytest.fixture(scope="session")
def sinusoid2():
    return make_test_interface("sinusoid", 2, amp=0.0099, freq=10.0)


@pytest.fixture(scope="session")
def u_flat2(flat2):
    return single_layer_solve(flat2, 1.0)


@pytest.fixture(scope="session")
def u_sinusoid2(sinusoid2):
    return single_layer_solve(sinusoid2, 1.0)


def random_ball_points(rng, count, dim, radius=1.0):
    d = rng.normal(size=(count, dim))
    d /= np.linalg.norm(d, axis=-1, keepdims=True)
    return d * radius * rng.uniform(0, 1, (count, 1)) ** (1.0 / dim)
