import numpy as np
import pytest

from supershift_lab.greens import Electric, Free, Harmonic, PoschlTeller, make_kernel


@pytest.fixture(scope="session")
def free_kernel():
    return make_kernel(Free())


@pytest.fixture(scope="session")
def electric_kernel():
    return make_kernel(Electric(lambda t: 1.0, "const:1"), t_max=2.0)


@pytest.fixture(scope="session")
def harmonic_kernel():
    # omega = 1: horizon pi/4 (first beta zero), formula valid to pi/2
    return make_kernel(Harmonic(lambda t: 1.0, "omega=1"), t_max=1.7)


@pytest.fixture(scope="session")
def pt1_kernel():
    return make_kernel(PoschlTeller(1))


@pytest.fixture(scope="session")
def pt2_kernel():
    return make_kernel(PoschlTeller(2))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
