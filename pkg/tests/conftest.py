import numpy as np
import pytest

import amencert as am

N = 4096
GOLDEN_THETAS = (0.6180339887498949, 0.41421356237309515)


@pytest.fixture(scope="session")
def f2():
    return am.GroupSpec.free(2)


@pytest.fixture(scope="session")
def z1():
    return am.GroupSpec.free_abelian(1)


@pytest.fixture(scope="session")
def z2():
    return am.GroupSpec.free_abelian(2)


@pytest.fixture(scope="session")
def nu4096():
    return am.lebesgue(N)


@pytest.fixture(scope="session")
def sine_f2(f2):
    """The main certified fixture: perturbed rotations with a = 0.1."""
    return am.sine_action(f2, GOLDEN_THETAS, 0.1, N)


@pytest.fixture(scope="session")
def rot_f2(f2):
    return am.rotation_action(f2, GOLDEN_THETAS, N)


@pytest.fixture(scope="session")
def rot_z2(z2):
    return am.rotation_action(z2, (0.35, 0.15), N)


@pytest.fixture(scope="session")
def conj_z1(z1):
    return am.conjugated_rotation_action(z1, (0.3819660112501051,), 0.3, N)


@pytest.fixture(scope="session")
def z1_family(z1):
    return am.lattice_interval_family(z1, 8, N)


@pytest.fixture(scope="session")
def f2_ball_family(f2):
    return am.ball_witness_family(f2, [0, 1, 2, 2, 2, 2, 2, 2], N)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)
