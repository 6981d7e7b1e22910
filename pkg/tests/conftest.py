import numpy as np
import pytest

from src.lie.instances import GlMatInstance, GlT12Instance, make_instance
from src.models.schemas import InstanceKind, Tolerances

EXACT_TOL = 1e-10
CLOSED_FORM_TOL = 1e-12


def unit(shape, *index):
    e = np.zeros(shape)
    e[index] = 1.0
    return e


def E(i, j, n=2):
    """Matrix unit with 1-based indices"""
    return unit((n, n), i - 1, j - 1)


@pytest.fixture
def tolerances():
    return Tolerances()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[kind.value for kind in InstanceKind])
def instance_kind(request):
    return InstanceKind(request.param)


@pytest.fixture(params=[2, 3])
def act(request, instance_kind):
    return make_instance(instance_kind, request.param)


@pytest.fixture
def glmat2():
    return GlMatInstance(2)


@pytest.fixture
def t12_sym2():
    return GlT12Instance(2, symmetric_only=True)
