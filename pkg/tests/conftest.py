import numpy as np
import pytest

from banach_adjoint import BanachNorm, Operator, identity_rigging, make_rigging
from banach_adjoint._random import make_rng


@pytest.fixture
def ex_rig():
    """l^1 with W2 = diag(1, 1/4) and W1 = diag(2, 2)."""
    return make_rigging(2, BanachNorm.lp(1), [1.0, 0.25], [0.5, 0.125])


@pytest.fixture
def nilpotent(ex_rig):
    return Operator(ex_rig, [[0.0, 1.0], [0.0, 0.0]])


@pytest.fixture
def id2():
    return identity_rigging(2)


@pytest.fixture
def rng():
    return make_rng(20240611)
