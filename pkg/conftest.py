import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from ensemble import DisorderDistribution, HoppingKernel, OperatorEnsemble  # noqa: E402
from regularity import user_supplied_constants  # noqa: E402


@pytest.fixture
def uniform_1d():
    return OperatorEnsemble(HoppingKernel(dim=1), DisorderDistribution(), lam=1.0, master_seed=7)


@pytest.fixture
def uniform_2d():
    return OperatorEnsemble(HoppingKernel(dim=2), DisorderDistribution(), lam=1.0, master_seed=7)


@pytest.fixture
def constants_half():
    """Constantes del usuario para la uniforme en [−1,1] con s = 1/2."""
    return user_supplied_constants(1.0, 0.5, 1.0, 2.0, None)
