import numpy as np
import pytest

from cmrf.cnf import ConstraintSet
from cmrf.model import ModelParams

import corpus


@pytest.fixture
def toy_cs() -> ConstraintSet:
    return corpus.toy_formula()


@pytest.fixture
def toy_uniform(toy_cs) -> ModelParams:
    return ModelParams(np.zeros(toy_cs.n_vars))
