import pytest

from gclab.procgen import ProcessSpec, TransitionModel

# P = [[0.7, 0.3], [0.2, 0.8]]: pi = (0.4, 0.6), second eigenvalue 0.5.
TWO_STATE_MATRIX = ((0.7, 0.3), (0.2, 0.8))


@pytest.fixture
def two_state() -> TransitionModel:
    return TransitionModel.from_matrix((0.0, 1.0), TWO_STATE_MATRIX)


@pytest.fixture
def independent_chain() -> TransitionModel:
    return TransitionModel.from_matrix((0.0, 1.0), ((0.5, 0.5), (0.5, 0.5)))


@pytest.fixture
def two_state_spec() -> ProcessSpec:
    return ProcessSpec.markov((0.0, 1.0), TWO_STATE_MATRIX, label="two-state")


@pytest.fixture
def uniform_spec() -> ProcessSpec:
    return ProcessSpec.iid("uniform", label="iid-uniform")
