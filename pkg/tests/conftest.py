import pytest

from helpers import example_automaton, example_mdp


@pytest.fixture
def ex_aut():
    return example_automaton()


@pytest.fixture
def ex_mdp():
    return example_mdp()
