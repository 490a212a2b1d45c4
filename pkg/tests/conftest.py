"""Shared fixtures: the worked-example corpus and common solver options."""

from __future__ import annotations

import pytest

from sdgames.generators import example_corpus
from sdgames.solver import SolverOptions


def _corpus_dict():
    return {pair.name: (pair, meta) for pair, meta in example_corpus()}


@pytest.fixture(scope="session")
def corpus():
    return _corpus_dict()


@pytest.fixture(scope="session")
def bounded_pair(corpus):
    return corpus["bounded"][0]


@pytest.fixture(scope="session")
def unbounded_pair(corpus):
    return corpus["unbounded"][0]


@pytest.fixture(scope="session")
def both_infeasible_pair(corpus):
    return corpus["both_infeasible"][0]


@pytest.fixture(scope="session")
def unattained_pair(corpus):
    return corpus["aux_unattained"][0]


@pytest.fixture(scope="session")
def duality_gap_pair(corpus):
    return corpus["duality_gap"][0]


@pytest.fixture(scope="session")
def game_opts():
    return SolverOptions(tol=1e-10, max_iters=300)
