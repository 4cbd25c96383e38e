from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from bsmu.almostproduct.core.specio import read_manifold
from bsmu.almostproduct.geometry.frame import validate


settings.register_profile('deterministic', derandomize=True, deadline=None)
settings.load_profile('deterministic')

FIXTURES_DIR = Path(__file__).parent / 'fixtures'

SPLIT_P = np.diag([1., 1., -1., -1.])


def split_manifold(entries, name: str = ''):
    """Dimension 4, identity metric, P = diag(1, 1, -1, -1) and the given (i, j, k, value) brackets."""
    return validate(4, entries, np.eye(4), SPLIT_P, name=name)


@pytest.fixture(scope='session')
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(scope='session')
def e0():
    return read_manifold(FIXTURES_DIR / 'e0.json')


@pytest.fixture(scope='session')
def w3x():
    return read_manifold(FIXTURES_DIR / 'w3x.json')


@pytest.fixture(scope='session')
def w3t():
    return read_manifold(FIXTURES_DIR / 'w3t.json')


@pytest.fixture(scope='session')
def mixed():
    """[e0, e2] = e1: brackets between the eigenspaces, outside W3."""
    return split_manifold([[0, 2, 1, 1.]], name='mixed')


@pytest.fixture(scope='session')
def make_split_manifold():
    return split_manifold
