import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from effrew.theories import builtin


@pytest.fixture(scope="session")
def gs():
    return builtin("global-state")


@pytest.fixture(scope="session")
def nondet():
    return builtin("nondet")


@pytest.fixture(scope="session")
def par():
    return builtin("par")


@pytest.fixture(scope="session")
def retry():
    return builtin("retry")


@pytest.fixture(scope="session")
def peano():
    return builtin("peano")
