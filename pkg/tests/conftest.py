import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from symbreak.fixtures import FixtureSet


@pytest.fixture(scope="session")
def fx():
    return FixtureSet()
