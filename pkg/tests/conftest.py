import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import FIXTURES  # noqa: E402


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
