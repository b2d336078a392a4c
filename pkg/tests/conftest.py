import shutil
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def bench3() -> Path:
    return FIXTURES / "bench3"


@pytest.fixture()
def bench3_copy(bench3, tmp_path) -> Path:
    """Mutable copy of the bundled benchmark for corruption tests."""
    dest = tmp_path / "bench3"
    shutil.copytree(bench3, dest)
    return dest
