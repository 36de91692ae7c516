from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def manifest_path():
    path = FIXTURES / "manifest.tsv"
    assert path.exists()
    return path
