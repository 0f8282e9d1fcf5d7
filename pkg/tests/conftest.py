from pathlib import Path

import pytest

from revseq import builtin_designs, builtin_library

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def registry():
    return builtin_library()


@pytest.fixture(scope="session")
def designs(registry):
    return builtin_designs(registry)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
