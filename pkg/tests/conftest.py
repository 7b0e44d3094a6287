import pytest

from retype.specmodel import builtin_catalog


@pytest.fixture(scope="session")
def catalog():
    return builtin_catalog()
