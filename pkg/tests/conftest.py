import pytest

from factorsim.primes import PrimeEngine
from factorsim.qsieve import ZetaZerosTable


@pytest.fixture(scope="session")
def engine():
    return PrimeEngine()


@pytest.fixture(scope="session")
def zeros():
    return ZetaZerosTable.bundled()
