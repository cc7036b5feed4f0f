import pytest

from chensieve.primes import build_prime_table


@pytest.fixture(scope="session")
def table_1m():
    return build_prime_table(1_000_000)


@pytest.fixture(scope="session")
def table_small():
    return build_prime_table(10_000)
