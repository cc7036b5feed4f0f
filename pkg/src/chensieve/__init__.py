"""chensieve: exact prime engine, rigorous linear-sieve function evaluation,
and explicit bound assembly for prime + almost-prime representation counts."""

from .ball import Ball
from .primes import PrimeTable, build_prime_table

__version__ = "0.1.0"

__all__ = ["Ball", "PrimeTable", "build_prime_table", "__version__"]
