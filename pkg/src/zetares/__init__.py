"""Numerical laboratory for resonance-method lower bounds on cyclotomic
Dedekind zeta functions along the critical line."""

from .params import Params, euler_phi
from .arith_basis import (
    CharacterTable,
    PrimeBands,
    build_character_table,
    build_prime_bands,
    prime_count_diagnostic,
    sieve_primes_in_class,
)
from .errors import EvaluationError, ValidationError

__all__ = [
    "Params",
    "euler_phi",
    "CharacterTable",
    "PrimeBands",
    "build_character_table",
    "build_prime_bands",
    "prime_count_diagnostic",
    "sieve_primes_in_class",
    "EvaluationError",
    "ValidationError",
]

__version__ = "0.1.0"
