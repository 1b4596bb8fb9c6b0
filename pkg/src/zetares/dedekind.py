"""Dirichlet-series coefficients of the cyclotomic Dedekind zeta function.

For K the q-th cyclotomic field, zeta_K factors as zeta times the product of
the L-functions of the primitive characters inducing the non-principal
characters mod q.  Coefficients are built both by Dirichlet convolution of
those factor streams and, independently, from local Euler factors; the two
constructions must agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import mpmath as mp
import numpy as np

from .arith_basis import Character, CharacterTable, build_character_table
from .errors import ValidationError
from .params import euler_phi, factorize

# Residue bound constant (5 - 2 log 6) / 2 from Ramare's bound on the residue.
KAPPA = 0.5 * (5.0 - 2.0 * math.log(6.0))

_IMAG_TOLERANCE = 1e-9
_ROUNDING_FAILURE = 1e-6


@dataclass(frozen=True)
class DedekindCoefficients:
    q: int
    n_max: int
    a: np.ndarray  # int64, index 0 unused, a[1..n_max]

    def __post_init__(self) -> None:
        if self.a[1] != 1:
            raise ValidationError("a(1) must be 1")

    def __getitem__(self, n: int) -> int:
        return int(self.a[n])


def coefficients_by_convolution(
    q: int, n_max: int, table: CharacterTable | None = None
) -> DedekindCoefficients:
    """a(n) as the Dirichlet convolution of the zeta and L-factor streams."""
    if n_max < 1:
        raise ValidationError(f"n_max must be positive, got {n_max}")
    if table is None:
        table = build_character_table(q)
    acc = np.zeros(n_max + 1, dtype=np.complex128)
    acc[1:] = 1.0  # zeta stream
    for chi in table.non_principal():
        vals = chi.inducer_values_complex()
        cond = chi.conductor
        nxt = np.zeros_like(acc)
        for m in range(1, n_max + 1):
            v = vals[m % cond]
            if v == 0:
                continue
            top = n_max // m
            nxt[m :: m] += v * acc[1 : top + 1]
        acc = nxt
    worst_imag = float(np.max(np.abs(acc[1:].imag)))
    rounded = np.round(acc[1:].real)
    worst_resid = max(worst_imag, float(np.max(np.abs(acc[1:].real - rounded))))
    if worst_resid > _ROUNDING_FAILURE:
        raise ValidationError(
            f"convolution residue {worst_resid:.3e} exceeds {_ROUNDING_FAILURE:.0e}; "
            "character table is inconsistent"
        )
    a = np.zeros(n_max + 1, dtype=np.int64)
    a[1:] = rounded.astype(np.int64)
    if np.any(a[1:] < 0):
        raise ValidationError("negative Dedekind coefficient from convolution")
    return DedekindCoefficients(q=q, n_max=n_max, a=a)


def _local_coefficients(q: int, p: int, j_max: int, table: CharacterTable) -> list[int]:
    """a(p^j) for j = 0..j_max from the local Euler factor at p."""
    if q % p != 0:
        f = 1
        x = p % q
        while x != 1:
            x = (x * p) % q
            f += 1
        g = euler_phi(q) // f
        out = []
        for j in range(j_max + 1):
            out.append(math.comb(j // f + g - 1, g - 1) if j % f == 0 else 0)
        return out
    # Ramified prime: multiply the local series of zeta and of every L(s, chi').
    series = np.zeros(j_max + 1, dtype=np.complex128)
    series[:] = 1.0  # local zeta factor: all-ones geometric series
    for chi in table.non_principal():
        v = chi.inducer_value(p)
        factor = np.array([v**j for j in range(j_max + 1)], dtype=np.complex128)
        series = np.convolve(series, factor)[: j_max + 1]
    out = []
    for j in range(j_max + 1):
        val = series[j]
        if abs(val.imag) > _IMAG_TOLERANCE or abs(val.real - round(val.real)) > _IMAG_TOLERANCE:
            raise ValidationError(f"non-integral local coefficient at p = {p}")
        out.append(int(round(val.real)))
    return out


def coefficients_by_euler(
    q: int, n_max: int, table: CharacterTable | None = None
) -> DedekindCoefficients:
    """a(n) assembled multiplicatively from local Euler factors."""
    if n_max < 1:
        raise ValidationError(f"n_max must be positive, got {n_max}")
    if table is None:
        table = build_character_table(q)
    # Smallest prime factor sieve.
    spf = np.zeros(n_max + 1, dtype=np.int64)
    for p in range(2, n_max + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    a = np.zeros(n_max + 1, dtype=np.int64)
    a[1] = 1
    local_cache: dict[int, list[int]] = {}
    for n in range(2, n_max + 1):
        p = int(spf[n])
        m, j = n, 0
        while m % p == 0:
            m //= p
            j += 1
        if p not in local_cache:
            j_cap = int(math.log(n_max) / math.log(p)) + 1
            local_cache[p] = _local_coefficients(q, p, j_cap, table)
        a[n] = local_cache[p][j] * a[m]
    return DedekindCoefficients(q=q, n_max=n_max, a=a)


def coefficient_squarefree(q: int, primes: Iterable[int]) -> int:
    """a(n) for n a square-free product of distinct primes not dividing q.

    Covers arguments far beyond any tabulated range; used by exhaustive
    divisor-sum checks over factored supports.
    """
    phi = euler_phi(q)
    result = 1
    seen: set[int] = set()
    for p in primes:
        if p in seen:
            raise ValidationError("square-free product requires distinct primes")
        seen.add(p)
        if q % p == 0:
            raise ValidationError(f"prime {p} divides the modulus {q}")
        result *= phi if p % q == 1 else 0
    return result


@lru_cache(maxsize=32)
def residue_at_one(q: int) -> float:
    """Product of L(1, chi') over the non-principal characters mod q.

    Evaluated through the digamma formula for primitive characters at s = 1,
    with mpmath working precision well beyond the 1e-8 relative contract.
    """
    table = build_character_table(q)
    with mp.workdps(40):
        prod = mp.mpc(1)
        for chi in table.non_principal():
            prod *= _l_at_one(chi)
        if abs(mp.im(prod)) > 1e-9 * (1 + abs(mp.re(prod))):
            raise ValidationError(f"residue product has stray imaginary part for q = {q}")
        value = float(mp.re(prod))
    if value <= 0:
        raise ValidationError(f"residue product must be positive, got {value}")
    return value


def _l_at_one(chi: Character):
    """L(1, chi') = -(1/cond) sum_a chi'(a) psi(a/cond) for non-principal chi."""
    cond = chi.conductor
    total = mp.mpc(0)
    for a in range(1, cond):
        e = chi.inducer_indices[a]
        if e < 0:
            continue
        w = mp.expjpi(mp.mpf(2 * e) / chi.order_lcm)
        total += w * mp.digamma(mp.mpf(a) / cond)
    return -total / cond


def cyclotomic_discriminant(q: int) -> int:
    """|d_K| = q^phi(q) / prod_{p | q} p^(phi(q)/(p-1)) for K the q-th cyclotomic field."""
    phi = euler_phi(q)
    num = q**phi
    for p, _ in factorize(q):
        exponent, remainder = divmod(phi, p - 1)
        assert remainder == 0
        num //= p**exponent
    return num


def residue_upper_bound(q: int) -> float:
    """Ramare-style bound (log|d_K| / (2(phi-1)) + kappa)^(phi-1) on the residue."""
    if q < 3:
        raise ValidationError(f"q must be at least 3, got {q}")
    phi = euler_phi(q)
    log_disc = math.log(cyclotomic_discriminant(q))
    return (log_disc / (2.0 * (phi - 1)) + KAPPA) ** (phi - 1)
