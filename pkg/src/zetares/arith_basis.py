"""Prime sieving in arithmetic progressions, prime bands, Dirichlet characters.

Band edges use natural logarithms throughout, with strict-lower / closed-upper
interval conventions.  Characters are built from an explicit decomposition of
(Z/q)^* into cyclic factors and store their values as exact root-of-unity
indices, so orthogonality can be tested in the index domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from .errors import ValidationError
from .params import Params, euler_phi, factorize


def sieve_primes(limit: int) -> np.ndarray:
    """All primes <= limit via Eratosthenes."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def sieve_primes_in_class(limit: int, q: int, residue: int) -> list[int]:
    """Primes p <= limit with p = residue (mod q), sorted ascending.

    q = 1 counts all primes (residue ignored).
    """
    if q < 1:
        raise ValidationError(f"modulus must be positive, got {q}")
    if q == 1:
        return sieve_primes(limit).tolist()
    if math.gcd(residue, q) != 1:
        raise ValidationError(f"residue {residue} is not coprime to modulus {q}")
    primes = sieve_primes(limit)
    return primes[primes % q == residue % q].tolist()


@dataclass(frozen=True)
class PrimeBands:
    """Primes p = 1 (mod q) split into bands of exponentially growing edges.

    Band k covers (phi(q) e^k log N loglog N, phi(q) e^(k+1) log N loglog N],
    intersected with the overall upper cutoff of the admissible prime range.
    """

    q: int
    bands: tuple[tuple[int, ...], ...]
    all_primes: tuple[int, ...]
    edges: tuple[tuple[float, float], ...]
    lower_cutoff: float
    upper_cutoff: float

    @property
    def band_count(self) -> int:
        return len(self.bands)

    def band_of(self, p: int) -> int:
        """1-based band index of a member prime."""
        for k, band in enumerate(self.bands, start=1):
            if p in band:
                return k
        raise ValidationError(f"{p} is not a band prime")

    def index_to_band(self) -> np.ndarray:
        """Band index (1-based) for each position of all_primes."""
        out = np.empty(len(self.all_primes), dtype=np.int64)
        pos = 0
        for k, band in enumerate(self.bands, start=1):
            out[pos : pos + len(band)] = k
            pos += len(band)
        return out


def build_prime_bands(params: Params) -> PrimeBands:
    """Construct the banded prime set for the given parameter vector."""
    if params.log2_n**params.gamma < 1.0:
        raise ValidationError(
            f"N = {params.N} is too small to form any band "
            f"((loglog N)^gamma = {params.log2_n ** params.gamma:.4f} < 1)"
        )
    phi = params.phi_q
    scale = phi * params.log_n * params.log2_n
    k_max = params.band_count
    lower_cutoff = math.e * scale
    upper_cutoff = scale * math.exp(params.log2_n**params.gamma)

    limit = int(math.ceil(upper_cutoff)) + 1
    residue_primes = np.array(sieve_primes_in_class(limit, params.q, 1), dtype=np.int64)

    bands: list[tuple[int, ...]] = []
    edges: list[tuple[float, float]] = []
    for k in range(1, k_max + 1):
        lo = scale * math.exp(k)
        hi = min(scale * math.exp(k + 1), upper_cutoff)
        members = residue_primes[(residue_primes > lo) & (residue_primes <= hi)]
        bands.append(tuple(int(p) for p in members))
        edges.append((lo, hi))

    all_primes = tuple(p for band in bands for p in band)
    return PrimeBands(
        q=params.q,
        bands=tuple(bands),
        all_primes=all_primes,
        edges=tuple(edges),
        lower_cutoff=lower_cutoff,
        upper_cutoff=upper_cutoff,
    )


@dataclass(frozen=True)
class PrimeCountDiagnostic:
    count: int
    li_prediction: float


def prime_count_diagnostic(x: float, q: int, residue: int = 1) -> PrimeCountDiagnostic:
    """pi(x; q, residue) next to its logarithmic-integral prediction Li(x)/phi(q)."""
    if x < 100:
        raise ValidationError(f"x must be at least 100, got {x}")
    count = len(sieve_primes_in_class(int(math.floor(x)), q, residue))
    li = float(mp.li(x, offset=True))
    phi = 1 if q == 1 else euler_phi(q)
    return PrimeCountDiagnostic(count=count, li_prediction=li / phi)


# ---------------------------------------------------------------------------
# Dirichlet characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Character:
    """A Dirichlet character mod q with exact root-of-unity values.

    value_indices[a] holds e with chi(a) = exp(2 pi i e / order_lcm) for a
    coprime to q, and -1 otherwise.  The primitive inducer is stored as its
    own value table mod `conductor` in the same index domain.
    """

    q: int
    index: int
    value_indices: tuple[int, ...]
    order_lcm: int
    is_principal: bool
    conductor: int
    inducer_indices: tuple[int, ...]

    def value_index(self, n: int) -> int:
        return self.value_indices[n % self.q]

    def __call__(self, n: int) -> complex:
        e = self.value_indices[n % self.q]
        if e < 0:
            return 0.0 + 0.0j
        return _unit_root(e, self.order_lcm)

    def inducer_value(self, n: int) -> complex:
        e = self.inducer_indices[n % self.conductor]
        if e < 0:
            return 0.0 + 0.0j
        return _unit_root(e, self.order_lcm)

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.q

    def values_complex(self) -> np.ndarray:
        """chi(0..q-1) as a complex array."""
        return _indices_to_complex(self.value_indices, self.order_lcm)

    def inducer_values_complex(self) -> np.ndarray:
        """Primitive inducer values chi'(0..conductor-1) as a complex array."""
        return _indices_to_complex(self.inducer_indices, self.order_lcm)


def _unit_root(e: int, order: int) -> complex:
    angle = 2.0 * math.pi * (e % order) / order
    return complex(math.cos(angle), math.sin(angle))


def _indices_to_complex(indices: tuple[int, ...], order: int) -> np.ndarray:
    idx = np.array(indices, dtype=np.int64)
    angles = 2.0 * np.pi * np.mod(idx, order) / order
    values = np.exp(1j * angles)
    values[idx < 0] = 0.0
    return values


@dataclass(frozen=True)
class CharacterTable:
    q: int
    characters: tuple[Character, ...]

    @property
    def phi_q(self) -> int:
        return len(self.characters)

    def principal(self) -> Character:
        return next(chi for chi in self.characters if chi.is_principal)

    def non_principal(self) -> tuple[Character, ...]:
        return tuple(chi for chi in self.characters if not chi.is_principal)


def _primitive_root_mod_prime_power(p: int, e: int) -> int:
    """Primitive root of (Z/p^e)^* for odd prime p."""
    phi_p = p - 1
    factors = [f for f, _ in factorize(phi_p)]
    g = None
    for cand in range(2, p):
        if all(pow(cand, phi_p // f, p) != 1 for f in factors):
            g = cand
            break
    assert g is not None
    if e == 1:
        return g
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


def _cyclic_generators(q: int) -> list[tuple[int, int]]:
    """(generator, order) pairs giving (Z/q)^* as an internal direct product."""
    gens: list[tuple[int, int]] = []
    for p, e in factorize(q):
        pe = p**e
        rest = q // pe
        if p == 2:
            if e == 1:
                continue
            if e == 2:
                gens.append((_crt_lift(3, pe, rest, q), 2))
            else:
                gens.append((_crt_lift(pe - 1, pe, rest, q), 2))
                gens.append((_crt_lift(5, pe, rest, q), 2 ** (e - 2)))
        else:
            g = _primitive_root_mod_prime_power(p, e)
            gens.append((_crt_lift(g, pe, rest, q), euler_phi(pe)))
    return gens


def _crt_lift(local: int, pe: int, rest: int, q: int) -> int:
    """x mod q with x = local (mod pe) and x = 1 (mod rest)."""
    if rest == 1:
        return local % q
    inv = pow(pe, -1, rest)
    return (local + pe * ((1 - local) * inv % rest)) % q


def _discrete_log_tables(q: int, gens: list[tuple[int, int]]) -> dict[int, tuple[int, ...]]:
    """Exponent vector of every unit mod q with respect to the generators."""
    units = [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
    if not gens:
        return {a % q: () for a in units}
    table: dict[int, tuple[int, ...]] = {1 % q: tuple(0 for _ in gens)}
    # BFS over the product of cyclic factors; sizes multiply to phi(q).
    frontier = [1 % q]
    for i, (g, d) in enumerate(gens):
        new_table: dict[int, tuple[int, ...]] = {}
        for a, vec in table.items():
            x = a
            for j in range(d):
                v = list(vec)
                v[i] = j
                new_table[x] = tuple(v)
                x = (x * g) % q
        table = new_table
    assert len(table) == len(units)
    return table


@lru_cache(maxsize=64)
def build_character_table(q: int) -> CharacterTable:
    """All phi(q) Dirichlet characters mod q with conductors and inducers."""
    if q < 3:
        raise ValidationError(f"character table requires q >= 3, got {q}")
    gens = _cyclic_generators(q)
    orders = [d for _, d in gens]
    L = 1
    for d in orders:
        L = L * d // math.gcd(L, d)
    if not gens:
        L = 1
    dlogs = _discrete_log_tables(q, gens)

    divisors = sorted(d for d in range(1, q + 1) if q % d == 0)
    units = sorted(dlogs.keys())

    characters: list[Character] = []
    # Exponent vectors in mixed radix over the cyclic orders, principal first.
    exponent_vectors: list[tuple[int, ...]] = [()]
    for d in orders:
        exponent_vectors = [vec + (c,) for vec in exponent_vectors for c in range(d)]
    exponent_vectors.sort()

    for idx, cvec in enumerate(exponent_vectors):
        value_indices = [-1] * q
        for a in units:
            xvec = dlogs[a]
            e = 0
            for c, x, d in zip(cvec, xvec, orders):
                e = (e + c * x * (L // d)) % L
            value_indices[a % q] = e
        is_principal = all(c == 0 for c in cvec)

        conductor = q
        for d in divisors:
            if all(value_indices[u % q] == 0 for u in units if u % d == 1 % d):
                conductor = d
                break

        inducer = [-1] * conductor
        for a in range(conductor):
            if math.gcd(a, conductor) != 1:
                continue
            b = a
            while math.gcd(b, q) != 1:
                b += conductor
            inducer[a] = value_indices[b % q]

        characters.append(
            Character(
                q=q,
                index=idx,
                value_indices=tuple(value_indices),
                order_lcm=L,
                is_principal=is_principal,
                conductor=conductor,
                inducer_indices=tuple(inducer),
            )
        )

    principal_count = sum(1 for chi in characters if chi.is_principal)
    if len(characters) != euler_phi(q) or principal_count != 1:
        raise ValidationError(f"character construction failed for q = {q}")
    return CharacterTable(q=q, characters=tuple(characters))
