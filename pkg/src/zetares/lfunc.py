"""Critical-line evaluation of zeta(s), L(s, chi), and the Dedekind product.

The backbone is Euler-Maclaurin summation for the Hurwitz zeta function,
which covers every Dirichlet L-function uniformly in the shift alpha and has
a computable error term.  Cost grows linearly in |t|, which is the module's
scaling limit; pointwise evaluations switch the oscillatory phases to 80-bit
arithmetic once |t| exceeds 1e4, where double-precision phase noise would
break the default accuracy target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath as mp
import numpy as np

from .arith_basis import Character, CharacterTable, build_character_table
from .dedekind import DedekindCoefficients
from .errors import EvaluationError, ValidationError
from .params import factorize

_DEFAULT_TARGET = 1e-9
_EM_ORDER = 10
_EXTENDED_T = 1e4
_LONGDOUBLE_OK = np.finfo(np.longdouble).eps < 1e-18


@dataclass(frozen=True)
class EvalRequest:
    """Accuracy request for a point s = sigma + i t on or near the critical strip."""

    sigma: float = 0.5
    t: float = 0.0
    target_abs_error: float = _DEFAULT_TARGET

    def __post_init__(self) -> None:
        if not 0.5 <= self.sigma <= 2.0:
            raise ValidationError(f"sigma must lie in [1/2, 2], got {self.sigma}")
        if self.target_abs_error < 1e-13:
            raise ValidationError("target_abs_error below the 1e-13 floor")

    @classmethod
    def at(cls, s: complex, target_abs_error: float = _DEFAULT_TARGET) -> "EvalRequest":
        return cls(sigma=s.real, t=s.imag, target_abs_error=target_abs_error)

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.t)


def _target_of(request: EvalRequest | None) -> float:
    return request.target_abs_error if request is not None else _DEFAULT_TARGET


@lru_cache(maxsize=128)
def _bernoulli_over_factorial(two_j: int) -> float:
    return float(mp.bernoulli(two_j) / mp.factorial(two_j))


def _em_tail(s: complex, base: float, order: int) -> tuple[complex, float]:
    """Euler-Maclaurin tail beyond the direct sum: integral term, half term,
    Bernoulli corrections up to B_{2*order}, plus a rigorous remainder bound."""
    sigma = s.real
    integral = base ** (1.0 - s) / (s - 1.0)
    half = 0.5 * base ** (-s)
    tail = integral + half
    rising = s  # s (s+1) ... accumulated rising factorial
    power = base ** (-s - 1.0)
    inv_base_sq = base**-2.0
    for j in range(1, order + 1):
        coeff = _bernoulli_over_factorial(2 * j)
        tail += coeff * rising * power
        if j < order:
            rising = rising * (s + 2 * j - 1) * (s + 2 * j)
            power = power * inv_base_sq
    rising_next = rising * (s + 2 * order - 1) * (s + 2 * order)
    power_next = power * inv_base_sq
    remainder = (
        abs(_bernoulli_over_factorial(2 * order + 2))
        * abs(rising_next)
        * abs(power_next)
        * (abs(s + 2 * order + 1) / (sigma + 2 * order + 1))
    )
    return tail, remainder


def _direct_sum(s: complex, alpha: float, m_terms: int) -> tuple[complex, float]:
    """Sum_{k<M} (k+alpha)^(-s) with a bound on accumulated rounding noise."""
    t = s.imag
    extended = _LONGDOUBLE_OK and abs(t) > _EXTENDED_T
    if extended:
        logs = np.log(np.arange(m_terms, dtype=np.longdouble) + np.longdouble(alpha))
        phases = np.mod(np.longdouble(t) * logs, np.longdouble(2 * math.pi))
        mags = np.exp(np.longdouble(-s.real) * logs)
        terms = mags.astype(np.float64) * np.exp(-1j * phases.astype(np.float64))
        eps_work = float(np.finfo(np.longdouble).eps)
        sum_abs = float(np.sum(mags, dtype=np.longdouble))
    else:
        logs = np.log(np.arange(m_terms, dtype=np.float64) + alpha)
        mags = np.exp(-s.real * logs)
        terms = mags * np.exp(-1j * (t * logs))
        eps_work = float(np.finfo(np.float64).eps)
        sum_abs = float(np.sum(mags))
    value = complex(np.sum(terms))
    log_span = math.log(m_terms + 2.0)
    noise = sum_abs * eps_work * (8.0 * math.log2(m_terms + 2.0) + 2.0 * (1.0 + abs(t)) * log_span)
    # float64 phase noise applies even on the extended path's final combine
    noise += sum_abs * np.finfo(np.float64).eps * 8.0
    return value, noise


def hurwitz_zeta_with_error(
    s: complex,
    alpha: float = 1.0,
    request: EvalRequest | None = None,
    m_terms: int | None = None,
    em_order: int = _EM_ORDER,
) -> tuple[complex, float]:
    """Hurwitz zeta with a reported error estimate (analytic remainder + noise)."""
    s = complex(s)
    if s == 1:
        raise EvaluationError("hurwitz zeta pole at s = 1")
    if not 0.0 < alpha <= 1.0:
        raise ValidationError(f"alpha must lie in (0, 1], got {alpha}")
    target = _target_of(request)
    if m_terms is None:
        m_terms = max(50, int(math.ceil(2.0 * abs(s.imag))))
    attempts = 0
    while True:
        direct, noise = _direct_sum(s, alpha, m_terms)
        tail, remainder = _em_tail(s, m_terms + alpha, em_order)
        estimate = remainder + noise
        if estimate <= target or attempts >= 3:
            break
        m_terms *= 2
        attempts += 1
    if estimate > target:
        raise EvaluationError(
            f"hurwitz zeta error estimate {estimate:.3e} exceeds target {target:.3e} "
            f"at s = {s}, alpha = {alpha}"
        )
    return direct + tail, estimate


def hurwitz_zeta(s: complex, alpha: float = 1.0, request: EvalRequest | None = None) -> complex:
    value, _ = hurwitz_zeta_with_error(s, alpha, request)
    return value


def hurwitz_zeta_many(
    s_values: np.ndarray, alpha: float, target: float = 1e-8
) -> np.ndarray:
    """Vectorized Hurwitz zeta over an array of s values sharing one term count.

    Intended for grids with |t| <= 1e4; falls back to pointwise evaluation with
    extended phases beyond that.
    """
    s_values = np.asarray(s_values, dtype=np.complex128)
    t_max = float(np.max(np.abs(s_values.imag))) if s_values.size else 0.0
    if t_max > _EXTENDED_T:
        return np.array(
            [hurwitz_zeta(complex(s), alpha, EvalRequest.at(complex(s), target)) for s in s_values]
        )
    m_terms = max(50, int(math.ceil(2.0 * t_max)))
    logs = np.log(np.arange(m_terms, dtype=np.float64) + alpha)
    out = np.empty(s_values.shape, dtype=np.complex128)
    chunk = max(1, int(4_000_000 // max(1, m_terms)))
    flat = s_values.ravel()
    res = out.ravel()
    for start in range(0, flat.size, chunk):
        block = flat[start : start + chunk]
        mat = np.exp(-np.outer(block, logs))
        res[start : start + chunk] = mat.sum(axis=1)
    for i, s in enumerate(flat):
        tail, remainder = _em_tail(complex(s), m_terms + alpha, _EM_ORDER)
        res[i] += tail
        if remainder > target:
            res[i] = hurwitz_zeta(complex(s), alpha, EvalRequest.at(complex(s), target))
    return out


def riemann_zeta(s: complex, request: EvalRequest | None = None) -> complex:
    return hurwitz_zeta(s, 1.0, request)


def _l_from_values(
    s: complex, modulus: int, values: np.ndarray, request: EvalRequest | None
) -> complex:
    if modulus == 1:
        return hurwitz_zeta(s, 1.0, request)
    total = 0.0 + 0.0j
    for a in range(1, modulus + 1):
        v = values[a % modulus]
        if v == 0:
            continue
        total += v * hurwitz_zeta(s, a / modulus, request)
    return modulus ** (-s) * total


def _l_at_one_digamma(modulus: int, values: np.ndarray) -> complex:
    with mp.workdps(40):
        total = mp.mpc(0)
        for a in range(1, modulus):
            v = values[a]
            if v == 0:
                continue
            total += mp.mpc(complex(v)) * mp.digamma(mp.mpf(a) / modulus)
        out = -total / modulus
        return complex(float(mp.re(out)), float(mp.im(out)))


def dirichlet_l(s: complex, chi: Character, request: EvalRequest | None = None) -> complex:
    """L(s, chi) via Hurwitz zeta; principal characters through the zeta factor."""
    s = complex(s)
    if chi.is_principal:
        if s == 1:
            raise EvaluationError("L(s, principal) has a pole at s = 1")
        z = riemann_zeta(s, request)
        for p, _ in factorize(chi.q):
            z *= 1.0 - p ** (-s)
        return z
    values = chi.values_complex()
    if s == 1:
        return _l_at_one_digamma(chi.q, values)
    return _l_from_values(s, chi.q, values, request)


def dirichlet_l_primitive(
    s: complex, chi: Character, request: EvalRequest | None = None
) -> complex:
    """L(s, chi') for the primitive inducer of chi."""
    s = complex(s)
    values = chi.inducer_values_complex()
    if chi.conductor == 1:
        if s == 1:
            raise EvaluationError("L(s, chi') with trivial inducer has a pole at s = 1")
        return riemann_zeta(s, request)
    if s == 1:
        if chi.is_principal:
            raise EvaluationError("principal inducer has a pole at s = 1")
        return _l_at_one_digamma(chi.conductor, values)
    return _l_from_values(s, chi.conductor, values, request)


def dedekind_zeta(
    s: complex,
    q: int,
    request: EvalRequest | None = None,
    table: CharacterTable | None = None,
) -> complex:
    """zeta_K(s) = zeta(s) * prod over non-principal chi of L(s, chi')."""
    s = complex(s)
    if s == 1:
        raise EvaluationError("dedekind zeta pole at s = 1")
    if table is None:
        table = build_character_table(q)
    out = riemann_zeta(s, request)
    for chi in table.non_principal():
        out *= dirichlet_l_primitive(s, chi, request)
    return out


def dedekind_zeta_series(s: complex, coeffs: DedekindCoefficients) -> complex:
    """Truncated Dirichlet series sum_{n <= n_max} a(n) n^(-s) (diagnostic)."""
    n = np.arange(1, coeffs.n_max + 1, dtype=np.float64)
    return complex(np.sum(coeffs.a[1:] * np.exp(-complex(s) * np.log(n))))


@dataclass(frozen=True)
class FactoredLineValues:
    """Bulk critical-line values of the factorization on a shared t grid."""

    t_grid: np.ndarray
    zeta_values: np.ndarray
    l_values: tuple[np.ndarray, ...]  # one array per non-principal character
    characters: tuple[Character, ...]

    @property
    def dedekind_values(self) -> np.ndarray:
        out = self.zeta_values.copy()
        for lv in self.l_values:
            out = out * lv
        return out


def dedekind_line_values(
    t_grid: np.ndarray,
    q: int,
    sigma: float = 0.5,
    target: float = 1e-8,
    table: CharacterTable | None = None,
) -> FactoredLineValues:
    """Evaluate zeta and every L(s, chi') on sigma + i t over a shared grid.

    Hurwitz calls are grouped by shift a/conductor so each shift is evaluated
    once for the whole grid.
    """
    if table is None:
        table = build_character_table(q)
    t_grid = np.asarray(t_grid, dtype=np.float64)
    s_values = sigma + 1j * t_grid
    cache: dict[tuple[int, int], np.ndarray] = {}

    def hurwitz_grid(modulus: int, a: int) -> np.ndarray:
        key = (modulus, a)
        if key not in cache:
            cache[key] = hurwitz_zeta_many(s_values, a / modulus, target)
        return cache[key]

    zeta_vals = hurwitz_grid(1, 1)
    l_arrays: list[np.ndarray] = []
    for chi in table.non_principal():
        cond = chi.conductor
        values = chi.inducer_values_complex()
        acc = np.zeros_like(s_values)
        for a in range(1, cond + 1):
            v = values[a % cond]
            if v == 0:
                continue
            acc += v * hurwitz_grid(cond, a)
        l_arrays.append(np.exp(-s_values * math.log(cond)) * acc)
    return FactoredLineValues(
        t_grid=t_grid,
        zeta_values=zeta_vals,
        l_values=tuple(l_arrays),
        characters=table.non_principal(),
    )
