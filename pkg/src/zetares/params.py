"""Parameter vector for resonance experiments, with validity guards."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ValidationError

# Guard exponent for the kernel-order bound n_frak <= (log N)^(1/2 - delta).
# Violations are reported as warnings, not errors: desk-scale runs routinely
# sit outside the asymptotic regime the bound belongs to.
DELTA_GUARD = 0.05

# Soft ceiling for q relative to loglog T; implied constant chosen for reports.
Q_SOFT_LIMIT_POWER = 3.0


@dataclass(frozen=True)
class Params:
    """Full parameter vector (T, eta, N, q, gamma, a_param, epsilon, c_q, n_frak).

    N is derived as floor(T^eta).  All logarithms are natural.  Construction
    validates the hard invariants and collects soft warnings in `warnings`.
    """

    T: float
    eta: float
    q: int
    gamma: float
    N: int
    a_param: float
    epsilon: float
    c_q: float
    n_frak: int
    support_cap: int
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @classmethod
    def create(
        cls,
        *,
        T: float,
        q: int,
        eta: float = 0.9,
        gamma: float = 0.9,
        a_param: float | None = None,
        epsilon: float = 0.05,
        c_q: float | None = None,
        n_frak: int | None = None,
        support_cap: int = 500_000,
    ) -> "Params":
        if T <= 1.0:
            raise ValidationError("T must exceed 1")
        if not 0.0 < eta <= 1.0:
            raise ValidationError(f"eta must lie in (0, 1], got {eta}")
        if q < 3:
            raise ValidationError(f"q must be at least 3, got {q}")
        if not 0.0 < gamma < 1.0:
            raise ValidationError(f"gamma must lie in (0, 1), got {gamma}")
        if a_param is None:
            a_param = 0.5 * (1.0 + 1.0 / gamma)
        if not 1.0 < a_param < 1.0 / gamma:
            raise ValidationError(
                f"a_param must lie in (1, 1/gamma) = (1, {1.0 / gamma:.6g}), got {a_param}"
            )
        phi = euler_phi(q)
        if c_q is None:
            c_q = math.sqrt(phi)
        if not 0.0 < c_q <= math.sqrt(phi) + 1e-12:
            raise ValidationError(
                f"c_q must lie in (0, sqrt(phi(q))] = (0, {math.sqrt(phi):.6g}], got {c_q}"
            )
        if epsilon <= 0.0:
            raise ValidationError(f"epsilon must be positive, got {epsilon}")
        if n_frak is None:
            n_frak = 2 * phi
        if n_frak < 1:
            raise ValidationError(f"n_frak must be a positive integer, got {n_frak}")
        if support_cap < 1:
            raise ValidationError(f"support_cap must be positive, got {support_cap}")

        N = int(math.floor(T**eta))
        if N < 2:
            raise ValidationError(f"N = floor(T^eta) = {N} is too small")

        warnings: list[str] = []
        log_n = math.log(N)
        guard = log_n ** (0.5 - DELTA_GUARD)
        if n_frak > guard:
            warnings.append(
                f"n_frak = {n_frak} exceeds (log N)^(1/2 - {DELTA_GUARD}) = {guard:.3f}; "
                "outside the asymptotic guard regime"
            )
        loglog_t = math.log(math.log(T)) if T > math.e else 0.0
        if loglog_t > 0 and q > loglog_t**Q_SOFT_LIMIT_POWER:
            warnings.append(
                f"q = {q} exceeds (loglog T)^{Q_SOFT_LIMIT_POWER:g} = "
                f"{loglog_t**Q_SOFT_LIMIT_POWER:.3f}; modulus is large for this window"
            )
        return cls(
            T=float(T),
            eta=float(eta),
            q=int(q),
            gamma=float(gamma),
            N=N,
            a_param=float(a_param),
            epsilon=float(epsilon),
            c_q=float(c_q),
            n_frak=int(n_frak),
            support_cap=int(support_cap),
            warnings=tuple(warnings),
        )

    @classmethod
    def from_N(cls, *, N: int, q: int, eta: float = 0.9, **kwargs) -> "Params":
        """Build params around a target support size N; T is derived as N^(1/eta)."""
        if N < 2:
            raise ValidationError(f"N must be at least 2, got {N}")
        T = (N + 0.5) ** (1.0 / eta)
        p = cls.create(T=T, q=q, eta=eta, **kwargs)
        if p.N != N:
            raise ValidationError(f"could not realize N = {N} (got {p.N})")
        return p

    @property
    def phi_q(self) -> int:
        return euler_phi(self.q)

    @property
    def log_n(self) -> float:
        return math.log(self.N)

    @property
    def log2_n(self) -> float:
        v = math.log(self.N)
        if v <= 1.0:
            raise ValidationError(f"N = {self.N} too small for iterated logs")
        return math.log(v)

    @property
    def log3_n(self) -> float:
        v = self.log2_n
        if v <= 0.0:
            raise ValidationError(f"N = {self.N} too small for iterated logs")
        return math.log(v)

    @property
    def log_t(self) -> float:
        return math.log(self.T)

    @property
    def band_count(self) -> int:
        return int(math.floor(self.log2_n**self.gamma))

    def as_dict(self) -> dict:
        return {
            "T": self.T,
            "eta": self.eta,
            "q": self.q,
            "gamma": self.gamma,
            "N": self.N,
            "a_param": self.a_param,
            "epsilon": self.epsilon,
            "c_q": self.c_q,
            "n_frak": self.n_frak,
            "support_cap": self.support_cap,
            "warnings": list(self.warnings),
        }


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValidationError(f"phi undefined for {n}")
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1 if p == 2 else 2
    if m > 1:
        result -= result // m
    return result


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization as (p, exponent) pairs, ascending."""
    if n < 1:
        raise ValidationError(f"cannot factorize {n}")
    out: list[tuple[int, int]] = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out
