"""Smoothing kernel sin^(2n)(beta u) / (beta^(2n-1) u^(2n)) and its transform.

The Fourier transform (convention f^(v) = int f(u) e^(-ivu) du) is the exact
piecewise polynomial

    K^(v) = pi * IH_{2n}(n + v / (2 beta)),   |v| <= 2 n beta,

where IH_m is the Irwin-Hall density (m-fold convolution of the unit-interval
indicator).  The alternating binomial sum defining IH_m cancels catastrophically
for large m, so two evaluation paths are provided: a vectorized float path for
moderate orders and an exact big-rational path used for high orders and for
oracle-grade values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ValidationError
from .params import Params

# Largest convolution order 2n evaluated in plain float64; the alternating sum
# then loses at most ~8 digits, keeping absolute error near 1e-8.
_FLOAT_ORDER_LIMIT = 24


@dataclass(frozen=True)
class Kernel:
    """Immutable kernel of order n_frak with half-bandwidth beta = eps*log(T)/n."""

    n_frak: int
    beta: float
    support_radius: float  # = 2 * epsilon * log T = 2 * n_frak * beta

    @classmethod
    def create(cls, *, epsilon: float, T: float, n_frak: int) -> "Kernel":
        if n_frak < 1:
            raise ValidationError(f"n_frak must be positive, got {n_frak}")
        if epsilon <= 0 or T <= 1:
            raise ValidationError("epsilon must be positive and T must exceed 1")
        radius = 2.0 * epsilon * math.log(T)
        return cls(n_frak=n_frak, beta=radius / (2 * n_frak), support_radius=radius)

    @classmethod
    def from_params(cls, params: Params) -> "Kernel":
        return cls.create(epsilon=params.epsilon, T=params.T, n_frak=params.n_frak)


def kernel_value(kernel: Kernel, u):
    """K(u) = beta * (sin(beta u) / (beta u))^(2n); K(0) = beta."""
    x = np.asarray(u, dtype=np.float64)
    core = np.sinc(kernel.beta * x / np.pi) ** (2 * kernel.n_frak)
    out = kernel.beta * core
    return float(out) if np.isscalar(u) or out.ndim == 0 else out


def kernel_value_complex(kernel: Kernel, z: complex) -> complex:
    """Analytic continuation of K to complex arguments."""
    if z == 0:
        return complex(kernel.beta)
    w = kernel.beta * complex(z)
    return kernel.beta * (np.sin(w) / w) ** (2 * kernel.n_frak)


def _irwin_hall_float(m: int, x: np.ndarray) -> np.ndarray:
    """IH_m(x) by the alternating binomial sum in float64 (absolute error ~1e-8)."""
    acc = np.zeros_like(x)
    inv_fact = 1.0 / math.factorial(m - 1)
    for k in range(m + 1):
        diff = x - k
        mask = diff > 0.0
        if not mask.any():
            break
        term = math.comb(m, k) * inv_fact
        acc[mask] += (-term if k % 2 else term) * diff[mask] ** (m - 1)
    return acc


def _irwin_hall_exact(m: int, x: float) -> Fraction:
    """IH_m(x) evaluated in exact rational arithmetic at a float point."""
    if x <= 0 or x >= m:
        return Fraction(0)
    xf = Fraction(x)
    acc = Fraction(0)
    for k in range(int(math.floor(x)) + 1):
        term = math.comb(m, k) * (xf - k) ** (m - 1)
        acc += -term if k % 2 else term
    return acc / math.factorial(m - 1)


def _irwin_hall_derivative_exact(m: int, x: float) -> Fraction:
    if x <= 0 or x >= m:
        return Fraction(0)
    xf = Fraction(x)
    acc = Fraction(0)
    for k in range(int(math.floor(x)) + 1):
        term = math.comb(m, k) * (xf - k) ** (m - 2)
        acc += -term if k % 2 else term
    return acc / math.factorial(m - 2)


def kernel_transform(kernel: Kernel, v):
    """K^(v), nonnegative, supported on |v| <= kernel.support_radius.

    Vectorized float evaluation for orders 2n <= 24, exact rational evaluation
    above that.  Values are clamped at zero to absorb float cancellation dust.
    """
    m = 2 * kernel.n_frak
    n = kernel.n_frak
    scalar = np.isscalar(v)
    x = n * (1.0 + np.abs(np.atleast_1d(np.asarray(v, dtype=np.float64))) / kernel.support_radius)
    if m <= _FLOAT_ORDER_LIMIT:
        vals = math.pi * _irwin_hall_float(m, x)
    else:
        vals = np.array([math.pi * float(_irwin_hall_exact(m, xi)) for xi in x])
    vals[x >= m] = 0.0
    np.maximum(vals, 0.0, out=vals)
    return float(vals[0]) if scalar else vals


def kernel_transform_exact(kernel: Kernel, v: float) -> float:
    """K^(v) through the exact big-rational spline path (any order)."""
    n = kernel.n_frak
    x = n * (1.0 + abs(v) / kernel.support_radius)
    return math.pi * float(_irwin_hall_exact(2 * n, x))


def kernel_transform_derivative(kernel: Kernel, v: float) -> float:
    """d/dv K^(v), exact spline derivative (sign follows v)."""
    n = kernel.n_frak
    x = n * (1.0 + abs(v) / kernel.support_radius)
    slope = math.pi * float(_irwin_hall_derivative_exact(2 * n, x)) * n / kernel.support_radius
    return -slope if v >= 0 else slope


def kernel_transform_at_zero(n_frak: int) -> tuple[float, float]:
    """(exact, asymptotic) values of the transform at v = 0.

    exact = int sin^(2n)x / x^(2n) dx = pi * IH_{2n}(n); the asymptotic
    comparison value is sqrt(3 pi / n).
    """
    if n_frak < 1:
        raise ValidationError(f"n_frak must be positive, got {n_frak}")
    exact = math.pi * float(_irwin_hall_exact(2 * n_frak, float(n_frak)))
    return exact, math.sqrt(3.0 * math.pi / n_frak)


@dataclass(frozen=True)
class DerivativeBoundReport:
    passed: bool
    worst_ratio: float
    bound: float
    slack: float


def derivative_bound_check(
    kernel: Kernel, v_grid: np.ndarray, slack: float = 1.01
) -> DerivativeBoundReport:
    """Check |d/dv K^(v)| <= slack * K^_{n-1}(0) / beta on a grid.

    The derivative is formed by central differences of the transform on the
    supplied grid; points outside the support contribute zero trivially.
    """
    if kernel.n_frak < 2:
        raise ValidationError("derivative bound requires n_frak >= 2")
    grid = np.sort(np.asarray(v_grid, dtype=np.float64))
    if grid.size < 3:
        raise ValidationError("grid too small for differencing")
    values = kernel_transform(kernel, grid)
    deriv = np.gradient(values, grid)
    bound = kernel_transform_at_zero(kernel.n_frak - 1)[0] / kernel.beta
    worst = float(np.max(np.abs(deriv))) / bound
    return DerivativeBoundReport(
        passed=bool(worst <= slack), worst_ratio=worst, bound=bound, slack=slack
    )


def gaussian_window(t):
    """Phi(t) = exp(-t^2 / 2)."""
    return np.exp(-np.square(np.asarray(t, dtype=np.float64)) / 2.0)


def gaussian_window_transform(t):
    """Phi^(t) = sqrt(2 pi) Phi(t)."""
    return math.sqrt(2.0 * math.pi) * gaussian_window(t)
