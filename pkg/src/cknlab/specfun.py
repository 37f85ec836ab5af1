"""Special functions shared by every other module.

Gamma and Beta evaluation, the sech-power line integral

    int_R cosh(s)^(-alpha) (cosh(s)^2 - 1)^beta ds = B(alpha/2 - beta, beta + 1/2),

Jacobi polynomials in Rodrigues form, surface areas and coordinate moments of
the unit sphere, and an adaptive quadrature helper for integrands with a known
exponential decay rate on the real line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

__all__ = [
    "QuadratureSpec",
    "beta",
    "beta_reduction",
    "cosh_power_integral",
    "gamma",
    "integrate_line",
    "jacobi_polynomial",
    "log_cosh",
    "sphere_area",
    "sphere_moments",
    "SphereMoments",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for adaptive quadrature of exponentially decaying integrands.

    ``half_width == 0`` means the truncation is derived from the decay rate so
    that the discarded tail is below 1e-16 of the peak scale.
    """

    abs_tol: float = 1e-13
    rel_tol: float = 1e-12
    half_width: float = 0.0
    node_budget: int = 400

    def __post_init__(self) -> None:
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("quadrature tolerances must be positive")
        if self.half_width < 0.0:
            raise ValueError("half_width must be positive, or 0 for automatic")
        if self.node_budget < 16:
            raise ValueError("node budget must be at least 16")

    def resolve_half_width(self, decay_rate: float) -> float:
        if self.half_width > 0.0:
            return self.half_width
        if decay_rate <= 0.0:
            raise ValueError("decay rate must be positive to choose a truncation")
        return (40.0 + max(0.0, -math.log(decay_rate))) / decay_rate


DEFAULT_QUADRATURE = QuadratureSpec()


def gamma(x: float) -> float:
    """Gamma function for positive real argument."""
    if x <= 0.0:
        raise ValueError("gamma defined here for positive arguments only")
    return math.gamma(x)


def beta(m: float, n: float) -> float:
    """Euler Beta function B(m, n) for m, n > 0, via log-Gamma."""
    if m <= 0.0 or n <= 0.0:
        raise ValueError("beta requires positive arguments")
    return math.exp(math.lgamma(m) + math.lgamma(n) - math.lgamma(m + n))


def beta_reduction(m: float, n: float) -> float:
    """B(m, n) through the downward recursion B(m,n) = (m-1)/(m-1+n) B(m-1,n).

    The recursion bottoms out in a direct Gamma evaluation once m <= 2.
    Requires m > 1 and n > 0.
    """
    if m <= 1.0:
        raise ValueError("beta_reduction requires m > 1")
    if n <= 0.0:
        raise ValueError("beta_reduction requires n > 0")
    factor = 1.0
    while m > 2.0:
        factor *= (m - 1.0) / (m - 1.0 + n)
        m -= 1.0
    return factor * beta(m, n)


def cosh_power_integral(alpha: float, beta_exp: float) -> float:
    """Closed form of int_R cosh(s)^(-alpha) (cosh(s)^2 - 1)^beta_exp ds.

    Valid on the strip alpha/2 > beta_exp > -1/2, where it equals
    B(alpha/2 - beta_exp, beta_exp + 1/2).
    """
    if beta_exp <= -0.5:
        raise ValueError("cosh_power_integral requires beta_exp > -1/2")
    if alpha / 2.0 <= beta_exp:
        raise ValueError("cosh_power_integral requires alpha/2 > beta_exp")
    return beta(alpha / 2.0 - beta_exp, beta_exp + 0.5)


def _binom_real(x: float, k: int) -> float:
    # binomial coefficient with real upper argument, integer k >= 0
    out = 1.0
    for i in range(1, k + 1):
        out *= (x - k + i) / i
    return out


def jacobi_polynomial(j: int, exponent: float, y):
    """Degree-j Jacobi polynomial with equal parameters (exponent, exponent).

    Rodrigues normalization:

        P_j(y) = (-1)^j / (2^j j!) (1-y^2)^(-e) d^j/dy^j (1-y^2)^(j+e).

    Accepts a scalar or array ``y`` with |y| <= 1.
    """
    if j < 0:
        raise ValueError("polynomial degree must be nonnegative")
    if exponent <= 0.0:
        raise ValueError("exponent must be positive")
    arr = np.asarray(y, dtype=float)
    if np.any(np.abs(arr) > 1.0 + 1e-12):
        raise ValueError("jacobi_polynomial expects |y| <= 1")
    half_minus = (arr - 1.0) / 2.0
    half_plus = (arr + 1.0) / 2.0
    acc = np.zeros_like(arr)
    for s in range(j + 1):
        c = _binom_real(j + exponent, j - s) * _binom_real(j + exponent, s)
        acc = acc + c * half_minus**s * half_plus ** (j - s)
    if np.isscalar(y) or arr.ndim == 0:
        return float(acc)
    return acc


@dataclass(frozen=True)
class SphereMoments:
    """Surface area and zonal coordinate moments of the unit sphere S^(N-1)."""

    area: float
    second: float
    fourth: float
    d_n: float


def sphere_area(n_dim: int) -> float:
    """Surface area of the unit sphere S^(N-1) in R^N."""
    if n_dim < 2:
        raise ValueError("sphere_area requires N >= 2")
    return 2.0 * math.pi ** (n_dim / 2.0) / math.gamma(n_dim / 2.0)


def sphere_moments(n_dim: int) -> SphereMoments:
    """Second and fourth moments of a coordinate over S^(N-1), and D_N.

    int theta_l^2 = |S^(N-1)|/N, int theta_l^4 = 3|S^(N-1)|/(N(N+2)), and
    D_N = (N+2)|S^(N-1)|/N.
    """
    area = sphere_area(n_dim)
    return SphereMoments(
        area=area,
        second=area / n_dim,
        fourth=3.0 * area / (n_dim * (n_dim + 2)),
        d_n=(n_dim + 2) * area / n_dim,
    )


def log_cosh(x):
    """log(cosh(x)), overflow-safe for large |x|."""
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - _LN2


def integrate_line(
    f: Callable[[float], float],
    decay_rate: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Adaptive quadrature of ``f`` over the real line.

    ``decay_rate`` is a lower bound on the exponential decay rate of ``f``;
    it fixes the truncation half-width unless the spec pins one explicitly.
    """
    half = spec.resolve_half_width(decay_rate)
    value, _ = integrate.quad(
        f,
        -half,
        half,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.node_budget,
    )
    return value
