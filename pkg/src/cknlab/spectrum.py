"""Closed-form spectrum of the linearized operator on the cylinder.

Separating in spherical harmonics of degree i reduces the linearization to a
Schrodinger problem with a sech^2 well on the axis,

    -phi'' + tau_i phi = lambda beta sech^2(gamma t) phi,
    tau_i = (a_c-a)^2 + i(N-2+i),

whose bound-state energies are classical.  Matching the level-j energy to
tau_i yields the eigenvalue family

    lambda_{i,j} = gamma^2/(4 beta) ((2j+1 + 2 sqrt(tau_i)/gamma)^2 - 1),

with lambda_{0,0} = 1/p and lambda_{0,1} = 1 exactly.  The spectral gap
constant is 1 - 1/lambda for the smallest eigenvalue above 1; which candidate
wins -- the second radial level (0,2) or the first degree-one level (1,0) --
is exactly the region split of the params module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .extremals import psi, psi_prime, psi_second
from .params import CknParams, RegionClass, classify
from .specfun import integrate_line, jacobi_polynomial, log_cosh

__all__ = [
    "GapReport",
    "OrthogonalityReport",
    "SpectralPoint",
    "comparison_functions",
    "eigenfunction",
    "eigenvalue_closed",
    "harmonic_multiplicity",
    "orthogonality_check",
    "rho_02",
    "rho_02_prime",
    "rho_10",
    "rho_10_profile",
    "rho_10_profile_prime",
    "spectral_gap",
]


def harmonic_multiplicity(n_dim: int, i: int) -> int:
    """Number of independent spherical harmonics of degree i on S^(N-1)."""
    if i < 0:
        raise ValueError("degree must be nonnegative")
    if i == 0:
        return 1

    def _comb(n: int, k: int) -> int:
        return math.comb(n, k) if 0 <= k <= n else 0

    return _comb(n_dim - 1 + i, i) - _comb(n_dim - 3 + i, i - 2)


@dataclass(frozen=True)
class SpectralPoint:
    """One eigenvalue lambda_{i,j} with its mode data."""

    i: int
    j: int
    tau: float
    lam: float
    multiplicity: int


def eigenvalue_closed(params: CknParams, i: int, j: int) -> SpectralPoint:
    """Closed-form eigenvalue lambda_{i,j}, the positive root of the
    level-matching condition."""
    if i < 0 or j < 0:
        raise ValueError("mode indices must be nonnegative")
    tau = params.tau(i)
    g, b = params.gamma, params.beta
    f = 2.0 * j + 1.0 + 2.0 * math.sqrt(tau) / g
    lam = g * g / (4.0 * b) * (f * f - 1.0)
    return SpectralPoint(
        i=i, j=j, tau=tau, lam=lam, multiplicity=harmonic_multiplicity(params.N, i)
    )


def comparison_functions(params: CknParams) -> tuple[float, float]:
    """The pair (g, h) whose ratio orders the eigenvalue candidates.

    g depends only on (N, a), h only on the exponent; g/h > 1 iff
    lambda_{0,2} < lambda_{1,1}, and g/h > 2 iff lambda_{0,2} < lambda_{1,0}.
    The ratio passes through 1 on b_FS(a) and through 2 on b_FS*(a).
    """
    d = params.ac_minus_a
    g = math.sqrt(0.25 + (params.N - 1) / (4.0 * d * d)) - 0.5
    u = 1.0 + params.a - params.b
    h = u / (params.N - 2.0 * u)
    return g, h


@dataclass(frozen=True)
class GapReport:
    """Spectral gap constant and the eigenvalue comparison behind it.

    ``lambda_star_variant`` is an alternative published closed form of the
    degree-one branch that does not vanish on the degenerate curve; it is
    reported alongside for comparison, never used.
    """

    region: RegionClass
    lambda_star: float
    winner: tuple[int, int]
    winner_multiplicity: int
    lambda_02: float
    lambda_10: float
    lambda_11: float
    lambda_star_variant: float
    boundary_note: str | None


def _lambda_star_variant(params: CknParams) -> float:
    q = params.q
    p = params.p
    root = math.sqrt(1.0 + q)
    return (2.0 * q - (p - 2.0) * (p + 1.0) + (p - 1.0) * root) / (
        2.0 + 2.0 * q + (p - 1.0) * root
    )


def spectral_gap(params: CknParams) -> GapReport:
    """Gap constant lambda* = 1 - 1/min(lambda above 1), from the raw
    eigenvalue formula.

    In CaseI/CaseII the winner is (0,2) and lambda* simplifies to
    2(p-1)/(3p-1); in the Remaining region the winner is (1,0).  On the
    boundary b = b_FS*(a) both coincide.
    """
    report = classify(params)
    lam02 = eigenvalue_closed(params, 0, 2).lam
    lam10 = eigenvalue_closed(params, 1, 0).lam
    lam11 = eigenvalue_closed(params, 1, 1).lam
    if lam02 <= lam10:
        winner = (0, 2)
        lam_min = lam02
    else:
        winner = (1, 0)
        lam_min = lam10
    lam_star = 1.0 - 1.0 / lam_min
    return GapReport(
        region=report.region,
        lambda_star=lam_star,
        winner=winner,
        winner_multiplicity=harmonic_multiplicity(params.N, winner[0]),
        lambda_02=lam02,
        lambda_10=lam10,
        lambda_11=lam11,
        lambda_star_variant=_lambda_star_variant(params),
        boundary_note=report.boundary_note,
    )


def _eigenfunction_raw(params: CknParams, i: int, j: int, t):
    k = math.sqrt(params.tau(i)) / params.gamma
    y = np.tanh(params.gamma * np.asarray(t, dtype=float))
    return jacobi_polynomial(j, k, y) * np.exp(-k * log_cosh(params.gamma * np.asarray(t)))


def _eigenfunction_raw_prime(params: CknParams, i: int, j: int, t):
    g = params.gamma
    k = math.sqrt(params.tau(i)) / g
    t = np.asarray(t, dtype=float)
    y = np.tanh(g * t)
    sech_sq = 1.0 - y * y
    envelope = np.exp(-k * log_cosh(g * t))
    if j == 0:
        poly_term = 0.0
    else:
        # P_j'(y) = (j + 2k + 1)/2 * P_{j-1} with both parameters raised by 1
        poly_term = (j + 2.0 * k + 1.0) / 2.0 * jacobi_polynomial(j - 1, k + 1.0, y)
    return g * envelope * (poly_term * sech_sq - k * y * jacobi_polynomial(j, k, y))


@lru_cache(maxsize=None)
def _eigenfunction_norm(params: CknParams, i: int, j: int) -> float:
    tau = params.tau(i)

    def integrand(t: float) -> float:
        d = _eigenfunction_raw_prime(params, i, j, t)
        v = _eigenfunction_raw(params, i, j, t)
        return d * d + tau * v * v

    decay = 2.0 * math.sqrt(tau)
    return math.sqrt(integrate_line(integrand, decay))


def eigenfunction(params: CknParams, i: int, j: int, t):
    """Axis profile of the (i, j) eigenfunction, unit H1 norm.

    The profile multiplies an L2(S^(N-1))-orthonormal harmonic of degree i;
    the H1 normalization is per harmonic.
    """
    return _eigenfunction_raw(params, i, j, t) / _eigenfunction_norm(params, i, j)


def rho_02(params: CknParams, t):
    """Second radial eigenfunction in its explicit normalization:

    rho(t) = p cosh(gamma t)^(-2/(p-1)) / (4(p-1)^2)
             * (4(p+1) - (6p+2) sech^2(gamma t)).
    """
    p, g = params.p, params.gamma
    t = np.asarray(t, dtype=float)
    sech_sq = 1.0 / np.cosh(g * t) ** 2
    envelope = np.exp(-(2.0 / (p - 1.0)) * log_cosh(g * t))
    return p * envelope / (4.0 * (p - 1.0) ** 2) * (4.0 * (p + 1.0) - (6.0 * p + 2.0) * sech_sq)


def rho_02_prime(params: CknParams, t):
    """Analytic t-derivative of rho_02."""
    p, g = params.p, params.gamma
    t = np.asarray(t, dtype=float)
    th = np.tanh(g * t)
    sech_sq = 1.0 - th * th
    envelope = np.exp(-(2.0 / (p - 1.0)) * log_cosh(g * t))
    bracket = 4.0 * (p + 1.0) - (6.0 * p + 2.0) * sech_sq
    d_envelope = -(2.0 * g / (p - 1.0)) * th * envelope
    d_bracket = (6.0 * p + 2.0) * 2.0 * g * th * sech_sq
    return p / (4.0 * (p - 1.0) ** 2) * (d_envelope * bracket + envelope * d_bracket)


def rho_10_profile(params: CknParams, t):
    """Axis profile cosh(gamma t)^(-sqrt(tau_1)/gamma) of the degree-one
    ground state; multiplies a raw coordinate function theta_l."""
    k = math.sqrt(params.tau(1)) / params.gamma
    return np.exp(-k * log_cosh(params.gamma * np.asarray(t, dtype=float)))


def rho_10_profile_prime(params: CknParams, t):
    k = math.sqrt(params.tau(1)) / params.gamma
    t = np.asarray(t, dtype=float)
    return -math.sqrt(params.tau(1)) * np.tanh(params.gamma * t) * rho_10_profile(params, t)


def rho_10(params: CknParams, t, polar_angle):
    """Degree-one eigenfunction rho_{1,0,N}(t, theta) with the zonal
    coordinate harmonic theta_N = cos(polar angle)."""
    return rho_10_profile(params, t) * np.cos(np.asarray(polar_angle, dtype=float))


@dataclass(frozen=True)
class OrthogonalityReport:
    """H1 inner products of the gap eigenfunctions against the soft modes.

    Values are normalized by the product of the factors' H1 norms; mode-one
    products against mode-zero functions vanish identically by harmonic
    orthogonality and are reported as exact zeros.
    """

    rho02_vs_psi: float
    rho02_vs_psi_prime: float
    rho10_vs_mode_zero: float
    tolerance: float
    passed: bool


def orthogonality_check(params: CknParams, tolerance: float = 1e-8) -> OrthogonalityReport:
    tau0 = params.tau(0)
    decay = 2.0 * params.ac_minus_a

    def ip(f, fp, g, gp) -> float:
        return integrate_line(lambda t: fp(t) * gp(t) + tau0 * f(t) * g(t), decay)

    def norm(f, fp) -> float:
        return math.sqrt(ip(f, fp, f, fp))

    n_rho = norm(lambda t: rho_02(params, t), lambda t: rho_02_prime(params, t))
    n_psi = norm(lambda t: psi(params, t), lambda t: psi_prime(params, t))
    n_psi_prime = norm(lambda t: psi_prime(params, t), lambda t: psi_second(params, t))
    ip_psi = ip(
        lambda t: rho_02(params, t),
        lambda t: rho_02_prime(params, t),
        lambda t: psi(params, t),
        lambda t: psi_prime(params, t),
    )
    ip_psi_prime = ip(
        lambda t: rho_02(params, t),
        lambda t: rho_02_prime(params, t),
        lambda t: psi_prime(params, t),
        lambda t: psi_second(params, t),
    )
    r1 = abs(ip_psi) / (n_rho * n_psi)
    r2 = abs(ip_psi_prime) / (n_rho * n_psi_prime)
    return OrthogonalityReport(
        rho02_vs_psi=r1,
        rho02_vs_psi_prime=r2,
        rho10_vs_mode_zero=0.0,
        tolerance=tolerance,
        passed=bool(r1 < tolerance and r2 < tolerance),
    )
