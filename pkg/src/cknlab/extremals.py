"""The extremal bubble, its cylinder profile, and the optimal constant.

On the Euclidean side the radial extremal is

    W(r) = (2(p+1)(a_c-a)^2)^(1/(p-1)) (1 + r^((a_c-a)(p-1)))^(-2/(p-1)),

and the logarithmic change of variables t = -ln r, v = r^(a_c-a) u maps it to
the even cylinder profile

    Psi(t) = ((p+1)(a_c-a)^2 / 2)^(1/(p-1)) cosh(gamma t)^(-2/(p-1)),

which solves -Psi'' + (a_c-a)^2 Psi = Psi^p.  Testing that equation against
Psi itself gives the norm identity |Psi|_H1^2 = |Psi|_{p+1}^{p+1}, which is how
the optimal constant is evaluated here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .params import CknParams
from .specfun import beta, sphere_area

__all__ = [
    "ExtremalProfile",
    "OptimalConstant",
    "PsiNorms",
    "bubble_w",
    "bubble_w_prime",
    "emden_fowler_image",
    "generator_v",
    "optimal_constant",
    "profile",
    "psi",
    "psi_norms",
    "psi_prime",
    "psi_second",
    "psi_shift",
]


@dataclass(frozen=True)
class ExtremalProfile:
    """Amplitude and decay rate of the cylinder bubble."""

    params: CknParams
    amplitude: float
    decay_rate: float


def profile(params: CknParams) -> ExtremalProfile:
    p, d = params.p, params.ac_minus_a
    return ExtremalProfile(
        params=params,
        amplitude=((p + 1.0) * d * d / 2.0) ** (1.0 / (p - 1.0)),
        decay_rate=params.gamma,
    )


def _log_cosh(x):
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


def psi(params: CknParams, t):
    """Cylinder bubble Psi(t); vectorized and overflow-safe."""
    amp = profile(params).amplitude
    return amp * np.exp(-(2.0 / (params.p - 1.0)) * _log_cosh(params.gamma * t))


def psi_prime(params: CknParams, t):
    """d/dt Psi(t) = -(a_c-a) tanh(gamma t) Psi(t)."""
    return -params.ac_minus_a * np.tanh(params.gamma * t) * psi(params, t)


def psi_second(params: CknParams, t):
    """Second derivative of Psi, in closed form."""
    d, g = params.ac_minus_a, params.gamma
    th = np.tanh(g * t)
    sech_sq = 1.0 - th * th
    return (d * d * th * th - d * g * sech_sq) * psi(params, t)


def psi_shift(params: CknParams, t, s: float):
    """Translated bubble Psi(t - s)."""
    return psi(params, np.asarray(t) - s)


def bubble_w(params: CknParams, x_radius):
    """Euclidean radial extremal W(|x|) for |x| >= 0."""
    r = np.asarray(x_radius, dtype=float)
    if np.any(r < 0.0):
        raise ValueError("radius must be nonnegative")
    p, d = params.p, params.ac_minus_a
    amp = (2.0 * (p + 1.0) * d * d) ** (1.0 / (p - 1.0))
    return amp * (1.0 + r ** (d * (p - 1.0))) ** (-2.0 / (p - 1.0))


def bubble_w_prime(params: CknParams, x_radius):
    """Radial derivative W'(|x|)."""
    r = np.asarray(x_radius, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("radius must be positive")
    p, d = params.p, params.ac_minus_a
    e = d * (p - 1.0)
    amp = (2.0 * (p + 1.0) * d * d) ** (1.0 / (p - 1.0))
    return amp * (-2.0 / (p - 1.0)) * (1.0 + r**e) ** (-2.0 / (p - 1.0) - 1.0) * e * r ** (e - 1.0)


def generator_v(params: CknParams, x_radius):
    """Dilation generator V = r W'(r) + (a_c-a) W(r).

    Spans the kernel of the linearized equation; its cylinder image is -Psi'.
    """
    r = np.asarray(x_radius, dtype=float)
    return r * bubble_w_prime(params, r) + params.ac_minus_a * bubble_w(params, r)


def emden_fowler_image(params: CknParams, radial: Callable[[np.ndarray], np.ndarray], t):
    """Cylinder image e^(-(a_c-a) t) f(e^(-t)) of a radial function f(r)."""
    t = np.asarray(t, dtype=float)
    return np.exp(-params.ac_minus_a * t) * radial(np.exp(-t))


@dataclass(frozen=True)
class PsiNorms:
    """Norms of the cylinder bubble; h1_sq equals lp1 to the power p+1."""

    h1_sq: float
    lp1: float
    lp1_pow: float


def psi_norms(params: CknParams) -> PsiNorms:
    """Closed-form |Psi|_H1^2 and |Psi|_{p+1} via the Beta identity."""
    p = params.p
    amp = profile(params).amplitude
    lp1_pow = (
        amp ** (p + 1.0)
        * sphere_area(params.N)
        / params.gamma
        * beta((p + 1.0) / (p - 1.0), 0.5)
    )
    return PsiNorms(h1_sq=lp1_pow, lp1=lp1_pow ** (1.0 / (p + 1.0)), lp1_pow=lp1_pow)


@dataclass(frozen=True)
class OptimalConstant:
    """Inverse optimal constant, its published closed form, and their ratio.

    ``c_inv`` is the variational value |Psi|_{p+1}^(p-1) implied by the norm
    identity; ``c_inv_closed_form`` is the closed-form expression quoted in the
    literature, which carries no surface-area factor.  The two differ by
    exactly |S^(N-1)|^((p-1)/(p+1)); both are reported rather than conflated.
    """

    c_inv: float
    c_inv_closed_form: float
    ratio: float


def optimal_constant(params: CknParams) -> OptimalConstant:
    p, d = params.p, params.ac_minus_a
    norms = psi_norms(params)
    c_inv = norms.lp1_pow ** ((p - 1.0) / (p + 1.0))
    closed = (
        (p + 1.0)
        / 2.0
        * d ** ((p + 3.0) / (p + 1.0))
        * (
            2.0
            * math.sqrt(math.pi)
            * math.gamma((p + 1.0) / (p - 1.0))
            / ((p - 1.0) * math.gamma((3.0 * p + 1.0) / (2.0 * (p - 1.0))))
        )
        ** ((p - 1.0) / (p + 1.0))
    )
    return OptimalConstant(c_inv=c_inv, c_inv_closed_form=closed, ratio=c_inv / closed)
