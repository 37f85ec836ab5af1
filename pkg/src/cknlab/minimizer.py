"""Gradient descent on the stability quotient over discretized cylinder functions.

The quotient

    Q(v) = (|v|_H1^2 - C^-1 |v|_{p+1}^2) / dist^2(v, manifold)

is homogeneous of degree zero, so the gradient is automatically tangent to the
normalization constraint |v|_{p+1} = 1 that each iterate is rescaled to.  The
distance term is differentiated through the envelope property: at the optimal
shift the derivative with respect to the shift vanishes, so only the explicit
dependence on the samples survives.  Iterates that sink below the manifold
guard are rejected and the step halved, since the quotient is undefined on the
manifold itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cylinder import CylinderFunction, CylinderModel, combine, model_for, scale
from .eig_oracle import GridSpec
from .energy import BoundsReport, bounds_report
from .extremals import psi
from .params import CknParams, RegionClass, classify

__all__ = [
    "MinimizeConfig",
    "NoDescent",
    "NumericalFailure",
    "OnManifold",
    "QuotientReport",
    "estimate_cbe",
    "minimize_quotient",
    "quotient",
]

MANIFOLD_GUARD = 1e-8
ON_MANIFOLD_TOL = 1e-10


class OnManifold(RuntimeError):
    """The function is (numerically) a scaled shifted bubble; Q is undefined."""


class NoDescent(RuntimeError):
    """Line search failed on the very first iterate."""


class NumericalFailure(RuntimeError):
    """A result violated its guaranteed bound."""


@dataclass(frozen=True)
class MinimizeConfig:
    """Start recipe and descent controls.

    ``start`` is one of ("gap", eps), ("two_bubble", s), ("random", seed).
    """

    start: tuple = ("gap", 0.05)
    modes: tuple[int, ...] = (0, 1)
    initial_step: float = 0.5
    max_iterations: int = 80
    gradient_tol: float = 1e-6
    projection_tol: float = MANIFOLD_GUARD
    random_amplitude: float = 0.05

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("need at least one iteration")
        if self.gradient_tol <= 0.0 or self.projection_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.start[0] == "gap" and not 0.0 < self.start[1] <= 0.2:
            raise ValueError("gap-perturbation eps must lie in (0, 0.2]")


@dataclass(frozen=True)
class QuotientReport:
    """Quotient evaluation or minimization outcome."""

    value: float
    distance_sq: float
    shift: float
    bounds: BoundsReport
    iterations: int
    gradient_norm: float
    trace: tuple[tuple[int, float], ...]
    start: str = "evaluation"


class _Objective:
    """Quotient, gradient, and bookkeeping on a fixed model."""

    def __init__(self, model: CylinderModel):
        self.model = model
        self.p = model.params.p

    def pieces(self, v: CylinderFunction):
        m = self.model
        h1 = m.h1_inner(v, v)
        lp1_pow = m.lp1_pow(v)
        projection = m.distance_to_manifold(v)
        numerator = h1 - m.c_inv * lp1_pow ** (2.0 / (self.p + 1.0))
        return h1, lp1_pow, projection, numerator

    def value(self, v: CylinderFunction):
        h1, _, projection, numerator = self.pieces(v)
        if projection.distance_sq <= ON_MANIFOLD_TOL * h1:
            raise OnManifold("distance to the bubble manifold is numerically zero")
        return numerator / projection.distance_sq, projection

    def gradient(self, v: CylinderFunction):
        """dQ/d(samples), mode-wise, analytic through the envelope property."""
        m = self.model
        p = self.p
        h1, lp1_pow, projection, numerator = self.pieces(v)
        dist_sq = projection.distance_sq
        q = numerator / dist_sq

        grad_h1 = {}
        for d in v.degrees:
            f = v.mode(d)
            grad_h1[d] = 2.0 * m.h * (m.spectral_neg_laplacian(f) + m.params.tau(d) * f)

        # d/df of int |v|^{p+1}: 2D chain rule through the harmonic samples
        grad_lp1_pow = {}
        if v.degrees == (0,):
            f0 = v.mode(0)
            base = m.area ** (1.0 - (p + 1.0) / 2.0) * m.h
            grad_lp1_pow[0] = base * (p + 1.0) * np.abs(f0) ** (p - 1.0) * f0
        else:
            samples = m._sample(v)
            core = np.abs(samples) ** (p - 1.0) * samples
            for d in v.degrees:
                y = m.harmonic_values(d)
                grad_lp1_pow[d] = (
                    m.angle_prefactor * m.h * (p + 1.0) * (core * (m.angle_w * y)).sum(axis=1)
                )

        lp1_sq_factor = 2.0 / (p + 1.0) * lp1_pow ** (2.0 / (p + 1.0) - 1.0)
        # overlap gradient at the optimal shift; the shift's own derivative
        # drops out by the envelope property
        psi_pow_shift = psi(m.params, m.t - projection.shift) ** p
        grad_overlap0 = m.sqrt_area * m.h * psi_pow_shift

        grads = {}
        for d in v.degrees:
            g_num = grad_h1[d] - m.c_inv * lp1_sq_factor * grad_lp1_pow[d]
            g_dist = grad_h1[d].copy()
            if d == 0:
                g_dist = g_dist - 2.0 * m.kappa * projection.overlap * grad_overlap0
            grads[d] = (g_num - q * g_dist) / dist_sq
        return grads, q, projection

    def numerator_gradient(self, v: CylinderFunction):
        """Gradient of the numerator alone (used by the correctness checks)."""
        m = self.model
        p = self.p
        grads = {}
        lp1_pow = m.lp1_pow(v)
        lp1_sq_factor = 2.0 / (p + 1.0) * lp1_pow ** (2.0 / (p + 1.0) - 1.0)
        if v.degrees == (0,):
            f0 = v.mode(0)
            base = m.area ** (1.0 - (p + 1.0) / 2.0) * m.h
            grad_lp1 = {0: base * (p + 1.0) * np.abs(f0) ** (p - 1.0) * f0}
        else:
            samples = m._sample(v)
            core = np.abs(samples) ** (p - 1.0) * samples
            grad_lp1 = {
                d: m.angle_prefactor
                * m.h
                * (p + 1.0)
                * (core * (m.angle_w * m.harmonic_values(d))).sum(axis=1)
                for d in v.degrees
            }
        for d in v.degrees:
            f = v.mode(d)
            grads[d] = (
                2.0 * m.h * (m.spectral_neg_laplacian(f) + m.params.tau(d) * f)
                - m.c_inv * lp1_sq_factor * grad_lp1[d]
            )
        return grads


def _build_start(model: CylinderModel, config: MinimizeConfig) -> tuple[CylinderFunction, str]:
    kind = config.start[0]
    params = model.params
    if kind == "gap":
        eps = float(config.start[1])
        region = classify(params).region
        if region == RegionClass.REMAINING:
            bump = model.rho10_function()
            label = f"gap-perturbation rho10 eps={eps}"
        else:
            bump = model.rho02_function()
            label = f"gap-perturbation rho02 eps={eps}"
        norm = math.sqrt(model.h1_inner(bump, bump))
        v = combine([1.0, eps * math.sqrt(model.energy_psi) / norm], [model.psi_function(), bump])
        return v, label
    if kind == "two_bubble":
        s = float(config.start[1])
        return model.two_bubble(s), f"two-bubble s={s:.4g}"
    if kind == "random":
        seed = int(config.start[1])
        noise = model.random_mperp(
            seed, config.random_amplitude * math.sqrt(model.energy_psi), config.modes
        )
        return combine([1.0, 1.0], [model.psi_function(), noise]), f"random seed={seed}"
    raise ValueError(f"unknown start recipe {kind!r}")


def _normalize(model: CylinderModel, v: CylinderFunction) -> CylinderFunction:
    return scale(v, 1.0 / model.lp1_norm(v))


def quotient(v: CylinderFunction, grid: GridSpec | None = None) -> QuotientReport:
    """Evaluate the quotient at one function.

    Raises OnManifold when the distance is numerically zero relative to the
    function's energy.
    """
    model = model_for(v.params, grid if grid is not None else v.grid)
    objective = _Objective(model)
    value, projection = objective.value(v)
    return QuotientReport(
        value=value,
        distance_sq=projection.distance_sq,
        shift=projection.shift,
        bounds=bounds_report(v.params),
        iterations=0,
        gradient_norm=math.nan,
        trace=((0, value),),
    )


def minimize_quotient(
    config: MinimizeConfig,
    params: CknParams,
    grid: GridSpec | None = None,
    start_function: CylinderFunction | None = None,
) -> QuotientReport:
    """Backtracking gradient descent on Q with the L^{p+1} normalization.

    Steps that collapse onto the manifold guard are rejected with the step
    halved; the search terminates at the gradient tolerance or the iteration
    cap and returns the best quotient seen.  ``start_function`` overrides the
    configured start recipe with an explicit iterate.
    """
    model = model_for(params, grid)
    objective = _Objective(model)
    if start_function is not None:
        v, label = start_function, "explicit"
    else:
        v, label = _build_start(model, config)
    v = _normalize(model, v)
    best_q, projection = objective.value(v)
    trace = [(0, best_q)]
    best_report = (best_q, projection)
    step = config.initial_step
    grad_norm = math.nan
    iterations = 0
    for iteration in range(1, config.max_iterations + 1):
        grads, q, projection = objective.gradient(v)
        grad_norm = math.sqrt(
            sum(model.h * float(np.dot(g, g)) for g in grads.values())
        )
        if grad_norm <= config.gradient_tol * max(1.0, abs(q)):
            break
        direction = model.function({d: -g for d, g in grads.items()})
        accepted = False
        alpha = step
        for _ in range(30):
            candidate = _normalize(model, combine([1.0, alpha], [v, direction]))
            h1_cand = model.h1_inner(candidate, candidate)
            cand_proj = model.distance_to_manifold(candidate)
            if cand_proj.distance_sq < config.projection_tol * h1_cand:
                alpha *= 0.5  # re-project away from the manifold
                continue
            lp1_cand = model.lp1_pow(candidate) ** (2.0 / (params.p + 1.0))
            q_cand = (h1_cand - model.c_inv * lp1_cand) / cand_proj.distance_sq
            if q_cand <= q - 1e-12 * abs(q):
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            if iteration == 1:
                raise NoDescent("line search failed at the first iterate")
            break
        v = candidate
        step = min(config.initial_step, 2.0 * alpha)
        iterations = iteration
        trace.append((iteration, q_cand))
        if q_cand < best_report[0]:
            best_report = (q_cand, cand_proj)
    value, projection = best_report
    return QuotientReport(
        value=value,
        distance_sq=projection.distance_sq,
        shift=projection.shift,
        bounds=bounds_report(params),
        iterations=iterations,
        gradient_norm=grad_norm,
        trace=tuple(trace),
        start=label,
    )


def estimate_cbe(
    params: CknParams,
    starts: int = 2,
    seed: int = 0,
    grid: GridSpec | None = None,
    max_iterations: int = 60,
) -> QuotientReport:
    """Multi-start quotient minimization; returns the best report.

    The recipe set follows the start menu: three gap-perturbation sizes, two
    bubble separations, and ``starts`` seeded random perturbations.  The exit
    value must respect 0 < Q <= min(gap bound, two-bubble bound) + 1e-3 or a
    NumericalFailure is raised.
    """
    gamma = params.gamma
    recipes: list[tuple] = [
        ("gap", 0.02),
        ("gap", 0.05),
        ("gap", 0.1),
        ("two_bubble", 8.0 / gamma),
        ("two_bubble", 10.0 / gamma),
    ]
    recipes += [("random", seed + k) for k in range(starts)]
    best: QuotientReport | None = None
    for recipe in recipes:
        config = MinimizeConfig(start=recipe, max_iterations=max_iterations)
        try:
            report = minimize_quotient(config, params, grid)
        except (NoDescent, OnManifold):
            continue
        if best is None or report.value < best.value:
            best = report
    if best is None:
        raise NumericalFailure("no start produced a usable minimization")
    bounds = best.bounds
    ceiling = min(bounds.bound_gap, bounds.bound_two_bubble) + 1e-3
    if not 0.0 < best.value <= ceiling:
        raise NumericalFailure(
            f"best quotient {best.value} escaped its bound {ceiling}"
        )
    return best
