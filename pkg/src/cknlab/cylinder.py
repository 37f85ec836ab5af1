"""Discretized functions on the cylinder and the distance to the bubble manifold.

Functions are stored mode-wise: a zonal function v(t, theta) is a finite sum
of axis profiles multiplying L2-orthonormal zonal spherical harmonics.  With
that convention the H1 form decouples,

    |v|_H1^2 = sum_i  int (f_i')^2 + tau_i f_i^2 dt.

Axis derivatives are spectral (FFT on the periodic extension; every profile
in scope decays far below roundoff at the walls), so the quadratic form is
exact to machine precision for smooth profiles while remaining an explicit
quadratic in the samples with an exact gradient.  The L^{p+1} norm needs a
genuine 2D quadrature (uniform rule along the axis, Gauss-Jacobi in the polar
angle).

The squared distance to the manifold of scaled, translated bubbles is

    dist^2(v) = |v|_H1^2 - kappa * sup_s <v, Psi_s^p>_L2^2,

with the constant kappa fixed so that the distance of the bubble itself is
exactly zero.  All constants used by the distance and quotient evaluations
are calibrated on the same grid (the discrete model is a legitimate
variational problem in its own right), which keeps the near-manifold
cancellations clean to machine precision instead of discretization order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import roots_jacobi

from .eig_oracle import GridSpec, default_grid
from .extremals import psi, psi_prime
from .params import CknParams
from .spectrum import rho_02, rho_10_profile
from .specfun import sphere_area

__all__ = [
    "CylinderFunction",
    "CylinderModel",
    "GridMismatch",
    "ManifoldProjection",
    "SearchFailure",
    "combine",
    "scale",
]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class GridMismatch(ValueError):
    """Operands live on different grids or parameter points."""


class SearchFailure(RuntimeError):
    """The shift search for the manifold projection did not converge."""


@dataclass(frozen=True)
class CylinderFunction:
    """Mode-truncated zonal function: profiles against orthonormal harmonics.

    ``derivs`` carries the spectral axis derivative of each profile; linear
    operations propagate it so the H1 form never re-differentiates.
    """

    params: CknParams
    grid: GridSpec
    modes: tuple[tuple[int, np.ndarray], ...]
    derivs: tuple[tuple[int, np.ndarray], ...]

    def __post_init__(self) -> None:
        degrees = [d for d, _ in self.modes]
        if degrees != sorted(set(degrees)):
            raise ValueError("modes must be sorted by degree and unique")
        if [d for d, _ in self.derivs] != degrees:
            raise ValueError("derivative table must mirror the mode table")
        for _, values in self.modes + self.derivs:
            values.setflags(write=False)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.modes)

    def mode(self, degree: int) -> np.ndarray:
        for d, values in self.modes:
            if d == degree:
                return values
        return np.zeros(self.grid.nodes)

    def deriv(self, degree: int) -> np.ndarray:
        for d, values in self.derivs:
            if d == degree:
                return values
        return np.zeros(self.grid.nodes)


def scale(v: CylinderFunction, c: float) -> CylinderFunction:
    return replace(
        v,
        modes=tuple((d, c * values) for d, values in v.modes),
        derivs=tuple((d, c * values) for d, values in v.derivs),
    )


def combine(coeffs, funcs) -> CylinderFunction:
    """Linear combination sum_k coeffs[k] * funcs[k]."""
    first = funcs[0]
    for f in funcs[1:]:
        if f.grid != first.grid or f.params != first.params:
            raise GridMismatch("cannot combine functions from different models")
    degrees = sorted({d for f in funcs for d in f.degrees})
    modes = []
    derivs = []
    for d in degrees:
        acc = np.zeros(first.grid.nodes)
        acc_d = np.zeros(first.grid.nodes)
        for c, f in zip(coeffs, funcs):
            acc = acc + c * f.mode(d)
            acc_d = acc_d + c * f.deriv(d)
        modes.append((d, acc))
        derivs.append((d, acc_d))
    return CylinderFunction(
        params=first.params, grid=first.grid, modes=tuple(modes), derivs=tuple(derivs)
    )


@dataclass(frozen=True)
class ManifoldProjection:
    """Projection of a function onto the bubble manifold."""

    shift: float
    scalar: float
    overlap: float
    distance_sq: float
    edge_attained: bool
    scan_shifts: np.ndarray
    scan_values: np.ndarray


@lru_cache(maxsize=32)
def _angle_rule(n_dim: int, n_nodes: int):
    # integral over S^(N-1) of a zonal function g(cos phi):
    # |S^(N-2)| * sum w_m g(x_m) with weight (1-x^2)^((N-3)/2)
    alpha = (n_dim - 3) / 2.0
    x, w = roots_jacobi(n_nodes, alpha, alpha)
    prefactor = sphere_area(n_dim - 1) if n_dim >= 3 else 2.0
    return x, w, prefactor


class CylinderModel:
    """Grid, quadrature rules, and calibrated constants for one parameter point."""

    def __init__(self, params: CknParams, grid: GridSpec | None = None, angle_nodes: int = 64):
        self.params = params
        self.grid = grid if grid is not None else default_grid(params)
        self.angle_nodes = angle_nodes
        self.t = self.grid.t()
        self.h = self.grid.spacing
        self.area = sphere_area(params.N)
        self.sqrt_area = math.sqrt(self.area)
        self.angle_x, self.angle_w, self.angle_prefactor = _angle_rule(params.N, angle_nodes)
        self._harmonics: dict[int, np.ndarray] = {}

        # spectral differentiation wavenumbers (Nyquist zeroed keeps D real
        # and antisymmetric, hence D^T D = -D^2)
        n = self.grid.nodes
        self.omega = 2.0 * math.pi * np.fft.rfftfreq(n, d=self.h)
        if n % 2 == 0:
            self.omega[-1] = 0.0

        self.psi_values = psi(params, self.t)
        self.psi_prime_values = psi_prime(params, self.t)
        self.psi_pow_values = self.psi_values**params.p
        p = params.p
        # calibrated constants: the grid problem reproduces the variational
        # identities exactly, so the bubble itself is at distance zero
        self.lp1_pow_psi = self.area * self.h * float(np.sum(self.psi_values ** (p + 1.0)))
        self.energy_psi = self.h1_inner(self.psi_function(), self.psi_function())
        self.c_inv = self.energy_psi / self.lp1_pow_psi ** (2.0 / (p + 1.0))
        self.kappa = self.energy_psi / self.lp1_pow_psi**2

    def spectral_derivative(self, f: np.ndarray) -> np.ndarray:
        return np.fft.irfft(1j * self.omega * np.fft.rfft(f), n=self.grid.nodes)

    def spectral_neg_laplacian(self, f: np.ndarray) -> np.ndarray:
        """D^T D f, the gradient kernel of the derivative part of the H1 form."""
        return np.fft.irfft(self.omega**2 * np.fft.rfft(f), n=self.grid.nodes)

    # ------------------------------------------------------------------
    # harmonics
    def harmonic_values(self, degree: int) -> np.ndarray:
        """Orthonormal zonal harmonic of the given degree at the angle nodes."""
        if degree not in self._harmonics:
            x = self.angle_x
            if degree == 0:
                raw = np.ones_like(x)
            elif self.params.N == 2:
                raw = np.cos(degree * np.arccos(np.clip(x, -1.0, 1.0)))
            else:
                from scipy.special import eval_gegenbauer

                raw = eval_gegenbauer(degree, (self.params.N - 2) / 2.0, x)
            norm_sq = self.angle_prefactor * float(np.dot(self.angle_w, raw * raw))
            self._harmonics[degree] = raw / math.sqrt(norm_sq)
        return self._harmonics[degree]

    # ------------------------------------------------------------------
    # builders
    def _check(self, v: CylinderFunction) -> None:
        if v.grid != self.grid or v.params != self.params:
            raise GridMismatch("function does not belong to this model")

    def function(self, modes: dict[int, np.ndarray]) -> CylinderFunction:
        items = tuple((d, np.array(modes[d], dtype=float)) for d in sorted(modes))
        derivs = tuple((d, self.spectral_derivative(f)) for d, f in items)
        return CylinderFunction(
            params=self.params, grid=self.grid, modes=items, derivs=derivs
        )

    def psi_function(self, shift: float = 0.0, scalar: float = 1.0) -> CylinderFunction:
        values = self.psi_values if shift == 0.0 else psi(self.params, self.t - shift)
        return self.function({0: scalar * self.sqrt_area * values})

    def psi_prime_function(self) -> CylinderFunction:
        return self.function({0: self.sqrt_area * self.psi_prime_values})

    def rho02_function(self) -> CylinderFunction:
        return self.function({0: self.sqrt_area * rho_02(self.params, self.t)})

    def rho10_function(self) -> CylinderFunction:
        # raw coordinate harmonic theta_N = sqrt(|S|/N) * (orthonormal Y_1)
        coeff = math.sqrt(self.area / self.params.N)
        return self.function({1: coeff * rho_10_profile(self.params, self.t)})

    def two_bubble(self, s: float) -> CylinderFunction:
        if s >= self.grid.half_width:
            raise ValueError("second bubble does not fit the grid")
        values = self.psi_values + psi(self.params, self.t - s)
        return self.function({0: self.sqrt_area * values})

    def random_mperp(
        self, seed: int, amplitude: float = 1.0, degrees: tuple[int, ...] = (0, 1)
    ) -> CylinderFunction:
        """Smooth random function in the orthogonal complement of the soft modes."""
        rng = np.random.default_rng(seed)
        envelope = np.exp(-((self.t / (self.grid.half_width / 3.0)) ** 2))
        modes = {}
        for degree in degrees:
            coeffs = rng.standard_normal(8)
            waves = np.stack(
                [np.cos((k + 1) * math.pi * self.t / self.grid.half_width) for k in range(8)]
            )
            modes[degree] = envelope * (coeffs @ waves)
        noise = self.function(modes)
        noise = self.project_mperp(noise)
        norm = math.sqrt(self.h1_inner(noise, noise))
        return scale(noise, amplitude / norm)

    # ------------------------------------------------------------------
    # norms and inner products
    def h1_inner(self, u: CylinderFunction, v: CylinderFunction) -> float:
        """Discrete H1 inner product (spectral derivatives, uniform rule)."""
        self._check(u)
        self._check(v)
        total = 0.0
        for d in sorted(set(u.degrees) | set(v.degrees)):
            tau = self.params.tau(d)
            total += self.h * float(np.dot(u.deriv(d), v.deriv(d)))
            total += tau * self.h * float(np.dot(u.mode(d), v.mode(d)))
        return total

    def l2_inner(self, u: CylinderFunction, v: CylinderFunction) -> float:
        self._check(u)
        self._check(v)
        total = 0.0
        for d in sorted(set(u.degrees) | set(v.degrees)):
            total += self.h * float(np.dot(u.mode(d), v.mode(d)))
        return total

    def lp1_pow(self, v: CylinderFunction) -> float:
        """int |v|^(p+1) over the cylinder."""
        self._check(v)
        p = self.params.p
        if v.degrees == (0,):
            f0 = v.mode(0)
            return self.area ** (1.0 - (p + 1.0) / 2.0) * self.h * float(
                np.sum(np.abs(f0) ** (p + 1.0))
            )
        values = self._sample(v)
        axis = np.abs(values) ** (p + 1.0)
        return self.angle_prefactor * self.h * float(np.sum(axis @ self.angle_w))

    def lp1_norm(self, v: CylinderFunction) -> float:
        return self.lp1_pow(v) ** (1.0 / (self.params.p + 1.0))

    def _sample(self, v: CylinderFunction) -> np.ndarray:
        """Values v(t_k, phi_m) on the tensor grid."""
        out = np.zeros((self.grid.nodes, self.angle_nodes))
        for d, f in v.modes:
            out += np.outer(f, self.harmonic_values(d))
        return out

    # ------------------------------------------------------------------
    # manifold machinery
    def overlap(self, v: CylinderFunction, s: float) -> float:
        """<v, Psi_s^p> over the cylinder; only the radial mode contributes."""
        self._check(v)
        shifted_pow = psi(self.params, self.t - s) ** self.params.p
        return self.sqrt_area * self.h * float(np.dot(v.mode(0), shifted_pow))

    def _overlap_scan(self, v: CylinderFunction) -> tuple[np.ndarray, np.ndarray]:
        """Overlap at every grid shift inside the search window |s| <= T/2."""
        corr = fftconvolve(v.mode(0), self.psi_pow_values[::-1])
        n = self.grid.nodes
        j_max = (n - 1) // 4
        j = np.arange(-j_max, j_max + 1)
        shifts = j * self.h
        values = self.sqrt_area * self.h * corr[n - 1 + j]
        return shifts, values

    def distance_to_manifold(self, v: CylinderFunction) -> ManifoldProjection:
        """Squared distance to the manifold of scaled, shifted bubbles.

        A full correlation scan over grid shifts locates the global maximum of
        the squared overlap; golden-section refinement then resolves the
        maximizing shift to 1e-10.
        """
        self._check(v)
        shifts, values = self._overlap_scan(v)
        sq = values * values
        best = int(np.argmax(sq))
        edge = best <= 1 or best >= len(shifts) - 2
        lo = shifts[max(best - 1, 0)]
        hi = shifts[min(best + 1, len(shifts) - 1)]

        def objective(s: float) -> float:
            ov = self.overlap(v, s)
            return ov * ov

        a, b = lo, hi
        fa_x = a + (1.0 - GOLDEN) * (b - a)
        fb_x = a + GOLDEN * (b - a)
        fa, fb = objective(fa_x), objective(fb_x)
        iterations = 0
        while b - a > 1e-10 and iterations < 200:
            if fa < fb:
                a, fa_x, fa = fa_x, fb_x, fb
                fb_x = a + GOLDEN * (b - a)
                fb = objective(fb_x)
            else:
                b, fb_x, fb = fb_x, fa_x, fa
                fa_x = a + (1.0 - GOLDEN) * (b - a)
                fa = objective(fa_x)
            iterations += 1
        if iterations >= 200:
            raise SearchFailure("shift refinement did not converge")
        s_star = 0.5 * (a + b)
        ov = self.overlap(v, s_star)
        h1_sq = self.h1_inner(v, v)
        dist_sq = h1_sq - self.kappa * ov * ov
        scalar = ov / self.lp1_pow_psi
        stride = max(1, len(shifts) // 256)
        return ManifoldProjection(
            shift=s_star,
            scalar=scalar,
            overlap=ov,
            distance_sq=dist_sq,
            edge_attained=bool(edge),
            scan_shifts=shifts[::stride],
            scan_values=values[::stride],
        )

    def project_mperp(self, v: CylinderFunction) -> CylinderFunction:
        """Remove the H1 projections onto the bubble and its derivative."""
        self._check(v)
        psi_f = self.psi_function()
        psi_prime_f = self.psi_prime_function()
        c1 = self.h1_inner(v, psi_f) / self.h1_inner(psi_f, psi_f)
        c2 = self.h1_inner(v, psi_prime_f) / self.h1_inner(psi_prime_f, psi_prime_f)
        return combine([1.0, -c1, -c2], [v, psi_f, psi_prime_f])


@lru_cache(maxsize=8)
def model_for(params: CknParams, grid: GridSpec | None = None, angle_nodes: int = 64) -> CylinderModel:
    """Shared model cache keyed by parameter point and grid."""
    return CylinderModel(params, grid, angle_nodes)
