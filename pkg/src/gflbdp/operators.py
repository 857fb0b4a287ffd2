"""Prabhakar integral and regularized derivative applied to sampled functions.

Both operators convolve against a kernel that is weakly singular at the upper
endpoint: (t-s)^(rho-1) for the integral and (t-s)^(-rho) for the derivative.
In each case the power-law factor is absorbed into the quadrature variable by
substituting v = (t-s)^p with the matching exponent p, after which adaptive
quadrature sees a bounded integrand. One mechanism therefore covers both
exponent families.

The derivative kernel carries the three-parameter Mittag-Leffler function with
a negative upper index and argument -beta (t-s)^alpha; the sign of the
argument is pinned by the operator's Laplace transform
w^rho (1 + beta w^(-alpha))^gamma F(w) - w^(rho-1) (...) f(0), which the
governing-equation tests exercise directly.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, QuadratureError
from .params import ProcessParams
from .special import _ml3_core


class Interpolation(enum.Enum):
    LINEAR = "linear"
    CUBIC_MONOTONE = "cubic-monotone"


@dataclass(frozen=True)
class PrabhakarIntegralParams:
    """Primed kernel parameters of the process integral."""

    alpha_p: float
    rho_p: float
    beta_p: float
    gamma_p: float

    def __post_init__(self):
        if not 0 < self.alpha_p <= 1:
            raise DomainError(f"alpha_p must be in (0, 1], got {self.alpha_p}")
        if not 0 < self.rho_p <= 1:
            raise DomainError(f"rho_p must be in (0, 1], got {self.rho_p}")
        if self.beta_p <= 0:
            raise DomainError(f"beta_p must be > 0, got {self.beta_p}")
        if self.gamma_p < 0:
            raise DomainError(f"gamma_p must be >= 0, got {self.gamma_p}")


@dataclass
class SampledFunction:
    """A function known on a strictly increasing grid starting at 0."""

    grid: np.ndarray
    values: np.ndarray
    interpolation: Interpolation = Interpolation.CUBIC_MONOTONE
    _interp: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise DomainError("grid and values must be 1-d arrays of equal length")
        if len(self.grid) < 2:
            raise DomainError("need at least two samples")
        if not np.all(np.diff(self.grid) > 0):
            raise DomainError("grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("values must be finite")

    @property
    def t_max(self) -> float:
        return float(self.grid[-1])

    def _interpolant(self):
        if self._interp is None:
            if self.interpolation is Interpolation.CUBIC_MONOTONE:
                p = PchipInterpolator(self.grid, self.values, extrapolate=False)
                self._interp = (p, p.derivative())
            else:
                self._interp = ("linear", None)
        return self._interp

    def value(self, t):
        self._check(t)
        p, _ = self._interpolant()
        if p == "linear":
            return float(np.interp(t, self.grid, self.values))
        return float(p(t))

    def derivative(self, t):
        self._check(t)
        p, dp = self._interpolant()
        if p == "linear":
            i = np.clip(np.searchsorted(self.grid, t, side="right") - 1, 0, len(self.grid) - 2)
            return float(
                (self.values[i + 1] - self.values[i]) / (self.grid[i + 1] - self.grid[i])
            )
        return float(dp(t))

    def _check(self, t):
        if not self.grid[0] <= t <= self.t_max:
            raise DomainError(f"t={t} outside sampled support [{self.grid[0]}, {self.t_max}]")


def geometric_grid(t_max: float, n: int = 400, t_min_frac: float = 1e-6) -> np.ndarray:
    """Grid of n+1 points on [0, t_max], geometric near 0 where singular
    kernels concentrate their error."""
    g = np.geomspace(t_min_frac * t_max, t_max, n)
    return np.concatenate(([0.0], g))


def _quad_singular(fn, upper, epsrel=1e-9, epsabs=1e-12, limit=200):
    with warnings.catch_warnings():
        # roundoff warnings are expected near interpolant cusps; the achieved
        # error is inspected below instead
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(fn, 0.0, upper, epsabs=epsabs, epsrel=epsrel, limit=limit)
    if not math.isfinite(val):
        raise QuadratureError("singular-kernel quadrature returned non-finite value")
    if err > max(1e-6, 1e-4 * abs(val)):
        raise QuadratureError(
            f"singular-kernel quadrature stalled (error {err:.3e})", achieved=err
        )
    return val


def prabhakar_integral_apply(g: SampledFunction, p, t: float, tol: float = 1e-9) -> float:
    """integral_0^t (t-s)^(rho-1) E^gamma_{alpha,rho}(beta (t-s)^alpha) g(s) ds.

    ``p`` may be a :class:`PrabhakarIntegralParams` or any object with
    alpha/rho/beta/gamma attributes (``ProcessParams`` works).
    """
    alpha, rho, beta, gamma = _kernel_fields(p)
    if t <= 0 or t > g.t_max:
        raise DomainError(f"t={t} outside (0, {g.t_max}]")
    # v = (t - s)^rho turns the (t-s)^(rho-1) weight into dv/rho
    def fn(v):
        u = v ** (1.0 / rho)  # = t - s
        kern, _ = _ml3_core(alpha, rho, gamma, beta * u**alpha, 1e-12)
        return kern * g.value(t - u) / rho

    return _quad_singular(fn, t**rho, epsrel=tol)


def rhp_derivative_apply(f: SampledFunction, params: ProcessParams, t: float,
                         tol: float = 1e-9) -> float:
    """Regularized derivative: the Mittag-Leffler kernel with upper index
    -gamma and argument -beta (t-s)^alpha convolved against f'.

    Reduces to the plain derivative at gamma = 0, rho = 1 and to the Caputo
    derivative at gamma = 0.
    """
    alpha, rho, beta, gamma = params.alpha, params.rho, params.beta, params.gamma
    if t <= 0 or t > f.t_max:
        raise DomainError(f"t={t} outside (0, {f.t_max}]")
    if rho == 1.0:
        if gamma == 0.0:
            return f.derivative(t)
        # kernel (t-s)^(-1) E^{-gamma}_{alpha,0}(-beta (t-s)^alpha); its k=0
        # term vanishes (1/Gamma(0) = 0) leaving an (alpha-1)-type singularity
        def fn0(v):
            u = v ** (1.0 / alpha)
            kern, _ = _ml3_core(alpha, 0.0, -gamma, -beta * v, 1e-12,
                                allow_nonpositive_beta=True)
            return kern / v * f.derivative(t - u) / alpha

        return _quad_singular(fn0, t**alpha, epsrel=tol)

    q = 1.0 - rho

    def fn(v):
        u = v ** (1.0 / q)  # = t - s
        kern, _ = _ml3_core(alpha, q, -gamma, -beta * u**alpha, 1e-12,
                            allow_nonpositive_beta=True)
        return kern * f.derivative(t - u) / q

    return _quad_singular(fn, t**q, epsrel=tol)


def caputo_derivative_apply(f: SampledFunction, rho: float, t: float,
                            tol: float = 1e-9) -> float:
    """Caputo derivative of order rho in (0, 1]: kernel (t-s)^(-rho)/Gamma(1-rho)."""
    if not 0 < rho <= 1:
        raise DomainError(f"rho must be in (0, 1], got {rho}")
    if t <= 0 or t > f.t_max:
        raise DomainError(f"t={t} outside (0, {f.t_max}]")
    if rho == 1.0:
        return f.derivative(t)
    q = 1.0 - rho
    scale = 1.0 / (q * math.gamma(q))

    def fn(v):
        return scale * f.derivative(t - v ** (1.0 / q))

    return _quad_singular(fn, t**q, epsrel=tol)


def _kernel_fields(p):
    if isinstance(p, PrabhakarIntegralParams):
        return p.alpha_p, p.rho_p, p.beta_p, p.gamma_p
    return p.alpha, p.rho, p.beta, p.gamma
