"""Bounded two-type population model under an inverse-stable clock.

States n = 0..M count type-H individuals; the transition rates are
lam_n = (M - n) lam and mu_n = n mu, so neither boundary kills the dynamics
(lam_0 = M lam > 0, mu_M = M mu > 0). The time-changed mean, the running
average of type-H counts and the mean of the randomly-stopped path integral
all come out in closed form through E_{rho,1} and E_{rho,2}.
"""

from __future__ import annotations

import math

from .errors import DomainError
from .params import GeneticParams
from .special import ml_one, ml_two


def genetic_mean(gp: GeneticParams, t: float) -> float:
    """E of the type-H count at time t:

        n0 E_{rho,1}(-(lam+mu) t^rho) + M lam/(lam+mu) (1 - E_{rho,1}(...)).

    Starts at n0 and relaxes to the balance point M lam/(lam+mu).
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t == 0:
        return float(gp.n0)
    c = gp.lam + gp.mu
    e = ml_one(gp.rho, -c * t**gp.rho)
    limit = gp.M * gp.lam / c
    return gp.n0 * e + limit * (1.0 - e)


def genetic_avg_type_h(gp: GeneticParams, t: float) -> float:
    """Average type-H head count over [0, t]: t^{-1} integral of the mean,

        (n0 - M lam/(lam+mu)) E_{rho,2}(-(lam+mu) t^rho) + M lam/(lam+mu).
    """
    if t <= 0:
        raise DomainError(f"t must be > 0, got {t}")
    c = gp.lam + gp.mu
    limit = gp.M * gp.lam / c
    return (gp.n0 - limit) * ml_two(gp.rho, -c * t**gp.rho) + limit


def genetic_avg_type_h_asymptotic(gp: GeneticParams, t: float) -> float:
    """Large-t approximation of :func:`genetic_avg_type_h`:

        (n0 - M lam/(lam+mu)) / (Gamma(2-rho) (lam+mu) t^rho) + M lam/(lam+mu).
    """
    if t <= 0:
        raise DomainError(f"t must be > 0, got {t}")
    c = gp.lam + gp.mu
    limit = gp.M * gp.lam / c
    return (gp.n0 - limit) / (math.gamma(2.0 - gp.rho) * c * t**gp.rho) + limit


def genetic_time_changed_path_integral_mean(gp: GeneticParams, t: float) -> float:
    """Mean of the path integral taken at the random clock time:

        (n0 - M lam/(lam+mu))/(lam+mu) (1 - E_{rho,1}(-(lam+mu) t^rho))
        + M lam t^rho / ((lam+mu) Gamma(rho+1)).

    At rho = 1 this equals the plain time integral of :func:`genetic_mean`.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t == 0:
        return 0.0
    c = gp.lam + gp.mu
    limit = gp.M * gp.lam / c
    e = ml_one(gp.rho, -c * t**gp.rho)
    return (gp.n0 - limit) / c * (1.0 - e) + limit * t**gp.rho / math.gamma(gp.rho + 1.0)
