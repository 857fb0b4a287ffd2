"""Parameter containers and validity rules for the fractional birth-death model.

The process carries a birth rate ``lam``, death rate ``mu`` and four
fractional parameters ``(alpha, beta, gamma, rho)``. Whenever ``gamma != 0``
the admissibility condition

    |rho*ceil(gamma)/gamma - j*alpha| < 1   for j = 0, ..., ceil(gamma)

must hold; the strict two-sided version (all those quantities in (0, 1)) is
additionally required for the subordinator-composition simulator and is
exposed as :meth:`ProcessParams.is_simulable`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError

#: relative |lam - mu| threshold under which the process is treated as critical
NEAR_CRITICAL_REL = 1e-8


class RateRegime(enum.Enum):
    EQUAL = "equal"
    BIRTH_BELOW_DEATH = "birth_below_death"
    BIRTH_ABOVE_DEATH = "birth_above_death"


@dataclass(frozen=True)
class ProcessParams:
    """Full parameter tuple (lam, mu, alpha, beta, gamma, rho)."""

    lam: float
    mu: float
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 0.0
    rho: float = 1.0

    def __post_init__(self):
        for name in ("lam", "mu", "alpha", "beta", "gamma", "rho"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
        if self.lam <= 0:
            raise DomainError(f"lam must be > 0, got {self.lam}")
        if self.mu < 0:
            raise DomainError(f"mu must be >= 0, got {self.mu}")
        if not 0 < self.alpha <= 1:
            raise DomainError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.beta <= 0:
            raise DomainError(f"beta must be > 0, got {self.beta}")
        if self.gamma < 0:
            raise DomainError(f"gamma must be >= 0, got {self.gamma}")
        if not 0 < self.rho <= 1:
            raise DomainError(f"rho must be in (0, 1], got {self.rho}")
        if self.gamma != 0:
            for j, idx in enumerate(self.composition_indices()):
                if not abs(idx) < 1:
                    raise DomainError(
                        "inadmissible fractional parameters: "
                        f"|rho*ceil(gamma)/gamma - {j}*alpha| = {abs(idx):g} >= 1"
                    )

    @property
    def ceil_gamma(self) -> int:
        return math.ceil(self.gamma)

    def composition_indices(self) -> list[float]:
        """Stable indices rho*ceil(gamma)/gamma - j*alpha, j = 0..ceil(gamma)."""
        if self.gamma == 0:
            return [self.rho]
        m = self.ceil_gamma
        base = self.rho * m / self.gamma
        return [base - j * self.alpha for j in range(m + 1)]

    def is_simulable(self) -> bool:
        """True when the composed-subordinator sampler applies.

        gamma = 0 is always simulable (a single stable clock, degenerate at
        rho = 1); otherwise every composition index must lie strictly in (0, 1).
        """
        if self.gamma == 0:
            return True
        return all(0 < idx < 1 for idx in self.composition_indices())

    @property
    def regime(self) -> RateRegime:
        if abs(self.lam - self.mu) < NEAR_CRITICAL_REL * (self.lam + self.mu):
            return RateRegime.EQUAL
        return (
            RateRegime.BIRTH_BELOW_DEATH
            if self.lam < self.mu
            else RateRegime.BIRTH_ABOVE_DEATH
        )


@dataclass(frozen=True)
class GeneticParams:
    """Bounded two-type model: states 0..M, birth rate (M-n)*lam, death rate n*mu.

    ``rho`` is the order of the inverse-stable clock used by the time-changed
    variant (rho = 1 recovers the ordinary Markov model).
    """

    M: int
    n0: int
    lam: float
    mu: float
    rho: float = 1.0

    def __post_init__(self):
        if self.M <= 0 or self.M % 2 != 0:
            raise DomainError(f"M must be a positive even integer, got {self.M}")
        if not 0 < self.n0 < self.M:
            raise DomainError(f"n0 must satisfy 0 < n0 < M, got {self.n0}")
        if self.lam <= 0 or self.mu <= 0:
            raise DomainError("lam and mu must be > 0")
        if not 0 < self.rho <= 1:
            raise DomainError(f"rho must be in (0, 1], got {self.rho}")
