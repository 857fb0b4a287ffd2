"""Three-parameter Mittag-Leffler function and gamma/Pochhammer support.

The series

    E^g_{a,b}(x) = sum_k (g)_k x^k / (Gamma(k a + b) k!)

is summed with signed log-domain terms and Neumaier-compensated accumulation.
Truncation stops after three consecutive terms that are both small (relative
to max(1, |partial sum|)) and non-increasing; a single small term is not
trusted because alternating series develop an interior hump. When the
argument is a large negative number the alternating series loses all double
precision long before it truncates, so evaluation switches to the power-law
expansion around -infinity with optimal truncation. If neither route is
reliable, a :class:`~gflbdp.errors.SeriesDivergenceError` carries the largest
term magnitude seen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, SeriesDivergenceError

#: hard cap on series terms (bounds worst-case latency)
DEFAULT_TERM_CAP = 10_000

_EPS = 2.220446049250313e-16
#: below this magnitude of a negative argument the power-law expansion is
#: never preferred over the series
_ASYM_MIN_ABS_X = 4.0
#: worst acceptable relative error estimate before giving up entirely
_MAX_REL_ESTIMATE = 1e-3


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0, relative error <= 1e-13 on [1e-3, 1e3]."""
    if not math.isfinite(x) or x <= 0:
        raise DomainError(f"log_gamma requires finite x > 0, got {x!r}")
    return math.lgamma(x)


def _signed_rgamma(y: float) -> tuple[float, float]:
    """(log|1/Gamma(y)|, sign) for any real y; poles give (-inf, 0)."""
    if y > 0:
        return -math.lgamma(y), 1.0
    if y == math.floor(y):  # pole of Gamma at 0, -1, -2, ...
        return -math.inf, 0.0
    s = math.sin(math.pi * y)
    return math.log(abs(s)) + math.lgamma(1.0 - y) - math.log(math.pi), math.copysign(1.0, s)


def log_pochhammer(a: float, k: int) -> tuple[float, float]:
    """(log|(a)_k|, sign) for any real a; an exact zero factor gives (-inf, 0)."""
    if k < 0:
        raise DomainError(f"pochhammer order must be >= 0, got {k}")
    if k == 0:
        return 0.0, 1.0
    if a > 0:
        return math.lgamma(a + k) - math.lgamma(a), 1.0
    lg, sg = 0.0, 1.0
    for j in range(k):
        f = a + j
        if f == 0.0:
            return -math.inf, 0.0
        lg += math.log(abs(f))
        sg *= math.copysign(1.0, f)
    return lg, sg


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1."""
    if not math.isfinite(a) or a < 0:
        raise DomainError(f"pochhammer requires finite a >= 0, got {a!r}")
    if k < 0:
        raise DomainError(f"pochhammer order must be >= 0, got {k}")
    if k <= 30 and a + k < 1e9:  # exact for small integer-valued cases
        out = 1.0
        for j in range(k):
            out *= a + j
        return out
    lg, sg = log_pochhammer(a, k)
    if sg == 0.0:
        return 0.0
    return sg * math.exp(lg)


@dataclass(frozen=True)
class MLArgs:
    """Arguments of the three-parameter Mittag-Leffler function."""

    alpha: float
    beta_ml: float
    gamma_ml: float
    x: float
    tol: float = 1e-10

    def __post_init__(self):
        for name in ("alpha", "beta_ml", "gamma_ml", "x", "tol"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
        if self.alpha <= 0:
            raise DomainError(f"alpha must be > 0, got {self.alpha}")
        if self.beta_ml <= 0:
            raise DomainError(f"beta_ml must be > 0, got {self.beta_ml}")
        if self.gamma_ml < 0:
            raise DomainError(f"gamma_ml must be >= 0, got {self.gamma_ml}")
        if self.tol <= 0:
            raise DomainError(f"tol must be > 0, got {self.tol}")


@dataclass
class MLInfo:
    """Evaluation diagnostics: which route ran and how it truncated."""

    method: str = "series"
    terms_used: int = 0
    last_term: float = 0.0
    max_term: float = 0.0
    error_estimate: float = math.inf
    completed: bool = False


class _Neumaier:
    """Compensated accumulator (error-free transformation of each add)."""

    __slots__ = ("s", "c")

    def __init__(self):
        self.s = 0.0
        self.c = 0.0

    def add(self, x):
        t = self.s + x
        if abs(self.s) >= abs(x):
            self.c += (self.s - t) + x
        else:
            self.c += (x - t) + self.s
        self.s = t

    @property
    def total(self):
        return self.s + self.c


def _ml3_series(alpha, beta_ml, gamma_ml, x, tol, cap):
    """Plain-series attempt. Returns (value, info)."""
    info = MLInfo(method="series")
    if x == 0.0:
        lg, sg = _signed_rgamma(beta_ml)
        info.terms_used = 1
        info.completed = True
        info.error_estimate = 0.0
        return sg * math.exp(lg), info
    acc = _Neumaier()
    log_absx = math.log(abs(x))
    sign_x = math.copysign(1.0, x)
    lp, sp = 0.0, 1.0  # log|(g)_k|, sign
    lf = 0.0  # log k!
    max_term = 0.0
    prev_abs = math.inf
    small_run = 0
    for k in range(cap):
        if k > 0:
            f = gamma_ml + k - 1
            if f == 0.0:
                sp = 0.0  # (g)_k vanishes for every following k
            elif sp != 0.0:
                lp += math.log(abs(f))
                sp *= math.copysign(1.0, f)
            lf += math.log(k)
        if sp == 0.0:
            # terminating series (gamma_ml a non-positive integer)
            info.terms_used = k
            info.max_term = max_term
            info.completed = True
            info.error_estimate = _EPS * max_term
            return acc.total, info
        lq, sq = _signed_rgamma(k * alpha + beta_ml)
        if sq == 0.0:
            t_abs = 0.0
        else:
            log_term = lp + k * log_absx + lq - lf
            if log_term > 700.0:
                info.terms_used = k
                info.max_term = math.inf
                return acc.total, info  # overflowing growth: incomplete
            term = sp * sq * (sign_x if k % 2 else 1.0) * math.exp(log_term)
            acc.add(term)
            t_abs = abs(term)
            max_term = max(max_term, t_abs)
        partial = abs(acc.total)
        # runaway alternating growth: no double-precision recovery possible
        if t_abs > 0.1 * (tol / _EPS) * max(1.0, partial):
            info.terms_used = k + 1
            info.max_term = max_term
            info.last_term = t_abs
            return acc.total, info
        if t_abs < tol * max(1.0, partial) and t_abs <= prev_abs:
            small_run += 1
            if small_run >= 3:
                info.terms_used = k + 1
                info.max_term = max_term
                info.last_term = t_abs
                info.completed = True
                val = acc.total
                info.error_estimate = max(_EPS * max_term, t_abs)
                return val, info
        else:
            small_run = 0
        if t_abs > 0.0:
            prev_abs = t_abs
    info.terms_used = cap
    info.max_term = max_term
    return acc.total, info  # cap hit: incomplete


def _ml3_asymptotic_series(alpha, beta_ml, gamma_ml, xabs, jmax=200):
    """Power-law expansion of E^g_{a,b}(-x) for large x > 0:

        E^g_{a,b}(-x) ~ sum_j (-1)^j (g)_j / j! * x^(-g-j) / Gamma(b - a(g+j))

    summed to the smallest term; the first omitted term estimates the error.
    """
    info = MLInfo(method="asymptotic")
    acc = _Neumaier()
    log_x = math.log(xabs)
    last_nonzero = math.inf
    est = math.inf
    for j in range(jmax):
        lc, sc = log_pochhammer(gamma_ml, j)
        if sc == 0.0:
            est = 0.0
            break  # terminating (integer g): remaining terms all vanish
        lq, sq = _signed_rgamma(beta_ml - alpha * (gamma_ml + j))
        if sq == 0.0:
            continue  # Gamma pole: this correction is absent
        log_term = lc - math.lgamma(j + 1) + lq - (gamma_ml + j) * log_x
        term = sc * sq * math.exp(log_term) * (-1.0 if j % 2 else 1.0)
        t_abs = abs(term)
        if j > 0 and t_abs >= last_nonzero:
            est = t_abs  # divergent tail reached: stop at the smallest term
            break
        acc.add(term)
        info.terms_used = j + 1
        info.last_term = t_abs
        info.max_term = max(info.max_term, t_abs)
        last_nonzero = t_abs
        est = t_abs
        if t_abs < _EPS * abs(acc.total):
            break
    info.error_estimate = est
    info.completed = True
    return acc.total, info


def _ml3_core(alpha, beta_ml, gamma_ml, x, tol, cap=DEFAULT_TERM_CAP,
              allow_nonpositive_beta=False):
    """Shared evaluator; also used internally with negative upper index and
    beta_ml <= 0 (derivative kernels), which MLArgs forbids publicly."""
    if beta_ml <= 0 and not allow_nonpositive_beta:
        raise DomainError(f"beta_ml must be > 0, got {beta_ml}")
    if alpha == 1.0 and beta_ml > 0:
        # E^g_{1,b}(x) = 1F1(g; b; x)/Gamma(b); Kummer's function stays
        # accurate deep into the exponentially small left tail, where both
        # the series and the power expansion fail
        from scipy.special import hyp1f1

        val = float(hyp1f1(gamma_ml, beta_ml, x)) * math.exp(-math.lgamma(beta_ml))
        if math.isfinite(val):
            info = MLInfo(method="kummer", terms_used=0, completed=True,
                          error_estimate=1e-13 * abs(val))
            return val, info
    val, info = _ml3_series(alpha, beta_ml, gamma_ml, x, tol, cap)
    if info.completed and _EPS * info.max_term <= 10.0 * tol * max(1.0, abs(val)):
        return val, info
    best = (info.error_estimate, val, info) if info.completed else None
    if x < 0 and gamma_ml >= 0 and abs(x) >= _ASYM_MIN_ABS_X:
        aval, ainfo = _ml3_asymptotic_series(alpha, beta_ml, gamma_ml, -x)
        if best is None or ainfo.error_estimate < best[0]:
            best = (ainfo.error_estimate, aval, ainfo)
    if best is not None:
        est, bval, binfo = best
        if est <= _MAX_REL_ESTIMATE * max(abs(bval), 1e-300):
            return bval, binfo
    raise SeriesDivergenceError(
        "Mittag-Leffler series is not reliably summable at "
        f"alpha={alpha}, beta_ml={beta_ml}, gamma_ml={gamma_ml}, x={x}; "
        f"largest term {info.max_term:.3e} after {info.terms_used} terms",
        largest_term=info.max_term,
        terms_used=info.terms_used,
    )


def mittag_leffler_3p(args: MLArgs, full_output: bool = False):
    """Evaluate E^{gamma_ml}_{alpha, beta_ml}(x) to relative tolerance tol.

    With ``full_output=True`` also returns the :class:`MLInfo` diagnostics.
    """
    val, info = _ml3_core(args.alpha, args.beta_ml, args.gamma_ml, args.x, args.tol)
    return (val, info) if full_output else val


def ml3(alpha, beta_ml, gamma_ml, x, tol=1e-12):
    """Positional convenience wrapper around :func:`mittag_leffler_3p`."""
    val, _ = _ml3_core(alpha, beta_ml, gamma_ml, x, tol)
    return val


def ml_one(nu, x, tol=1e-12):
    """Classical Mittag-Leffler E_nu(x) = E^1_{nu,1}(x)."""
    return ml3(nu, 1.0, 1.0, x, tol)


def ml_two(nu, x, tol=1e-12):
    """Second-kind value E_{nu,2}(x) = E^1_{nu,2}(x)."""
    return ml3(nu, 2.0, 1.0, x, tol)


def ml_asymptotic(alpha, beta_ml, gamma_ml, c, t):
    """Leading large-t behaviour of E^{gamma_ml}_{alpha,beta_ml}(-c t^alpha):

        (c t^alpha)^(-gamma_ml) / Gamma(beta_ml - alpha * gamma_ml)

    valid only when beta_ml != alpha * gamma_ml.
    """
    if c <= 0 or t <= 0:
        raise DomainError(f"ml_asymptotic requires c > 0 and t > 0, got c={c}, t={t}")
    y = beta_ml - alpha * gamma_ml
    if y == 0 or (y < 0 and y == math.floor(y)):
        raise DomainError(
            f"ml_asymptotic undefined at beta_ml - alpha*gamma_ml = {y} (Gamma pole)"
        )
    lq, sq = _signed_rgamma(y)
    return sq * math.exp(lq - gamma_ml * (math.log(c) + alpha * math.log(t)))
