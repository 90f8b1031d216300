"""Closed-form lower (and one upper) bounds for Riesz bounds of exponential systems.

Every exponentially small bound comes in two forms: ``<name>`` returns the
linear value (which may underflow to 0 or a subnormal) and ``log_<name>``
returns its natural logarithm, which never underflows. Comparisons against
exact bounds should be made in log space.

Degenerate boundaries (``mu = 1/4``, ``mu_star = 1/4``, ``tau = pi/4``)
evaluate to 0 (log ``-inf``) rather than raising.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .spectra import NodeSet

LOG7 = math.log(7.0)
LOG18 = math.log(18.0)


def _log(x):
    return math.log(x) if x > 0 else -math.inf


def _positive(name, value):
    if not value > 0 or not math.isfinite(value):
        raise InvalidInputError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


def _quarter(name, value):
    if not 0.0 <= value <= 0.25:
        raise InvalidInputError(f"{name} must lie in [0, 1/4], got {value!r}")
    return float(value)


def _sin_quarter(mu):
    return math.sin(0.25 * math.pi * (1.0 - 4.0 * mu))


# --- Kadec -----------------------------------------------------------------

def kadec_bound(mu: float) -> float:
    """``2 sin^2(pi/4 (1 - 4 mu))`` for displacements ``|lambda_n - n| <= mu < 1/4``."""
    mu = _quarter("mu", mu)
    if mu == 0.25:
        return 0.0
    return 2.0 * _sin_quarter(mu) ** 2


def log_kadec_bound(mu: float) -> float:
    mu = _quarter("mu", mu)
    if mu == 0.25:
        return -math.inf
    return math.log(2.0) + 2.0 * math.log(_sin_quarter(mu))


def mz_kadec_bound(mu: float) -> float:
    """Lower MZ bound for a ``mu``-perturbation of the roots of unity.

    Same formula as :func:`kadec_bound`; a separate name so discrete reports
    cite the finite-dimensional statement.
    """
    return kadec_bound(mu)


def log_mz_kadec_bound(mu: float) -> float:
    return log_kadec_bound(mu)


# --- Avdonin ---------------------------------------------------------------

def _avdonin_args(delta, L, N, mu_star):
    delta = _positive("delta", delta)
    L = _positive("L", L)
    if int(N) != N or N < 1:
        raise InvalidInputError(f"N must be a positive integer, got {N!r}")
    mu_star = _quarter("mu_star", mu_star)
    return delta, L, int(N), mu_star


def _avdonin_exponent(delta, L, N, mu_star):
    return 960.0 * math.pi * L * L * N / (delta * (1.0 - 4.0 * mu_star) ** 2)


def log_avdonin_bound(delta: float, L: float, N: int, mu_star: float) -> float:
    """Log of the averaged-perturbation lower bound.

    ``log[(1/(7 delta)) exp(-960 pi L^2 N / (delta (1 - 4 mu*)^2)) sin^2(pi/4 (1 - 4 mu*))]``
    """
    delta, L, N, mu_star = _avdonin_args(delta, L, N, mu_star)
    if mu_star == 0.25:
        return -math.inf
    return (-LOG7 - math.log(delta) - _avdonin_exponent(delta, L, N, mu_star)
            + 2.0 * math.log(_sin_quarter(mu_star)))


def avdonin_bound(delta: float, L: float, N: int, mu_star: float) -> float:
    delta, L, N, mu_star = _avdonin_args(delta, L, N, mu_star)
    if mu_star == 0.25:
        return 0.0
    return (math.exp(-_avdonin_exponent(delta, L, N, mu_star)) / (7.0 * delta)
            * _sin_quarter(mu_star) ** 2)


def log_mz_avdonin_bound(delta: float, L: float, N: int, rho: float) -> float:
    """Discrete counterpart of :func:`log_avdonin_bound` with ``rho(N)`` for ``mu*``."""
    return log_avdonin_bound(delta, L, N, rho)


def mz_avdonin_bound(delta: float, L: float, N: int, rho: float) -> float:
    return avdonin_bound(delta, L, N, rho)


# --- sine-type and phase-function bounds -----------------------------------

def hs_ratio_bound(m: float, M: float) -> float:
    """``m / M``: lower estimate of the squared inverse Helson-Szego constant
    for a weight bounded between ``m`` and ``M``."""
    m = _positive("m", m)
    M = _positive("M", M)
    if m > M:
        raise InvalidInputError(f"need m <= M, got m={m}, M={M}")
    return m / M


def log_sine_type_bound(delta: float, y: float, m: float, M: float) -> float:
    delta = _positive("delta", delta)
    y = _positive("y", y)
    return (-LOG7 - math.log(delta) + math.log(hs_ratio_bound(m, M))
            - 8.0 * math.pi * y / delta)


def sine_type_bound(delta: float, y: float, m: float, M: float) -> float:
    """``(1/(7 delta)) (m/M) exp(-8 pi y / delta)``.

    ``m <= |F(x + iy)|^2 <= M`` bounds the generating function on the
    horizontal line at height ``y``.
    """
    delta = _positive("delta", delta)
    y = _positive("y", y)
    return hs_ratio_bound(m, M) * math.exp(-8.0 * math.pi * y / delta) / (7.0 * delta)


def _stability_args(delta, y0, tau):
    delta = _positive("delta", delta)
    if not y0 >= 1.0 or not math.isfinite(y0):
        raise InvalidInputError(f"y0 must be >= 1, got {y0!r}")
    if not 0.0 <= tau <= 0.25 * math.pi:
        raise InvalidInputError(f"tau must lie in [0, pi/4], got {tau!r}")
    return delta, float(y0), float(tau)


def general_stability_bound(delta: float, y0: float, tau: float) -> float:
    """``(1/(28 delta)) exp(-8 pi y0 / delta) cos^2(2 tau)`` for ``tau < pi/4``."""
    delta, y0, tau = _stability_args(delta, y0, tau)
    if tau == 0.25 * math.pi:
        return 0.0
    return math.exp(-8.0 * math.pi * y0 / delta) * math.cos(2.0 * tau) ** 2 / (28.0 * delta)


def log_general_stability_bound(delta: float, y0: float, tau: float) -> float:
    delta, y0, tau = _stability_args(delta, y0, tau)
    if tau == 0.25 * math.pi:
        return -math.inf
    return (-math.log(28.0 * delta) - 8.0 * math.pi * y0 / delta
            + 2.0 * math.log(math.cos(2.0 * tau)))


# --- separation-only bounds ------------------------------------------------

def bessel_upper(delta: float) -> float:
    """Upper Riesz bound ``8 pi / min(delta, 1)`` of a ``delta``-separated spectrum."""
    delta = _positive("delta", delta)
    return 8.0 * math.pi / min(delta, 1.0)


def ingham_bound(a: float, delta: float) -> float:
    """Lower bound ``(a/pi^2)(1 - 1/(a delta)^2)`` on the interval ``[0, a]``.

    Requires ``a * delta > 1``. This bounds the system over ``[0, a]``,
    not over ``[0, 1]``.
    """
    a = _positive("a", a)
    delta = _positive("delta", delta)
    if a * delta <= 1.0:
        raise InvalidInputError(f"need a*delta > 1, got a*delta = {a * delta}")
    return a / math.pi**2 * (1.0 - 1.0 / (a * delta) ** 2)


def _periodic_args(delta, K):
    delta = _positive("delta", delta)
    if delta > 1.0:
        raise InvalidInputError(f"periodic bound needs delta <= 1, got {delta}")
    if int(K) != K or K < 1:
        raise InvalidInputError(f"K must be a positive integer, got {K!r}")
    return delta, int(K)


def log_periodic_bound(delta: float, K: int) -> float:
    delta, K = _periodic_args(delta, K)
    return -LOG7 - math.log(delta) - 2.0 * K / delta * LOG18


def periodic_bound(delta: float, K: int) -> float:
    """``(1/(7 delta)) 18^(-2K/delta)`` for a ``K``-periodic spectrum with ``K`` points per period."""
    return math.exp(log_periodic_bound(delta, K))


def _pairwise_circular(nodes):
    diff = np.abs(nodes[:, None] - nodes[None, :]) % 1.0
    return np.minimum(diff, 1.0 - diff)


def log_gautschi_bound(theta) -> float:
    """Log of ``sqrt(d) pi^(d-1) max_k prod_{j != k} 1/delta_jk``."""
    if not isinstance(theta, NodeSet):
        theta = NodeSet(theta)
    d = theta.d
    if d == 1:
        return 0.0
    dist = _pairwise_circular(theta.nodes)
    np.fill_diagonal(dist, 1.0)
    row_logs = np.log(dist).sum(axis=1)
    return 0.5 * math.log(d) + (d - 1) * math.log(math.pi) - float(row_logs.min())


def gautschi_bound(theta) -> float:
    """Upper bound on ``||V(theta)^{-1}||``; ``inf`` if it overflows a double."""
    lv = log_gautschi_bound(theta)
    return math.exp(lv) if lv < 709.0 else math.inf


def basis_perturbation_bound(A: float, delta: float, mu: float) -> float:
    """``(sqrt(A) - 8 pi mu / delta)^2`` for perturbations below ``sqrt(A) delta / (8 pi)``."""
    A = _positive("A", A)
    delta = _positive("delta", delta)
    if not mu >= 0:
        raise InvalidInputError(f"mu must be nonnegative, got {mu!r}")
    threshold = math.sqrt(A) * delta / (8.0 * math.pi)
    if mu >= threshold:
        raise InvalidInputError(
            f"mu = {mu} must be below sqrt(A)*delta/(8 pi) = {threshold}"
        )
    return (math.sqrt(A) - 8.0 * math.pi * mu / delta) ** 2


def log_basis_perturbation_bound(A, delta, mu):
    return _log(basis_perturbation_bound(A, delta, mu))


# --- reports ---------------------------------------------------------------

#: name -> (linear, log, kind)
BOUNDS = {
    "kadec": (kadec_bound, log_kadec_bound, "lower"),
    "mz_kadec": (mz_kadec_bound, log_mz_kadec_bound, "lower"),
    "avdonin": (avdonin_bound, log_avdonin_bound, "lower"),
    "mz_avdonin": (mz_avdonin_bound, log_mz_avdonin_bound, "lower"),
    "sine_type": (sine_type_bound, log_sine_type_bound, "lower"),
    "general_stability": (general_stability_bound, log_general_stability_bound, "lower"),
    "periodic": (periodic_bound, log_periodic_bound, "lower"),
    "basis_perturbation": (basis_perturbation_bound, log_basis_perturbation_bound, "lower"),
    "hs_ratio": (hs_ratio_bound, lambda m, M: _log(hs_ratio_bound(m, M)), "factor"),
    "ingham": (ingham_bound, lambda a, delta: _log(ingham_bound(a, delta)), "lower"),
    "bessel": (bessel_upper, lambda delta: _log(bessel_upper(delta)), "upper"),
    "gautschi": (gautschi_bound, log_gautschi_bound, "upper"),
}

#: absolute slack allowed when checking a bound against an exact value
CHECK_TOL = 1e-9


@dataclass
class BoundReport:
    """A bound value, optionally compared against an exact quantity.

    For lower bounds the margin is ``exact - value`` and the log margin
    ``log(exact) - log(value)``; upper bounds flip the sign convention so
    a nonnegative margin always means the bound holds.
    """

    name: str
    params: dict
    value: float
    log_value: float
    kind: str = "lower"
    exact: float | None = None
    log_exact: float | None = None
    meta: dict = field(default_factory=dict)

    @property
    def margin(self):
        if self.exact is None:
            return None
        if self.kind == "upper":
            return self.value - self.exact
        return self.exact - self.value

    @property
    def margin_log(self):
        if self.log_exact is None:
            return None
        if self.kind == "upper":
            return self.log_value - self.log_exact
        return self.log_exact - self.log_value

    @property
    def passed(self):
        """Bound check in log space with an absolute slack of ``CHECK_TOL``."""
        if self.exact is None:
            return None
        return log_space_check(self.log_exact, self.log_value, self.kind)

    def compare(self, exact, log_exact=None):
        self.exact = float(exact)
        self.log_exact = float(_log(exact) if log_exact is None else log_exact)
        return self

    def as_dict(self):
        return {
            "name": self.name,
            "kind": self.kind,
            "params": dict(self.params),
            "value": self.value,
            "log_value": self.log_value,
            "exact": self.exact,
            "log_exact": self.log_exact,
            "margin": self.margin,
            "margin_log": self.margin_log,
            "pass": self.passed,
        }


def log_space_check(log_exact, log_bound, kind="lower", tol=CHECK_TOL):
    """``exact + tol >= bound`` (lower) or ``bound + tol >= exact`` (upper), via logs."""
    if kind == "upper":
        log_exact, log_bound = log_bound, log_exact
    if log_bound == -math.inf:
        return True
    # log(exact + tol) computed without forming exact when it underflows
    lhs = np.logaddexp(log_exact, math.log(tol)) if tol > 0 else log_exact
    return bool(lhs >= log_bound)


def evaluate(name: str, **params) -> BoundReport:
    """Evaluate a named bound in both linear and log space."""
    try:
        linear, logf, kind = BOUNDS[name]
    except KeyError:
        raise InvalidInputError(f"unknown bound {name!r}; expected one of {sorted(BOUNDS)}") from None
    value = float(linear(**params))
    log_value = float(logf(**params))
    shown = {k: (v.nodes.tolist() if isinstance(v, NodeSet) else v) for k, v in params.items()}
    return BoundReport(name=name, params=shown, value=value, log_value=log_value, kind=kind)
