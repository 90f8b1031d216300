"""Numerical versions of the analytic objects attached to a periodic spectrum.

All routines work with a :class:`~rieszbounds.spectra.PeriodicSpectrum` of
period ``P`` carrying ``P`` points per period, so lattice sums over the
spectrum reduce to sums over residue classes of the ``P``-periodic Poisson
kernel

    K_P(t, y) = sum_n y / ((t - nP)^2 + y^2)
              = (pi/P) (1 - q^2) / |1 - q e^{2 pi i t/P}|^2,   q = e^{-2 pi y/P}.

Weights are stored up to a positive constant; everything downstream
(extrema ratios, the A2 estimate) is scale invariant.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from .errors import InvalidInputError, PrecisionWarning
from .spectra import NodeSet, PeriodicSpectrum, PerturbationSpec
from .vandermonde import exact_bounds

DEFAULT_GRID = 4096
MAX_GRID = 2**20
REFINE_RTOL = 1e-8


# --- Poisson kernel --------------------------------------------------------

def poisson_kernel_periodic(t, y, period=1.0):
    """Closed form of ``sum_n y / ((t - n P)^2 + y^2)``.

    Obtained from the ``P = 1`` identity by rescaling ``(t, y) -> (t/P, y/P)``,
    which pulls out an overall factor ``1/P``.
    """
    y = float(y)
    P = float(period)
    if not y > 0 or not P > 0:
        raise InvalidInputError(f"need y > 0 and period > 0, got y={y}, period={P}")
    t = np.asarray(t, dtype=float)
    q = math.exp(-2.0 * math.pi * y / P)
    one_minus_q2 = -math.expm1(-4.0 * math.pi * y / P)
    # |1 - q e^{i phi}|^2 = (1 - q)^2 + 4 q sin^2(phi/2), no cancellation
    denom = (-math.expm1(-2.0 * math.pi * y / P)) ** 2 + 4.0 * q * np.sin(np.pi * t / P) ** 2
    out = (math.pi / P) * one_minus_q2 / denom
    return out if out.ndim else float(out)


def poisson_kernel_direct(t, y, period=1.0, terms=10_000):
    """Truncated lattice sum over ``|n| <= terms``; a brute-force reference."""
    t = np.asarray(t, dtype=float)
    n = np.arange(-terms, terms + 1, dtype=float)
    diff = t[..., None] - n * period
    out = (y / (diff * diff + y * y)).sum(axis=-1)
    return out if out.ndim else float(out)


def poisson_tail_bound(t, y, period=1.0, terms=10_000):
    """Bound on the part of the lattice sum with ``|n| > terms``.

    Each one-sided tail is at most ``(1/P)(pi/2 - arctan((terms P -+ t)/y))``,
    the integral of the (decreasing) summand beyond the last kept term.
    """
    t = np.abs(np.asarray(t, dtype=float))
    R = terms * period
    if np.any(t >= R):
        raise InvalidInputError("tail bound needs |t| < terms * period")
    tail = (0.5 * np.pi - np.arctan((R - t) / y)) + (0.5 * np.pi - np.arctan((R + t) / y))
    return tail / period


def poisson_kernel_sup(y, period=1.0):
    """``max_t`` of the periodic kernel, ``(pi/P)(1 + q)/(1 - q)``."""
    q = math.exp(-2.0 * math.pi * y / period)
    return math.pi / period * (1.0 + q) / -math.expm1(-2.0 * math.pi * y / period)


def _kernel_primitive(s, y, period):
    # 2 * int_0^s K_P: continuous in s because 1 - q cos > 0
    q = math.exp(-2.0 * math.pi * y / period)
    phi = 2.0 * np.pi * np.asarray(s, dtype=float) / period
    return phi + 2.0 * np.arctan2(q * np.sin(phi), 1.0 - q * np.cos(phi))


def kernel_integral(a, b, y, period=1.0):
    """``int_a^b K_P(t, y) dt`` in closed form (vectorised in ``a`` and ``b``)."""
    return 0.5 * (_kernel_primitive(b, y, period) - _kernel_primitive(a, y, period))


# --- weights ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WeightGrid:
    """A positive periodic weight sampled at ``x_i = i P / n``, ``i < n``.

    ``func`` (optional) evaluates the weight anywhere; it enables local
    refinement of extrema.
    """

    period: float
    samples: np.ndarray
    y: float | None = None
    func: Callable | None = None
    label: str = ""

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        n = s.size
        if n < 256 or n & (n - 1):
            raise InvalidInputError(f"grid size must be a power of two >= 256, got {n}")
        if not np.all(s > 0) or not np.all(np.isfinite(s)):
            raise InvalidInputError("weight samples must be positive and finite")
        if not self.period > 0:
            raise InvalidInputError("period must be positive")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def grid_size(self) -> int:
        return int(self.samples.size)

    @property
    def step(self) -> float:
        return self.period / self.grid_size

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.grid_size) * self.step


def _weight_function(spec: PeriodicSpectrum, y: float):
    K = spec.period
    xk = spec.generators
    q = math.exp(-2.0 * math.pi * y / K)
    one_minus_q_sq = math.expm1(-2.0 * math.pi * y / K) ** 2

    def w(x):
        x = np.asarray(x, dtype=float)
        s = np.sin(np.pi * (x[..., None] - xk) / K)
        # |1 - e^{(2 pi i/K)(x + iy - x_k)}|^2 = (1 - q)^2 + 4 q sin^2(pi (x - x_k)/K)
        out = np.prod(one_minus_q_sq + 4.0 * q * s * s, axis=-1)
        return out if out.ndim else float(out)

    return w


def periodic_weight(spec: PeriodicSpectrum, y: float, grid_size: int = DEFAULT_GRID) -> WeightGrid:
    """``prod_k |1 - exp((2 pi i/K)(x + iy - x_k))|^2`` on one period.

    This is ``|F(x + iy)|^2`` for the generating function of the spectrum,
    up to a positive constant.
    """
    if not y > 0:
        raise InvalidInputError(f"y must be positive, got {y!r}")
    if not isinstance(spec, PeriodicSpectrum):
        spec = PeriodicSpectrum(spec)
    w = _weight_function(spec, y)
    x = np.arange(grid_size) * spec.period / grid_size
    return WeightGrid(period=float(spec.period), samples=w(x), y=float(y), func=w,
                      label="generating-function weight")


def _golden_refine(f, a, b, c):
    """Local minimum of ``f`` near ``b`` with bracket ``(a, b, c)``; ``None`` if it escapes."""
    try:
        res = optimize.minimize_scalar(f, bracket=(a, b, c), method="golden",
                                       options={"xtol": 1e-12})
    except ValueError:
        return None
    if not (min(a, c) <= res.x <= max(a, c)):
        return None
    return float(res.fun)


def weight_extrema(w: WeightGrid, refine: bool = True) -> tuple[float, float]:
    """Minimum and maximum of a weight grid.

    With ``refine`` and a callable weight, each extremal grid cell gets one
    golden-section pass; the result is never worse than the raw grid value.
    """
    s = w.samples
    i_min, i_max = int(np.argmin(s)), int(np.argmax(s))
    m, M = float(s[i_min]), float(s[i_max])
    if refine and w.func is not None:
        h = w.step
        f = w.func
        xm = i_min * h
        lo = _golden_refine(lambda x: f(x), xm - h, xm, xm + h)
        if lo is not None:
            m = min(m, lo)
        xM = i_max * h
        hi = _golden_refine(lambda x: -f(x), xM - h, xM, xM + h)
        if hi is not None:
            M = max(M, -hi)
    return m, M


def refine_until_stable(compute, grid_size=DEFAULT_GRID, rtol=REFINE_RTOL, max_grid=MAX_GRID):
    """Double ``grid_size`` until ``compute(n)`` changes by less than ``rtol``.

    ``compute`` returns a float or a tuple of floats. Returns
    ``(value, grid_size, converged)``; a :class:`PrecisionWarning` is issued
    if ``max_grid`` is reached first.
    """
    n = grid_size
    prev = np.atleast_1d(np.asarray(compute(n), dtype=float))
    while n < max_grid:
        n *= 2
        cur = np.atleast_1d(np.asarray(compute(n), dtype=float))
        scale = np.maximum(np.abs(cur), np.finfo(float).tiny)
        if np.all(np.abs(cur - prev) <= rtol * scale):
            out = cur if cur.size > 1 else float(cur[0])
            return (tuple(out) if cur.size > 1 else out), n, True
        prev = cur
    warnings.warn(f"grid refinement did not stabilise below {max_grid} points", PrecisionWarning)
    out = tuple(prev) if prev.size > 1 else float(prev[0])
    return out, n, False


def stable_weight_extrema(spec, y, grid_size=DEFAULT_GRID):
    """:func:`weight_extrema` of :func:`periodic_weight`, refined until stable."""
    value, _, _ = refine_until_stable(
        lambda n: weight_extrema(periodic_weight(spec, y, n)), grid_size)
    return value


def a2_constant(w: WeightGrid, max_scale_periods: float = 1.0) -> float:
    """Lower estimate of the Muckenhoupt constant ``sup_I <w>_I <1/w>_I``.

    The supremum runs over intervals starting at every grid point with
    lengths of ``2^j`` cells, up to ``max_scale_periods`` periods. Interval
    integrals use the trapezoid rule on the periodic extension.
    """
    if not max_scale_periods > 0:
        raise InvalidInputError("max_scale_periods must be positive")
    s = w.samples
    n = s.size
    h = w.step
    inv = 1.0 / s
    cell_w = 0.5 * h * (s + np.roll(s, -1))
    cell_inv = 0.5 * h * (inv + np.roll(inv, -1))

    max_cells = max(1, int(math.floor(max_scale_periods * n + 1e-9)))
    reps = max_cells // n + 2
    Sw = np.concatenate(([0.0], np.cumsum(np.tile(cell_w, reps))))
    Si = np.concatenate(([0.0], np.cumsum(np.tile(cell_inv, reps))))

    start = np.arange(n)
    best = 0.0
    length = 1
    while length <= max_cells:
        Iw = Sw[start + length] - Sw[start]
        Ii = Si[start + length] - Si[start]
        best = max(best, float((Iw * Ii).max()) / (length * h) ** 2)
        length *= 2
    return best


# --- phase function --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PhaseGrid:
    """``alpha(x) = 2 int_0^x sum_lambda y/((t - lambda)^2 + y^2) dt - 2 pi x`` on ``[0, P)``."""

    period: float
    y: float
    samples: np.ndarray
    end_value: float
    quadrature: str = "composite Simpson"

    @property
    def grid_size(self) -> int:
        return int(self.samples.size)

    @property
    def step(self) -> float:
        return self.period / self.grid_size

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.grid_size) * self.step

    def at_index(self, k):
        """Values at ``x = k * step`` for any integers ``k``, by periodic extension.

        Valid for density-one spectra, where ``alpha(x + P) = alpha(x)``.
        """
        return self.samples[np.asarray(k) % self.grid_size]


def _spectrum_kernel(spec, y):
    K = spec.period
    xk = spec.generators

    def f(t):
        return poisson_kernel_periodic(np.asarray(t)[..., None] - xk, y, K).sum(axis=-1)

    return f


def phase_alpha(spec: PeriodicSpectrum, y: float, grid_size: int = DEFAULT_GRID,
                panels_per_cell: int = 8) -> PhaseGrid:
    """Phase function of the shifted spectrum on one period.

    The lattice sum over each residue class is the closed-form periodic
    kernel; the integral from 0 uses composite Simpson with
    ``panels_per_cell * grid_size`` panels.
    """
    if not y > 0:
        raise InvalidInputError(f"y must be positive, got {y!r}")
    if panels_per_cell < 2 or panels_per_cell % 2:
        raise InvalidInputError("panels_per_cell must be an even integer >= 2")
    if not isinstance(spec, PeriodicSpectrum):
        spec = PeriodicSpectrum(spec)
    P = float(spec.period)
    panels = panels_per_cell * grid_size
    h = P / panels
    t = np.arange(panels + 1) * h
    f = _spectrum_kernel(spec, y)(t)
    # Simpson on each pair of panels, accumulated
    pair = (h / 3.0) * (f[:-2:2] + 4.0 * f[1:-1:2] + f[2::2])
    cum = np.concatenate(([0.0], np.cumsum(pair)))
    stride = panels_per_cell // 2
    integral = cum[::stride]
    x = np.arange(grid_size + 1) * (P / grid_size)
    alpha = 2.0 * integral - 2.0 * np.pi * x
    alpha[0] = 0.0
    return PhaseGrid(period=P, y=float(y), samples=alpha[:-1].copy(),
                     end_value=float(alpha[-1]),
                     quadrature=f"composite Simpson, {panels} panels")


def phase_alpha_exact(spec: PeriodicSpectrum, y: float, x):
    """Closed-form phase function via the kernel primitive (reference values)."""
    P = spec.period
    x = np.asarray(x, dtype=float)
    total = sum(kernel_integral(-xk, x - xk, y, P) for xk in spec.generators)
    return 2.0 * total - 2.0 * np.pi * x


# --- perturbation integral tau_y -------------------------------------------

def tau_profile(mu, y, x):
    """``sum_n int_x^{x + mu_n} y / ((n - t)^2 + y^2) dt`` for a ``d``-periodic pattern.

    ``mu`` holds one period of grid-unit displacements; the sum over each
    residue class ``n = r + k d`` is the ``d``-periodic kernel, integrated in
    closed form, so no truncation is involved.
    """
    mu = np.asarray(mu.mu if isinstance(mu, PerturbationSpec) else mu, dtype=float)
    d = mu.size
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for r in range(d):
        if mu[r] != 0.0:
            total += kernel_integral(x - r, x - r + mu[r], y, d)
    return total


def tau_sup(d: int, pert, y: float, grid_size: int = DEFAULT_GRID, adaptive: bool = True) -> float:
    """``tau_y = sup_x |tau_profile(x)|`` over one period ``[0, d)``.

    The grid maximum gets one golden-section refinement; with ``adaptive``
    the grid doubles until the value is stable to ``1e-8`` relative.
    """
    if not y > 0:
        raise InvalidInputError(f"y must be positive, got {y!r}")
    mu = np.asarray(pert.mu if isinstance(pert, PerturbationSpec) else pert, dtype=float)
    if mu.size != d:
        raise InvalidInputError(f"pattern length {mu.size} does not match d = {d}")
    if not np.any(mu):
        return 0.0

    def compute(n):
        h = d / n
        x = np.arange(n) * h
        vals = np.abs(tau_profile(mu, y, x))
        i = int(np.argmax(vals))
        best = float(vals[i])
        xi = x[i]
        ref = _golden_refine(lambda s: -abs(float(tau_profile(mu, y, np.array([s]))[0])),
                             xi - h, xi, xi + h)
        if ref is not None:
            best = max(best, -ref)
        return best

    if not adaptive:
        return compute(grid_size)
    value, _, _ = refine_until_stable(compute, grid_size)
    return value


def tau_kernel_bound(L, y):
    """``L pi (1 + e^{-2 pi y}) / (1 - e^{-2 pi y})``: displacement size times kernel sup."""
    return L * poisson_kernel_sup(y, 1.0)


# --- counting function -----------------------------------------------------

def counting_function(spec: PeriodicSpectrum, x):
    """``N(x) = #(Lambda n [0, x])`` for ``x >= 0`` and ``-#(Lambda n (x, 0))`` otherwise.

    Right-continuous, with a jump of ``+1`` at every spectrum point.
    """
    x = np.asarray(x, dtype=float)
    lo = min(float(x.min()), 0.0) if x.size else 0.0
    hi = max(float(x.max()), 0.0) if x.size else 0.0
    pts = spec.points(lo - 1.0, hi + 1.0)
    n_neg = np.searchsorted(pts, 0.0, side="left")  # points < 0
    le = np.searchsorted(pts, x, side="right")      # points <= x
    return (le - n_neg).astype(int)


@dataclass(frozen=True, eq=False)
class CountingGrid:
    window: float
    step: float
    x: np.ndarray
    counts: np.ndarray
    psi: np.ndarray
    meta: dict = field(default_factory=dict)


def _poisson_of_psi(spec, y, W, x):
    """Unit-mass Poisson extension of ``psi = 2 pi (t - N(t))`` restricted to ``[-W, W]``.

    On each gap between spectrum points ``psi`` is linear, so the convolution
    is integrated exactly piece by piece. The mass outside the window is
    filled with the one-period mean of ``psi``.
    """
    pts = spec.points(-W, W)
    brk = np.concatenate(([-W], pts[(pts > -W) & (pts < W)], [W]))
    mids = 0.5 * (brk[:-1] + brk[1:])
    levels = counting_function(spec, mids)
    out = np.zeros_like(x)
    for a, b, n in zip(brk[:-1], brk[1:], levels):
        mass = (np.arctan((b - x) / y) - np.arctan((a - x) / y)) / np.pi
        first = (y / (2.0 * np.pi)) * np.log(((b - x) ** 2 + y * y) / ((a - x) ** 2 + y * y))
        out += 2.0 * np.pi * (first + (x - n) * mass)
    P = spec.period
    mean_psi = 2.0 * np.pi * (spec.generators.sum() / P - P / 2.0)
    outside = 1.0 - (np.arctan((W - x) / y) + np.arctan((W + x) / y)) / np.pi
    return out + mean_psi * outside


def counting_diagnostic(spec: PeriodicSpectrum, y: float = 1.0, window: float = 16.0,
                        grid_size: int = DEFAULT_GRID):
    """Compare the Poisson extension of ``2 pi (x - N(x))`` with ``-alpha``.

    The two should differ by a constant. Returns the counting grid on
    ``[-W, W]`` and ``min_c max_{|x| <= W/2} |P_y[psi](x) + alpha(x) - c|``.
    """
    if not isinstance(spec, PeriodicSpectrum):
        spec = PeriodicSpectrum(spec)
    if not y > 0:
        raise InvalidInputError(f"y must be positive, got {y!r}")
    P = spec.period
    if window < 4 * P:
        raise InvalidInputError(f"window {window} must cover at least 4 periods ({4 * P})")
    h = P / grid_size
    kmax = int(math.floor(window / h + 1e-9))
    k_full = np.arange(-kmax, kmax + 1)
    x_full = k_full * h
    counts = counting_function(spec, x_full)
    psi = 2.0 * np.pi * (x_full - counts)

    keval = np.arange(-int(math.floor(window / 2 / h + 1e-9)),
                      int(math.floor(window / 2 / h + 1e-9)) + 1)
    xe = keval * h
    alpha = phase_alpha(spec, y, grid_size).at_index(keval)
    r = _poisson_of_psi(spec, y, window, xe) + alpha
    residual = 0.5 * float(r.max() - r.min())
    grid = CountingGrid(window=float(window), step=h, x=x_full, counts=counts, psi=psi,
                        meta={"y": y, "offset": 0.5 * float(r.max() + r.min())})
    return grid, residual


# --- sharpness example -----------------------------------------------------

def sharpness_spectrum(L: int) -> PeriodicSpectrum:
    """The ``4L``-periodic set generated by ``L, L + 1/2, ..., 3L - 1/2``."""
    K = 4 * L
    return PeriodicSpectrum.from_generators(L + 0.5 * np.arange(K), K)


@dataclass(frozen=True)
class PhiDecay:
    L: int
    S: float
    tail: float
    A_exact: float
    chain_bound: float

    @property
    def ok(self) -> bool:
        return (self.A_exact <= self.S + self.tail
                and self.S <= self.chain_bound + self.tail)


def phi_decay_check(L: int) -> PhiDecay:
    """Test-function upper bound on the lower Riesz bound of :func:`sharpness_spectrum`.

    ``S = sum |phi_L(lambda)|^2`` with ``phi_L(x) = (L sin(pi x/L)/(pi x))^L``,
    truncated at ``|lambda| <= 10^4 L``; ``tail`` bounds the rest.
    """
    if int(L) != L or not 2 <= L <= 8:
        raise InvalidInputError(f"L must be an integer in [2, 8], got {L!r}")
    L = int(L)
    spec = sharpness_spectrum(L)
    R = 1e4 * L
    lam = spec.points(-R, R)
    S = float(np.sum(np.sinc(lam / L) ** (2 * L)))
    # points are 1/2 apart at worst: sum_{lambda > R} f <= 2 int_{R - 1/2}^inf f
    a = R - 0.5
    log_tail = (math.log(4.0) + 2 * L * math.log(L / math.pi)
                + (1 - 2 * L) * math.log(a) - math.log(2 * L - 1))
    A = exact_bounds(spec.base).A
    return PhiDecay(L=L, S=S, tail=math.exp(log_tail), A_exact=A,
                    chain_bound=8.0 / math.pi**L)


# --- nu_y ------------------------------------------------------------------

def nu_profile(spec: PeriodicSpectrum, y: float, grid_size: int = DEFAULT_GRID):
    """``nu_y(x) = sum_{lambda != lambda_0} log(1 - y^2/((x - lambda)^2 + y^2))`` on one period.

    ``lambda_0`` is the spectrum point nearest ``x``. Uses the sine product
    for each residue class; the nearest factor is divided out analytically,
    so grid points on the spectrum need no special treatment.
    """
    if not y > 0:
        raise InvalidInputError(f"y must be positive, got {y!r}")
    if not isinstance(spec, PeriodicSpectrum):
        spec = PeriodicSpectrum(spec)
    K = spec.period
    x = np.arange(grid_size) * K / grid_size
    u = (x[:, None] - spec.generators[None, :]) / K
    ur = u - np.round(u)                       # in [-1/2, 1/2]
    s2 = math.sinh(math.pi * y / K) ** 2
    sin2 = np.sin(np.pi * ur) ** 2
    k0 = np.argmin(np.abs(ur), axis=1)
    rows = np.arange(grid_size)
    u0 = ur[rows, k0]
    with np.errstate(divide="ignore"):
        terms = np.log(sin2) - np.log(sin2 + s2)
    terms[rows, k0] = 0.0
    dist2 = (K * u0) ** 2
    nearest = (2.0 * math.log(math.pi / K) + 2.0 * np.log(np.sinc(u0))
               - np.log(sin2[rows, k0] + s2) + np.log(dist2 + y * y))
    return x, terms.sum(axis=1) + nearest


def nu_bound(delta, y):
    """``2 pi y (delta^2 + 4 y^2) / delta^3``."""
    return 2.0 * math.pi * y * (delta**2 + 4.0 * y**2) / delta**3


def nu_bound_check(spec: PeriodicSpectrum, y: float, grid: int = DEFAULT_GRID) -> float:
    """``max |nu_y|`` over one period."""
    _, nu = nu_profile(spec, y, grid)
    return float(np.abs(nu).max())
