"""Exact Riesz bounds of a node set from the singular values of its Vandermonde matrix.

For ``d`` nodes ``theta_j`` the matrix ``V[j, k] = exp(2 pi i k theta_j)``
(``k = 0..d-1``) satisfies ``A ||a||^2 <= ||V a||^2 / d <= B ||a||^2`` with
sharp constants ``A = sigma_min^2 / d`` and ``B = sigma_max^2 / d``. These are
also the Riesz bounds of the exponentials over the periodic line spectrum
``d*theta + d*Z`` in ``L^2[0, 1]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .errors import InvalidInputError, NearSingularError, NumericError
from .spectra import NodeSet

#: sigma_min below this marks a numerically degenerate node set
SINGULAR_FLOOR = 1e-13

#: full SVDs are guaranteed accurate up to this dimension
MAX_DIMENSION = 512


@dataclass(frozen=True)
class ExactBounds:
    A: float
    B: float
    sigma_min: float
    sigma_max: float
    d: int

    @property
    def log_A(self) -> float:
        """``log A`` from ``sigma_min`` directly, finite even when ``A`` underflows."""
        return 2.0 * _safe_log(self.sigma_min) - math.log(self.d)

    @property
    def log_B(self) -> float:
        return 2.0 * _safe_log(self.sigma_max) - math.log(self.d)


def _safe_log(x):
    return math.log(x) if x > 0 else -math.inf


def _as_nodes(theta):
    return theta if isinstance(theta, NodeSet) else NodeSet(theta)


def build_vandermonde(theta) -> np.ndarray:
    """The ``d x d`` matrix ``exp(2 pi i k theta_j)``; rows are nodes, columns powers."""
    theta = _as_nodes(theta)
    d = theta.d
    # reduce k*theta mod 1 before exponentiating to keep phases accurate
    phase = np.outer(theta.nodes, np.arange(d)) % 1.0
    V = np.exp(2j * np.pi * phase)
    V.setflags(write=False)
    return V


def _singular_values(theta):
    if theta.d > MAX_DIMENSION:
        raise InvalidInputError(
            f"d = {theta.d} exceeds the supported dimension {MAX_DIMENSION}"
        )
    V = build_vandermonde(theta)
    try:
        s = np.linalg.svd(V, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge for d = {theta.d}: {exc}") from exc
    if not np.all(np.isfinite(s)):
        raise NumericError(f"SVD returned non-finite singular values for d = {theta.d}")
    return s


def exact_bounds(theta) -> ExactBounds:
    """Lower and upper Riesz bounds ``sigma_min^2/d`` and ``sigma_max^2/d``.

    Raises
    ------
    NumericError
        If the SVD fails to converge.
    """
    theta = _as_nodes(theta)
    s = _singular_values(theta)
    d = theta.d
    smax, smin = float(s[0]), float(s[-1])
    return ExactBounds(A=smin**2 / d, B=smax**2 / d, sigma_min=smin,
                       sigma_max=smax, d=d)


def exact_bounds_many(thetas) -> tuple[np.ndarray, np.ndarray]:
    """Batched :func:`exact_bounds` for an ``(n, d)`` array of node sets.

    Returns the arrays ``(sigma_min, sigma_max)``; one stacked SVD replaces
    ``n`` separate calls.
    """
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 2:
        raise InvalidInputError("expected an (n, d) array of node sets")
    n, d = thetas.shape
    if d > MAX_DIMENSION:
        raise InvalidInputError(f"d = {d} exceeds the supported dimension {MAX_DIMENSION}")
    phase = (thetas[:, :, None] * np.arange(d)[None, None, :]) % 1.0
    try:
        s = np.linalg.svd(np.exp(2j * np.pi * phase), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD did not converge for d = {d}: {exc}") from exc
    if not np.all(np.isfinite(s)):
        raise NumericError(f"SVD returned non-finite singular values for d = {d}")
    return s[:, -1], s[:, 0]


def inverse_norm(theta) -> float:
    """Operator norm ``||V^{-1}|| = 1/sigma_min``.

    Raises :class:`NearSingularError` (carrying ``sigma_min``) when the
    matrix is numerically singular.
    """
    theta = _as_nodes(theta)
    smin = float(_singular_values(theta)[-1])
    if smin < SINGULAR_FLOOR:
        raise NearSingularError(smin, SINGULAR_FLOOR)
    return 1.0 / smin


def sampling_ratio(theta, coeffs) -> float:
    """Marcinkiewicz-Zygmund quotient ``(1/d) sum_j |p(z_j)|^2 / sum_k |a_k|^2``.

    ``p(z) = sum_k a_k z^k`` is evaluated at ``z_j = exp(2 pi i theta_j)``.
    """
    theta = _as_nodes(theta)
    a = np.asarray(coeffs, dtype=complex).ravel()
    if a.size != theta.d:
        raise InvalidInputError(f"need {theta.d} coefficients, got {a.size}")
    denom = float(np.vdot(a, a).real)
    if denom == 0.0:
        raise InvalidInputError("coefficient vector must not be zero")
    values = build_vandermonde(theta) @ a
    return float(np.vdot(values, values).real) / theta.d / denom


def gram_bounds(theta) -> tuple[float, float]:
    """Extreme eigenvalues of the Hermitian Gram matrix ``V* V / d``.

    Kept separate from :func:`exact_bounds` (eigensolver instead of SVD)
    so the two can check each other.
    """
    theta = _as_nodes(theta)
    d = theta.d
    # G[k, l] = c[l - k] with c[m] = (1/d) sum_j exp(2 pi i m theta_j), built without V
    m = np.arange(d)
    c = np.exp(2j * np.pi * (np.outer(m, theta.nodes) % 1.0)).sum(-1) / d
    G = toeplitz(c.conj(), c)
    w = np.linalg.eigvalsh(G)
    return float(w[0]), float(w[-1])


def minimizing_coefficients(theta) -> np.ndarray:
    """Right singular vector for ``sigma_min``: the coefficients attaining ``A``."""
    V = build_vandermonde(_as_nodes(theta))
    _, _, vh = np.linalg.svd(V)
    return vh[-1].conj()
