"""Verification suites for periodic spectra that are not tied to a triangular family."""
from __future__ import annotations

import math

import numpy as np

from . import bounds as B
from .analytic import periodic_weight, phi_decay_check, weight_extrema
from .errors import InvalidInputError
from .report import VerifyReport
from .spectra import NodeSet, PeriodicSpectrum, rng_for, separation
from .vandermonde import exact_bounds

LOG3 = math.log(3.0)


def random_periodic_spectrum(rng, K: int, min_separation: float = 0.05,
                             max_attempts: int = 10_000) -> PeriodicSpectrum:
    """``K`` uniform points per period ``K``, redrawn until separated by ``min_separation``."""
    for _ in range(max_attempts):
        theta = NodeSet(rng.random(K))
        if K * separation(theta) >= min_separation:
            return PeriodicSpectrum(theta)
    raise InvalidInputError(f"could not draw K={K} points with separation {min_separation}")


def sine_type_height(K: int) -> float:
    """``K ln 3 / (2 pi)``: the height where each weight factor has ``q = 1/3``."""
    return K * LOG3 / (2.0 * math.pi)


def sine_type_verify(trials: int, seed: int = 0, K_max: int = 16, min_separation: float = 0.05,
                     grid_size: int = 4096) -> VerifyReport:
    """Random periodic spectra against the sine-type and the periodic lower bounds.

    For each spectrum, ``y = K ln 3 / (2 pi)`` and ``(m, M)`` are the
    extrema of the generating-function weight on that line.
    """
    report = VerifyReport("sine-type", {"trials": int(trials), "K_max": int(K_max),
                                        "min_separation": min_separation,
                                        "grid_size": int(grid_size)}, seed)
    for t in range(trials):
        rng = rng_for(seed, t)
        K = int(rng.integers(1, K_max + 1))
        spec = random_periodic_spectrum(rng, K, min_separation)
        delta = spec.separation
        y = sine_type_height(K)
        m, M = weight_extrema(periodic_weight(spec, y, grid_size))
        eb = exact_bounds(spec.base)
        log_st = B.log_sine_type_bound(delta, y, m, M)
        log_per = B.log_periodic_bound(delta, K)
        ok = (B.log_space_check(eb.log_A, log_st, "lower")
              and B.log_space_check(eb.log_A, log_per, "lower"))
        report.records.append({"trial": t, "K": K, "delta": delta, "y": y, "m": m, "M": M,
                               "A_exact": eb.A, "log_A_exact": eb.log_A,
                               "sine_type_log": log_st, "periodic_log": log_per,
                               "margin_log": eb.log_A - max(log_st, log_per), "pass": ok})
    return report


def gautschi_verify(trials: int, seed: int = 0, d_max: int = 24,
                    min_separation: float = 1e-6) -> VerifyReport:
    """``||V^{-1}|| <= sqrt(d) pi^(d-1) max_k prod_j 1/delta_jk`` on random node sets."""
    report = VerifyReport("gautschi", {"trials": int(trials), "d_max": int(d_max),
                                       "min_separation": min_separation}, seed)
    for t in range(trials):
        rng = rng_for(seed, t)
        d = int(rng.integers(1, d_max + 1))
        while True:
            theta = NodeSet(rng.random(d))
            if separation(theta) >= min_separation:
                break
        eb = exact_bounds(theta)
        log_inv = -math.log(eb.sigma_min)
        log_bound = B.log_gautschi_bound(theta)
        ok = B.log_space_check(log_inv, log_bound, "upper")
        report.records.append({"trial": t, "d": d, "inverse_norm_log": log_inv,
                               "bound_value_log": log_bound,
                               "margin_log": log_bound - log_inv, "pass": ok})
    return report


def phi_decay_verify(L_values=(2, 3, 4, 5)) -> VerifyReport:
    """Test-function chain ``A <= S_L + tail <= 8/pi^L + tail`` for each ``L``."""
    report = VerifyReport("phi-decay", {"L_values": [int(v) for v in L_values]}, None)
    for L in L_values:
        r = phi_decay_check(int(L))
        upper = r.chain_bound + r.tail
        report.records.append({"L": r.L, "A_exact": r.A_exact, "S": r.S, "tail": r.tail,
                               "chain_bound": r.chain_bound,
                               "margin_log": math.log(upper) - math.log(max(r.A_exact, 1e-300)),
                               "pass": r.ok})
    return report
