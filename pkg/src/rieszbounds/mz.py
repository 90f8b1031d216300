"""Triangular families of node sets and uniform-in-``d`` Marcinkiewicz-Zygmund checks.

A family assigns a node set of size ``d`` to each dimension ``d``. Its MZ
bounds are the infimum of the lower and the supremum of the upper Riesz
bounds over all ``d``; here they are always taken over a finite scanned
range and reported as such.

Displacements are stored in grid units (multiples of ``1/d``) throughout;
:func:`rho_average` converts to the absolute scale internally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import bounds as B
from .errors import InvalidInputError
from .report import VerifyReport, records_to_csv
from .spectra import (
    NodeSet,
    apply_perturbation,
    block_averages,
    counterexample_family,
    make_perturbation,
    rng_for,
    roots_of_unity,
    separation,
)
from .vandermonde import exact_bounds, exact_bounds_many

FAMILY_KINDS = ("canonical", "kadec_perturbed", "avdonin_block", "counterexample", "custom")

SCAN_COLUMNS = ["d", "delta_circ", "A_exact", "B_exact", "bound_name",
                "bound_value_log", "margin_log", "pass"]


def rho_average(mu, N: int) -> float:
    """``sup_m |(d/N) sum_{j=mN}^{(m+1)N-1} mu_j / d|`` with indices mod ``d``.

    ``mu`` is in grid units, so the ``1/d`` of the absolute scale cancels
    against the ``d/N`` prefactor.
    """
    mu = np.asarray(getattr(mu, "mu", mu), dtype=float).ravel()
    d = mu.size
    if int(N) != N or N < 1:
        raise InvalidInputError(f"N must be a positive integer, got {N!r}")
    if N > d:
        raise InvalidInputError(f"block length N={N} exceeds d={d}")
    N = int(N)
    block_sums = N * block_averages(mu / d, N)
    return float(np.abs((d / N) * block_sums).max())


@dataclass(frozen=True)
class TriangularFamily:
    """Recipe for ``Theta_d``.

    ``params`` by kind: ``kadec_perturbed`` needs ``mu_max``;
    ``avdonin_block`` needs ``L``, ``N`` and ``mu_star``; ``custom`` uses
    ``generator(d)`` and may declare ``delta``.
    """

    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    generator: Callable | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise InvalidInputError(f"unknown family kind {self.kind!r}; expected one of {FAMILY_KINDS}")
        if self.kind == "custom" and self.generator is None:
            raise InvalidInputError("custom family needs a generator")

    @property
    def declared_separation(self) -> float | None:
        """Lower bound on ``d * delta_circ(Theta_d)`` valid for every ``d``, if known."""
        if self.kind == "canonical":
            return 1.0
        if self.kind == "counterexample":
            return 0.75
        if self.kind == "kadec_perturbed":
            return 1.0 - 2.0 * float(self.params["mu_max"])
        if self.kind == "avdonin_block":
            L = float(self.params["L"])
            return 1.0 - 2.0 * L if L < 0.5 else None
        delta = self.params.get("delta")
        return None if delta is None else float(delta)

    def perturbation(self, d: int, keys=()):
        """Displacement pattern used at dimension ``d`` (perturbed kinds only)."""
        if self.kind == "kadec_perturbed":
            return make_perturbation("uniform_kadec", {"mu_max": self.params["mu_max"]},
                                     d, self.seed, keys=(*keys, d))
        if self.kind == "avdonin_block":
            p = {k: self.params[k] for k in ("L", "N", "mu_star")}
            return make_perturbation("block_avdonin", p, d, self.seed, keys=(*keys, d))
        return None


def family_generate(family: TriangularFamily, d: int) -> NodeSet:
    if int(d) != d or d < 1:
        raise InvalidInputError(f"d must be a positive integer, got {d!r}")
    d = int(d)
    if family.kind == "canonical":
        return roots_of_unity(d)
    if family.kind == "counterexample":
        return counterexample_family(d)
    if family.kind == "custom":
        out = family.generator(d)
        out = out if isinstance(out, NodeSet) else NodeSet(out)
        if out.d != d:
            raise InvalidInputError(f"custom generator returned {out.d} nodes for d={d}")
        return out
    return apply_perturbation(roots_of_unity(d), family.perturbation(d))


@dataclass
class MZRecord:
    d: int
    A: float
    B: float
    delta_circ: float
    log_A: float
    checks: list = field(default_factory=list)

    @property
    def delta(self) -> float:
        return self.d * self.delta_circ


@dataclass
class MZScanReport:
    """Per-``d`` exact bounds; aggregates are restricted to the scanned range."""

    family: TriangularFamily
    records: list

    range_note = "range-restricted: aggregates cover the scanned d only"

    @property
    def A_inf(self) -> float:
        return min(r.A for r in self.records)

    @property
    def B_sup(self) -> float:
        return max(r.B for r in self.records)

    @property
    def delta(self) -> float:
        """``min_d d * delta_circ`` over the scan."""
        return min(r.delta for r in self.records)

    def rows(self):
        out = []
        for r in self.records:
            base = {"d": r.d, "delta_circ": r.delta_circ, "A_exact": r.A, "B_exact": r.B}
            for c in r.checks:
                out.append({**base, "bound_name": c.name, "bound_value_log": c.log_value,
                            "margin_log": c.margin_log, "pass": c.passed})
        return out

    def to_csv(self) -> str:
        return records_to_csv(self.rows(), SCAN_COLUMNS)

    def summary(self) -> dict:
        return {"A_inf": self.A_inf, "B_sup": self.B_sup, "delta": self.delta,
                "d_min": min(r.d for r in self.records),
                "d_max": max(r.d for r in self.records), "note": self.range_note}


def _scan_checks(family, theta, eb, delta_family):
    d = theta.d
    checks = []
    if delta_family is not None and delta_family > 0:
        checks.append(B.evaluate("bessel", delta=delta_family).compare(eb.B, eb.log_B))
    if family.kind == "canonical":
        checks.append(B.evaluate("mz_kadec", mu=0.0).compare(eb.A, eb.log_A))
    elif family.kind == "kadec_perturbed":
        checks.append(B.evaluate("mz_kadec", mu=float(family.params["mu_max"])).compare(eb.A, eb.log_A))
    elif family.kind == "avdonin_block" and delta_family:
        pert = family.perturbation(d)
        N = int(family.params["N"])
        rho = rho_average(pert.mu, N)
        if rho < 0.25:
            rep = B.evaluate("mz_avdonin", delta=delta_family, L=max(pert.sup_norm, 1e-300),
                             N=N, rho=rho)
            checks.append(rep.compare(eb.A, eb.log_A))
    return checks


def mz_scan(family: TriangularFamily, d_values) -> MZScanReport:
    """Exact bounds for each ``d`` plus margins against the applicable bounds.

    The separation constant fed to the bounds is the family's declared one
    when available, otherwise the minimum measured over ``d_values``.
    """
    d_values = [int(d) for d in d_values]
    if not d_values or min(d_values) < 1:
        raise InvalidInputError("d_values must be a non-empty list of positive integers")
    thetas = []
    for d in d_values:
        try:
            thetas.append(family_generate(family, d))
        except InvalidInputError as exc:
            raise InvalidInputError(f"family generation failed at d={d}: {exc}") from exc
    measured = min(t.d * separation(t) for t in thetas)
    declared = family.declared_separation
    delta_family = measured if declared is None else min(declared, measured)

    records = []
    for theta in thetas:
        eb = exact_bounds(theta)
        rec = MZRecord(d=theta.d, A=eb.A, B=eb.B, delta_circ=separation(theta), log_A=eb.log_A)
        rec.checks = _scan_checks(family, theta, eb, delta_family)
        records.append(rec)
    return MZScanReport(family=family, records=records)


# --- verification suites ---------------------------------------------------

def _log_check(log_exact, log_bound, kind, tol=B.CHECK_TOL):
    passed = B.log_space_check(log_exact, log_bound, kind, tol)
    margin = (log_exact - log_bound) if kind == "lower" else (log_bound - log_exact)
    return passed, float(margin)


def _logs(smin, smax, d):
    with np.errstate(divide="ignore"):
        return 2.0 * np.log(smin) - math.log(d), 2.0 * np.log(smax) - math.log(d)


def mz_kadec_verify(d_values, mu_max: float, trials: int, seed: int = 0) -> VerifyReport:
    """Uniform ``mu_max``-perturbations of the roots of unity against the Kadec-type bounds.

    Every (trial, d) pair checks ``A >= 2 sin^2(pi/4 (1 - 4 mu_max))`` and
    ``B <= 8``, both with absolute slack ``1e-9``.
    """
    mu_max = float(mu_max)
    if not 0.0 <= mu_max < 0.25:
        raise InvalidInputError(f"mu_max must lie in [0, 1/4), got {mu_max}")
    d_values = sorted({int(d) for d in d_values})
    log_lower = B.log_mz_kadec_bound(mu_max)
    log_upper = math.log(8.0)
    report = VerifyReport("kadec", {"mu_max": mu_max, "trials": int(trials),
                                    "d_values": d_values}, seed)
    rows = []
    for d in d_values:
        base = np.arange(d) / d
        thetas = np.empty((trials, d))
        for t in range(trials):
            mu = make_perturbation("uniform_kadec", {"mu_max": mu_max}, d, seed, keys=(t, d)).mu
            thetas[t] = base + mu / d
        smin, smax = exact_bounds_many(thetas)
        log_A, log_B = _logs(smin, smax, d)
        for t in range(trials):
            ok_a, m_a = _log_check(log_A[t], log_lower, "lower")
            ok_b, m_b = _log_check(log_B[t], log_upper, "upper")
            rows.append({"trial": t, "d": d, "A_exact": smin[t] ** 2 / d,
                         "B_exact": smax[t] ** 2 / d, "log_A_exact": log_A[t],
                         "bound_value": math.exp(log_lower), "bound_value_log": log_lower,
                         "upper_value": 8.0, "margin_log": min(m_a, m_b),
                         "pass": ok_a and ok_b})
    rows.sort(key=lambda r: (r["trial"], r["d"]))
    report.records = rows
    return report


def mz_general_kadec_verify(base_family: TriangularFamily, mu: float, d_values, trials: int,
                            seed: int = 0) -> VerifyReport:
    """Arbitrary displacements of size ``<= mu`` applied to ``Theta_d`` of a base family.

    ``A_inf`` and the separation constant come from an :func:`mz_scan` of
    the base family over ``d_values``; the bound is
    ``(sqrt(A_inf) - 8 pi mu / delta)^2``.
    """
    d_values = sorted({int(d) for d in d_values})
    scan = mz_scan(base_family, d_values)
    A_inf = scan.A_inf
    delta = scan.delta
    if base_family.declared_separation is not None:
        delta = min(delta, base_family.declared_separation)
    threshold = math.sqrt(A_inf) * delta / (8.0 * math.pi)
    mu = float(mu)
    if not 0.0 <= mu < threshold:
        raise InvalidInputError(
            f"mu = {mu} must lie in [0, {threshold!r}) (measured A_inf = {A_inf!r}, delta = {delta!r})")
    bound = B.basis_perturbation_bound(A_inf, delta, mu)
    log_bound = B._log(bound)
    report = VerifyReport("general-kadec", {"family": base_family.kind, "mu": mu,
                                            "trials": int(trials), "d_values": d_values,
                                            "A_inf": A_inf, "delta": delta}, seed)
    rows = []
    for d in d_values:
        base = family_generate(base_family, d).nodes
        thetas = np.empty((trials, d))
        for t in range(trials):
            rng = rng_for(seed, t, d)
            if t % 2:
                disp = mu * rng.choice((-1.0, 1.0), size=d)
            else:
                disp = rng.uniform(-mu, mu, size=d)
            thetas[t] = base + disp / d
        smin, smax = exact_bounds_many(thetas)
        log_A, _ = _logs(smin, smax, d)
        for t in range(trials):
            ok, m = _log_check(log_A[t], log_bound, "lower")
            rows.append({"trial": t, "d": d, "A_exact": smin[t] ** 2 / d,
                         "log_A_exact": log_A[t], "bound_value": bound,
                         "bound_value_log": log_bound, "margin_log": m, "pass": ok})
    rows.sort(key=lambda r: (r["trial"], r["d"]))
    report.records = rows
    return report


def mz_avdonin_verify(trials: int, seed: int = 0, L_range=(0.3, 2.0), N_values=(2, 4, 8),
                      mu_star_max: float = 0.2, delta_min: float = 0.05, d_max: int = 128,
                      max_attempts: int = 1000) -> VerifyReport:
    """Block-averaged perturbations of the roots of unity against the discrete Avdonin bound.

    Each trial draws ``L``, ``N``, ``mu*`` and ``d``, builds a block pattern
    and redraws until ``d * delta_circ >= delta_min``. The bound uses the
    measured separation, ``max |mu_j|`` and ``rho(N)`` at that ``d`` and is
    compared in log space without slack.
    """
    if not 0.0 <= mu_star_max < 0.25:
        raise InvalidInputError("mu_star_max must lie in [0, 1/4)")
    N_values = [int(n) for n in N_values]
    if max(N_values) > d_max:
        raise InvalidInputError("every N must be at most d_max")
    report = VerifyReport("avdonin", {"trials": int(trials), "L_range": list(L_range),
                                      "N_values": N_values, "mu_star_max": mu_star_max,
                                      "delta_min": delta_min, "d_max": int(d_max)}, seed)
    for t in range(trials):
        for attempt in range(max_attempts):
            rng = rng_for(seed, t, attempt)
            L = float(rng.uniform(*L_range))
            N = int(rng.choice(N_values))
            mu_star = float(rng.uniform(0.0, min(mu_star_max, L)))
            d = int(rng.integers(N, d_max + 1))
            pert = make_perturbation("block_avdonin", {"L": L, "N": N, "mu_star": mu_star},
                                     d, seed, keys=(t, attempt))
            theta = apply_perturbation(roots_of_unity(d), pert)
            delta = d * separation(theta)
            if delta >= delta_min:
                break
        else:
            raise InvalidInputError(f"trial {t}: no draw met delta >= {delta_min}")
        eb = exact_bounds(theta)
        rho = rho_average(pert.mu, N)
        L_meas = pert.sup_norm
        log_bound = B.log_mz_avdonin_bound(delta, max(L_meas, 1e-300), N, rho)
        ok, m = _log_check(eb.log_A, log_bound, "lower", tol=0.0)
        report.records.append({"trial": t, "d": d, "N": N, "L": L_meas, "rho": rho,
                               "delta": delta, "attempts": attempt + 1,
                               "A_exact": eb.A, "log_A_exact": eb.log_A,
                               "bound_value": math.exp(log_bound) if log_bound > -745 else 0.0,
                               "bound_value_log": log_bound, "margin_log": m, "pass": ok})
    return report
