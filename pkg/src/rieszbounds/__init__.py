"""Exact and theoretical lower Riesz bounds for periodic exponential systems.

A ``d``-periodic line spectrum with ``d`` points per period has the same
Riesz bounds as its node set on the circle, and those are read off the
singular values of a ``d x d`` Vandermonde matrix. The package computes
them, evaluates the closed-form lower bounds, and checks one against the
other.
"""

__version__ = "0.1.0"

from .errors import InvalidInputError, NearSingularError, NumericError, PrecisionWarning
from .spectra import (
    NodeSet,
    PerturbationSpec,
    PeriodicSpectrum,
    apply_perturbation,
    block_average_sup,
    counterexample_family,
    make_perturbation,
    read_nodes,
    roots_of_unity,
    separation,
    write_nodes,
)
from .vandermonde import (
    ExactBounds,
    build_vandermonde,
    exact_bounds,
    exact_bounds_many,
    gram_bounds,
    inverse_norm,
    sampling_ratio,
)
from .bounds import (
    BOUNDS,
    BoundReport,
    avdonin_bound,
    basis_perturbation_bound,
    bessel_upper,
    evaluate,
    gautschi_bound,
    general_stability_bound,
    hs_ratio_bound,
    ingham_bound,
    kadec_bound,
    log_avdonin_bound,
    log_gautschi_bound,
    log_mz_avdonin_bound,
    log_periodic_bound,
    log_sine_type_bound,
    mz_avdonin_bound,
    mz_kadec_bound,
    periodic_bound,
    sine_type_bound,
)
from .analytic import (
    WeightGrid,
    PhaseGrid,
    CountingGrid,
    a2_constant,
    counting_diagnostic,
    nu_bound_check,
    periodic_weight,
    phase_alpha,
    phi_decay_check,
    poisson_kernel_periodic,
    tau_sup,
    weight_extrema,
)
from .mz import (
    MZScanReport,
    TriangularFamily,
    family_generate,
    mz_avdonin_verify,
    mz_general_kadec_verify,
    mz_kadec_verify,
    mz_scan,
    rho_average,
)
