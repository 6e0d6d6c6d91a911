"""Gaussian differential privacy for e-values.

Canonical multiplicative release, sharp noise-aware thresholds, budget
accounting, private selection and peeling, e-BH, and the simulation and
audit harnesses built on them.
"""

__version__ = "0.1.0"

from .aggregation import compose, independent_product, product_mu, weighted_average
from .calibration import (
    Branch,
    CalibrationResult,
    PowerProfile,
    calibrate,
    calibrated_reject,
    calibration_benefit_rate,
    markov_reject,
    noise_cost_rate,
    power_improvement_g,
    power_profile,
    worst_case_null,
)
from .ebh import GroundTruth, TestingReport, ebh, evaluate, fdp_and_tp
from .errors import BudgetMismatchError, DomainError, GdpEvalueError, ParseError, ProvenanceError
from .mechanism import NoiseSpec, PrivateEValue, all_noisy_privatize, noise_spec, privatize
from .normal import (
    gdp_tradeoff,
    log_normal_cdf,
    mills_ratio_h,
    normal_cdf,
    normal_pdf,
    normal_quantile,
    solve_z_star,
)
from .peeling import (
    AdaptiveConfig,
    PeelingConfig,
    PrivateEVector,
    peel_adaptive,
    peel_fixed,
    split_adaptive_budget,
)
from .rng import RngSeed
from .selection import report_noisy_max, selection_epsilon, selection_split

__all__ = [
    "AdaptiveConfig", "Branch", "BudgetMismatchError", "CalibrationResult", "DomainError",
    "GdpEvalueError", "GroundTruth", "NoiseSpec", "ParseError", "PeelingConfig",
    "PowerProfile", "PrivateEValue", "PrivateEVector", "ProvenanceError", "RngSeed",
    "TestingReport", "all_noisy_privatize", "calibrate", "calibrated_reject",
    "calibration_benefit_rate", "compose", "ebh", "evaluate", "fdp_and_tp", "gdp_tradeoff",
    "independent_product", "log_normal_cdf", "markov_reject", "mills_ratio_h",
    "noise_cost_rate", "noise_spec", "normal_cdf", "normal_pdf", "normal_quantile",
    "peel_adaptive", "peel_fixed", "power_improvement_g", "power_profile", "privatize",
    "product_mu", "report_noisy_max", "selection_epsilon", "selection_split",
    "solve_z_star", "split_adaptive_budget", "weighted_average", "worst_case_null",
]
