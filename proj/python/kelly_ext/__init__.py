"""Betting-policy toolkit for repeated favorable gambles with outside capital.

The compiled core exposes single-round analysis (optimal fractions, growth
rates, failure rates), the log-wealth grid solver, closed-form large-n
approximations, and exact/Monte Carlo outcome distributions.
"""

from kelly_ext._core import (
    Classification,
    CompetitiveReport,
    DiffusionParams,
    DpSolution,
    EmpiricalDistribution,
    ExactSummary,
    Gamble,
    GambleClass,
    GridSpec,
    RateSpectrum,
    Strategy,
    WkbValue,
    alpha0,
    attractiveness_threshold,
    classify,
    competitive_check,
    diffusion_params,
    diffusion_value,
    diffusion_value_quadrature,
    entropy_rate_s,
    exact_fixed_fraction,
    expected_utility,
    failure_rate_h,
    growth_rate_r,
    isoelastic_utility,
    kappa,
    kappa_prime,
    optimal_fraction,
    simulate,
    solve,
    step,
    wkb_step_rate,
    wkb_value,
    wkb_value_max_v,
)

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "CompetitiveReport",
    "DiffusionParams",
    "DpSolution",
    "EmpiricalDistribution",
    "ExactSummary",
    "Gamble",
    "GambleClass",
    "GridSpec",
    "RateSpectrum",
    "Strategy",
    "WkbValue",
    "alpha0",
    "attractiveness_threshold",
    "classify",
    "competitive_check",
    "diffusion_params",
    "diffusion_value",
    "diffusion_value_quadrature",
    "entropy_rate_s",
    "exact_fixed_fraction",
    "expected_utility",
    "failure_rate_h",
    "growth_rate_r",
    "isoelastic_utility",
    "kappa",
    "kappa_prime",
    "optimal_fraction",
    "simulate",
    "solve",
    "step",
    "wkb_step_rate",
    "wkb_value",
    "wkb_value_max_v",
]
