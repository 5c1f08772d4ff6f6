"""Smooth-pursuit gaze metrics, paired statistics and linear SVM evaluation."""

from ._core import (
    PursuitError,
    cohens_d,
    cohort_stats,
    evaluate,
    excess_kurtosis,
    mc_power,
    noncentral_t_cdf,
    paired_t,
    required_n,
    roc_auc,
    roc_svg,
    run_cli,
    run_metrics,
    simulate_run,
    skewness,
    t_cdf,
    t_quantile,
    two_tailed_p,
    wrap_angle,
)

__all__ = [
    "PursuitError",
    "cohens_d",
    "cohort_stats",
    "evaluate",
    "excess_kurtosis",
    "mc_power",
    "noncentral_t_cdf",
    "paired_t",
    "required_n",
    "roc_auc",
    "roc_svg",
    "run_cli",
    "run_metrics",
    "simulate_run",
    "skewness",
    "t_cdf",
    "t_quantile",
    "two_tailed_p",
    "wrap_angle",
]
