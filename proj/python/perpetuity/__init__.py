"""Perpetuity tails: Monte Carlo estimates and rigorous bounds for R = MR + Q."""

from ._perpetuity import (
    BoundResult,
    ChernoffParams,
    DiscreteFinite,
    PerpetuityError,
    PerpetuityModel,
    PiecewiseLinearCdf,
    SimConfig,
    TailCurve,
    UniformInterval,
    chernoff_bound,
    decompose_path,
    dickman_tail,
    exact_distribution,
    geometric_mgf,
    lower_bound_gg,
    lower_bound_simplified,
    make_chernoff_params,
    optimize_chernoff,
    p_delta,
    paper_candidate_params,
    run_pipeline,
    sample_dominating_series,
    sample_perpetuity,
    simulate_tail,
    upper_bound_paper,
    validate_model,
)

__all__ = [name for name in dir() if not name.startswith("_")]
