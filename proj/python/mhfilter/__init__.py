"""MinHash similarity screening with early-termination thresholds."""

from ._core import (
    Decision,
    ExperimentReport,
    HashFamily,
    PairOutcome,
    Resolution,
    ScreenConfig,
    ScreenRun,
    Signature,
    ThresholdRow,
    ThresholdTable,
    b_bit_match_probability,
    binom_cdf,
    binom_upper_tail,
    build_threshold_table,
    compare_full,
    compare_pair,
    estimate,
    estimator_variance,
    exact_jaccard,
    gen_synthetic,
    log_binom_pmf,
    match_count,
    parse_schedule,
    run_screen,
    solve_lower,
    solve_upper,
    to_b_bit,
)

__all__ = [name for name in dir() if not name.startswith("_")]
