"""Causal and directional information flow between grouped channels.

Thin wrapper over the compiled extension. The main entry points:

- ``PrefixCovariance`` / ``PrefixCovariance.from_sections`` plus the rate
  functions (``cbi_rate``, ``massey_rate``, ``kamitake_rate``, ``sum_te_rate``,
  ``causal_mi_rate``, ``conditional_mi_rate``, ``measure_rates``) for the
  Gaussian closed forms,
- ``JointPmf``, ``build_pmf``, ``oracle_measure``, ``oracle_measure_kl`` and
  ``verify_identities`` for the exact discrete oracle,
- ``roc_points``, ``auc``, ``block_bootstrap``, ``significance_test`` and the
  moment/fit helpers for the ROC machinery,
- ``generate_trial`` / ``default_synth_config_json`` for synthetic data.
"""

from ._causalflow import (  # noqa: F401
    MEASURES,
    BootstrapResult,
    CausalflowError,
    JointPmf,
    PrefixCovariance,
    RocCurve,
    SignificanceResult,
    __version__,
    auc,
    band_power,
    block_bootstrap,
    build_pmf,
    causal_mi_rate,
    cbi_rate,
    conditional_mi_rate,
    default_synth_config_json,
    estimate_pmf,
    gaussian_entropy,
    generate_trial,
    kamitake_rate,
    l1_gaussian_fit,
    log_det_psd,
    massey_rate,
    measure_rates,
    normal_cdf,
    oracle_measure,
    oracle_measure_kl,
    roc_points,
    sample_from_pmf,
    significance_test,
    skewness_kurtosis,
    sum_te_rate,
    verify_identities,
)
