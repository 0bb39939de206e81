"""SWIPT OFDM link simulator."""

from ._swipt import (
    ConfigError,
    achievable_rate,
    apply_pa,
    backoff_efficiency,
    bussgang_estimate,
    bussgang_soft_limiter,
    class_a_efficiency,
    companded_snr,
    companding_factor,
    compress,
    config_hash,
    design_dpd,
    eta3,
    exceedance_level,
    expand,
    generate_ofdm,
    harvest_dc,
    papr_db,
    papr_samples,
    path_loss_db,
    run_scenario,
    sinr,
    sspa_am_am,
    table1,
)

__version__ = "0.1.0"
