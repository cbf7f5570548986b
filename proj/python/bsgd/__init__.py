"""Block stochastic gradient descent for CT reconstruction."""

from ._bsgd import (
    CSV_HEADER,
    BsgdError,
    System,
    add_noise,
    bsgd,
    lsqr,
    metrics,
    run_config,
    select_alpha_gamma,
    shepp_logan,
    skull_cube,
    snr_db,
    total_variation,
    tv_prox,
    verify_fixed_point,
)

__all__ = [
    "CSV_HEADER",
    "BsgdError",
    "System",
    "add_noise",
    "bsgd",
    "lsqr",
    "metrics",
    "run_config",
    "select_alpha_gamma",
    "shepp_logan",
    "skull_cube",
    "snr_db",
    "total_variation",
    "tv_prox",
    "verify_fixed_point",
]
