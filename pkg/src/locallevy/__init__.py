"""Pricing and implied-volatility toolkit for defaultable local Levy-type models.

Model: log-price dynamics whose volatility, jump intensity, and default
intensity all depend on the state through e^{beta y}, with Gaussian jump
measures.  Option prices come from a convergent perturbation series evaluated
as a single contour Fourier integral; implied vols come either from the
order-by-order series inversion or from a closed-form second-order smile.
Monte Carlo simulation and least-squares smile calibration close the loop.
"""

from .black_scholes import (
    BSInputs,
    NoArbitrageError,
    bs_price,
    bs_price_fourier,
    bs_sigma_derivative,
    bs_sigma_derivatives,
    bs_vega,
    implied_vol,
)
from .calibration import (
    CalibrationResult,
    CalibrationSpec,
    Quote,
    VolSurface,
    build_params,
    calibrate,
    load_surface,
    model_residuals,
    objective,
)
from .config import format_model_config, load_model_config, parse_model_config
from .ddexp import divided_diff_exp, expdd_first_row
from .iv_expansion import (
    HermiteRatio,
    IVSeries,
    OperatorPolynomial,
    hermite_ratio,
    hermite_ratio_poly,
    operator_coeffs,
    sigma_closed_form,
    sigma_series,
)
from .model import (
    CharacteristicExponents,
    GaussianJumpMeasure,
    ModelParams,
    chi,
    drift_alpha,
    epsilon_bound,
    jump_intensity_local,
    kill_local,
    levy_moment,
    phi,
    sigma_local,
)
from .monte_carlo import McConfig, McEstimate, mc_price, simulate_terminal
from .pricer import (
    ConvergenceError,
    OptionSpec,
    SeriesPrice,
    call_transform,
    defaultable_value,
    duhamel_u1_oracle,
    exp_levy_price,
    fk_density,
    price_series,
    price_strikes,
    survival_probability,
)
from .quadrature import QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "BSInputs",
    "CalibrationResult",
    "CalibrationSpec",
    "CharacteristicExponents",
    "ConvergenceError",
    "GaussianJumpMeasure",
    "HermiteRatio",
    "IVSeries",
    "McConfig",
    "McEstimate",
    "ModelParams",
    "NoArbitrageError",
    "OperatorPolynomial",
    "OptionSpec",
    "Quote",
    "QuadratureSpec",
    "SeriesPrice",
    "VolSurface",
    "bs_price",
    "bs_price_fourier",
    "bs_sigma_derivative",
    "bs_sigma_derivatives",
    "bs_vega",
    "build_params",
    "calibrate",
    "call_transform",
    "chi",
    "defaultable_value",
    "divided_diff_exp",
    "drift_alpha",
    "duhamel_u1_oracle",
    "epsilon_bound",
    "exp_levy_price",
    "expdd_first_row",
    "fk_density",
    "format_model_config",
    "hermite_ratio",
    "hermite_ratio_poly",
    "implied_vol",
    "jump_intensity_local",
    "kill_local",
    "levy_moment",
    "load_model_config",
    "load_surface",
    "mc_price",
    "model_residuals",
    "objective",
    "operator_coeffs",
    "parse_model_config",
    "phi",
    "price_series",
    "price_strikes",
    "sigma_closed_form",
    "sigma_local",
    "sigma_series",
    "simulate_terminal",
    "survival_probability",
]
