"""Residual-spectrum analysis for multivariate time series.

Kernel spectral estimation, orthogonal frequency-domain decomposition of a
time-series regression, and L2 tests for whether a covariate (or any of
several lagged covariates) contributes a residual spectrum.
"""

from .core import (EstimationConfig, FrequencyGrid, LagWindow, MultiSeries, make_grid,
                   window_constants)
from .decomposition import (Decomposition, coherence_of_order, decompose, filter_coefficients,
                            phi_K, regression_coefficients, residual_spectra,
                            transfer_functions)
from .errors import (InvalidArgumentError, NumericalConsistencyError, ParseError,
                     ResSpecError, SingularSpectrumError)
from .joint import (AugmentedField, build_lagged_series, gamma_phi, phi_vector,
                    run_joint_test)
from .lags import LagScore, LagSelection, lagged_residual_spectrum, select_lag, select_lags
from .residual import (TestReport, bias_mu_hat, run_test, test_statistic,
                       variance_sigma_hat)
from .simulation import CASES, MCResult, SimCase, generate_case, monte_carlo
from .spectral import (SpectralField, default_bandwidth, estimate_spectral_field,
                       sample_autocovariance)

__version__ = "0.1.0"

__all__ = [
    "EstimationConfig", "FrequencyGrid", "LagWindow", "MultiSeries", "make_grid",
    "window_constants",
    "Decomposition", "coherence_of_order", "decompose", "filter_coefficients", "phi_K",
    "regression_coefficients", "residual_spectra", "transfer_functions",
    "InvalidArgumentError", "NumericalConsistencyError", "ParseError", "ResSpecError",
    "SingularSpectrumError",
    "AugmentedField", "build_lagged_series", "gamma_phi", "phi_vector", "run_joint_test",
    "LagScore", "LagSelection", "lagged_residual_spectrum", "select_lag", "select_lags",
    "TestReport", "bias_mu_hat", "run_test", "test_statistic", "variance_sigma_hat",
    "CASES", "MCResult", "SimCase", "generate_case", "monte_carlo",
    "SpectralField", "default_bandwidth", "estimate_spectral_field", "sample_autocovariance",
]
