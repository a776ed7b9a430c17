"""Shared fixtures: the calibrated/figure parameter sets used across tests."""

import pytest

from locallevy import GaussianJumpMeasure, ModelParams


@pytest.fixture(scope="session")
def sp500_params() -> ModelParams:
    """S&P500-calibrated set: local vol + local default + Gaussian jumps."""
    return ModelParams(
        a0=0.059, a1=0.057, c0=0.009, c1=0.010, eps=1.0, beta=0.410,
        nu0=GaussianJumpMeasure(1.105, -0.076, 0.078),
        nu1=GaussianJumpMeasure(1.095, -0.076, 0.078),
    )


@pytest.fixture(scope="session")
def impvol_params() -> ModelParams:
    """Smile-vs-Monte-Carlo comparison set (jumps at both levels, no default)."""
    return ModelParams(
        a0=0.20, a1=0.10, eps=1.0, beta=-1.25,
        nu0=GaussianJumpMeasure(1.0, -0.20, 0.20),
        nu1=GaussianJumpMeasure(1.0, -0.10, 0.10),
    )


@pytest.fixture(scope="session")
def impvol2_params() -> ModelParams:
    """IV-series convergence set: pure-jump perturbation of a Brownian base."""
    return ModelParams(
        a0=0.30, eps=4.0, beta=-1.25,
        nu1=GaussianJumpMeasure(1.0, -0.40, 0.20),
    )


@pytest.fixture(scope="session")
def figiv_params() -> ModelParams:
    """Closed-form smile set: pure diffusion with a steep local exponent."""
    return ModelParams(a0=0.5, a1=0.3, eps=1.0, beta=-2.0)


@pytest.fixture(scope="session")
def density2_params() -> ModelParams:
    """Density-convergence set: symmetric Gaussian jumps at both levels."""
    return ModelParams(
        a0=0.20, a1=0.10, eps=1.0, beta=-0.95,
        nu0=GaussianJumpMeasure(1.0, -0.10, 0.15),
        nu1=GaussianJumpMeasure(1.0, -0.10, 0.15),
    )
