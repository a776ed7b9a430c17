"""Defaultable exponential Levy-type dynamics with log-price-local coefficients.

The log price Y follows

    dY = alpha(Y) dt + sigma(Y) dW + (compensated jumps),

killed at rate kappa(Y), where

    sigma(y)^2 = a0^2 + eps * a1^2 * e^{beta y}
    kappa(y)   = c0   + eps * c1   * e^{beta y}
    nu(y, dz)  = nu0(dz) + eps * e^{beta y} * nu1(dz)

and the drift alpha is pinned so that the defaultable asset X = 1_{alive} e^Y
is a martingale.  Both jump measures are Gaussian,
nu_i(dz) = Gamma_i * N(m_i, s_i^2)(dz), which keeps every Levy integral in
closed form:

    int nu(dz) (e^z - 1 - z)               = Gamma (e^{m + s^2/2} - 1 - m)
    int nu(dz) (e^{i lam z} - 1 - i lam z) = Gamma (e^{i lam m - lam^2 s^2/2} - 1 - i lam m)

The second identity is entire in lam, so the characteristic exponents
phi (level-0 coefficients a0, c0, nu0) and chi (level-1 coefficients
a1, c1, nu1) accept arbitrary complex arguments; the series pricer needs them
on the shifted contours lam - i k beta.

Everything here is immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GaussianJumpMeasure",
    "ModelParams",
    "CharacteristicExponents",
    "sigma_local",
    "kill_local",
    "jump_intensity_local",
    "drift_alpha",
    "phi",
    "chi",
    "levy_moment",
    "epsilon_bound",
]


@dataclass(frozen=True)
class GaussianJumpMeasure:
    """Gaussian Levy measure Gamma * N(mean, std^2); intensity 0 means absent."""

    intensity: float = 0.0  # jumps per year, >= 0
    mean: float = 0.0       # log-return units
    std: float = 1.0        # log-return units, > 0

    def __post_init__(self):
        if self.intensity < 0.0:
            raise ValueError(f"jump intensity must be >= 0, got {self.intensity}")
        if self.std <= 0.0:
            raise ValueError(f"jump std must be > 0, got {self.std}")

    @property
    def is_absent(self) -> bool:
        return self.intensity == 0.0

    def exp_compensator(self) -> float:
        """Gamma * int (e^z - 1 - z) N(m, s^2)(dz), always finite."""
        return self.intensity * (math.exp(self.mean + 0.5 * self.std**2) - 1.0 - self.mean)

    def char_integral(self, lam):
        """Gamma * int (e^{i lam z} - 1 - i lam z) N(m, s^2)(dz); entire in lam."""
        lam = np.asarray(lam, dtype=complex)
        ilam = 1j * lam
        out = self.intensity * (
            np.exp(ilam * self.mean - 0.5 * lam * lam * self.std**2) - 1.0 - ilam * self.mean
        )
        return out if out.ndim else complex(out)

    def moment(self, n: int) -> float:
        """Gamma * E[Z^n] for Z ~ N(mean, std^2); requires n >= 2."""
        if n < 2:
            raise ValueError(f"moment order must be >= 2, got {n}")
        # Gaussian raw-moment recurrence M_n = m M_{n-1} + (n-1) s^2 M_{n-2}.
        m_prev, m_cur = 1.0, self.mean
        for j in range(2, n + 1):
            m_prev, m_cur = m_cur, self.mean * m_cur + (j - 1) * self.std**2 * m_prev
        return self.intensity * m_cur


def levy_moment(measure: GaussianJumpMeasure, n: int) -> float:
    """n-th raw moment Gamma * int z^n nu(dz) of a Gaussian jump measure, n >= 2."""
    return measure.moment(n)


@dataclass(frozen=True)
class ModelParams:
    """Full parameter set of the local Levy-type model.

    a0, a1: diffusion level / local diffusion amplitude (vol units)
    c0, c1: base / local default intensity (1/year)
    eps:    perturbation size
    beta:   local-dependence exponent of e^{beta y} (either sign allowed)
    nu0, nu1: Gaussian jump measures (level-0 and level-1)
    """

    a0: float
    a1: float = 0.0
    c0: float = 0.0
    c1: float = 0.0
    eps: float = 0.0
    beta: float = 0.0
    nu0: GaussianJumpMeasure = GaussianJumpMeasure()
    nu1: GaussianJumpMeasure = GaussianJumpMeasure()

    def __post_init__(self):
        for name in ("a0", "a1", "c0", "c1", "eps"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")

    def local_weight(self, y):
        """eps * e^{beta y}, the weight of the level-1 coefficients at state y."""
        return self.eps * np.exp(self.beta * np.asarray(y, dtype=float))


def sigma_local(params: ModelParams, y):
    """Local volatility sqrt(a0^2 + eps a1^2 e^{beta y})."""
    out = np.sqrt(params.a0**2 + params.local_weight(y) * params.a1**2)
    return out if out.ndim else float(out)


def kill_local(params: ModelParams, y):
    """Local default intensity c0 + eps c1 e^{beta y}."""
    out = params.c0 + params.local_weight(y) * params.c1
    return out if out.ndim else float(out)


def jump_intensity_local(params: ModelParams, y):
    """Total jump arrival rate Gamma0 + eps e^{beta y} Gamma1."""
    out = params.nu0.intensity + params.local_weight(y) * params.nu1.intensity
    return out if out.ndim else float(out)


def drift_alpha(params: ModelParams, y):
    """Martingale drift kappa(y) - sigma(y)^2 / 2 - int nu(y, dz)(e^z - 1 - z)."""
    w = params.local_weight(y)
    comp = params.nu0.exp_compensator() + w * params.nu1.exp_compensator()
    out = (
        params.c0 + w * params.c1
        - 0.5 * (params.a0**2 + w * params.a1**2)
        - comp
    )
    return out if out.ndim else float(out)


def _symbol(a: float, c: float, nu: GaussianJumpMeasure, lam):
    lam = np.asarray(lam, dtype=complex)
    out = (
        0.5 * a * a * (-(lam * lam) - 1j * lam)
        + c * (1j * lam - 1.0)
        - 1j * lam * nu.exp_compensator()
        + nu.char_integral(lam)
    )
    return out if out.ndim else complex(out)


def phi(params: ModelParams, lam):
    """Level-0 characteristic exponent; phi(0) = -c0 and phi(-i) = 0 exactly."""
    return _symbol(params.a0, params.c0, params.nu0, lam)


def chi(params: ModelParams, lam):
    """Level-1 characteristic exponent; chi(0) = -c1 and chi(-i) = 0 exactly."""
    return _symbol(params.a1, params.c1, params.nu1, lam)


@dataclass(frozen=True)
class CharacteristicExponents:
    """Evaluator pair (phi, chi) bound to a parameter set."""

    params: ModelParams

    def phi(self, lam):
        return phi(self.params, lam)

    def chi(self, lam):
        return chi(self.params, lam)


# Default grid for the relative-bound diagnostic below.
_EPS_BOUND_GRID = np.linspace(-200.0, 200.0, 4001)


def epsilon_bound(
    params: ModelParams,
    A: float,
    B: float,
    eta_norm: float,
    lam_grid=None,
) -> float:
    """Largest admissible eps from the relative-bound criterion.

    Returns min over the real grid of sqrt((A^2 + B^2 |phi|^2) / (eta_norm^2 |chi|^2)),
    skipping grid points where chi vanishes.  The perturbation size eps is
    admissible (series converges to the exact price) whenever eps does not
    exceed the returned value.  eta_norm is the caller-supplied L2 norm of the
    local-dependence function: for the unmollified e^{beta y} it is infinite,
    so this is exposed as a diagnostic rather than an automatic gate.
    """
    if A < 0.0:
        raise ValueError(f"A must be >= 0, got {A}")
    if not (0.0 < B <= 1.0):
        raise ValueError(f"B must lie in (0, 1], got {B}")
    if eta_norm <= 0.0:
        raise ValueError(f"eta_norm must be > 0, got {eta_norm}")
    grid = _EPS_BOUND_GRID if lam_grid is None else np.asarray(lam_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("lam_grid must be nonempty")

    phi_abs2 = np.abs(phi(params, grid)) ** 2
    chi_abs2 = np.abs(chi(params, grid)) ** 2
    ok = chi_abs2 > 0.0
    if not np.any(ok):
        raise ValueError("chi vanishes on the entire grid: bound is unconstrained")
    ratio = (A * A + B * B * phi_abs2[ok]) / (eta_norm * eta_norm * chi_abs2[ok])
    return float(np.sqrt(np.min(ratio)))
