"""Least-squares calibration of the model to an observed implied-vol surface.

All maturities are fitted simultaneously (never maturity-by-maturity).  Each
objective evaluation prices a strike vector per maturity with the series
pricer, inverts Black-Scholes numerically, and sums squared implied-vol
residuals.  Quotes whose model price leaves the static no-arbitrage band
contribute a fixed unit penalty and are reported rather than dropped.

The initial log-price is pinned to y = 0: shifting y and the strikes together
only rescales the level-1 amplitudes, so the surface cannot identify y.  For
the same reason eps multiplies (a1^2, c1, Gamma1) and is pinned (default 1)
rather than fitted.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .black_scholes import NoArbitrageError, implied_vol
from .model import GaussianJumpMeasure, ModelParams
from .pricer import price_strikes
from .quadrature import QuadratureSpec

__all__ = [
    "Quote",
    "VolSurface",
    "CalibrationSpec",
    "CalibrationResult",
    "load_surface",
    "objective",
    "calibrate",
    "build_params",
]

DAYS_PER_YEAR = 365.0  # ACT/365; the quote convention is not market-standardized
_PENALTY = 1.0         # per quote whose model price breaks the arbitrage band

# Parameter naming: shared-jump calibrations use a common jump distribution
# (m, s) with separate intensities, the layout used for index smiles.
_SHARED_NAMES = ("a0", "a1", "c0", "c1", "eps", "beta", "gamma0", "gamma1", "m", "s")
_FULL_NAMES = (
    "a0", "a1", "c0", "c1", "eps", "beta",
    "gamma0", "m0", "s0", "gamma1", "m1", "s1",
)


@dataclass(frozen=True)
class Quote:
    maturity_days: int
    log_moneyness: float
    implied_vol: float


@dataclass(frozen=True)
class VolSurface:
    quotes: tuple[Quote, ...]

    def __post_init__(self):
        if not self.quotes:
            raise ValueError("surface has no quotes")
        seen = set()
        for q in self.quotes:
            if q.maturity_days <= 0:
                raise ValueError(f"maturity_days must be > 0, got {q.maturity_days}")
            if q.implied_vol <= 0.0:
                raise ValueError(f"implied_vol must be > 0, got {q.implied_vol}")
            key = (q.maturity_days, q.log_moneyness)
            if key in seen:
                raise ValueError(f"duplicate quote at (t, k) = {key}")
            seen.add(key)

    def by_maturity(self) -> dict[int, list[Quote]]:
        groups: dict[int, list[Quote]] = {}
        for q in self.quotes:
            groups.setdefault(q.maturity_days, []).append(q)
        return groups


def load_surface(path) -> VolSurface:
    """Read a surface CSV with header maturity_days,log_moneyness,implied_vol."""
    quotes = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty surface file")
        expected = ["maturity_days", "log_moneyness", "implied_vol"]
        if [h.strip() for h in header] != expected:
            raise ValueError(f"{path}: header must be {','.join(expected)}")
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{row_no}: expected 3 fields, got {len(row)}")
            try:
                days = int(row[0])
                lm = float(row[1])
                iv = float(row[2])
            except ValueError as exc:
                raise ValueError(f"{path}:{row_no}: malformed row: {exc}") from None
            if days <= 0:
                raise ValueError(f"{path}:{row_no}: maturity_days must be > 0")
            if iv <= 0.0:
                raise ValueError(f"{path}:{row_no}: implied_vol must be > 0")
            quotes.append(Quote(days, lm, iv))
    if not quotes:
        raise ValueError(f"{path}: surface file contains no quotes")
    try:
        return VolSurface(tuple(quotes))
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def model_residuals(
    params: ModelParams,
    surface: VolSurface,
    N: int = 6,
    quad: QuadratureSpec | None = None,
    days_per_year: float = DAYS_PER_YEAR,
):
    """Per-quote residuals IV_obs - IV_model and the out-of-band quote list.

    Quotes the model cannot invert (price outside the arbitrage band) get a
    residual of sqrt(_PENALTY) and their indices are returned, not dropped.
    """
    residuals = np.empty(len(surface.quotes))
    bad: list[int] = []
    index = {id(q): i for i, q in enumerate(surface.quotes)}
    for days, group in surface.by_maturity().items():
        t = days / days_per_year
        ks = np.array([q.log_moneyness for q in group])
        values, _, _ = price_strikes(params, t, 0.0, ks, N, quad)
        for q, price in zip(group, values):
            i = index[id(q)]
            try:
                residuals[i] = q.implied_vol - implied_vol(price, t, 0.0, q.log_moneyness)
            except NoArbitrageError:
                residuals[i] = math.sqrt(_PENALTY)
                bad.append(i)
    return residuals, bad


def objective(
    params: ModelParams,
    surface: VolSurface,
    N: int = 6,
    quad: QuadratureSpec | None = None,
    days_per_year: float = DAYS_PER_YEAR,
) -> float:
    """Sum of squared implied-vol residuals over the whole surface."""
    residuals, _ = model_residuals(params, surface, N, quad, days_per_year)
    return float(residuals @ residuals)


@dataclass(frozen=True)
class CalibrationSpec:
    """Free parameters with bounds, pinned parameters, and optimizer budget.

    initial/bounds are keyed by parameter name; anything not free must appear
    in fixed.  shared_jump selects the common-(m, s) layout with separate
    intensities gamma0/gamma1.  eps is pinned to 1 by default: it multiplies
    (a1^2, c1, Gamma1), so fitting it too is pure gauge freedom.
    """

    initial: dict[str, float]
    bounds: dict[str, tuple[float, float]]
    fixed: dict[str, float] = field(default_factory=dict)
    shared_jump: bool = True
    order: int = 6
    quad: QuadratureSpec | None = None
    max_evals: int = 6000
    f_tol: float = 1e-12
    x_tol: float = 1e-9
    restarts: int = 1
    days_per_year: float = DAYS_PER_YEAR

    def names(self) -> tuple[str, ...]:
        return _SHARED_NAMES if self.shared_jump else _FULL_NAMES

    def __post_init__(self):
        names = self.names()
        for d in (self.initial, self.bounds, self.fixed):
            for key in d:
                if key not in names:
                    raise ValueError(f"unknown parameter name {key!r}")
        for key in names:
            if (key in self.initial) == (key in self.fixed):
                raise ValueError(f"parameter {key!r} must be exactly one of free/fixed")
            if key in self.initial:
                if key not in self.bounds:
                    raise ValueError(f"free parameter {key!r} needs bounds")
                lo, hi = self.bounds[key]
                if not lo <= self.initial[key] <= hi:
                    raise ValueError(f"initial {key!r}={self.initial[key]} outside [{lo}, {hi}]")


def build_params(values: dict[str, float], shared_jump: bool = True) -> ModelParams:
    """Assemble ModelParams from a flat name/value mapping."""
    if shared_jump:
        nu0 = GaussianJumpMeasure(values["gamma0"], values["m"], values["s"])
        nu1 = GaussianJumpMeasure(values["gamma1"], values["m"], values["s"])
    else:
        nu0 = GaussianJumpMeasure(values["gamma0"], values["m0"], values["s0"])
        nu1 = GaussianJumpMeasure(values["gamma1"], values["m1"], values["s1"])
    return ModelParams(
        a0=values["a0"], a1=values["a1"], c0=values["c0"], c1=values["c1"],
        eps=values["eps"], beta=values["beta"], nu0=nu0, nu1=nu1,
    )


@dataclass(frozen=True)
class CalibrationResult:
    params: ModelParams
    fitted: dict[str, float]
    sse: float
    rmse: float
    residuals: tuple[float, ...]
    out_of_band: tuple[int, ...]
    n_evaluations: int
    converged: bool


def calibrate(surface: VolSurface, spec: CalibrationSpec) -> CalibrationResult:
    """Nelder-Mead least-squares fit of the free parameters, all maturities at once.

    Bounds are enforced by projection (clipping); after convergence the search
    restarts from the best point, which flushes a collapsed simplex.
    """
    free = [k for k in spec.names() if k in spec.initial]
    lo = np.array([spec.bounds[k][0] for k in free])
    hi = np.array([spec.bounds[k][1] for k in free])
    x0 = np.array([spec.initial[k] for k in free])
    evals = 0

    def unpack(x: np.ndarray) -> ModelParams:
        values = dict(spec.fixed)
        values.update(zip(free, np.clip(x, lo, hi)))
        return build_params(values, spec.shared_jump)

    def fun(x: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        return objective(
            unpack(x), surface, spec.order, spec.quad, spec.days_per_year
        )

    best_x, best_f = x0, fun(x0)
    converged = False
    for _ in range(1 + spec.restarts):
        res = minimize(
            fun,
            best_x,
            method="Nelder-Mead",
            bounds=list(zip(lo, hi)),
            options={
                "maxfev": max(spec.max_evals - evals, 1),
                "fatol": spec.f_tol,
                "xatol": spec.x_tol,
                "adaptive": len(free) > 6,
            },
        )
        if res.fun < best_f:
            best_x, best_f = np.asarray(res.x), float(res.fun)
        converged = bool(res.success)
        if evals >= spec.max_evals:
            break

    params = unpack(best_x)
    residuals, bad = model_residuals(
        params, surface, spec.order, spec.quad, spec.days_per_year
    )
    sse = float(residuals @ residuals)
    fitted = dict(spec.fixed)
    fitted.update(zip(free, np.clip(best_x, lo, hi)))
    return CalibrationResult(
        params=params,
        fitted={k: float(v) for k, v in fitted.items()},
        sse=sse,
        rmse=math.sqrt(sse / len(surface.quotes)),
        residuals=tuple(float(r) for r in residuals),
        out_of_band=tuple(bad),
        n_evaluations=evals,
        converged=converged,
    )
