"""Analytic Black-Scholes layer: prices, sigma-derivatives, implied vol.

Zero rates and no dividends throughout, on spot e^y and strike e^k.  Prices
use the standard closed form; the Fourier representation (the same contour
integral the series pricer uses, with the Brownian exponent) backs the
arbitrary-order sigma-derivatives and serves as a cross-check oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .quadrature import QuadratureSpec

__all__ = [
    "BSInputs",
    "NoArbitrageError",
    "bs_price",
    "bs_vega",
    "bs_price_fourier",
    "bs_sigma_derivative",
    "implied_vol",
]


class NoArbitrageError(ValueError):
    """Price outside (or numerically on) the static no-arbitrage band."""


@dataclass(frozen=True)
class BSInputs:
    sigma: float
    t: float
    y: float
    k: float
    kind: str = "call"

    def __post_init__(self):
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.t <= 0.0:
            raise ValueError(f"t must be > 0, got {self.t}")
        if self.kind not in ("call", "put"):
            raise ValueError(f"kind must be 'call' or 'put', got {self.kind!r}")


def bs_price(inp: BSInputs) -> float:
    """Black-Scholes value at zero rates on spot e^y, strike e^k."""
    srt = inp.sigma * math.sqrt(inp.t)
    d_plus = (inp.y - inp.k) / srt + 0.5 * srt
    d_minus = d_plus - srt
    if inp.kind == "call":
        return float(math.exp(inp.y) * norm.cdf(d_plus) - math.exp(inp.k) * norm.cdf(d_minus))
    return float(math.exp(inp.k) * norm.cdf(-d_minus) - math.exp(inp.y) * norm.cdf(-d_plus))


def bs_vega(sigma: float, t: float, y: float, k: float) -> float:
    """d(price)/d(sigma); identical for calls and puts."""
    srt = sigma * math.sqrt(t)
    d_plus = (y - k) / srt + 0.5 * srt
    return float(math.exp(y) * norm.pdf(d_plus) * math.sqrt(t))


_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _call_transform(k: float, lam: np.ndarray) -> np.ndarray:
    # Generalized Fourier transform of (e^y - e^k)^+; needs Im(lam) < -1.
    return -np.exp(k - 1j * k * lam) / (_SQRT_2PI * (1j * lam + lam * lam))


def _contour(inp: BSInputs, quad: QuadratureSpec | None):
    quad = quad if quad is not None else QuadratureSpec()
    if quad.contour_imag >= -1.0:
        raise ValueError("call transform needs contour_imag < -1")
    lam_r, w = quad.grid(inp.t, inp.sigma)
    lam = lam_r + 1j * quad.contour_imag
    base = (
        _call_transform(inp.k, lam)
        * np.exp(1j * lam * inp.y) / _SQRT_2PI
        * np.exp(-0.5 * inp.sigma**2 * inp.t * (lam * lam + 1j * lam))
    )
    return lam, w, base


def bs_price_fourier(inp: BSInputs, quad: QuadratureSpec | None = None) -> float:
    """Contour-integral evaluation of the call price (cross-check path)."""
    _, w, base = _contour(inp, quad)
    value = float(np.real(w @ base))
    if inp.kind == "put":
        value -= math.exp(inp.y) - math.exp(inp.k)
    return value


def _deriv_coeff_table(n_max: int) -> list[list[np.polynomial.Polynomial]]:
    """Coefficients of d^n/dsigma^n e^{sigma^2 A / 2} = (sum_m q_{n,m}(sigma) A^m) e^{...}.

    q_{n+1,m} = q'_{n,m} + sigma * q_{n,m-1}; entries are polynomials in sigma.
    """
    sig = np.polynomial.Polynomial([0.0, 1.0])
    table = [[np.polynomial.Polynomial([1.0])]]
    for _ in range(n_max):
        prev = table[-1]
        nxt = []
        for m in range(len(prev) + 1):
            p = np.polynomial.Polynomial([0.0])
            if m < len(prev):
                p = p + prev[m].deriv()
            if m >= 1:
                p = p + sig * prev[m - 1]
            nxt.append(p)
        table.append(nxt)
    return table


def bs_sigma_derivatives(inp: BSInputs, n_max: int, quad: QuadratureSpec | None = None) -> np.ndarray:
    """[u, u', ..., u^(n_max)](sigma) in one contour pass (call payoff)."""
    lam, w, base = _contour(inp, quad)
    table = _deriv_coeff_table(n_max)
    A = -inp.t * (lam * lam + 1j * lam)
    a_pow = np.ones((n_max + 1, lam.size), dtype=complex)
    for m in range(1, n_max + 1):
        a_pow[m] = a_pow[m - 1] * A
    out = np.empty(n_max + 1)
    for n in range(n_max + 1):
        coeffs = np.array([p(inp.sigma) for p in table[n]])
        out[n] = float(np.real(w @ (base * (coeffs @ a_pow[: n + 1]))))
    return out


def bs_sigma_derivative(inp: BSInputs, n: int, quad: QuadratureSpec | None = None) -> float:
    """n-th sigma-derivative of the Black-Scholes price, n >= 1, spectrally."""
    if n < 1:
        raise ValueError(f"derivative order must be >= 1, got {n}")
    return float(bs_sigma_derivatives(inp, n, quad)[n])


_BRACKET_LO = 1e-9
_BRACKET_HI = 16.0
_BOUNDARY_PAD = 1e-14


def implied_vol(price: float, t: float, y: float, k: float, kind: str = "call") -> float:
    """Unique sigma with bs_price(sigma) = price, to |residual| <= 1e-12 e^y.

    Bracketing bisection down to width 1e-4, then Newton with vega.  Prices
    outside the no-arbitrage band raise NoArbitrageError.
    """
    if kind == "put":
        # Parity maps the put onto a call with the same implied vol.
        price = price + math.exp(y) - math.exp(k)
        kind = "call"
    if kind != "call":
        raise ValueError(f"kind must be 'call' or 'put', got {kind!r}")
    spot, strike = math.exp(y), math.exp(k)
    intrinsic = max(spot - strike, 0.0)
    if price <= intrinsic or price >= spot:
        raise NoArbitrageError(
            f"price {price} outside no-arbitrage band ({intrinsic}, {spot})"
        )
    if price - intrinsic < _BOUNDARY_PAD or spot - price < _BOUNDARY_PAD:
        raise NoArbitrageError(f"price {price} within 1e-14 of the arbitrage bound")

    def f(sig: float) -> float:
        return bs_price(BSInputs(sig, t, y, k, "call")) - price

    lo, hi = _BRACKET_LO, 1.0
    while f(hi) < 0.0:
        hi *= 2.0
        if hi > _BRACKET_HI:
            raise NoArbitrageError(f"no volatility below {_BRACKET_HI} reproduces {price}")
    while hi - lo > 1e-4:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid

    tol = 1e-12 * spot
    sig = 0.5 * (lo + hi)
    for _ in range(100):
        resid = f(sig)
        vega = bs_vega(sig, t, y, k)
        new = sig - resid / vega if vega > 0.0 else sig
        if not (lo < new < hi) or vega <= 0.0:
            # Newton left the bracket (possible at extreme strikes): bisect.
            if resid > 0.0:
                hi = sig
            else:
                lo = sig
            new = 0.5 * (lo + hi)
        converged = abs(new - sig) <= 1e-14 * max(sig, 1e-3)
        sig = new
        if converged:
            break
    if abs(f(sig)) <= 10 * tol:
        return float(sig)
    raise RuntimeError(f"implied vol iteration did not converge at price {price}")
