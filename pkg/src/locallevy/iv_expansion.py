"""Implied-volatility expansions: the exact-in-eps series and the closed form.

Two routes from model parameters to smile:

* sigma_series - the order-by-order inversion of the price series through the
  Black-Scholes sigma-Taylor expansion.  Exact within its radius of
  convergence; needs the level-0 dynamics to be Brownian (nu0 absent, c0 = 0)
  so that the order-0 price is Black-Scholes at a0.  Each order costs one
  Fourier integration.

* sigma_closed_form - the second-order smile with the per-order prices
  replaced by M-term differential operators acting on the Black-Scholes
  price.  Requires an Ito diffusion without killing (with an optional
  moment-truncated extension for a level-1 jump measure); evaluates through
  Hermite-style derivative ratios of exp(y - d_+^2 / 2) with no numerical
  integration at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .black_scholes import BSInputs, bs_sigma_derivatives
from .model import ModelParams
from .pricer import OptionSpec, _raw_order_values
from .quadrature import QuadratureSpec

__all__ = [
    "IVSeries",
    "OperatorPolynomial",
    "HermiteRatio",
    "sigma_series",
    "operator_coeffs",
    "hermite_ratio",
    "sigma_closed_form",
]


@dataclass(frozen=True)
class IVSeries:
    """Per-order implied-vol coefficients sigma_k and partial sums sigma^(n).

    partial_sums[n] = a0 + sum_{k<=n} eps^k sigma_k.  diverging is a heuristic:
    it trips when |eps^k sigma_k| fails to decrease over the last three
    computed orders, the empirical signature of leaving the inversion's radius
    of convergence.
    """

    sigma0: float
    coefficients: tuple[float, ...]
    partial_sums: tuple[float, ...]
    diverging: bool


@dataclass(frozen=True)
class OperatorPolynomial:
    """Dense coefficients (ascending powers of d/dy) of a pricing operator."""

    coeffs: tuple[float, ...]

    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class HermiteRatio:
    """Polynomial P_n with d^n g = P_n g for g(y) = exp(y - d_+(y)^2 / 2)."""

    n: int
    t: float
    k: float
    a0: float
    poly: Polynomial

    def value(self, y: float) -> float:
        return float(self.poly(y))


def _solve_sigma_coeffs(u: np.ndarray, derivs: np.ndarray) -> np.ndarray:
    """Invert u_k = sigma_k D_1 + sum_{n>=2} (1/n!) [eps^k](delta^n) D_n for sigma_k.

    u: per-order prices u_1..u_K; derivs: D_0..D_K with D_n the n-th
    sigma-derivative of the Black-Scholes price at sigma_0.  The composition
    sums over j_1 + ... + j_n = k are generated exactly as coefficients of
    powers of delta(eps) = sum_j sigma_j eps^j.
    """
    K = len(u)
    sig = np.zeros(K)
    for k in range(1, K + 1):
        comp = 0.0
        if k >= 2:
            delta = np.zeros(k + 1)
            delta[1:k] = sig[: k - 1]
            power = delta.copy()
            for n in range(2, k + 1):
                power = np.convolve(power, delta)[: k + 1]
                comp += power[k] * derivs[n] / math.factorial(n)
        sig[k - 1] = (u[k - 1] - comp) / derivs[1]
    return sig


def sigma_series(
    params: ModelParams,
    opt: OptionSpec,
    n_max: int,
    quad: QuadratureSpec | None = None,
) -> IVSeries:
    """Implied-volatility series of order n_max for one option.

    Requires nu0 absent and c0 = 0 (the order-0 price must be Black-Scholes at
    a0).  Per-order prices come from the series pricer; sigma-derivatives of
    the Black-Scholes price are evaluated spectrally at sigma_0 = a0.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    if not params.nu0.is_absent or params.c0 != 0.0:
        raise ValueError("implied-vol series requires nu0 absent and c0 = 0")
    quad = quad if quad is not None else QuadratureSpec()
    raw, _ = _raw_order_values(
        params, opt.t, opt.y, np.array([opt.k]), n_max, quad
    )
    derivs = bs_sigma_derivatives(
        BSInputs(params.a0, opt.t, opt.y, opt.k, "call"), n_max, quad
    )
    coeffs = _solve_sigma_coeffs(raw[0, 1:], derivs)

    eps_pow = params.eps ** np.arange(1, n_max + 1)
    partial = params.a0 + np.concatenate([[0.0], np.cumsum(eps_pow * coeffs)])
    mags = np.abs(eps_pow * coeffs)
    diverging = bool(
        n_max >= 3 and mags[-1] > 0.0 and mags[-3] <= mags[-2] <= mags[-1]
    )
    return IVSeries(
        sigma0=params.a0,
        coefficients=tuple(float(c) for c in coeffs),
        partial_sums=tuple(float(s) for s in partial),
        diverging=diverging,
    )


def _require_closed_form_model(params: ModelParams, q: int | None) -> int | None:
    if not params.nu0.is_absent or params.c0 != 0.0 or params.c1 != 0.0:
        raise ValueError(
            "closed-form implied vol requires nu0 absent and c0 = c1 = 0"
        )
    if q is not None and q < 2:
        raise ValueError(f"moment truncation q must be >= 2, got {q}")
    if not params.nu1.is_absent and q is None:
        raise ValueError(
            "level-1 jumps need a moment truncation order q for the closed form"
        )
    return q


_D = Polynomial([0.0, 1.0])


def _phi_shifted(a: float, shift: float) -> Polynomial:
    """Diffusion exponent as a polynomial in d/dy at the shifted argument."""
    p = _D + shift
    return 0.5 * a * a * (p * p - p)


def _chi_reduced(params: ModelParams, q: int | None) -> Polynomial:
    """chi(-i d) with the common factor (d^2 - d) stripped."""
    out = Polynomial([0.5 * params.a1**2])
    if q is not None and not params.nu1.is_absent:
        for n in range(2, q + 1):
            moment = params.nu1.moment(n) / math.factorial(n)
            out = out + moment * sum((_D**j for j in range(n - 1)), Polynomial([0.0]))
    return out


def _chi_full(params: ModelParams, shift: float, q: int | None) -> Polynomial:
    """Full chi(-i d - i shift) polynomial, moment-truncated jumps included."""
    p = _D + shift
    out = 0.5 * params.a1**2 * (p * p - p)
    if q is not None and not params.nu1.is_absent:
        for n in range(2, q + 1):
            moment = params.nu1.moment(n) / math.factorial(n)
            out = out + moment * (p**n - p)
    return out


def _reduced_operator(params: ModelParams, t: float, order: int, M: int, q: int | None) -> Polynomial:
    """b_i polynomial with u_i^(M) = b_i(d) (d^2 - d) u_0; i = order."""
    beta = params.beta
    phi0 = _phi_shifted(params.a0, 0.0)
    phi_b = _phi_shifted(params.a0, beta)
    if order == 1:
        dphi = phi_b - phi0
        acc = Polynomial([0.0])
        for n in range(1, M + 1):
            acc = acc + (t**n / math.factorial(n)) * dphi ** (n - 1)
        return acc * _chi_reduced(params, q)
    phi_2b = _phi_shifted(params.a0, 2.0 * beta)
    acc = Polynomial([0.0])
    for n in range(2, M + 1):
        inner = Polynomial([0.0])
        for k in range(1, n):
            mixed = sum(
                (phi_b**m * phi_2b ** (k - 1 - m) for m in range(k)),
                Polynomial([0.0]),
            )
            inner = inner + math.comb(n - 1, k) * (-phi0) ** (n - 1 - k) * mixed
        acc = acc + (t**n / math.factorial(n)) * inner
    return acc * _chi_full(params, beta, q) * _chi_reduced(params, q)


def operator_coeffs(
    params: ModelParams,
    t: float,
    order: int,
    M: int,
    q: int | None = None,
) -> OperatorPolynomial:
    """M-term pricing operator for u_1 (order=1) or u_2 (order=2) over d/dy.

    Pure diffusion unless q is given, in which case the level-1 symbol is
    replaced by its moment truncation built from the jump moments I_2..I_q.
    """
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    q = _require_closed_form_model(params, q)
    full = _reduced_operator(params, t, order, M, q) * Polynomial([0.0, -1.0, 1.0])
    return OperatorPolynomial(coeffs=tuple(float(c) for c in full.coef))


def _hermite_polys(n_max: int, t: float, k: float, a0: float) -> list[Polynomial]:
    """P_0..P_n with d^n g = P_n g, g = exp(y - d_+^2/2); P_{n+1} = P_n' + P_n (1 - d_+/(a0 sqrt t))."""
    if t <= 0.0 or a0 <= 0.0:
        raise ValueError("hermite ratios need t > 0 and a0 > 0")
    v = a0 * a0 * t
    factor = Polynomial([1.0 - (0.5 * v - k) / v, -1.0 / v])
    polys = [Polynomial([1.0])]
    for _ in range(n_max):
        p = polys[-1]
        polys.append(p.deriv() + p * factor)
    return polys


def hermite_ratio(n: int, t: float, y: float, k: float, a0: float) -> float:
    """Ratio d^n g / g at y for g = exp(y - d_+^2 / 2)."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return float(_hermite_polys(n, t, k, a0)[n](y))


def hermite_ratio_poly(n: int, t: float, k: float, a0: float) -> HermiteRatio:
    """Same ratio as a polynomial object (degree and coefficients inspectable)."""
    return HermiteRatio(n=n, t=t, k=k, a0=a0, poly=_hermite_polys(n, t, k, a0)[n])


def sigma_closed_form(
    params: ModelParams,
    opt: OptionSpec,
    M: int,
    q: int | None = None,
) -> float:
    """Closed-form second-order implied vol a0 + eps sigma_1^(M) + eps^2 sigma_2^(M).

    Call payoffs only.  No numerical integration anywhere: the per-order
    operators act on the Black-Scholes price through the derivative ratios
    P_n, and the vega-ratio correction ((k-y)^2/(t a0^3) - t a0/4) closes the
    second order.  When the level-1 jump measure is present the symbol is
    moment-truncated at q (default 8).
    """
    if opt.kind != "call":
        raise ValueError("closed-form implied vol is defined for call payoffs")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if q is None and not params.nu1.is_absent:
        q = 8
    q = _require_closed_form_model(params, q)

    t, y, k, a0 = opt.t, opt.y, opt.k, params.a0
    b1 = _reduced_operator(params, t, 1, M, q).coef
    b2 = _reduced_operator(params, t, 2, M, q).coef
    polys = _hermite_polys(max(len(b1), len(b2)) - 1, t, k, a0)
    ratios = np.array([p(y) for p in polys])

    sig1 = math.exp(params.beta * y) * float(b1 @ ratios[: len(b1)]) / (t * a0)
    sig2 = (
        math.exp(2.0 * params.beta * y) * float(b2 @ ratios[: len(b2)]) / (t * a0)
        - 0.5 * sig1 * sig1 * ((k - y) ** 2 / (t * a0**3) - t * a0 / 4.0)
    )
    return a0 + params.eps * sig1 + params.eps**2 * sig2
