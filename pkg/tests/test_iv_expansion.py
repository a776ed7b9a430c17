"""Implied-vol expansions: recursion identities, operators, Hermite ratios."""

import math

import numpy as np
import pytest

from locallevy import (
    GaussianJumpMeasure,
    ModelParams,
    OptionSpec,
    bs_price,
    BSInputs,
    chi,
    hermite_ratio,
    hermite_ratio_poly,
    implied_vol,
    operator_coeffs,
    price_series,
    sigma_closed_form,
    sigma_series,
)
from locallevy.iv_expansion import _hermite_polys, _solve_sigma_coeffs


# ---------------------------------------------------------------------------
# the series recursion against the hand-expanded low orders
# ---------------------------------------------------------------------------

def test_recursion_matches_hand_expanded_orders():
    rng = np.random.default_rng(12)
    u = rng.normal(0, 0.2, 4)          # synthetic per-order prices u_1..u_4
    D = rng.uniform(0.5, 2.0, 5)       # synthetic derivatives D_0..D_4
    got = _solve_sigma_coeffs(u, D)

    s1 = u[0] / D[1]
    s2 = (u[1] - 0.5 * s1**2 * D[2]) / D[1]
    s3 = (u[2] - (s2 * s1 * D[2] + s1**3 * D[3] / 6.0)) / D[1]
    s4 = (u[3] - (s3 * s1 * D[2] + 0.5 * s2**2 * D[2]
                  + 0.5 * s2 * s1**2 * D[3] + s1**4 * D[4] / 24.0)) / D[1]
    assert got == pytest.approx([s1, s2, s3, s4], rel=1e-12)


def test_series_vanishes_without_perturbation():
    p = ModelParams(a0=0.3, eps=0.0, beta=-1.0)
    series = sigma_series(p, OptionSpec(0.5, 0.0, 0.1), 3)
    assert series.sigma0 == 0.3
    assert series.coefficients == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)
    assert series.partial_sums[-1] == pytest.approx(0.3, abs=1e-12)
    assert not series.diverging


def test_series_requires_bs_base(sp500_params):
    with pytest.raises(ValueError):
        sigma_series(sp500_params, OptionSpec(0.5, 0.0, 0.0), 3)
    with pytest.raises(ValueError):
        sigma_series(ModelParams(a0=0.3), OptionSpec(0.5, 0.0, 0.0), 0)


def test_series_converges_at_moderate_eps(impvol2_params):
    # same model family as the jump figure but eps = 1: fast convergence zone
    p = ModelParams(a0=0.30, eps=1.0, beta=-1.25, nu1=impvol2_params.nu1)
    t, y = 0.125, 0.10
    for lmmr, tol3, tol5 in ((-0.4, 2e-3, 6e-4), (0.0, 2e-4, 2e-6), (0.8, 2e-4, 2e-6)):
        k = y + lmmr * t
        opt = OptionSpec(t, y, k)
        series = sigma_series(p, opt, 5)
        exact = implied_vol(price_series(p, opt, N=12).value, t, y, k)
        assert series.partial_sums[3] == pytest.approx(exact, abs=tol3)
        assert series.partial_sums[5] == pytest.approx(exact, abs=tol5)
        assert abs(series.partial_sums[5] - exact) < abs(series.partial_sums[3] - exact)
        assert not series.diverging


def test_divergence_flag_far_out(impvol2_params):
    t, y = 0.125, 0.10
    flagged = sigma_series(impvol2_params, OptionSpec(t, y, y - 1.0 * t), 5)
    assert flagged.diverging


# ---------------------------------------------------------------------------
# operator coefficients
# ---------------------------------------------------------------------------

def test_operator_first_order_m1():
    p = ModelParams(a0=0.5, a1=0.3)
    got = operator_coeffs(p, 1.0, order=1, M=1)
    assert got.coeffs == pytest.approx([0.0, -0.045, 0.045], abs=1e-15)


def test_operator_beta_zero_truncation_stalls():
    # the difference operator vanishes at beta = 0, so M = 2 adds nothing
    p = ModelParams(a0=0.5, a1=0.3, beta=0.0)
    c1 = operator_coeffs(p, 0.7, order=1, M=1).coeffs
    c2 = operator_coeffs(p, 0.7, order=1, M=2).coeffs
    assert c2 == pytest.approx(c1, abs=1e-15)


def test_phi_difference_operator():
    # phi(lam - i beta) - phi(lam) as an operator: (a0^2/2)(2 beta d + beta^2 - beta)
    from locallevy.iv_expansion import _phi_shifted

    a0, beta = 0.5, -2.0
    diff = _phi_shifted(a0, beta) - _phi_shifted(a0, 0.0)
    want = 0.5 * a0**2 * np.array([beta**2 - beta, 2 * beta])
    assert diff.coef == pytest.approx(want, rel=1e-14)
    # symbolic-expansion oracle: evaluate at a few lam against the symbols
    p = ModelParams(a0=a0)
    from locallevy import phi

    for lam in (0.3, -1.1, 2.7):
        op_val = np.polynomial.polynomial.polyval(1j * lam, diff.coef)
        assert op_val == pytest.approx(phi(p, lam - 1j * beta) - phi(p, lam), abs=1e-13)


def test_chi_moment_truncation_converges_to_symbol():
    # chi^(q)(-i d) evaluated at d = i lam must approach chi(lam) as q grows
    from locallevy.iv_expansion import _chi_full

    p = ModelParams(a0=0.3, a1=0.0, nu1=GaussianJumpMeasure(1.5, 0.05, 0.12))
    poly = _chi_full(p, 0.0, q=14)
    for lam in (0.5, 1.5, 3.0):
        approx = np.polynomial.polynomial.polyval(1j * lam, poly.coef)
        assert approx == pytest.approx(chi(p, lam), abs=1e-9)


def test_operator_validation():
    p = ModelParams(a0=0.5, a1=0.3)
    with pytest.raises(ValueError):
        operator_coeffs(p, 1.0, order=3, M=2)
    with pytest.raises(ValueError):
        operator_coeffs(p, 1.0, order=1, M=0)
    with pytest.raises(ValueError):
        operator_coeffs(p, 1.0, order=1, M=2, q=1)
    jumps = ModelParams(a0=0.5, nu1=GaussianJumpMeasure(1.0, 0.0, 0.1))
    with pytest.raises(ValueError):
        operator_coeffs(jumps, 1.0, order=1, M=2)  # jumps need q
    operator_coeffs(jumps, 1.0, order=1, M=2, q=4)
    killed = ModelParams(a0=0.5, a1=0.1, c1=0.05)
    with pytest.raises(ValueError):
        operator_coeffs(killed, 1.0, order=2, M=2)


# ---------------------------------------------------------------------------
# Hermite-style derivative ratios
# ---------------------------------------------------------------------------

def test_hermite_ratio_base_cases():
    assert hermite_ratio(0, 0.7, 0.3, 0.1, 0.25) == 1.0
    # P_1 = 1 - d_+/(a0 sqrt t) equals 1 where d_+ = 0, i.e. y = k - a0^2 t / 2
    t, k, a0 = 1.0, 0.3, 0.2
    y = k - 0.5 * a0**2 * t
    assert hermite_ratio(1, t, y, k, a0) == pytest.approx(1.0, abs=1e-14)


def test_hermite_ratio_matches_finite_differences():
    t, k, a0 = 0.8, 0.1, 0.35
    rng = np.random.default_rng(4)

    def g(y):
        d_plus = (y - k) / (a0 * math.sqrt(t)) + 0.5 * a0 * math.sqrt(t)
        return math.exp(y - 0.5 * d_plus**2)

    h = 1e-2
    for y in rng.normal(0, 0.4, 4):
        fd3 = (g(y + 2 * h) - 2 * g(y + h) + 2 * g(y - h) - g(y - 2 * h)) / (2 * h**3)
        fd3_half = (g(y + h) - 2 * g(y + h / 2) + 2 * g(y - h / 2) - g(y - h)) / (2 * (h / 2) ** 3)
        fd3 = (4 * fd3_half - fd3) / 3.0  # Richardson
        assert hermite_ratio(3, t, y, k, a0) * g(y) == pytest.approx(fd3, rel=1e-5)


def test_hermite_poly_degree_and_leading_coefficient():
    t, k, a0 = 0.6, -0.2, 0.4
    polys = _hermite_polys(6, t, k, a0)
    for n, poly in enumerate(polys):
        coef = poly.coef
        assert len(coef) == n + 1
        assert coef[-1] == pytest.approx((-1.0 / (a0 * a0 * t)) ** n, rel=1e-12)
    ratio = hermite_ratio_poly(3, t, k, a0)
    assert ratio.poly.degree() == 3
    assert ratio.value(0.1) == pytest.approx(hermite_ratio(3, t, 0.1, k, a0), rel=1e-14)


# ---------------------------------------------------------------------------
# closed-form smile
# ---------------------------------------------------------------------------

def test_beta_zero_total_variance_identity():
    # at beta = 0 the model is Black-Scholes with variance a0^2 + eps a1^2, so
    # sigma_1, sigma_2 must be the Taylor coefficients of sqrt(a0^2 + eps a1^2)
    a0, a1 = 0.5, 0.3
    p = ModelParams(a0=a0, a1=a1, eps=1.0, beta=0.0)
    vals = []
    for (t, k) in ((0.25, -0.3), (0.5, 0.0), (2.0, 0.7)):
        got = sigma_closed_form(p, OptionSpec(t, 0.0, k), M=8)
        vals.append(got)
        want = a0 + a1**2 / (2 * a0) - a1**4 / (8 * a0**3)
        assert got == pytest.approx(want, abs=1e-10)
    # strike- and maturity-independent
    assert np.ptp(vals) < 1e-12


def test_beta_zero_epsilon_remainder_bound():
    a0, a1 = 0.5, 0.3
    for eps in (0.1, 0.25, 0.5):
        p = ModelParams(a0=a0, a1=a1, eps=eps, beta=0.0)
        got = sigma_closed_form(p, OptionSpec(1.0, 0.0, 0.2), M=8)
        exact = math.sqrt(a0**2 + eps * a1**2)
        assert abs(got - exact) <= eps**3 * a1**6 / a0**5


def test_closed_form_matches_series_second_order(figiv_params):
    # the operator path must agree with the integration path at order eps^2
    t, y = 0.5, 0.0
    for lm in (-0.3, -0.1, 0.2, 0.5):
        opt = OptionSpec(t, y, y + lm)
        via_ops = sigma_closed_form(figiv_params, opt, M=12)
        via_series = sigma_series(figiv_params, opt, 2).partial_sums[2]
        assert via_ops == pytest.approx(via_series, abs=1e-4)


def test_closed_form_flat_when_unperturbed():
    p = ModelParams(a0=0.4, a1=0.0, eps=1.0, beta=-1.5)
    for k in (-0.2, 0.0, 0.3):
        assert sigma_closed_form(p, OptionSpec(0.5, 0.0, k), M=6) == pytest.approx(0.4, abs=1e-14)


def test_closed_form_with_jump_moments():
    # moment truncation needs jumps small against the diffusion scale a0 sqrt(t);
    # in that regime the second order tracks the exact smile
    p = ModelParams(a0=0.30, a1=0.10, eps=1.0, beta=-1.0,
                    nu1=GaussianJumpMeasure(2.0, 0.02, 0.05))
    t, y = 0.5, 0.0
    for lm in (-0.1, 0.0, 0.2):
        opt = OptionSpec(t, y, y + lm)
        got = sigma_closed_form(p, opt, M=10)          # q defaults to 8
        exact = implied_vol(price_series(p, opt, N=10).value, t, y, y + lm)
        assert got == pytest.approx(exact, abs=2e-3)
    got_q = sigma_closed_form(p, OptionSpec(t, y, y), M=10, q=10)
    assert got_q == pytest.approx(sigma_closed_form(p, OptionSpec(t, y, y), M=10), abs=1e-4)


def test_closed_form_validation(figiv_params, sp500_params):
    with pytest.raises(ValueError):
        sigma_closed_form(figiv_params, OptionSpec(0.5, 0.0, 0.0, "put"), M=10)
    with pytest.raises(ValueError):
        sigma_closed_form(sp500_params, OptionSpec(0.5, 0.0, 0.0), M=10)
    with pytest.raises(ValueError):
        sigma_closed_form(figiv_params, OptionSpec(0.5, 0.0, 0.0), M=0)
