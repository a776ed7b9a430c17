"""Monte Carlo: exactness degenerate cases, martingale checks, determinism."""

import math

import numpy as np
import pytest

from locallevy import (
    BSInputs,
    GaussianJumpMeasure,
    McConfig,
    ModelParams,
    OptionSpec,
    bs_price,
    defaultable_value,
    mc_price,
    simulate_terminal,
)


def terminal_arrays(params, t, y, cfg):
    ys, dead, absorbed = [], [], []
    for a, b, c in simulate_terminal(params, t, y, cfg):
        ys.append(a)
        dead.append(b)
        absorbed.append(c)
    return np.concatenate(ys), np.concatenate(dead), np.concatenate(absorbed)


def test_degenerate_model_is_deterministic():
    p = ModelParams(a0=0.0)
    ys, dead, absorbed = terminal_arrays(p, 1.0, 0.3, McConfig(2000, 0.01, seed=1))
    assert np.all(ys == 0.3)
    assert not dead.any() and not absorbed.any()
    est = mc_price(p, OptionSpec(1.0, 0.3, 0.0), McConfig(2000, 0.01, seed=1))
    assert est.price == pytest.approx(math.exp(0.3) - 1.0, abs=1e-12)
    assert est.std_error == 0.0


def test_martingale_pure_diffusion():
    p = ModelParams(a0=0.2)
    cfg = McConfig(100_000, 1e-2, seed=7)
    ys, dead, _ = terminal_arrays(p, 1.0, 0.0, cfg)
    vals = np.exp(ys)
    se = vals.std() / math.sqrt(len(vals))
    assert not dead.any()
    assert vals.mean() == pytest.approx(1.0, abs=3 * se)


def test_martingale_with_local_jumps(impvol_params):
    # validates drift_alpha + mean-compensator handling jointly
    cfg = McConfig(150_000, 2e-3, seed=21)
    ys, dead, _ = terminal_arrays(impvol_params, 0.5, -0.1, cfg)
    vals = np.where(dead, 0.0, np.exp(ys))
    se = vals.std() / math.sqrt(len(vals))
    assert vals.mean() == pytest.approx(math.exp(-0.1), abs=4 * se)


def test_constant_hazard_default_fraction():
    p = ModelParams(a0=0.1, c0=0.05)
    cfg = McConfig(120_000, 5e-3, seed=3)
    _, dead, _ = terminal_arrays(p, 2.0, 0.0, cfg)
    want = 1.0 - math.exp(-0.05 * 2.0)
    se = math.sqrt(want * (1 - want) / cfg.n_paths)
    assert dead.mean() == pytest.approx(want, abs=3 * se)


def test_seed_determinism(impvol_params):
    cfg = McConfig(70_000, 5e-3, seed=11)
    opt = OptionSpec(0.25, -0.1, 0.0)
    a = mc_price(impvol_params, opt, cfg)
    b = mc_price(impvol_params, opt, cfg)
    assert a == b  # bit-identical dataclasses
    c = mc_price(impvol_params, opt, McConfig(70_000, 5e-3, seed=12))
    assert c.price != a.price


def test_dt_refinement_stable():
    p = ModelParams(a0=0.25, a1=0.15, eps=1.0, beta=-1.0)
    opt = OptionSpec(0.5, 0.0, 0.0)
    coarse = mc_price(p, opt, McConfig(100_000, 4e-3, seed=5))
    fine = mc_price(p, opt, McConfig(100_000, 2e-3, seed=6))
    combined = math.hypot(coarse.std_error, fine.std_error)
    assert abs(coarse.price - fine.price) <= 2 * combined


def test_diffusion_call_matches_black_scholes():
    p = ModelParams(a0=0.2)
    opt = OptionSpec(0.5, 0.0, 0.05)
    est = mc_price(p, opt, McConfig(200_000, 2e-3, seed=9))
    want = bs_price(BSInputs(0.2, 0.5, 0.0, 0.05))
    assert est.price == pytest.approx(want, abs=3 * est.std_error)


def test_put_with_heavy_default_matches_parity():
    # the default leg pays the strike; the series side prices it by parity
    p = ModelParams(a0=0.3, c0=0.8)
    opt = OptionSpec(1.0, 0.0, 0.0, "put")
    est = mc_price(p, opt, McConfig(150_000, 2e-3, seed=13))
    want = defaultable_value(p, opt, N=0)
    assert est.n_defaulted > 0.4 * 150_000
    assert est.price == pytest.approx(want, abs=4 * est.std_error)


def test_absorption_counts_as_default():
    # brutal downward drift via huge local killing pushes paths into the floor
    p = ModelParams(a0=1.5)
    cfg = McConfig(5_000, 1e-2, seed=2, y_floor=-0.8)
    ys, dead, absorbed = terminal_arrays(p, 4.0, 0.0, cfg)
    assert absorbed.sum() > 0
    assert np.all(dead[absorbed])
    assert np.all(ys[absorbed] == -0.8)


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(0, 1e-3)
    with pytest.raises(ValueError):
        McConfig(10, 0.0)
    p = ModelParams(a0=0.2)
    with pytest.raises(ValueError):
        next(simulate_terminal(p, 0.5, 0.0, McConfig(10, 1.0)))
