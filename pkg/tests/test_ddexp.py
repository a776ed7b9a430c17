"""Divided differences of the exponential against a high-precision oracle."""

import math

import mpmath
import numpy as np
import pytest

from locallevy import divided_diff_exp, expdd_first_row


def mp_divided_diff_exp(nodes, dps=None):
    """Newton table of exp over distinct complex nodes.

    The table cancels ~|log10 spread| digits per level, so the working
    precision scales with the node count and closeness.
    """
    if dps is None:
        arr = np.asarray(nodes, dtype=complex)
        spread = np.max(np.abs(arr - arr.mean())) if arr.size > 1 else 1.0
        per_level = max(0.0, -math.log10(max(spread, 1e-300))) + 2.0
        dps = 40 + int(len(arr) * per_level)
    with mpmath.workdps(dps):
        xs = [mpmath.mpc(z) for z in nodes]
        col = [mpmath.exp(x) for x in xs]
        order = 0
        while len(col) > 1:
            order += 1
            col = [
                (col[i + 1] - col[i]) / (xs[i + order] - xs[i])
                for i in range(len(col) - 1)
            ]
        return complex(col[0])


def test_single_node():
    assert divided_diff_exp(0.7, [2.0 - 1.0j]) == pytest.approx(
        np.exp(0.7 * (2.0 - 1.0j)), rel=1e-14
    )


def test_confluent_pair_and_triple():
    phi_ = -0.3 + 0.2j
    t = 1.3
    assert divided_diff_exp(t, [phi_, phi_]) == pytest.approx(
        t * np.exp(t * phi_), rel=1e-13
    )
    # triple node: t^2 e^{t phi} / 2
    assert divided_diff_exp(t, [phi_, phi_, phi_]) == pytest.approx(
        0.5 * t * t * np.exp(t * phi_), rel=1e-13
    )


def test_two_distinct_nodes():
    assert divided_diff_exp(1.0, [0.0, 1.0]) == pytest.approx(math.e - 1.0, rel=1e-14)


def test_against_mpmath_random_scales():
    rng = np.random.default_rng(23)
    for scale_exp in (-6, -3, -1, 0, 1):
        for m in (2, 4, 8, 13):
            center = rng.normal(0, 2) + 1j * rng.normal(0, 2)
            spread = 10.0**scale_exp
            nodes = center + spread * (rng.normal(0, 1, m) + 1j * rng.normal(0, 1, m))
            got = divided_diff_exp(1.0, nodes)
            want = mp_divided_diff_exp(nodes)
            assert got == pytest.approx(want, rel=1e-11), (scale_exp, m)


def test_against_mpmath_mixed_clusters():
    # two tight clusters far apart: the hard mixed-confluence geometry
    rng = np.random.default_rng(31)
    for _ in range(6):
        c1 = rng.normal(0, 1) + 1j * rng.normal(0, 1)
        c2 = c1 + rng.uniform(5, 30) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        nodes = np.concatenate([
            c1 + 1e-5 * rng.normal(0, 1, 4) * (1 + 1j),
            c2 + 1e-5 * rng.normal(0, 1, 4) * (1 - 1j),
        ])
        got = divided_diff_exp(0.8, nodes)
        want = (0.8 ** (len(nodes) - 1)) * mp_divided_diff_exp(0.8 * nodes)
        assert got == pytest.approx(want, rel=1e-9)


def test_wide_spread_scaling_path():
    rng = np.random.default_rng(47)
    nodes = rng.normal(0, 40, 9) + 1j * rng.normal(0, 40, 9)
    got = divided_diff_exp(1.0, nodes)
    want = mp_divided_diff_exp(nodes)
    assert got == pytest.approx(want, rel=1e-9)


def test_first_row_gives_all_orders():
    rng = np.random.default_rng(3)
    z = rng.normal(0, 1, (5, 6)) + 1j * rng.normal(0, 1, (5, 6))
    rows = expdd_first_row(z)
    for b in range(5):
        for n in range(6):
            assert rows[b, n] == pytest.approx(
                mp_divided_diff_exp(z[b, : n + 1]), rel=1e-12
            )


def test_invalid_input():
    with pytest.raises(ValueError):
        divided_diff_exp(1.0, [])
