import numpy as np
import pytest

from cvtradeoff.channel import best_strategy, channel_point, channel_scan, gauss_channel_fidelity, strategy_for
from cvtradeoff.tradeoff import bk_fidelities, tradeoff_point


def brute_force_gauss(p, r_max=25.0, n=200_001):
    r = np.linspace(0, r_max, n)
    vals = [p * F + (1 - p) * G for F, G in map(bk_fidelities, r)]
    return max(vals)


def test_p_zero():
    res = gauss_channel_fidelity(0.0)
    assert res.f_gauss == 0.5
    assert res.r_star == 0.0
    assert not res.capped


def test_p_one_hits_cap():
    res = gauss_channel_fidelity(1.0)
    assert res.f_gauss == pytest.approx(1.0, abs=1e-20)
    assert res.capped


@pytest.mark.parametrize("p", [0.1, 0.4, 0.6, 0.75])
def test_matches_grid_search(p):
    res = gauss_channel_fidelity(p)
    assert res.f_gauss == pytest.approx(brute_force_gauss(p), abs=1e-9)
    assert res.f_gauss > p
    assert not res.capped


def test_crossover_at_four_fifths():
    assert gauss_channel_fidelity(0.8).f_gauss == pytest.approx(0.8, abs=1e-3)
    for p in np.linspace(0.0, 0.8, 81):
        assert gauss_channel_fidelity(float(p)).f_gauss >= p
    for p in (0.85, 0.95):
        assert gauss_channel_fidelity(p).capped


def test_channel_point_reuses_lambda():
    pt = tradeoff_point(0.5, 40, 3)
    cp = channel_point(pt)
    assert cp.f_opt == pt.lambda_max
    assert cp.f_av == 0.5
    assert cp.delta_f == cp.f_opt - cp.f_gauss


def test_channel_scan_p_zero():
    (cp,) = channel_scan([0.0], 30, 3)
    assert cp.delta_f == pytest.approx(0.0, abs=1e-12)
    assert not cp.artifact


def test_channel_scan_convex():
    ps = np.linspace(0, 1, 21)
    f = np.array([cp.f_opt for cp in channel_scan(ps, 30, 2)])
    assert (f[:-2] - 2 * f[1:-1] + f[2:]).min() >= -1e-10


def test_small_truncation_shows_artifact():
    # at N=10 the non-Gaussian curve falls below the Gaussian one well before p=1
    cps = channel_scan([0.3, 0.97], 10, 2)
    assert cps[0].delta_f > 0 and not cps[0].artifact
    assert cps[1].artifact


def test_strategies():
    assert best_strategy(0.0, 20, 2) == "gaussian_mdm"
    assert best_strategy(0.5, 60, 3) == "nongaussian_mdm"
    assert best_strategy(0.99, 20, 2) == "direct"


def test_strategy_tie_break():
    from cvtradeoff.channel import ChannelPoint

    tie = ChannelPoint(p=0.9, f_av=0.9, f_gauss=0.9, r_star=25.0, capped=True, f_opt=0.9, delta_f=0.0)
    assert strategy_for(tie) == "direct"
