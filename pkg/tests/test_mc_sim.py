import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from fsodf import ber_analysis as ba
from fsodf import mc_sim
from fsodf.errors import DomainError
from fsodf.gamma_gamma import MODERATE, STRONG
from fsodf.mc_sim import SimConfig
from fsodf.mixture_rv import cdf_y


def sigma(p, n):
    return math.sqrt(max(p * (1 - p), 1.0 / n) / n)


# -- config and estimates ---------------------------------------------------------------


@pytest.mark.parametrize(
    "kw",
    [dict(trials=0, seed=1), dict(trials=10, seed=-1), dict(trials=10, seed=1, scheme="amplify"), dict(trials=10, seed=1, symbol=0)],
)
def test_config_validation(kw):
    with pytest.raises(DomainError):
        SimConfig(**kw)


def test_noise_variance_from_snr():
    assert SimConfig(10, 1, snr_db=20.0).noise_var == pytest.approx(0.01, rel=1e-15)


@given(errors=st.integers(0, 1000), extra=st.integers(0, 10**6))
def test_clopper_pearson_brackets_estimate(errors, extra):
    n = errors + extra
    if n == 0:
        return
    lo, hi = mc_sim.clopper_pearson(errors, n)
    assert 0.0 <= lo <= errors / n <= hi <= 1.0


def test_estimate_invariants():
    est = mc_sim.simulate(SimConfig(50_000, 3, snr_db=5.0))
    assert est.trials == 50_000
    assert est.ber == est.errors / est.trials
    assert est.ci_low <= est.ber <= est.ci_high


# -- reproducibility --------------------------------------------------------------------


def test_same_seed_same_estimate():
    cfg = SimConfig(300_000, 42, snr_db=8.0)
    assert mc_sim.simulate(cfg) == mc_sim.simulate(cfg)


def test_different_seed_different_draws():
    a = mc_sim.simulate(SimConfig(300_000, 1, snr_db=4.0))
    b = mc_sim.simulate(SimConfig(300_000, 2, snr_db=4.0))
    assert a.errors != b.errors


def test_single_element_sweep_equals_simulate():
    cfg = SimConfig(100_000, 9, scheme="perfect_relay", snr_db=6.0)
    assert mc_sim.sweep([cfg]) == [mc_sim.simulate(cfg)]


def test_serial_and_parallel_sweeps_identical():
    cfgs = [SimConfig(mc_sim.BLOCK + 1000, 5, snr_db=s) for s in (0.0, 4.0, 8.0)]
    assert mc_sim.sweep(cfgs, workers=1) == mc_sim.sweep(cfgs, workers=2)


def test_sweep_rejects_empty():
    with pytest.raises(DomainError):
        mc_sim.sweep([])


# -- physics ------------------------------------------------------------------------------


@pytest.mark.parametrize("snr", [4.0, 10.0, 16.0])
def test_bpsk_symmetry(snr):
    n = 400_000
    plus = mc_sim.simulate(SimConfig(n, 21, snr_db=snr))
    minus = mc_sim.simulate(SimConfig(n, 22, snr_db=snr, symbol=-1))
    spread = math.hypot(sigma(plus.ber, n), sigma(minus.ber, n))
    assert abs(plus.ber - minus.ber) <= 3 * spread


@pytest.mark.parametrize("snr", [5.0, 15.0])
def test_decision_statistic_follows_mixture_law(snr):
    link = ba.snr_to_budget(snr, MODERATE)
    rng = np.random.default_rng(int(snr))
    u = mc_sim.sample_statistic(rng, link.eta, link.noise_var, MODERATE, 2000)
    params = link.mixture()
    result = stats.kstest(u, lambda v: np.array([cdf_y(float(x), params) for x in np.atleast_1d(v)]))
    assert result.pvalue > 0.01


def test_forwarding_rate_matches_relay_link():
    n, snr = 500_000, 6.0
    est = mc_sim.simulate(SimConfig(n, 13, snr_db=snr, turb_sr=STRONG))
    p_fwd = 1.0 - ba.link_ber(ba.snr_to_budget(snr, STRONG))
    assert abs(est.relay_forwards / n - p_fwd) <= 3 * sigma(p_fwd, n)


@pytest.mark.parametrize("scheme", mc_sim.SCHEMES)
@pytest.mark.parametrize("snr", [0.0, 8.0, 14.0])
def test_matches_analysis(scheme, snr):
    n = 400_000
    link = ba.snr_to_budget(snr, MODERATE)
    expected = {
        "selective_df": lambda: ba.df_ber(link, link, link),
        "perfect_relay": lambda: ba.perfect_relay_ber(link, link),
        "direct_double_power": lambda: ba.direct_ber(link),
    }[scheme]()
    est = mc_sim.simulate(SimConfig(n, 77, scheme=scheme, snr_db=snr))
    assert abs(est.ber - expected) <= 3 * sigma(expected, n)


@pytest.mark.slow
def test_scheme_ordering_at_20db():
    n = 10**7
    est = {s: mc_sim.simulate(SimConfig(n, 2024, scheme=s, snr_db=20.0)) for s in mc_sim.SCHEMES}
    perfect, selective, direct = est["perfect_relay"], est["selective_df"], est["direct_double_power"]
    assert perfect.ci_low <= selective.ci_high
    assert selective.ci_high < direct.ci_low


@pytest.mark.slow
def test_selective_df_grid_against_analysis():
    n = 10**6
    for snr in np.arange(0.0, 27.0, 2.0):
        link = ba.snr_to_budget(float(snr), MODERATE)
        expected = ba.df_ber(link, link, link)
        est = mc_sim.simulate(SimConfig(n, 31, snr_db=float(snr)))
        assert abs(est.ber - expected) <= 3 * sigma(expected, n), snr
