"""End-to-end acceptance checks; each test prints one PASS/FAIL verdict line."""

import math
import os
import time

import numpy as np
import pytest
from scipy import integrate, stats

from fsodf import ber_analysis as ba
from fsodf import cli, mc_sim, mixture_rv, oracle, specfun, validation
from fsodf.gamma_gamma import MODERATE, STRONG
from fsodf.mc_sim import SimConfig

pytestmark = pytest.mark.slow

REGIMES = {"strong": STRONG, "moderate": MODERATE}
MC_SNRS = tuple(float(s) for s in range(0, 27, 2))
MC_TRIALS = 10**7
MC_SCHEMES = {"selective_df": "selective_df", "perfect_relay": "perfect_relay", "direct_2x": "direct_double_power"}


def mixture_report():
    report = validation.Report()
    for params in validation.mixture_cases():
        validation.check_mixture(report, params, validation.mixture_grid(params, 200))
    return report


def describe(report):
    parts = []
    for f in report.families.values():
        parts.append(f"{f.name} max_rel={f.worst:.2e} fallback={f.fallbacks}/{f.points}")
    return "; ".join(parts)


def test_1_series_matches_oracle(verdict):
    report = mixture_report()
    ok = report.ok and report.seconds < 60.0
    verdict(1, ok, f"{describe(report)}; series time {report.seconds:.1f} s (< 60 s)")
    assert report.ok, "\n".join(report.lines())
    assert report.seconds < 60.0


def test_2_link_ber(verdict):
    report = validation.Report()
    validation.check_link_ber(report, validation.SNR_POINTS)
    verdict(2, report.ok, describe(report))
    assert report.ok, "\n".join(report.lines())


def test_3_pr_sum_and_m_function(verdict, monkeypatch):
    seen = []
    original = ba.GVector.z

    def watched(self):
        z = original.fget(self)
        seen.append(z)
        return z

    monkeypatch.setattr(ba.GVector, "z", property(watched))
    report = validation.Report()
    validation.check_pr_sum(report, validation.SNR_POINTS)
    m_family = report.family("m_function")
    for turb in (STRONG, MODERATE):
        for snr in validation.SNR_POINTS:
            link = ba.snr_to_budget(snr, turb)
            g = ba.GVector.from_links(link, link)
            for m1, m2 in ((turb.beta, turb.beta), (turb.alpha, turb.beta), (turb.beta + 1, turb.alpha + 2)):
                m_family.add(ba.m_function(g, m1, m2), oracle.m_quadrature(g, m1, m2), "series", f"m snr={snr} m=({m1}, {m2})")
    z_max = max(abs(z) for z in seen)
    ok = report.ok and z_max < ba.Z_ASSERT_TOL and len(seen) > 0
    verdict(3, ok, f"{describe(report)}; max |z| = {z_max:.1e} over {len(seen)} calls")
    assert report.ok, "\n".join(report.lines())
    assert z_max < ba.Z_ASSERT_TOL


def test_4_analytic_matches_monte_carlo(verdict):
    cells = [(name, turb, scheme, snr) for name, turb in REGIMES.items() for scheme in MC_SCHEMES for snr in MC_SNRS]
    configs = [
        SimConfig(MC_TRIALS, 1, MC_SCHEMES[scheme], snr, turb, turb, turb) for _, turb, scheme, snr in cells
    ]
    t0 = time.perf_counter()
    estimates = mc_sim.sweep(configs, workers=os.cpu_count() or 1)
    seconds = time.perf_counter() - t0
    compared, worst, misses = 0, 0.0, []
    for (name, turb, scheme, snr), est in zip(cells, estimates):
        if est.ber < 1e-5:
            continue
        p = ba.curve_ber(scheme, snr, turb)
        z = abs(est.ber - p) / math.sqrt(p * (1 - p) / est.trials)
        compared += 1
        worst = max(worst, z)
        if z > 3.0:
            misses.append(f"{name}/{scheme}@{snr:g}dB z={z:.2f}")
    ok = not misses and seconds < 600.0
    verdict(4, ok, f"{compared} points with MC BER >= 1e-5, worst |z| = {worst:.2f} (<= 3); MC time {seconds:.0f} s (< 600 s)"
            + (f"; misses: {misses}" if misses else ""))
    assert not misses
    assert seconds < 600.0


def test_5_direct_to_selective_gap_moderate(verdict):
    direct = ba.snr_at_ber("direct_2x", 1e-4, MODERATE)
    selective = ba.snr_at_ber("selective_df", 1e-4, MODERATE)
    gap = direct - selective
    ok = abs(gap - 14.0) <= 2.0
    verdict(5, ok, f"moderate gap at BER 1e-4 = {gap:.2f} dB (direct {direct:.2f}, selective {selective:.2f}); want 14 +/- 2")
    assert ok


def test_6_selective_close_to_perfect(verdict):
    gaps = {}
    for name, turb in REGIMES.items():
        gaps[name] = ba.snr_at_ber("selective_df", 1e-4, turb) - ba.snr_at_ber("perfect_relay", 1e-4, turb)
    ok = all(g < 1.0 for g in gaps.values())
    verdict(6, ok, "selective - perfect at BER 1e-4: " + ", ".join(f"{k} {v:.3f} dB" for k, v in gaps.items()) + " (want < 1 dB)")
    assert ok, gaps


def test_7_property_spot_checks(verdict, tmp_path):
    notes = []
    # monotone CDF on the central-mass grid
    for turb in (STRONG, MODERATE):
        p = mixture_rv.MixtureParams(0.5, 1.0, turb)
        values = np.array([mixture_rv.cdf_y(float(y), p) for y in validation.mixture_grid(p, 200)])
        assert np.all(np.diff(values) >= -1e-12)
    notes.append("CDF monotone")
    # PDF integrates to the enclosed mass
    p = mixture_rv.MixtureParams(0.5, 1.0, MODERATE)
    lo, hi = validation.quantile_range(p, 1e-9)
    edges = [lo, 0.0, p.a, 10 * p.a, 100 * p.a, hi]
    total = sum(integrate.quad(lambda y: mixture_rv.pdf_y(y, p), u, v, epsrel=1e-8, limit=50)[0] for u, v in zip(edges, edges[1:]))
    assert abs(total - (1 - 2e-9)) <= 1e-5
    notes.append(f"PDF mass {total:.8f}")
    # Bessel recurrence and order symmetry
    rng = np.random.default_rng(0)
    worst = 0.0
    for nu, x in zip(rng.uniform(0.1, 5.0, 200), rng.uniform(0.1, 50.0, 200)):
        lhs = specfun.bessel_k_scaled(nu + 1, x)
        rhs = specfun.bessel_k_scaled(nu - 1, x) + 2 * nu / x * specfun.bessel_k_scaled(nu, x)
        worst = max(worst, abs(lhs - rhs) / lhs, abs(specfun.bessel_k_scaled(-nu, x) / specfun.bessel_k_scaled(nu, x) - 1))
    assert worst <= 1e-10
    notes.append(f"Bessel identities {worst:.1e}")
    # decision statistic versus the mixture law
    pvalues = []
    for snr in (5.0, 15.0):
        link = ba.snr_to_budget(snr, MODERATE)
        u = mc_sim.sample_statistic(np.random.default_rng(100 + int(snr)), link.eta, link.noise_var, MODERATE, 2000)
        m = link.mixture()
        pvalues.append(stats.kstest(u, lambda v: np.array([mixture_rv.cdf_y(float(x), m) for x in np.atleast_1d(v)])).pvalue)
    assert min(pvalues) > 0.01
    notes.append("KS p=" + "/".join(f"{q:.2f}" for q in pvalues))
    # byte-identical sweeps
    outs = [tmp_path / f"s{i}.csv" for i in range(2)]
    for out in outs:
        assert cli.main(["sweep", "--snr-start", "0", "--snr-stop", "10", "--snr-step", "5", "--trials", "50000", "--out", str(out)]) == 0
    assert outs[0].read_bytes() == outs[1].read_bytes()
    notes.append("sweeps byte-identical")
    verdict(7, True, "; ".join(notes) + " (full property suites: the other test modules)")


def test_8_branch_mutation_breaks_criterion_1(verdict):
    with validation.mutation("cdf-branch"):
        report = mixture_report()
    cdf = report.families["cdf"]
    caught = not report.ok
    verdict(8, caught, f"with the y > 0 branch complemented: cdf max_rel={cdf.worst:.2e} -> criterion 1 {'fails' if caught else 'still passes'}")
    assert caught
