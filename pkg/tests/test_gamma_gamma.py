import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from fsodf import gamma_gamma as gg
from fsodf.errors import DomainError, NonConvergenceError, PoleError
from fsodf.gamma_gamma import MODERATE, STRONG, SeriesControl, TurbulenceParams

import oracle_values as ov

BOTH = [STRONG, MODERATE]


def quad_inf(f, points=(0.5, 1, 2, 5, 20)):
    total, edges = 0.0, (0.0, *points)
    for lo, hi in zip(edges, edges[1:]):
        total += integrate.quad(f, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    return total + integrate.quad(f, edges[-1], np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)[0]


# -- parameters -----------------------------------------------------------------


def test_paper_sets_pass_pole_guard():
    assert STRONG.alpha - STRONG.beta == pytest.approx(2.8)
    assert MODERATE.alpha - MODERATE.beta == pytest.approx(2.1)


@pytest.mark.parametrize("beta", [2.0, 2.0005, 1.9995, 3.0])
def test_pole_guard_rejects_integer_difference(beta):
    with pytest.raises(PoleError, match="perturb beta"):
        TurbulenceParams(4.0, beta)


@pytest.mark.parametrize("alpha,beta", [(0.0, 1.0), (-1.0, 1.3), (2.2, 0.0)])
def test_nonpositive_shapes(alpha, beta):
    with pytest.raises(DomainError):
        TurbulenceParams(alpha, beta)


def test_series_control_validation():
    with pytest.raises(DomainError):
        SeriesControl(max_terms=0)
    with pytest.raises(DomainError):
        SeriesControl(rel_tol=1.0)


# -- densities ------------------------------------------------------------------------


@pytest.mark.parametrize("turb", BOTH)
def test_pdf_normalized_with_unit_mean(turb):
    assert quad_inf(lambda z: gg.gg_pdf(z, turb) if z > 0 else 0.0) == pytest.approx(1.0, abs=1e-8)
    assert quad_inf(lambda z: z * gg.gg_pdf(z, turb) if z > 0 else 0.0) == pytest.approx(1.0, abs=1e-8)


def test_pdf_oracle_value():
    assert gg.gg_pdf(1.0, STRONG) == pytest.approx(ov.GG_PDF_1_STRONG, rel=1e-12)


@pytest.mark.parametrize("turb", BOTH)
@pytest.mark.parametrize("w", [0.25, 1.0, 4.0])
def test_w_pdf_change_of_variables(turb, w):
    assert gg.gg_w_pdf(w, turb) == pytest.approx(gg.gg_pdf(math.sqrt(w), turb) / (2 * math.sqrt(w)), rel=1e-13)


@pytest.mark.parametrize("turb", BOTH)
def test_w_pdf_normalized_and_second_moment(turb):
    f = lambda w: gg.gg_w_pdf(w, turb) if w > 0 else 0.0  # noqa: E731
    pts = (0.1, 0.5, 1, 3, 10, 50)
    assert quad_inf(f, pts) == pytest.approx(1.0, abs=1e-8)
    expected = (1 + 1 / turb.alpha) * (1 + 1 / turb.beta)
    assert quad_inf(lambda w: w * f(w), pts) == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize("fn", [gg.gg_pdf, gg.gg_w_pdf])
@pytest.mark.parametrize("z", [0.0, -1.0])
def test_density_domain(fn, z):
    with pytest.raises(DomainError):
        fn(z, STRONG)


@settings(deadline=None)
@given(z=st.floats(1e-8, 1e3), i=st.sampled_from([0, 1]))
def test_densities_nonnegative(z, i):
    assert gg.gg_pdf(z, BOTH[i]) >= 0.0
    assert gg.gg_w_pdf(z, BOTH[i]) >= 0.0


# -- series coefficients ---------------------------------------------------------------


@settings(deadline=None)
@given(a=st.floats(0.3, 8), b=st.floats(0.3, 8), k=st.integers(0, 80))
def test_dk_swapped_shapes_have_opposite_signs(a, b, k):
    frac = abs((a - b) - round(a - b))
    if frac <= gg.POLE_GUARD + 1e-6:
        return
    # the Gamma(a - b + k + 1) sign enters too, so compare on k past the Gamma poles
    k_big = k + int(abs(a - b)) + 2
    s1 = math.copysign(1, gg.dk_coeff(a, b, k_big))
    s2 = math.copysign(1, gg.dk_coeff(b, a, k_big))
    assert s1 == -s2


def test_d0_oracle():
    assert gg.dk_coeff(4.2, 1.4, 0) == pytest.approx(ov.D0_STRONG, rel=1e-12)


def test_dk_pole():
    with pytest.raises(PoleError):
        gg.log_dk(4.0, 2.0, 3)


@pytest.mark.parametrize("turb", BOTH)
def test_dk_summands_eventually_decrease(turb):
    for w in (0.1, 0.5, 1.0):
        mags = [
            max(math.exp(lb + (m - 1) * math.log(w)), math.exp(la + (ma - 1) * math.log(w)))
            for _, ((lb, _, m), (la, _, ma)) in gg.series_terms(turb, 60)
        ]
        tail = mags[15:]
        assert all(x > y for x, y in zip(tail, tail[1:]))


# -- W series ---------------------------------------------------------------------------


@pytest.mark.parametrize("turb", BOTH)
@pytest.mark.parametrize("w", [0.1, 1.0, 5.0])
def test_w_series_matches_closed_form(turb, w):
    assert gg.gg_w_pdf_series(w, turb) == pytest.approx(gg.gg_w_pdf(w, turb), rel=1e-8)


@pytest.mark.parametrize("turb", BOTH)
def test_w_series_log_grid(turb):
    converged = 0
    for w in np.logspace(-3, 2, 41):
        try:
            value = gg.gg_w_pdf_series(float(w), turb)
        except NonConvergenceError:
            continue
        converged += 1
        assert value == pytest.approx(gg.gg_w_pdf(float(w), turb), rel=1e-8)
    assert converged >= 30


def test_w_series_cap_signalled():
    with pytest.raises(NonConvergenceError):
        gg.gg_w_pdf_series(1e4, STRONG, SeriesControl(max_terms=10))


# -- sampler ----------------------------------------------------------------------------


def test_sampler_determinism():
    a = gg.sample_gg(np.random.default_rng(7), STRONG, 1000)
    b = gg.sample_gg(np.random.default_rng(7), STRONG, 1000)
    assert np.array_equal(a, b)


@pytest.mark.slow
@pytest.mark.parametrize("turb", BOTH)
def test_sampler_moments(turb):
    n = 10**7
    z = gg.sample_gg(np.random.default_rng(11), turb, n)
    m2 = (1 + 1 / turb.alpha) * (1 + 1 / turb.beta)
    assert abs(z.mean() - 1) <= 3 * math.sqrt((m2 - 1) / n)
    m4 = (
        (1 + 1 / turb.alpha) * (1 + 2 / turb.alpha) * (1 + 3 / turb.alpha)
        * (1 + 1 / turb.beta) * (1 + 2 / turb.beta) * (1 + 3 / turb.beta)
    )
    assert abs((z * z).mean() - m2) <= 3 * math.sqrt((m4 - m2 * m2) / n)


@pytest.mark.slow
@pytest.mark.parametrize("turb", BOTH)
def test_sampler_ks_against_density(turb):
    z = np.sort(gg.sample_gg(np.random.default_rng(3), turb, 10**6))
    # numerically integrated CDF on a grid, interpolated in between
    grid = np.concatenate([[0.0], np.geomspace(1e-4, z[-1] * 1.01, 3000)])
    pieces = [integrate.quad(lambda t: gg.gg_pdf(t, turb) if t > 0 else 0.0, lo, hi, epsabs=1e-13)[0] for lo, hi in zip(grid, grid[1:])]
    cdf_grid = np.concatenate([[0.0], np.cumsum(pieces)])
    result = stats.kstest(z, lambda x: np.interp(x, grid, cdf_grid))
    assert result.pvalue > 0.01
