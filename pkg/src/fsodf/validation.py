"""Series-versus-quadrature validation runs and the mutation harness.

Every formula family is compared against its oracle on a fixed grid:

    cdf, pdf     mixture CDF/PDF on quantile-spanning y grids
    link_ber     single-link error rate over SNR
    pr_sum       Pr(U + V <= 0) over SNR
    m_function   the Bessel-product moment at random (m1, m2)

Points that ended on the quadrature fallback are counted, not compared:
their value *is* the oracle.
"""

from __future__ import annotations

import contextlib
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _extended, ber_analysis, mixture_rv, oracle
from . import gamma_gamma as gg
from .gamma_gamma import MODERATE, STRONG, SeriesControl
from .mixture_rv import FALLBACK, MixtureParams

TOLERANCES = {"cdf": 1e-6, "pdf": 1e-6, "link_ber": 1e-6, "pr_sum": 1e-5, "m_function": 1e-6}
MAX_FALLBACK_RATE = 0.10
TURBULENCE = (STRONG, MODERATE)
B_VALUES = (0.5, 1.0, 2.0)
SNR_POINTS = (0.0, 5.0, 10.0, 15.0, 20.0)
# central probability mass covered by the y grids
TAIL_MASS = 5e-7
MUTATIONS = ("dk-sign", "cdf-branch")


@dataclass
class Family:
    name: str
    tol: float
    worst: float = 0.0
    worst_point: str = ""
    points: int = 0
    fallbacks: int = 0

    def add(self, value, reference, path, where):
        self.points += 1
        if path == FALLBACK:
            self.fallbacks += 1
            return
        err = abs(value - reference) / abs(reference) if reference != 0 else abs(value)
        if not err <= self.worst:  # also catches NaN
            self.worst, self.worst_point = err, where

    @property
    def fallback_rate(self):
        return self.fallbacks / self.points if self.points else 0.0

    @property
    def ok(self):
        return self.worst < self.tol and self.fallback_rate < MAX_FALLBACK_RATE


@dataclass
class Report:
    families: dict = field(default_factory=dict)
    seconds: float = 0.0

    def family(self, name):
        if name not in self.families:
            self.families[name] = Family(name, TOLERANCES[name])
        return self.families[name]

    @property
    def ok(self):
        return all(f.ok for f in self.families.values())

    def lines(self):
        for f in self.families.values():
            status = "ok" if f.ok else "FAIL"
            yield (
                f"{f.name:<11} max_rel_err={f.worst:.3e} tol={f.tol:.0e} "
                f"points={f.points} fallback={f.fallbacks} [{status}]"
            )
            if not f.ok and f.worst_point:
                yield f"  worst point: {f.worst_point}"


def quantile_range(params: MixtureParams, tail: float = TAIL_MASS) -> tuple[float, float]:
    """y values holding `tail` probability below and above, from the oracle CDF."""
    scale = params.a
    lo = brentq(lambda y: oracle.cdf_y_quadrature(y, params) - tail, -1e4 * scale, 0.0, xtol=1e-10 * scale)
    hi = brentq(lambda y: oracle.cdf_y_quadrature(y, params) - (1.0 - tail), 0.0, 1e5 * scale, xtol=1e-10 * scale)
    return lo, hi


def mixture_grid(params: MixtureParams, n: int = 200) -> np.ndarray:
    """n equally spaced y values spanning the central 1 - 2 TAIL_MASS of the distribution."""
    lo, hi = quantile_range(params)
    return np.linspace(lo, hi, n)


def mixture_cases():
    for turb in TURBULENCE:
        for b in B_VALUES:
            yield MixtureParams(b * b / 2.0, b, turb)


def check_mixture(report: Report, params: MixtureParams, ys, ctrl: SeriesControl = SeriesControl()):
    cdf, pdf = report.family("cdf"), report.family("pdf")
    t0 = time.perf_counter()
    evaluated = [(float(y), mixture_rv.cdf_y_eval(float(y), params, ctrl), mixture_rv.pdf_y_eval(float(y), params, ctrl)) for y in ys]
    report.seconds += time.perf_counter() - t0
    tag = f"alpha={params.turb.alpha} beta={params.turb.beta} a={params.a:g} b={params.b:g}"
    for y, c, f in evaluated:
        cdf.add(c.value, oracle.cdf_y_quadrature(y, params), c.path, f"cdf {tag} y={y!r}")
        pdf.add(f.value, oracle.pdf_y_quadrature(y, params), f.path, f"pdf {tag} y={y!r}")


def check_link_ber(report: Report, snrs=SNR_POINTS, ctrl: SeriesControl = SeriesControl()):
    fam = report.family("link_ber")
    for turb in TURBULENCE:
        for snr in snrs:
            v = ber_analysis.link_ber_eval(ber_analysis.snr_to_budget(snr, turb), ctrl)
            ref = oracle.link_ber_quadrature(10.0 ** (snr / 10.0), turb)
            fam.add(v.value, ref, v.path, f"link_ber alpha={turb.alpha} beta={turb.beta} snr={snr} dB")


def check_pr_sum(report: Report, snrs=SNR_POINTS, ctrl: SeriesControl = SeriesControl()):
    fam = report.family("pr_sum")
    for turb in TURBULENCE:
        for snr in snrs:
            link = ber_analysis.snr_to_budget(snr, turb)
            v = ber_analysis.pr_sum_negative_eval(link, link, ctrl)
            ref = oracle.pr_sum_quadrature(link.mixture(), link.mixture())
            fam.add(v.value, ref, v.path, f"pr_sum alpha={turb.alpha} beta={turb.beta} snr={snr} dB")


def m_cases(n: int = 10, seed: int = 2):
    """(g, m1, m2) with in-model links (a = b^2 / 2) and (m1, m2) uniform on [0.7, 3]^2."""
    rng = np.random.default_rng(seed)
    for _ in range(n):
        snr1, snr2 = rng.uniform(0.0, 20.0, 2)
        rd = ber_analysis.snr_to_budget(snr1, STRONG)
        sd = ber_analysis.snr_to_budget(snr2, STRONG)
        m1, m2 = rng.uniform(0.7, 3.0, 2)
        yield ber_analysis.GVector.from_links(rd, sd), float(m1), float(m2)


def check_m_function(report: Report, cases):
    fam = report.family("m_function")
    for g, m1, m2 in cases:
        fam.add(ber_analysis.m_function(g, m1, m2), oracle.m_quadrature(g, m1, m2), "series", f"m g={tuple(g)} m1={m1!r} m2={m2!r}")


def run(level: str = "fast", ctrl: SeriesControl = SeriesControl()) -> Report:
    """fast: ~50 points across all families; full: the complete acceptance grids."""
    report = Report()
    if level == "fast":
        for params in mixture_cases():
            check_mixture(report, params, mixture_grid(params, 4), ctrl)
        check_link_ber(report, (0.0, 10.0, 20.0), ctrl)
        check_pr_sum(report, (10.0,), ctrl)
        check_m_function(report, m_cases(4))
    elif level == "full":
        for params in mixture_cases():
            check_mixture(report, params, mixture_grid(params), ctrl)
        check_link_ber(report, SNR_POINTS, ctrl)
        check_pr_sum(report, SNR_POINTS, ctrl)
        check_m_function(report, m_cases(10))
    else:
        raise ValueError(f"unknown level {level!r}")
    return report


# -- mutation harness -----------------------------------------------------------


@contextlib.contextmanager
def mutation(name: str | None):
    """Temporarily inject a known defect: 'dk-sign' or 'cdf-branch'."""
    if name is None:
        yield
        return
    if name == "dk-sign":
        orig_log, orig_mp = gg.log_dk, _extended._dk

        def bad_log(a_shape, b_shape, k):
            value, sign = orig_log(a_shape, b_shape, k)
            return value, -sign if k % 2 else sign

        def bad_mp(p, q, k):
            return -orig_mp(p, q, k) if k % 2 else orig_mp(p, q, k)

        gg.log_dk, _extended._dk = bad_log, bad_mp
        _extended._dk_table.cache_clear()
        try:
            yield
        finally:
            gg.log_dk, _extended._dk = orig_log, orig_mp
            _extended._dk_table.cache_clear()
    elif name == "cdf-branch":
        mixture_rv._COMPLEMENT_UPPER_BRANCH = True
        try:
            yield
        finally:
            mixture_rv._COMPLEMENT_UPPER_BRANCH = False
    else:
        raise ValueError(f"unknown mutation {name!r}; expected one of {MUTATIONS}")


def relative_error(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference) if reference else math.inf
