"""Average BER of selective decode-and-forward relaying with BPSK-SIM.

Every link is described by a LinkBudget (eta, N, turbulence); its decision
statistic is the mixture Y = aZ^2 + bZE with a = 4 eta^2 / N and
b = 2 sqrt(2) eta / sqrt(N). The relay-assisted error rate is

    P = P_sr P_sd + (1 - P_sr) Pr(U + V <= 0),

with U, V the S-D and R-D statistics. Pr(U + V <= 0) is a double series over
the W-density coefficients of both links whose inner pieces are the
Bessel-product moments computed by ``m_function``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from scipy.optimize import brentq

from . import _extended
from . import gamma_gamma as gg
from . import specfun
from ._series import sum_groups
from .errors import CancellationError, DomainError, NonConvergenceError
from .gamma_gamma import SeriesControl, TurbulenceParams
from .mixture_rv import FALLBACK, SERIES, SERIES_EXTENDED, MixtureParams, cdf_y_eval

__all__ = [
    "LinkBudget",
    "GVector",
    "BerValue",
    "DOUBLE_POWER_DB",
    "snr_to_budget",
    "link_ber",
    "link_ber_eval",
    "m_function",
    "pr_sum_negative",
    "pr_sum_negative_eval",
    "compose_df_ber",
    "df_ber",
    "df_ber_eval",
    "perfect_relay_ber",
    "direct_ber",
    "direct_ber_eval",
    "worst_path",
    "CURVES",
    "curve_ber",
    "snr_at_ber",
]

DOUBLE_POWER_DB = 10.0 * math.log10(2.0)
# in-model calls must land on the z = 0 point of the hypergeometric factor
Z_ASSERT_TOL = 1e-12
VALIDITY_TOL = 1e-9

_PATH_RANK = {SERIES: 0, SERIES_EXTENDED: 1, FALLBACK: 2}


@dataclass(frozen=True)
class LinkBudget:
    eta: float
    noise_var: float
    turb: TurbulenceParams

    def __post_init__(self):
        if not (self.eta > 0 and self.noise_var > 0):
            raise DomainError(f"eta and noise_var must be positive, got {self.eta!r}, {self.noise_var!r}")

    @property
    def a(self) -> float:
        return 4.0 * self.eta**2 / self.noise_var

    @property
    def b(self) -> float:
        return 2.0 * math.sqrt(2.0) * self.eta / math.sqrt(self.noise_var)

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.eta**2 / self.noise_var)

    def mixture(self) -> MixtureParams:
        return MixtureParams(self.a, self.b, self.turb)

    def doubled_power(self) -> "LinkBudget":
        return LinkBudget(self.eta * math.sqrt(2.0), self.noise_var, self.turb)


class GVector(NamedTuple):
    a1: float
    b1: float
    a2: float
    b2: float

    @classmethod
    def from_links(cls, rd: LinkBudget, sd: LinkBudget) -> "GVector":
        return cls(rd.a, rd.b, sd.a, sd.b)

    @property
    def z(self) -> float:
        """Hypergeometric argument 1 - (p2 / p1)^2 with p_i = a_i / b_i^2."""
        r = (self.a2 * self.b1**2) / (self.b2**2 * self.a1)
        return 1.0 - r * r


class BerValue(NamedTuple):
    value: float
    path: str


def worst_path(*paths: str) -> str:
    return max(paths, key=_PATH_RANK.__getitem__)


def snr_to_budget(snr_db: float, turb: TurbulenceParams) -> LinkBudget:
    """Unit eta, noise variance set so that eta^2 / N equals the average SNR."""
    return LinkBudget(1.0, 10.0 ** (-snr_db / 10.0), turb)


# -- single link ---------------------------------------------------------------


def link_ber_eval(link: LinkBudget, ctrl: SeriesControl = SeriesControl()) -> BerValue:
    ev = cdf_y_eval(0.0, link.mixture(), ctrl)
    return BerValue(ev.value, ev.path)


def link_ber(link: LinkBudget, ctrl: SeriesControl = SeriesControl()) -> float:
    """Single-link BPSK-SIM error rate, i.e. F_Y(0) of the link's statistic."""
    return link_ber_eval(link, ctrl).value


def direct_ber_eval(sd: LinkBudget, ctrl: SeriesControl = SeriesControl()) -> BerValue:
    return link_ber_eval(sd.doubled_power(), ctrl)


def direct_ber(sd: LinkBudget, ctrl: SeriesControl = SeriesControl()) -> float:
    """Non-cooperative baseline: the S-D link alone with the source at twice the power (+3.01 dB)."""
    return direct_ber_eval(sd, ctrl).value


# -- M-function ------------------------------------------------------------------


def _log_m(g: GVector, m1: float, m2: float, f21: float | None = None) -> float:
    a1, b1, a2, b2 = g
    p1, p2 = a1 / b1**2, a2 / b2**2
    if f21 is None:
        z = g.z
        f21 = 1.0 if z == 0.0 else specfun.gauss_2f1(m1 + m2 + 0.5, m2 + 1.0, m1 + m2 + 1.0, z)
    return (
        (m1 + m2 - 1.0) * math.log(2.0)
        - 0.5 * math.log(math.pi)
        - math.log(b1 * b2 * m2)
        - (m1 - 0.5) * math.log(a1)
        - (m2 - 0.5) * math.log(a2)
        - (m1 + 2.0 * m2 + 1.5) * math.log(p1)
        + (m2 + 0.5) * math.log(p2)
        + math.lgamma(m1 + m2 + 0.5)
        + math.lgamma(m1)
        + math.lgamma(m2 + 1.0)
        - math.lgamma(m1 + m2 + 1.0)
        + math.log(f21)
    )


def _check_g(g):
    g = GVector(*map(float, g))
    if not (g.a1 > 0 and g.a2 > 0 and g.b1 > 0 and g.b2 > 0):
        raise DomainError(f"m_function needs positive a1, b1, a2, b2, got {tuple(g)}")
    return g


def m_function(g, m1: float, m2: float) -> float:
    """Closed form of the moment

        2 / (pi b1 b2 m2 a1^(m1-1/2) a2^(m2-1/2))
            * int_0^inf y^(m1+m2) K_{m1-1/2}(a1 y / b1^2) K_{m2+1/2}(a2 y / b2^2) dy

    through Gamma ratios and 2F1(m1+m2+1/2, m2+1; m1+m2+1; z), z = 1 - (p2 / p1)^2,
    p_i = a_i / b_i^2. Needs m1, m2 > 0 and |z| < 1. On the in-model manifold
    p1 = p2 the hypergeometric factor is exactly one.
    """
    g = _check_g(g)
    if not (m1 > 0 and m2 > 0):
        raise DomainError(f"m_function needs m1, m2 > 0, got {m1!r}, {m2!r}")
    z = g.z
    if not abs(z) < 1.0:
        raise DomainError(f"hypergeometric argument z={z!r} outside |z| < 1")
    return math.exp(_log_m(g, m1, m2))


# -- Pr(U + V <= 0) --------------------------------------------------------------


def _check_validity(rd: LinkBudget, sd: LinkBudget) -> GVector:
    lhs, rhs = sd.a * rd.b**2, rd.a * sd.b**2
    if abs(lhs - rhs) / lhs >= VALIDITY_TOL:
        raise DomainError(
            "the double series needs a_sd b_rd^2 = a_rd b_sd^2; "
            f"got relative mismatch {abs(lhs - rhs) / lhs:.3g}"
        )
    g = GVector.from_links(rd, sd)
    assert abs(g.z) < Z_ASSERT_TOL, f"hypergeometric argument {g.z!r} is not 0 for in-model links"
    return g


def _sub_series(turb: TurbulenceParams, n: int):
    """Per sub-series (beta-led, alpha-led): lists of (log|d_k|, sign, m_k), k < n."""
    out = ([], [])
    for _, pair in gg.series_terms(turb, n):
        for idx, item in enumerate(pair):
            out[idx].append(item)
    return out


def _shells(g: GVector, rd_terms, sd_terms, n: int):
    """Yield shells s = max(k1, k2) of (log|term|, sign) over the four sub-series pairings."""
    cache: dict[tuple[float, float], float] = {}

    def log_m(m1, m2):
        key = (m1, m2)
        if key not in cache:
            cache[key] = _log_m(g, m1, m2, 1.0)
        return cache[key]

    for s in range(n):
        shell = []
        pairs = [(s, k2) for k2 in range(s + 1)] + [(k1, s) for k1 in range(s)]
        for k1, k2 in pairs:
            for rd_sub in rd_terms:
                l1, s1, m1 = rd_sub[k1]
                for sd_sub in sd_terms:
                    l2, s2, m2 = sd_sub[k2]
                    shell.append((l1 + l2 + log_m(m1, m2), s1 * s2))
        yield shell


def pr_sum_negative_eval(
    rd: LinkBudget, sd: LinkBudget, ctrl: SeriesControl = SeriesControl()
) -> BerValue:
    """Pr(U + V <= 0) with U the S-D and V the R-D decision statistic.

    The double series over (k1, k2) is summed shell by shell (shell s holds
    every pair with max(k1, k2) = s) and stops after two consecutive shells
    below ctrl.rel_tol of the running sum. Heavy cancellation moves the same
    sum to extended precision; non-convergence ends in the quadrature oracle.
    """
    g = _check_validity(rd, sd)
    n = ctrl.max_terms
    rd_terms, sd_terms = _sub_series(rd.turb, n), _sub_series(sd.turb, n)
    failure = None
    try:
        out = sum_groups(_shells(g, rd_terms, sd_terms, n), ctrl, "Pr(U+V<=0) double series")
        return BerValue(min(max(out.value, 0.0), 1.0), SERIES)
    except CancellationError as exc:
        failure = exc
        if ctrl.allow_extended_precision:
            try:
                value, _ = _extended.pr_sum_series(
                    tuple(g), (rd.turb.alpha, rd.turb.beta), (sd.turb.alpha, sd.turb.beta),
                    ctrl, _extended.working_digits(exc.estimate),
                )
                return BerValue(min(max(value, 0.0), 1.0), SERIES_EXTENDED)
            except NonConvergenceError as exc2:
                failure = exc2
    except NonConvergenceError as exc:
        failure = exc
    if not ctrl.allow_quadrature_fallback:
        raise failure
    from . import oracle

    return BerValue(oracle.pr_sum_quadrature(rd.mixture(), sd.mixture()), FALLBACK)


def pr_sum_negative(rd: LinkBudget, sd: LinkBudget, ctrl: SeriesControl = SeriesControl()) -> float:
    return pr_sum_negative_eval(rd, sd, ctrl).value


# -- composition -----------------------------------------------------------------


def compose_df_ber(p_sr: float, p_sd: float, p_sum: float) -> float:
    """P_sr P_sd + (1 - P_sr) Pr(U + V <= 0)."""
    return p_sr * p_sd + (1.0 - p_sr) * p_sum


def df_ber_eval(
    sr: LinkBudget, sd: LinkBudget, rd: LinkBudget, ctrl: SeriesControl = SeriesControl()
) -> BerValue:
    p_sr = link_ber_eval(sr, ctrl)
    p_sd = link_ber_eval(sd, ctrl)
    p_sum = pr_sum_negative_eval(rd, sd, ctrl)
    return BerValue(
        compose_df_ber(p_sr.value, p_sd.value, p_sum.value),
        worst_path(p_sr.path, p_sd.path, p_sum.path),
    )


def df_ber(sr: LinkBudget, sd: LinkBudget, rd: LinkBudget, ctrl: SeriesControl = SeriesControl()) -> float:
    """Selective DF error rate: the relay forwards only bits it decoded correctly."""
    return df_ber_eval(sr, sd, rd, ctrl).value


def perfect_relay_ber(sd: LinkBudget, rd: LinkBudget, ctrl: SeriesControl = SeriesControl()) -> float:
    """Relay that never errs: the composition with P_sr = 0."""
    return pr_sum_negative(rd, sd, ctrl)


# -- equal-SNR curves -----------------------------------------------------------------

CURVES = ("selective_df", "perfect_relay", "direct_2x")


def curve_ber(curve: str, snr_db: float, turb: TurbulenceParams, ctrl: SeriesControl = SeriesControl()) -> float:
    """BER of one scheme when all three links share snr_db and turbulence."""
    link = snr_to_budget(snr_db, turb)
    if curve == "selective_df":
        return df_ber(link, link, link, ctrl)
    if curve == "perfect_relay":
        return perfect_relay_ber(link, link, ctrl)
    if curve == "direct_2x":
        return direct_ber(link, ctrl)
    raise DomainError(f"unknown curve {curve!r}; expected one of {CURVES}")


def snr_at_ber(curve: str, target: float, turb: TurbulenceParams, lo: float = -10.0, hi: float = 80.0) -> float:
    """SNR (dB) where the curve crosses `target`, by root-finding on log BER."""
    def gap(s):
        return math.log(curve_ber(curve, s, turb)) - math.log(target)

    if not gap(lo) > 0 > gap(hi):
        raise DomainError(f"{curve} does not cross BER {target:g} inside [{lo}, {hi}] dB")
    return brentq(gap, lo, hi, xtol=1e-6)
