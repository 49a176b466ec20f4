"""Slow, independent quadrature ground truth for the closed-form series.

Every function here integrates a defining integral directly, with the
closed-form squared Gamma-Gamma density evaluated through scipy's Bessel
routines. Nothing in this module touches the d_k series, the specfun kernel
or the J/D closed forms, so agreement with those paths is a genuine check.
Integrals over W are taken in u = w^(1/4), which removes the algebraic
singularity of f_W at the origin and makes the exponential tail linear.
"""

from __future__ import annotations

import functools
import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, ToleranceError

__all__ = [
    "QuadratureControl",
    "cdf_y_quadrature",
    "pdf_y_quadrature",
    "j_quadrature",
    "m_quadrature",
    "pr_sum_quadrature",
    "pr_sum_conditional_quadrature",
    "link_ber_quadrature",
]

_SQRT2 = math.sqrt(2.0)
_LOG_INV_SQRT_2PI = -0.5 * math.log(2.0 * math.pi)
# The W-density is cut where it falls below this fraction of its peak.
_TAIL_FRACTION = 1e-16
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureControl:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")

    def tightened(self, factor: float = 10.0) -> "QuadratureControl":
        return QuadratureControl(self.abs_tol / factor, self.rel_tol / factor, self.max_subdivisions)


DEFAULT_QC = QuadratureControl()


def _q(x):
    return 0.5 * special.erfc(np.asarray(x) / _SQRT2)


def _safe(u):
    """u with zeros replaced by 1 (the integrands vanish there and are masked)."""
    return np.where(u > 0.0, u, 1.0)


# 7-point Gauss / 15-point Kronrod pair on [-1, 1]
_XK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], [0.0], _XK[-2::-1]])
_W15 = np.concatenate([_WK, _WK[-2::-1]])
_W7 = np.zeros(15)
_W7[1::2] = np.concatenate([_WG, _WG[-2::-1]])


def _gk15(f, a, b):
    """(K15 value, |K15 - G7|, roundoff floor) on [a, b]."""
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    fx = np.asarray(f(c + h * _NODES), dtype=float)
    k = h * float(_W15 @ fx)
    floor = 50.0 * _EPS * abs(h) * float(_W15 @ np.abs(fx))
    return k, abs(k - h * float(_W7 @ fx)), floor


def _integrate(f, lo, hi, qc, points=None):
    """Globally adaptive Gauss-Kronrod on [lo, hi]; returns (value, error estimate).

    f maps an array of abscissae to an array of values. The worst interval is
    bisected until the summed |K15 - G7| estimate meets max(abs_tol,
    rel_tol |I|). The plain (unscaled) estimate keeps the reported error
    tracking the requested tolerance, so tightening the tolerance always buys
    a smaller estimate. Intervals whose estimate is already at the roundoff
    floor are retired; if only those remain, the achieved error is returned.
    """
    edges = [lo, *sorted(p for p in (points or ()) if lo < p < hi), hi]
    heap, settled = [], []

    def add(a, b):
        v, e, floor = _gk15(f, a, b)
        if e <= floor:
            settled.append((v, e))
        else:
            heapq.heappush(heap, (-e, a, b, v))

    def totals():
        parts = [t[3] for t in heap] + [v for v, _ in settled]
        return math.fsum(parts), sum(-t[0] for t in heap) + sum(e for _, e in settled)

    for a, b in zip(edges, edges[1:]):
        add(a, b)
    value, err = totals()
    while heap and err > max(qc.abs_tol, qc.rel_tol * abs(value)):
        if len(heap) + len(settled) >= qc.max_subdivisions:
            raise ToleranceError(f"quadrature on [{lo}, {hi}] missed its tolerance", value, err)
        _, a, b, _ = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if not a < mid < b:
            raise ToleranceError(f"quadrature on [{lo}, {hi}] ran out of resolution near {a}", value, err)
        add(a, mid)
        add(mid, b)
        value, err = totals()
    return value, err


class _WDensity:
    """Closed-form density of u = W^(1/4), i.e. 4 u^3 f_W(u^4), for one shape pair."""

    def __init__(self, alpha, beta):
        self.alpha, self.beta = alpha, beta
        self.nu = alpha - beta
        self.c = 2.0 * math.sqrt(alpha * beta)
        self.log_norm = (
            math.log(4.0)
            + 0.5 * (alpha + beta) * math.log(alpha * beta)
            - special.gammaln(alpha)
            - special.gammaln(beta)
        )
        grid = np.linspace(1e-3, 20.0, 4000)
        logs = self.log_density(grid)
        self.peak = float(grid[np.argmax(logs)])
        self.log_peak = float(np.max(logs))
        cutoff = self.peak
        while self.log_density(cutoff) - self.log_peak > math.log(_TAIL_FRACTION):
            cutoff *= 1.25
        self.cutoff = cutoff

    def log_density(self, u):
        u = np.asarray(u, dtype=float)
        x = self.c * u
        return self.log_norm + (self.alpha + self.beta - 1.0) * np.log(u) + np.log(special.kve(self.nu, x)) - x

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return np.where(u > 0.0, np.exp(self.log_density(_safe(u))), 0.0)


@functools.lru_cache(maxsize=64)
def _w_density(alpha, beta):
    return _WDensity(alpha, beta)


def _density_for(params):
    return _w_density(float(params.turb.alpha), float(params.turb.beta))


def _log_q(x):
    return special.log_ndtr(-np.asarray(x))


def _integrate_peaked(log_f, hi, qc, points):
    """Integrate exp(log_f) over [0, inf) after dividing by its peak.

    Working in logs keeps deep-tail values (which can sit below the smallest
    normal double) at full relative precision; the range grows until the
    integrand is 1e-18 of peak. The search window doubles until the peak is
    interior.
    """
    while True:
        grid = np.linspace(0.0, hi, 401)[1:]
        logs = log_f(grid)
        i = int(np.argmax(logs))
        if i < grid.size - 1:
            break
        hi *= 2.0
    log_peak = float(logs[i])
    if not math.isfinite(log_peak):
        return 0.0, 0.0
    while float(log_f(np.array([hi]))[0]) - log_peak > math.log(1e-18):
        hi *= 1.25
    value, err = _integrate(lambda u: np.exp(log_f(u) - log_peak), 0.0, hi, qc, [*points, float(grid[i])])
    scale = math.exp(log_peak)
    return value * scale, err * scale


def _masked(u, log_value):
    return np.where(u > 0.0, log_value, -np.inf)


def _cdf_parts(y, a, b, dens, qc):
    """Return (value, error) of F_Y(y) built from the branch that is small."""
    pts = [dens.peak]
    if y < 0.0:
        # Pr(Y <= y) = E[Q((aW - y) / (b sqrt W))]
        def f(u):
            s = _safe(u)
            return _masked(u, _log_q((a * s**4 - y) / (b * s * s)) + dens.log_density(s))

        return _integrate_peaked(f, dens.cutoff, qc, pts)
    # Pr(Y > y) = E[Q((y - aW) / (b sqrt W))]; F = 1 - that
    turning = (y / a) ** 0.25
    pts.append(turning)

    def g(u):
        s = _safe(u)
        return _masked(u, _log_q((y - a * s**4) / (b * s * s)) + dens.log_density(s))

    tail, err = _integrate_peaked(g, max(dens.cutoff, turning), qc, pts)
    return 1.0 - tail, err


def cdf_y_quadrature(y: float, params, qc: QuadratureControl = DEFAULT_QC, return_error: bool = False):
    """F_Y(y) for Y = aZ^2 + bZE by quadrature over the Gamma-Gamma irradiance."""
    if not (params.a > 0 and params.b > 0):
        raise DomainError("cdf_y_quadrature needs a > 0 and b > 0")
    value, err = _cdf_parts(y, params.a, params.b, _density_for(params), qc)
    value = min(max(value, 0.0), 1.0)
    return (value, err) if return_error else value


def pdf_y_quadrature(y: float, params, qc: QuadratureControl = DEFAULT_QC, return_error: bool = False):
    """f_Y(y) = E[phi((y - aW)/(b sqrt W)) / (b sqrt W)] by quadrature."""
    a, b = params.a, params.b
    if not (a > 0 and b > 0):
        raise DomainError("pdf_y_quadrature needs a > 0 and b > 0")
    dens = _density_for(params)
    pts = [dens.peak]
    if y > 0.0:
        pts.append((y / a) ** 0.25)

    def f(u):
        t = _safe(u)
        s = b * t**2
        z = (y - a * t**4) / s
        return _masked(u, _LOG_INV_SQRT_2PI - 0.5 * z * z - np.log(s) + dens.log_density(t))

    hi = max(dens.cutoff, (max(y, 0.0) / a) ** 0.25 * 1.5)
    value, err = _integrate_peaked(f, hi, qc, pts)
    return (value, err) if return_error else value


def link_ber_quadrature(snr_linear: float, turb, qc: QuadratureControl = DEFAULT_QC) -> float:
    """E[Q(sqrt(2 snr) Z)]: single-link BPSK error rate averaged over the irradiance."""
    dens = _w_density(float(turb.alpha), float(turb.beta))
    k = math.sqrt(2.0 * snr_linear)

    def f(u):
        return _q(k * u * u) * dens(u)

    return _integrate(f, 0.0, dens.cutoff, qc, [dens.peak])[0]


def j_quadrature(a: float, b: float, m: float, y: float, qc: QuadratureControl = DEFAULT_QC, return_error: bool = False):
    """J(a, b, m, y) = int_0^inf w^(m-1) Q((y + a w) / (b sqrt w)) dw."""
    if m <= 0:
        raise DomainError(f"J needs m > 0, got m={m!r}")
    if b <= 0:
        raise DomainError(f"J needs b > 0, got b={b!r}")
    if a <= 0:
        raise DomainError(f"J diverges at infinity for a={a!r} <= 0")

    def f(w):
        s = _safe(w)
        return np.where(w > 0.0, s ** (m - 1.0) * _q((y + a * s) / (b * np.sqrt(s))), 0.0)

    # beyond w_hi the Q argument exceeds 40 for every y
    scale = max(abs(y) / a, (b / a) ** 2)
    w_hi = scale
    while (y + a * w_hi) / (b * math.sqrt(w_hi)) < 40.0:
        w_hi *= 2.0
    pts = [abs(y) / a] if y < 0 else None
    v1, e1 = _integrate(f, 0.0, scale, qc, pts)
    v2, e2 = _integrate(f, scale, w_hi, qc)
    value, err = v1 + v2, e1 + e2
    return (value, err) if return_error else value


def m_quadrature(g, m1: float, m2: float, qc: QuadratureControl = DEFAULT_QC, return_error: bool = False):
    """Bessel-product integral defining the M-function, with its prefactor.

    g = (a1, b1, a2, b2); the integrand is y^(m1+m2) K_{m1-1/2}(p1 y) K_{m2+1/2}(p2 y)
    with p_i = a_i / b_i^2, assembled from exponentially scaled Bessels.
    """
    a1, b1, a2, b2 = map(float, g)
    if not (m1 > 0 and m2 > 0):
        raise DomainError("m_quadrature needs m1, m2 > 0")
    if not (a1 > 0 and a2 > 0 and b1 > 0 and b2 > 0):
        raise DomainError("m_quadrature needs positive a1, b1, a2, b2")
    p1, p2 = a1 / b1**2, a2 / b2**2
    log_pref = (
        math.log(2.0 / math.pi)
        - math.log(b1 * b2 * m2)
        - (m1 - 0.5) * math.log(a1)
        - (m2 - 0.5) * math.log(a2)
    )
    nu1, nu2 = m1 - 0.5, m2 + 0.5
    power = m1 + m2

    def log_integrand(y):
        y = np.asarray(y, dtype=float)
        return (
            power * np.log(y)
            + np.log(special.kve(nu1, p1 * y))
            + np.log(special.kve(nu2, p2 * y))
            - (p1 + p2) * y
        )

    # locate the bulk: the integrand peaks near power / (p1 + p2)
    y_peak = max(power, 1.0) / (p1 + p2)
    ref = float(log_integrand(y_peak))

    def f(y):
        return np.where(y > 0.0, np.exp(log_integrand(_safe(y)) - ref), 0.0)

    y_hi = y_peak
    while log_integrand(y_hi) - ref > math.log(1e-18):
        y_hi *= 1.5
    v1, e1 = _integrate(f, 0.0, y_peak, qc)
    v2, e2 = _integrate(f, y_peak, y_hi, qc)
    scale = math.exp(log_pref + ref)
    value, err = scale * (v1 + v2), scale * (e1 + e2)
    return (value, err) if return_error else value


def pr_sum_quadrature(rd, sd, qc: QuadratureControl = DEFAULT_QC, return_error: bool = False):
    """Pr(U + V <= 0) with U ~ Y(sd), V ~ Y(rd), via
    int_0^inf [F_U(v) f_V(-v) + F_U(-v) f_V(v)] dv, every F and f itself a quadrature.
    """
    inner = qc.tightened(100.0)

    def f1(v):
        return cdf_y_quadrature(v, sd, inner) * pdf_y_quadrature(-v, rd, inner) + cdf_y_quadrature(
            -v, sd, inner
        ) * pdf_y_quadrature(v, rd, inner)

    def f(vs):
        return np.array([f1(float(v)) for v in np.atleast_1d(vs)])

    turb = rd.turb
    mean_v = rd.a * (1 + 1 / turb.alpha) * (1 + 1 / turb.beta)
    hi = mean_v
    while f1(hi) > 1e-18 * max(f1(mean_v), 1e-300):
        hi *= 1.5
    v1, e1 = _integrate(f, 0.0, mean_v, qc)
    v2, e2 = _integrate(f, mean_v, hi, qc)
    value, err = v1 + v2, e1 + e2
    return (value, err) if return_error else value


def pr_sum_conditional_quadrature(rd, sd, qc: QuadratureControl = DEFAULT_QC) -> float:
    """Pr(U + V <= 0) as E[Q((a_u W_u + a_v W_v) / sqrt(b_u^2 W_u + b_v^2 W_v))].

    A second, structurally different route: a 2-D integral over both
    irradiances with the Gaussian noise integrated out analytically.
    """
    du, dv = _density_for(sd), _density_for(rd)

    def inner1(uv):
        wv = uv**4
        dens_v = float(dv(uv))
        if dens_v == 0.0:
            return 0.0

        def g(uu):
            wu = uu**4
            num = sd.a * wu + rd.a * wv
            den = np.sqrt(sd.b**2 * wu + rd.b**2 * wv)
            return np.where(den > 0.0, _q(num / np.where(den > 0.0, den, 1.0)), 0.0) * du(uu)

        return _integrate(g, 0.0, du.cutoff, qc.tightened(10.0), [du.peak])[0] * dens_v

    def inner(uvs):
        return np.array([inner1(float(u)) for u in np.atleast_1d(uvs)])

    return _integrate(inner, 0.0, dv.cutoff, qc, [dv.peak])[0]
