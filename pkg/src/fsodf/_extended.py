"""The CDF/PDF k-series re-evaluated in extended precision.

Used when the double-precision sum cancels too much to be trusted (low
SNR, where (b/a)^2 is large, and the upper tail). The terms are the same
closed forms as in mixture_rv; only the arithmetic is wider. Working
precision is chosen from the cancellation measured in the double pass.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath

from .errors import NonConvergenceError

# decimal digits kept beyond the measured cancellation
_GUARD_DIGITS = 12
_MAX_DPS = 120
# below this argument mpmath's own besselk is faster than the continued fraction
_STEED_FROM = 16


def working_digits(rounding_estimate: float) -> int:
    """Digits needed to bring a double-precision rounding estimate down to ~1e-12."""
    if not math.isfinite(rounding_estimate) or rounding_estimate <= 0:
        return 60
    dps = 16 + max(0, math.ceil(math.log10(rounding_estimate * 1e16))) + _GUARD_DIGITS
    # rounded up to a multiple of 8 so cached coefficients get reused
    return min(_MAX_DPS, -(-dps // 8) * 8)


def _dk(p, q, k):
    mp = mpmath.mp
    return (
        mp.pi
        * (p * q) ** (p + k)
        / (2 * mp.sinpi(q - p) * mp.factorial(k) * mp.gamma(p) * mp.gamma(q))
        * mp.rgamma(p - q + k + 1)
    )


@lru_cache(maxsize=64)
def _dk_table(alpha: float, beta: float, n: int, dps: int):
    """((d_k(beta, alpha), m_k) ..., (d_k(alpha, beta), m_k) ...) for k < n at dps digits."""
    with mpmath.workdps(dps):
        al, be = mpmath.mpf(alpha), mpmath.mpf(beta)
        return tuple(
            tuple((_dk(p, q, k), p / 2 + mpmath.mpf(k) / 2) for k in range(n))
            for p, q in ((be, al), (al, be))
        )


def _steed_pair(mu, x):
    """(K_mu(x), K_mu+1(x)) by Steed's CF2 at the working precision, |mu| <= 1/2, moderate to large x."""
    mp = mpmath.mp
    eps = mp.mpf(10) ** (-mp.dps - 2)
    b = 2 * (1 + x)
    d = 1 / b
    h = delh = d
    q1, q2 = mp.mpf(0), mp.mpf(1)
    a1 = mp.mpf(1) / 4 - mu * mu
    q = c = a1
    a = -a1
    s = 1 + q * delh
    for i in range(2, 20 * mp.dps + 1000):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2
        d = 1 / (b + a * d)
        delh = (b * d - 1) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < eps:
            break
    else:
        raise NonConvergenceError(f"extended CF2 for K_{mu}({x}) did not converge")
    h *= a1
    kmu = mp.sqrt(mp.pi / (2 * x)) * mp.exp(-x) / s
    return kmu, kmu * (mu + x + mp.mpf(1) / 2 - h) / x


def _ladder(order, x, n):
    """K_{order + j}(x), j < n, by upward recurrence from the lowest two orders."""
    if x >= _STEED_FROM:
        shift = int(mpmath.nint(order))
        mu = order - shift
        k0, k1 = _steed_pair(mu, x)
        for j in range(shift):
            k0, k1 = k1, k0 + 2 * (mu + j + 1) / x * k1
        out = [k0, k1]
    else:
        out = [mpmath.besselk(order, x), mpmath.besselk(order + 1, x)]
    for j in range(1, n - 1):
        nu = order + j
        out.append(out[j - 1] + 2 * nu / x * out[j])
    return out[:n]


@lru_cache(maxsize=16)
def _order_ladder(shape: float, a: float, b: float, t: float, n: int, dps: int):
    """K of orders shape/2 - 1/2 + j/2, j = 0 .. n + 1, at x = a t / b^2.

    Cached because the CDF and PDF at the same point share it.
    """
    with mpmath.workdps(dps):
        x = mpmath.mpf(a) * mpmath.mpf(t) / (mpmath.mpf(b) ** 2)
        base = mpmath.mpf(shape) / 2 - mpmath.mpf(1) / 2
        even = _ladder(base, x, n // 2 + 2)
        odd = _ladder(base + mpmath.mpf(1) / 2, x, n // 2 + 2)
        return tuple(even[j // 2] if j % 2 == 0 else odd[j // 2] for j in range(n + 2))


def series(kind: str, y: float, a: float, b: float, alpha: float, beta: float, ctrl, dps: int):
    """Evaluate the CDF (kind='cdf') or PDF (kind='pdf') k-series at ``dps`` digits.

    Returns (value, groups). Raises NonConvergenceError on the term cap or if
    cancellation still exceeds ctrl.cancellation_tol at this precision.
    """
    mp = mpmath.mp
    with mpmath.workdps(dps):
        y_, a_, b_ = mp.mpf(y), mp.mpf(a), mp.mpf(b)
        n = ctrl.max_terms
        t = abs(y_)
        x = a_ * t / (b_ * b_)
        table = _dk_table(float(alpha), float(beta), n, dps)
        if y != 0:
            ladders = tuple(_order_ladder(float(sh), a, b, abs(y), n, dps) for sh in (beta, alpha))
        terms = []
        running = mp.mpf(0)
        small = 0
        groups = 0
        for k in range(n):
            groups += 1
            biggest = mp.mpf(0)
            for idx in range(2):
                d, m = table[idx][k]
                if kind == "cdf":
                    if y == 0:
                        v = 2 ** (m - 1) / mp.pi * (b_ / a_) ** (2 * m) * mp.gamma(m) * mp.beta(mp.mpf(1) / 2, m + mp.mpf(1) / 2)
                    else:
                        lo, hi = ladders[idx][k], ladders[idx][k + 2]
                        c = 1 / (mp.sqrt(2 * mp.pi) * m * b_ * a_ ** (m - mp.mpf(1) / 2))
                        if y < 0:
                            v = c * mp.exp(-x) * t ** (m + mp.mpf(1) / 2) * (hi - lo)
                        else:
                            v = c * mp.exp(x) * t ** (m + mp.mpf(1) / 2) * (hi + lo)
                else:
                    if y == 0:
                        v = (2 * b_ * b_) ** (m - 1) * mp.gamma(m - mp.mpf(1) / 2) / (mp.sqrt(mp.pi) * a_ ** (2 * m - 1))
                    else:
                        v = (
                            mp.sqrt(2 / (mp.pi * b_ * b_))
                            * (t / a_) ** (m - mp.mpf(1) / 2)
                            * mp.exp(a_ * y_ / (b_ * b_))
                            * ladders[idx][k]
                        )
                term = d * v
                terms.append(term)
                running += term
                biggest = max(biggest, abs(term))
            if biggest <= ctrl.rel_tol * abs(running):
                small += 1
                if small == 2:
                    break
            else:
                small = 0
        else:
            raise NonConvergenceError(f"extended {kind} series at y={y!r}: not converged within {n} terms")
        value = mp.fsum(terms)
        weight = mp.fsum(abs(t_) for t_ in terms)
        if value == 0:
            raise NonConvergenceError(f"extended {kind} series at y={y!r}: sum cancelled to zero")
        rounding = float(weight / abs(value) * mp.mpf(10) ** (-(dps - 3)))
        if rounding > ctrl.cancellation_tol:
            raise NonConvergenceError(
                f"extended {kind} series at y={y!r}: cancellation {rounding:.3g} at {dps} digits"
            )
        return float(value), groups


def w_series(w: float, alpha: float, beta: float, ctrl, dps: int) -> float:
    """The W-density power series sum_k d_k w^(m_k - 1) at ``dps`` digits."""
    mp = mpmath.mp
    with mpmath.workdps(dps):
        log_w = mp.log(mp.mpf(w))
        table = _dk_table(float(alpha), float(beta), ctrl.max_terms, dps)
        terms, running, small = [], mp.mpf(0), 0
        for k in range(ctrl.max_terms):
            pair = [table[idx][k][0] * mp.exp((table[idx][k][1] - 1) * log_w) for idx in range(2)]
            terms.extend(pair)
            running += pair[0] + pair[1]
            if max(abs(pair[0]), abs(pair[1])) <= ctrl.rel_tol * abs(running):
                small += 1
                if small == 2:
                    break
            else:
                small = 0
        else:
            raise NonConvergenceError(f"extended W-density series at w={w!r}: not converged within {ctrl.max_terms} terms")
        value = mp.fsum(terms)
        rounding = float(mp.fsum(abs(t) for t in terms) / abs(value) * mp.mpf(10) ** (-(dps - 3))) if value else math.inf
        if rounding > ctrl.cancellation_tol:
            raise NonConvergenceError(f"extended W-density series at w={w!r}: cancellation {rounding:.3g} at {dps} digits")
        return float(value)


def _log_m0(g, m1, m2):
    # M at z = 0 (2F1 factor equal to one)
    mp = mpmath.mp
    a1, b1, a2, b2 = g
    return (
        (m1 + m2 - 1) * mp.log(2)
        - mp.log(mp.pi) / 2
        - mp.log(m2)
        - 2 * m1 * mp.log(b1)
        + (4 * m1 + 2 * m2) * mp.log(b2)
        - (2 * m1 + 2 * m2) * mp.log(a2)
        + mp.loggamma(m1 + m2 + mp.mpf(1) / 2)
        + mp.loggamma(m1)
        + mp.loggamma(m2 + 1)
        - mp.loggamma(m1 + m2 + 1)
    )


def pr_sum_series(g, rd_shapes, sd_shapes, ctrl, dps: int):
    """Shell-ordered double series for Pr(U + V <= 0) at ``dps`` digits.

    ``g`` = (a_rd, b_rd, a_sd, b_sd) on the z = 0 manifold; shapes are (alpha, beta).
    Returns (value, shells). Same stopping rule and failure modes as ``series``.
    """
    mp = mpmath.mp
    with mpmath.workdps(dps):
        g_ = tuple(mp.mpf(v) for v in g)
        n = ctrl.max_terms

        rd = _dk_table(float(rd_shapes[0]), float(rd_shapes[1]), n, dps)
        sd = _dk_table(float(sd_shapes[0]), float(sd_shapes[1]), n, dps)
        cache = {}
        terms = []
        running = mp.mpf(0)
        small = 0
        shells = 0
        for s in range(n):
            shells += 1
            biggest = mp.mpf(0)
            pairs = [(s, k2) for k2 in range(s + 1)] + [(k1, s) for k1 in range(s)]
            for k1, k2 in pairs:
                for rd_sub in rd:
                    d1, m1 = rd_sub[k1]
                    for sd_sub in sd:
                        d2, m2 = sd_sub[k2]
                        key = (m1, m2)
                        if key not in cache:
                            cache[key] = mp.exp(_log_m0(g_, m1, m2))
                        term = d1 * d2 * cache[key]
                        terms.append(term)
                        running += term
                        biggest = max(biggest, abs(term))
            if biggest <= ctrl.rel_tol * abs(running):
                small += 1
                if small == 2:
                    break
            else:
                small = 0
        else:
            raise NonConvergenceError(f"extended Pr(U+V<=0) series: not converged within {n} shells")
        value = mp.fsum(terms)
        weight = mp.fsum(abs(t_) for t_ in terms)
        if value == 0:
            raise NonConvergenceError("extended Pr(U+V<=0) series: sum cancelled to zero")
        rounding = float(weight / abs(value) * mp.mpf(10) ** (-(dps - 3)))
        if rounding > ctrl.cancellation_tol:
            raise NonConvergenceError(f"extended Pr(U+V<=0) series: cancellation {rounding:.3g} at {dps} digits")
        return float(value), shells
