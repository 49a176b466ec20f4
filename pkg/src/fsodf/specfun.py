"""Scalar special functions used by the analytical modules.

Modified Bessel K of real order (plain, exponentially scaled, and as a
log-space ladder of orders spaced by one), log-gamma with sign, the Beta
function, the Gauss hypergeometric series and the Gaussian Q-function.

Bessel K follows the classical two-regime scheme: Temme's series for the
pair (K_mu, K_mu+1) with |mu| <= 1/2 at small argument, Steed's continued
fraction (CF2) at large argument, then forward recurrence in the order,
which is stable for K.
"""

from __future__ import annotations

import math
import sys

from .errors import DomainError, NonConvergenceError, PoleError, RangeError

__all__ = [
    "BESSEL_CROSSOVER",
    "bessel_k",
    "bessel_k_scaled",
    "log_bessel_k_scaled_ladder",
    "ln_gamma",
    "beta_fn",
    "log_beta",
    "gauss_2f1",
    "q_function",
]

# Temme below, Steed's CF2 at and above.
BESSEL_CROSSOVER = 2.0

_EPS = 1e-16
_MAXIT = 10_000

# Taylor coefficients of 1/Gamma(z) about 0: 1/Gamma(z) = sum_k c_k z^k, k >= 1.
_RGAMMA_TAYLOR = (
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
)


def _temme_gammas(mu):
    """Return (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) for |mu| <= 1/2.

    gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu) is evaluated from the
    even/odd split of the 1/Gamma Taylor series, so it has no cancellation
    at mu -> 0.
    """
    mu2 = mu * mu
    odd = 0.0  # c1 + c3 mu^2 + c5 mu^4 + ...
    even = 0.0  # c2 + c4 mu^2 + ...
    for j in range(len(_RGAMMA_TAYLOR) // 2 - 1, -1, -1):
        odd = odd * mu2 + _RGAMMA_TAYLOR[2 * j]
        even = even * mu2 + _RGAMMA_TAYLOR[2 * j + 1]
    gam1 = -even
    gam2 = odd
    return gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1


def _k_pair_temme(mu, x):
    """Unscaled (K_mu(x), K_mu+1(x)) by Temme's series, |mu| <= 1/2, small x."""
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
    gam1, gam2, gampl, gammi = _temme_gammas(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    e = math.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = 1.0
    d = x2 * x2
    total1 = p
    mu2 = mu * mu
    for i in range(1, _MAXIT + 1):
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= d / i
        p /= i - mu
        q /= i + mu
        delta = c * ff
        total += delta
        total1 += c * (p - i * ff)
        if abs(delta) < abs(total) * _EPS:
            break
    else:
        raise NonConvergenceError(f"Temme series for K_{mu}({x}) did not converge")
    return total, total1 * 2.0 / x


def _k_pair_steed_scaled(mu, x):
    """Scaled (e^x K_mu(x), e^x K_mu+1(x)) by Steed's CF2, |mu| <= 1/2, large x."""
    mu2 = mu * mu
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25 - mu2
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAXIT + 1):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:
        raise NonConvergenceError(f"CF2 for K_{mu}({x}) did not converge")
    h *= a1
    kmu = math.sqrt(math.pi / (2.0 * x)) / s
    return kmu, kmu * (mu + x + 0.5 - h) / x


def _k_pair_scaled(mu, x):
    if x < BESSEL_CROSSOVER:
        k0, k1 = _k_pair_temme(mu, x)
        ex = math.exp(x)
        return k0 * ex, k1 * ex
    return _k_pair_steed_scaled(mu, x)


def _check_x(x):
    if not x > 0.0:
        raise DomainError(f"Bessel K needs a positive argument, got x={x!r}")


def bessel_k_scaled(order: float, x: float) -> float:
    """Return e^x K_order(x) for real order and x > 0."""
    _check_x(x)
    nu = abs(order)
    nl = int(nu + 0.5)
    mu = nu - nl
    kmu, k1 = _k_pair_scaled(mu, x)
    two_over_x = 2.0 / x
    for i in range(1, nl + 1):
        kmu, k1 = k1, (mu + i) * two_over_x * k1 + kmu
    if not math.isfinite(kmu):
        raise RangeError(f"K_{order}({x}) overflows")
    return kmu


def bessel_k(order: float, x: float) -> float:
    """Modified Bessel function of the second kind K_order(x), x > 0.

    Raises RangeError when the true value is not a normal float (overflow at
    tiny x and large order, underflow of e^-x beyond x ~ 708).
    """
    scaled = bessel_k_scaled(order, x)
    value = scaled * math.exp(-x)
    if not math.isfinite(value) or value < sys.float_info.min:
        raise RangeError(f"K_{order}({x}) is outside the float range; use bessel_k_scaled")
    return value


def log_bessel_k_scaled_ladder(order: float, x: float, n: int) -> list[float]:
    """log(e^x K_{order+j}(x)) for j = 0..n-1.

    Works with the ratio r_j = K_{order+j+1}/K_{order+j}, which obeys
    r_j = 1/r_{j-1} + 2 (order + j)/x, so large orders at tiny x never
    overflow the way the values themselves would.
    """
    _check_x(x)
    if n <= 0:
        return []
    k0 = bessel_k_scaled(order, x)
    out = [math.log(k0)]
    if n == 1:
        return out
    k1 = bessel_k_scaled(order + 1.0, x)
    ratio = k1 / k0
    out.append(out[0] + math.log(ratio))
    for j in range(1, n - 1):
        ratio = 1.0 / ratio + 2.0 * (order + j) / x
        out.append(out[-1] + math.log(ratio))
    return out


def ln_gamma(x: float) -> tuple[float, int]:
    """Return (log|Gamma(x)|, sign of Gamma(x))."""
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at x={x!r}")
    if x > 0.0:
        return math.lgamma(x), 1
    sign = -1 if math.floor(x) % 2 else 1
    return math.lgamma(x), sign


def log_beta(p: float, q: float) -> float:
    if not (p > 0.0 and q > 0.0):
        raise DomainError(f"Beta needs p, q > 0, got ({p!r}, {q!r})")
    return math.lgamma(p) + math.lgamma(q) - math.lgamma(p + q)


def beta_fn(p: float, q: float) -> float:
    """B(p, q) = Gamma(p) Gamma(q) / Gamma(p + q), evaluated in log space."""
    return math.exp(log_beta(p, q))


def gauss_2f1(a: float, b: float, c: float, z: float, max_terms: int = 10_000) -> float:
    """Gauss hypergeometric 2F1(a, b; c; z) by its power series, |z| < 1.

    No analytic continuation is attempted.
    """
    if c <= 0.0 and c == math.floor(c):
        raise PoleError(f"2F1 undefined for non-positive integer c={c!r}")
    if not abs(z) < 1.0:
        raise DomainError(f"2F1 series needs |z| < 1, got z={z!r}")
    if z == 0.0:
        return 1.0
    term = running = 1.0
    terms = [1.0]
    small = 0
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        if term == 0.0:
            return math.fsum(terms)
        terms.append(term)
        running += term
        if abs(term) < 1e-17 * abs(running):
            small += 1
            if small == 2:
                return math.fsum(terms)
        else:
            small = 0
    raise NonConvergenceError(
        f"2F1({a}, {b}; {c}; {z}) not converged after {max_terms} terms"
    )


def q_function(x: float) -> float:
    """Gaussian tail probability Q(x) = P(N(0,1) > x) = erfc(x / sqrt 2) / 2."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))
