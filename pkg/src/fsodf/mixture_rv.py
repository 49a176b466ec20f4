"""Distribution of the decoder statistic Y = a Z^2 + b Z E.

Z is unit-mean Gamma-Gamma, E standard normal. Conditioned on W = Z^2,
Y ~ N(aW, b^2 W), so

    F_Y(y) = E[Q((aW - y) / (b sqrt W))],
    f_Y(y) = E[phi((y - aW) / (b sqrt W)) / (b sqrt W)].

Expanding f_W in its d_k power series turns each expectation into a sum of
one-dimensional integrals with closed forms in K_{m +- 1/2}:

    j_function(a, b, m, y) = int w^(m-1) Q((y + a w) / (b sqrt w)) dw
    d_function(a, b, m, y) = int w^(m-3/2) phi((y + a w) / (b sqrt w)) / b dw
                           = -d/dy j_function(a, b, m, y)

so that F_Y(y) = sum_k d_k j_function(a, b, m_k, -y) and
f_Y(y) = sum_k d_k d_function(a, b, m_k, -y). A negative first argument
follows the reflected convention j(-a, b, m, y) = j(a, b, m, -y), which is
how the y > 0 CDF branch is usually written; that value is the convergent
integral int w^(m-1) Q((a w - y) / (b sqrt w)) dw, so the y > 0 branch is
the series itself, not one minus it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from . import gamma_gamma as gg
from . import _extended, specfun
from ._series import sum_groups
from .errors import CancellationError, DomainError, NonConvergenceError, RangeError
from .gamma_gamma import SeriesControl, TurbulenceParams

__all__ = [
    "MixtureParams",
    "Evaluation",
    "SERIES",
    "SERIES_EXTENDED",
    "FALLBACK",
    "j_function",
    "d_function",
    "cdf_y",
    "pdf_y",
    "cdf_y_eval",
    "pdf_y_eval",
]

SERIES = "series"
SERIES_EXTENDED = "series-extended"
FALLBACK = "quadrature-fallback"

_LOG_2PI = math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)
# K_{m+1/2} and K_{m-1/2} agreeing to this many digits leaves nothing of their difference.
_K_AGREEMENT_LIMIT = 1e-10

# Test hook for the mutation harness: evaluate the y > 0 CDF branch as 1 - series.
_COMPLEMENT_UPPER_BRANCH = False


@dataclass(frozen=True)
class MixtureParams:
    a: float
    b: float
    turb: TurbulenceParams

    def __post_init__(self):
        if not self.b > 0:
            raise DomainError(f"b must be positive, got {self.b!r}")
        if not self.a > 0:
            raise DomainError(f"a must be positive, got {self.a!r}")


class Evaluation(NamedTuple):
    value: float
    path: str
    terms: int = 0


def _check_jb(b, m):
    if not b > 0:
        raise DomainError(f"b must be positive, got {b!r}")
    if not m > 0:
        raise DomainError(f"m must be positive, got {m!r}")


# -- per-term log-magnitudes -------------------------------------------------
# The helpers below take a > 0 and return log of the (positive) closed form.


def _log_j_zero(a, b, m):
    return (
        (m - 1.0) * math.log(2.0)
        - _LOG_PI
        + 2.0 * m * math.log(b / a)
        + math.lgamma(m)
        + specfun.log_beta(0.5, m + 0.5)
    )


def _log_j_positive(a, b, m, t, log_k_hi, log_k_lo):
    """log J(a, b, m, t) for t > 0 from log scaled K_{m+1/2}, K_{m-1/2} at x = a t / b^2."""
    x = a * t / (b * b)
    gap = math.exp(log_k_lo - log_k_hi)
    if 1.0 - gap < _K_AGREEMENT_LIMIT:
        raise NonConvergenceError(
            f"K_{m + 0.5} and K_{m - 0.5} agree to >10 digits at x={x!r}"
        )
    return (
        -0.5 * _LOG_2PI
        - math.log(m * b)
        - (m - 0.5) * math.log(a)
        + (m + 0.5) * math.log(t)
        - 2.0 * x
        + log_k_hi
        + math.log1p(-gap)
    )


def _log_j_negative(a, b, m, s, log_k_hi, log_k_lo):
    """log J(a, b, m, -s) for s > 0, i.e. int w^(m-1) Q((a w - s) / (b sqrt w)) dw."""
    hi, lo = max(log_k_hi, log_k_lo), min(log_k_hi, log_k_lo)
    return (
        -0.5 * _LOG_2PI
        - math.log(m * b)
        - (m - 0.5) * math.log(a)
        + (m + 0.5) * math.log(s)
        + hi
        + math.log1p(math.exp(lo - hi))
    )


def _log_d_zero(a, b, m):
    if not m > 0.5:
        raise DomainError(f"d_function at y = 0 needs m > 1/2, got m={m!r}")
    return (m - 1.0) * math.log(2.0 * b * b) - 0.5 * _LOG_PI - (2.0 * m - 1.0) * math.log(a) + math.lgamma(m - 0.5)


def _log_d_nonzero(a, b, m, y, log_k):
    """log d_function(a, b, m, y), y != 0, from log e^x K_{m-1/2}(x) at x = a|y|/b^2."""
    t = abs(y)
    x = a * t / (b * b)
    # e^{-a y / b^2} K(x) = e^{-x - a y / b^2} * (e^x K(x))
    expo = -x - a * y / (b * b)
    return 0.5 * math.log(2.0 / (math.pi * b * b)) + (m - 0.5) * math.log(t / a) + expo + log_k


# -- public closed forms -------------------------------------------------------


def j_function(a: float, b: float, m: float, y: float) -> float:
    """Closed form of int_0^inf w^(m-1) Q((y + a w) / (b sqrt w)) dw.

    Three branches (y > 0, y = 0, y < 0 for a > 0). For a < 0 the reflected
    convention j(a, b, m, y) = j(-a, b, m, -y) is applied.
    """
    _check_jb(b, m)
    if a == 0:
        raise DomainError("j_function needs a != 0")
    if a < 0:
        a, y = -a, -y
    if y == 0.0:
        return math.exp(_log_j_zero(a, b, m))
    t = abs(y)
    x = a * t / (b * b)
    log_k_hi = math.log(specfun.bessel_k_scaled(m + 0.5, x))
    log_k_lo = math.log(specfun.bessel_k_scaled(m - 0.5, x))
    if y > 0:
        return math.exp(_log_j_positive(a, b, m, t, log_k_hi, log_k_lo))
    return math.exp(_log_j_negative(a, b, m, t, log_k_hi, log_k_lo))


def d_function(a: float, b: float, m: float, y: float) -> float:
    """Closed form of -d/dy j_function(a, b, m, y) (positive; a density kernel).

    Same branch and sign conventions as j_function. The y = 0 branch needs m > 1/2.
    """
    if not b > 0:
        raise DomainError(f"b must be positive, got {b!r}")
    if a == 0:
        raise DomainError("d_function needs a != 0")
    if a < 0:
        a, y = -a, -y
    if y == 0.0:
        return math.exp(_log_d_zero(a, b, m))
    x = a * abs(y) / (b * b)
    return math.exp(_log_d_nonzero(a, b, m, y, math.log(specfun.bessel_k_scaled(m - 0.5, x))))


# -- series over k -------------------------------------------------------------


def _ladders(turb, x, n):
    """Log scaled K ladders of orders beta/2 - 1/2 + j/2 and alpha/2 - 1/2 + j/2, j < n + 2."""
    out = []
    for shape in (turb.beta, turb.alpha):
        base = 0.5 * shape - 0.5
        even = specfun.log_bessel_k_scaled_ladder(base, x, n // 2 + 2)
        odd = specfun.log_bessel_k_scaled_ladder(base + 0.5, x, n // 2 + 2)
        out.append([even[j // 2] if j % 2 == 0 else odd[j // 2] for j in range(n + 2)])
    return out


def _cdf_groups(y, params, ctrl):
    a, b, turb = params.a, params.b, params.turb
    n = ctrl.max_terms
    if y != 0.0:
        ladders = _ladders(turb, a * abs(y) / (b * b), n)
    for k, pair in gg.series_terms(turb, n):
        group = []
        for idx, (log_d, sign, m) in enumerate(pair):
            if y == 0.0:
                log_j = _log_j_zero(a, b, m)
            else:
                ladder = ladders[idx]
                # orders m - 1/2 and m + 1/2 sit at ladder positions k and k + 2
                lo, hi = ladder[k], ladder[k + 2]
                if y < 0.0:
                    log_j = _log_j_positive(a, b, m, -y, hi, lo)
                else:
                    log_j = _log_j_negative(a, b, m, y, hi, lo)
            group.append((log_d + log_j, sign))
        yield group


def _pdf_groups(y, params, ctrl):
    a, b, turb = params.a, params.b, params.turb
    n = ctrl.max_terms
    if y != 0.0:
        ladders = _ladders(turb, a * abs(y) / (b * b), n)
    for k, pair in gg.series_terms(turb, n):
        group = []
        for idx, (log_d, sign, m) in enumerate(pair):
            if y == 0.0:
                log_v = _log_d_zero(a, b, m)
            else:
                log_v = _log_d_nonzero(a, b, m, -y, ladders[idx][k])
            group.append((log_d + log_v, sign))
        yield group


def _evaluate(kind, y, params, ctrl):
    groups = _cdf_groups if kind == "cdf" else _pdf_groups
    if params.a * abs(y) / (params.b * params.b) == 0.0:
        # the Bessel argument underflows; F and f are continuous at 0
        y = 0.0
    failure = None
    try:
        out = sum_groups(groups(y, params, ctrl), ctrl, f"{kind} series at y={y!r}")
        result = Evaluation(out.value, SERIES, out.groups)
    except (CancellationError, RangeError) as exc:
        # RangeError: a Bessel factor left the float range (tiny |y|, high order)
        failure = exc
        result = None
        if ctrl.allow_extended_precision:
            estimate = getattr(exc, "estimate", math.nan)
            try:
                value, n = _extended.series(
                    kind, y, params.a, params.b, params.turb.alpha, params.turb.beta,
                    ctrl, _extended.working_digits(estimate),
                )
                result = Evaluation(value, SERIES_EXTENDED, n)
            except NonConvergenceError as exc2:
                failure = exc2
    except NonConvergenceError as exc:
        failure, result = exc, None
    if result is None:
        if not ctrl.allow_quadrature_fallback:
            raise failure
        from . import oracle

        if kind == "cdf":
            return Evaluation(oracle.cdf_y_quadrature(y, params), FALLBACK)
        return Evaluation(oracle.pdf_y_quadrature(y, params), FALLBACK)
    value = result.value
    if kind == "cdf":
        if y > 0.0 and _COMPLEMENT_UPPER_BRANCH:
            value = 1.0 - value
        value = min(max(value, 0.0), 1.0)
    else:
        value = max(value, 0.0)
    return result._replace(value=value)


def cdf_y_eval(y: float, params: MixtureParams, ctrl: SeriesControl = SeriesControl()) -> Evaluation:
    """F_Y(y) with the evaluation path that produced it.

    Order of attempts: double-precision series, the same series in extended
    precision when the double sum cancels too much, then quadrature.
    """
    return _evaluate("cdf", y, params, ctrl)


def pdf_y_eval(y: float, params: MixtureParams, ctrl: SeriesControl = SeriesControl()) -> Evaluation:
    """f_Y(y) with the evaluation path that produced it."""
    return _evaluate("pdf", y, params, ctrl)


def cdf_y(y: float, params: MixtureParams, ctrl: SeriesControl = SeriesControl()) -> float:
    return cdf_y_eval(y, params, ctrl).value


def pdf_y(y: float, params: MixtureParams, ctrl: SeriesControl = SeriesControl()) -> float:
    return pdf_y_eval(y, params, ctrl).value
