"""Gamma-Gamma irradiance model with unit mean.

Densities of the irradiance Z and of its square W = Z^2 (closed form and the
power series obtained from the small-argument expansion of K), the series
coefficients d_k, and a product-of-Gammas sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _extended
from ._series import sum_groups
from .errors import CancellationError, DomainError, PoleError
from .specfun import bessel_k_scaled

__all__ = [
    "POLE_GUARD",
    "TurbulenceParams",
    "SeriesControl",
    "STRONG",
    "MODERATE",
    "gg_pdf",
    "gg_w_pdf",
    "log_dk",
    "dk_coeff",
    "series_terms",
    "gg_w_pdf_series",
    "sample_gg",
]

POLE_GUARD = 1e-3


@dataclass(frozen=True)
class TurbulenceParams:
    """Shape pair of one Gamma-Gamma link (large-scale alpha, small-scale beta)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError(f"alpha and beta must be positive, got {self}")
        diff = self.alpha - self.beta
        if abs(diff - round(diff)) <= POLE_GUARD:
            raise PoleError(
                f"alpha - beta = {diff:g} is within {POLE_GUARD:g} of an integer, where the "
                f"d_k series has a pole; perturb beta by about 1e-3 (e.g. beta={self.beta + 2e-3:g})"
            )

    @property
    def scintillation_index(self) -> float:
        return (1 + 1 / self.alpha) * (1 + 1 / self.beta) - 1


STRONG = TurbulenceParams(4.2, 1.4)
MODERATE = TurbulenceParams(4.0, 1.9)


@dataclass(frozen=True)
class SeriesControl:
    """Truncation and fallback settings shared by every series evaluator.

    ``cancellation_tol`` bounds the relative rounding error estimated from
    the absolute term magnitudes. Past it the double-precision sum is not
    trusted: the series is redone in extended precision (if allowed), and
    the quadrature fallback takes over after that.
    """

    max_terms: int = 60
    rel_tol: float = 1e-10
    allow_quadrature_fallback: bool = True
    cancellation_tol: float = 1e-8
    allow_extended_precision: bool = True

    def __post_init__(self):
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")
        if not 0 < self.rel_tol < 1:
            raise DomainError("rel_tol must lie in (0, 1)")
        if not self.cancellation_tol > 0:
            raise DomainError("cancellation_tol must be positive")


def _log_norm(params):
    a, b = params.alpha, params.beta
    return 0.5 * (a + b) * math.log(a * b) - math.lgamma(a) - math.lgamma(b)


def gg_pdf(z: float, params: TurbulenceParams) -> float:
    """Gamma-Gamma density of the irradiance at z > 0."""
    if not z > 0:
        raise DomainError(f"gg_pdf needs z > 0, got {z!r}")
    a, b = params.alpha, params.beta
    x = 2.0 * math.sqrt(a * b * z)
    log_f = (
        math.log(2.0)
        + _log_norm(params)
        + (0.5 * (a + b) - 1.0) * math.log(z)
        + math.log(bessel_k_scaled(a - b, x))
        - x
    )
    return math.exp(log_f)


def gg_w_pdf(w: float, params: TurbulenceParams) -> float:
    """Density of W = Z^2 (closed form through K_{alpha-beta})."""
    if not w > 0:
        raise DomainError(f"gg_w_pdf needs w > 0, got {w!r}")
    a, b = params.alpha, params.beta
    x = 2.0 * math.sqrt(a * b) * w**0.25
    log_f = (
        _log_norm(params)
        + (0.25 * (a + b) - 1.0) * math.log(w)
        + math.log(bessel_k_scaled(a - b, x))
        - x
    )
    return math.exp(log_f)


def _log_abs_sin_pi(t):
    # sin(pi t) with the argument reduced first so the sign and size stay exact
    r = math.fmod(t, 2.0)
    s = math.sin(math.pi * r)
    return math.log(abs(s)), (1 if s > 0 else -1)


def log_dk(a_shape: float, b_shape: float, k: int) -> tuple[float, int]:
    """(log|d_k(a_shape, b_shape)|, sign) for the W-density series coefficients.

    d_k(p, q) = pi (pq)^(p+k) / (2 sin((q-p)pi) k! Gamma(p) Gamma(q) Gamma(p-q+k+1)).
    """
    diff = a_shape - b_shape
    if abs(diff - round(diff)) <= POLE_GUARD:
        raise PoleError(f"sin((b-a)pi) vanishes for shapes ({a_shape}, {b_shape})")
    log_sin, sin_sign = _log_abs_sin_pi(b_shape - a_shape)
    g_arg = diff + k + 1.0
    log_g = math.lgamma(g_arg)
    g_sign = 1 if g_arg > 0 or math.floor(g_arg) % 2 == 0 else -1
    value = (
        math.log(math.pi)
        + (a_shape + k) * math.log(a_shape * b_shape)
        - math.log(2.0)
        - log_sin
        - math.lgamma(k + 1.0)
        - math.lgamma(a_shape)
        - math.lgamma(b_shape)
        - log_g
    )
    return value, sin_sign * g_sign


def dk_coeff(a_shape: float, b_shape: float, k: int) -> float:
    value, sign = log_dk(a_shape, b_shape, k)
    return sign * math.exp(value)


def series_terms(params: TurbulenceParams, n: int):
    """Yield (k, (log|d|, sign, m) for the beta-led and alpha-led sub-series).

    The W density is sum_k d_k(beta, alpha) w^(m-1) + d_k(alpha, beta) w^(m'-1)
    with m = beta/2 + k/2 and m' = alpha/2 + k/2; every series evaluator in the
    package iterates the same pairs.
    """
    a, b = params.alpha, params.beta
    for k in range(n):
        lb, sb = log_dk(b, a, k)
        la, sa = log_dk(a, b, k)
        yield k, ((lb, sb, 0.5 * (b + k)), (la, sa, 0.5 * (a + k)))


def gg_w_pdf_series(w: float, params: TurbulenceParams, ctrl: SeriesControl = SeriesControl()) -> float:
    """Truncated power series for the W density.

    Stops once two consecutive k-pairs are below rel_tol of the partial sum.
    Raises NonConvergenceError if max_terms is reached first. When the
    alternating terms cancel beyond ctrl.cancellation_tol (large w) the sum is
    redone in extended precision if ctrl allows it.
    """
    if not w > 0:
        raise DomainError(f"gg_w_pdf_series needs w > 0, got {w!r}")
    log_w = math.log(w)
    groups = (
        [(log_d + (m - 1.0) * log_w, sign) for log_d, sign, m in pair]
        for _, pair in series_terms(params, ctrl.max_terms)
    )
    try:
        value = sum_groups(groups, ctrl, f"W-density series at w={w!r}").value
    except CancellationError as exc:
        if not ctrl.allow_extended_precision:
            raise
        value = _extended.w_series(w, params.alpha, params.beta, ctrl, _extended.working_digits(exc.estimate))
    return max(value, 0.0)


def sample_gg(rng: np.random.Generator, params: TurbulenceParams, size=None):
    """Draw Z = X Y with X ~ Gamma(alpha, 1/alpha), Y ~ Gamma(beta, 1/beta)."""
    x = rng.gamma(params.alpha, 1.0 / params.alpha, size)
    y = rng.gamma(params.beta, 1.0 / params.beta, size)
    return x * y
