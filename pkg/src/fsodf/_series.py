"""Summation of sign/log-magnitude term groups with adaptive stopping."""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple

from .errors import CancellationError, NonConvergenceError

_UNIT_ROUNDOFF = 2.0**-52
# A term exp(L) carries a relative error of roughly |L| ulps from the log-space assembly.
_LOG_ERROR_FLOOR = 4.0


class SeriesOutcome(NamedTuple):
    value: float
    groups: int
    rounding_error: float


def sum_groups(groups: Iterable[Iterable[tuple[float, int]]], ctrl, what: str = "series") -> SeriesOutcome:
    """Sum groups of (log|t|, sign) terms until two consecutive groups are negligible.

    A group is negligible when its largest term is below ``ctrl.rel_tol`` of
    the running sum. Raises NonConvergenceError if the generator runs out
    (term cap) first, or if the estimated rounding error of the result
    relative to its size exceeds ``ctrl.cancellation_tol``.
    """
    terms: list[float] = []
    weight = 0.0
    running = 0.0
    small = 0
    n = 0
    for group in groups:
        n += 1
        biggest = 0.0
        for log_mag, sign in group:
            if sign == 0 or log_mag == -math.inf:
                continue
            t = sign * math.exp(log_mag)
            terms.append(t)
            running += t
            weight += abs(t) * (_LOG_ERROR_FLOOR + abs(log_mag))
            biggest = max(biggest, abs(t))
        if biggest <= ctrl.rel_tol * abs(running):
            small += 1
            if small == 2:
                break
        else:
            small = 0
    else:
        raise NonConvergenceError(f"{what}: not converged within {n} terms")
    value = math.fsum(terms)
    if weight == 0.0:
        return SeriesOutcome(value, n, 0.0)
    rounding = math.inf if value == 0.0 else _UNIT_ROUNDOFF * weight / abs(value)
    if rounding > ctrl.cancellation_tol:
        raise CancellationError(
            f"{what}: cancellation, estimated relative rounding error {rounding:.3g}", rounding
        )
    return SeriesOutcome(value, n, rounding)
