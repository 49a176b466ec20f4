"""Bit-level Monte Carlo of the two-phase DF protocol.

Per trial: fresh Gamma-Gamma irradiances on S-R, S-D and R-D, complex AWGN
of variance N on each receiver (only the real part reaches the decision), a
relay that decides on the sign of its own statistic, and a destination that
adds the S-D and (if forwarded) R-D statistics before slicing.

Trials are processed in fixed-size blocks. Block j of sweep point i draws
from SeedSequence(seed ^ i, spawn_key=(j,)), so the outcome depends only on
(seed, point index, trials) and not on how the work is scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np
from scipy import stats

from .errors import DomainError
from .gamma_gamma import MODERATE, TurbulenceParams, sample_gg

__all__ = ["SCHEMES", "SimConfig", "BerEstimate", "simulate", "sweep", "sample_statistic", "clopper_pearson"]

SCHEMES = ("selective_df", "perfect_relay", "direct_double_power")
BLOCK = 1 << 18
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    trials: int
    seed: int
    scheme: str = "selective_df"
    snr_db: float = 10.0
    turb_sr: TurbulenceParams = MODERATE
    turb_sd: TurbulenceParams = MODERATE
    turb_rd: TurbulenceParams = MODERATE
    symbol: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials!r}")
        if self.scheme not in SCHEMES:
            raise DomainError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.symbol not in (1, -1):
            raise DomainError("symbol must be +1 or -1")
        if not 0 <= self.seed <= _MASK64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    @property
    def noise_var(self) -> float:
        return 10.0 ** (-self.snr_db / 10.0)


class BerEstimate(NamedTuple):
    errors: int
    trials: int
    ber: float
    ci_low: float
    ci_high: float
    relay_forwards: int = 0


def clopper_pearson(errors: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    tail = 0.5 * (1.0 - level)
    lo = 0.0 if errors == 0 else float(stats.beta.ppf(tail, errors, trials - errors + 1))
    hi = 1.0 if errors == trials else float(stats.beta.ppf(1.0 - tail, errors + 1, trials - errors))
    return lo, hi


def _statistic(rng, eta, noise_var, turb, x, n):
    """4 Re{y* eta I / N} for y = eta I x + e, e complex with variance N."""
    irr = sample_gg(rng, turb, n)
    noise = rng.normal(0.0, math.sqrt(noise_var / 2.0), n)
    return 4.0 * eta * irr * (eta * irr * x + noise) / noise_var


def sample_statistic(rng: np.random.Generator, eta: float, noise_var: float, turb: TurbulenceParams, size: int, x: int = 1):
    """Samples of one link's decision statistic, distributed as a Z^2 + b Z E for x = +1."""
    return _statistic(rng, eta, noise_var, turb, x, size)


def _run_block(cfg: SimConfig, point: int, block: int, n: int) -> tuple[int, int]:
    ss = np.random.SeedSequence((cfg.seed ^ point) & _MASK64, spawn_key=(block,))
    rng = np.random.default_rng(ss)
    x, nv = cfg.symbol, cfg.noise_var
    if cfg.scheme == "direct_double_power":
        u = _statistic(rng, math.sqrt(2.0), nv, cfg.turb_sd, x, n)
        return int(np.count_nonzero(u * x <= 0)), 0
    if cfg.scheme == "selective_df":
        relay = _statistic(rng, 1.0, nv, cfg.turb_sr, x, n)
        forward = relay * x > 0
    else:
        forward = np.ones(n, dtype=bool)
    u = _statistic(rng, 1.0, nv, cfg.turb_sd, x, n)
    v = _statistic(rng, 1.0, nv, cfg.turb_rd, x, n)
    decision = u + np.where(forward, v, 0.0)
    forwards = int(np.count_nonzero(forward)) if cfg.scheme == "selective_df" else 0
    return int(np.count_nonzero(decision * x <= 0)), forwards


def _simulate_point(cfg: SimConfig, point: int) -> BerEstimate:
    errors = forwards = 0
    done = block = 0
    while done < cfg.trials:
        n = min(BLOCK, cfg.trials - done)
        e, f = _run_block(cfg, point, block, n)
        errors += e
        forwards += f
        done += n
        block += 1
    lo, hi = clopper_pearson(errors, cfg.trials)
    return BerEstimate(errors, cfg.trials, errors / cfg.trials, lo, hi, forwards)


def simulate(config: SimConfig) -> BerEstimate:
    """Error count, BER and 95% Clopper-Pearson interval for one configuration."""
    return _simulate_point(config, 0)


def _star(args):
    return _simulate_point(*args)


def sweep(configs: Sequence[SimConfig], workers: int = 1) -> list[BerEstimate]:
    """Simulate each config with its own stream, seeded as seed ^ index; order preserved."""
    if not configs:
        raise DomainError("sweep needs at least one configuration")
    jobs = [(cfg, i) for i, cfg in enumerate(configs)]
    if workers <= 1 or len(jobs) == 1:
        return [_star(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_star, jobs))


def with_scheme(cfg: SimConfig, scheme: str) -> SimConfig:
    return replace(cfg, scheme=scheme)
