"""Command-line entry point: ``fsodf {sweep,dist,validate}``.

Exit codes: 0 ok, 1 validation failure, 2 bad input, 3 series non-convergence
(with the quadrature fallback switched off), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass

from . import ber_analysis as ba
from . import mc_sim, mixture_rv, validation
from .errors import DomainError, NonConvergenceError
from .gamma_gamma import SeriesControl, TurbulenceParams
from .mixture_rv import MixtureParams

EXIT_OK, EXIT_VALIDATION, EXIT_INPUT, EXIT_NONCONVERGENCE, EXIT_IO = 0, 1, 2, 3, 4

HEADER = (
    "snr_db", "scheme", "alpha_sr", "beta_sr", "alpha_sd", "beta_sd", "alpha_rd", "beta_rd",
    "ber_analytic", "ber_mc", "trials", "ci_low", "ci_high", "series_path",
)
SCHEMES = ("selective_df", "perfect_relay", "direct_2x", "analytic_only")
_MC_SCHEME = {"selective_df": "selective_df", "perfect_relay": "perfect_relay", "direct_2x": "direct_double_power"}

# key -> (type, default); flags and config-file keys share these names
SWEEP_KEYS = {
    "alpha_sr": (float, 4.0), "beta_sr": (float, 1.9),
    "alpha_sd": (float, 4.0), "beta_sd": (float, 1.9),
    "alpha_rd": (float, 4.0), "beta_rd": (float, 1.9),
    "snr_start": (float, 0.0), "snr_stop": (float, 30.0), "snr_step": (float, 2.0),
    "schemes": (str, "selective_df,perfect_relay,direct_2x"),
    "trials": (int, 1_000_000), "seed": (int, 1),
    "max_terms": (int, 60), "rel_tol": (float, 1e-10),
    "fallback": (str, "on"), "out": (str, "-"), "workers": (int, 1),
}


class InputError(ValueError):
    pass


def fmt(x: float) -> str:
    return format(x, ".17g")


@dataclass(frozen=True)
class SweepSpec:
    turb_sr: TurbulenceParams
    turb_sd: TurbulenceParams
    turb_rd: TurbulenceParams
    snrs: tuple
    schemes: tuple
    trials: int
    seed: int
    ctrl: SeriesControl
    out: str
    workers: int = 1

    @classmethod
    def from_mapping(cls, values: dict) -> "SweepSpec":
        start, stop, step = values["snr_start"], values["snr_stop"], values["snr_step"]
        if not step > 0:
            raise InputError("snr_step must be positive")
        if start > stop:
            raise InputError("snr_start must not exceed snr_stop")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        snrs = tuple(float(start + i * step) for i in range(count))
        schemes = tuple(s.strip() for s in values["schemes"].split(",") if s.strip())
        if not schemes:
            raise InputError("at least one scheme is required")
        bad = [s for s in schemes if s not in SCHEMES]
        if bad:
            raise InputError(f"unknown scheme(s) {bad}; choose from {SCHEMES}")
        if len(set(schemes)) != len(schemes):
            raise InputError("duplicate scheme")
        if values["fallback"] not in ("on", "off"):
            raise InputError("fallback must be 'on' or 'off'")
        if values["trials"] < 1:
            raise InputError("trials must be >= 1")
        if not 0 <= values["seed"] < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")
        ctrl = SeriesControl(
            max_terms=values["max_terms"],
            rel_tol=values["rel_tol"],
            allow_quadrature_fallback=values["fallback"] == "on",
        )
        return cls(
            TurbulenceParams(values["alpha_sr"], values["beta_sr"]),
            TurbulenceParams(values["alpha_sd"], values["beta_sd"]),
            TurbulenceParams(values["alpha_rd"], values["beta_rd"]),
            snrs, schemes, values["trials"], values["seed"], ctrl, values["out"], values["workers"],
        )


def read_config(path: str) -> dict:
    """Flat key=value file; '#' starts a comment; keys may use '-' or '_'."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in SWEEP_KEYS:
                raise InputError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Defaults, overlaid by the config file, overlaid by explicit flags."""
    file_values = read_config(args.config) if args.config else {}
    values = {}
    for key, (kind, default) in SWEEP_KEYS.items():
        flag = getattr(args, key)
        raw = flag if flag is not None else file_values.get(key, default)
        try:
            values[key] = kind(raw)
        except ValueError as exc:
            raise InputError(f"bad value for {key}: {raw!r}") from exc
    return values


def _analytic(scheme, sr, sd, rd, ctrl):
    if scheme in ("selective_df", "analytic_only"):
        return ba.df_ber_eval(sr, sd, rd, ctrl)
    if scheme == "perfect_relay":
        return ba.pr_sum_negative_eval(rd, sd, ctrl)
    return ba.direct_ber_eval(sd, ctrl)


def sweep_rows(spec: SweepSpec):
    """CSV rows (as lists of strings) in (snr, scheme) order."""
    cells = [(snr, scheme) for snr in spec.snrs for scheme in spec.schemes]
    configs, index = [], {}
    for snr, scheme in cells:
        if scheme in _MC_SCHEME:
            index[(snr, scheme)] = len(configs)
            configs.append(
                mc_sim.SimConfig(spec.trials, spec.seed, _MC_SCHEME[scheme], snr, spec.turb_sr, spec.turb_sd, spec.turb_rd)
            )
    estimates = mc_sim.sweep(configs, spec.workers) if configs else []
    turb_cols = [fmt(v) for t in (spec.turb_sr, spec.turb_sd, spec.turb_rd) for v in (t.alpha, t.beta)]
    rows = []
    for snr, scheme in cells:
        sr, sd, rd = (ba.snr_to_budget(snr, t) for t in (spec.turb_sr, spec.turb_sd, spec.turb_rd))
        value = _analytic(scheme, sr, sd, rd, spec.ctrl)
        if (snr, scheme) in index:
            est = estimates[index[(snr, scheme)]]
            mc = [fmt(est.ber), str(est.trials), fmt(est.ci_low), fmt(est.ci_high)]
        else:
            mc = ["", "0", "", ""]
        rows.append([fmt(snr), scheme, *turb_cols, fmt(value.value), *mc, value.path])
    return rows


def write_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(HEADER)
    writer.writerows(rows)


def cmd_sweep(args) -> int:
    spec = SweepSpec.from_mapping(resolve(args))
    if spec.out == "-":
        write_csv(sweep_rows(spec), sys.stdout)
        return EXIT_OK
    # opened first so an unwritable path fails before the simulation runs
    with open(spec.out, "w", newline="", encoding="utf-8") as fh:
        write_csv(sweep_rows(spec), fh)
    return EXIT_OK


def cmd_dist(args) -> int:
    ctrl = SeriesControl(
        max_terms=args.max_terms, rel_tol=args.rel_tol, allow_quadrature_fallback=args.fallback == "on"
    )
    params = MixtureParams(args.a, args.b, TurbulenceParams(args.alpha, args.beta))
    fn = mixture_rv.cdf_y_eval if args.which == "cdf" else mixture_rv.pdf_y_eval
    ev = fn(args.y, params, ctrl)
    print(f"path={ev.path} terms={ev.terms}")
    print(fmt(ev.value))
    return EXIT_OK


def cmd_validate(args) -> int:
    with validation.mutation(args.mutate):
        report = validation.run(args.level)
    for line in report.lines():
        print(line)
    print(f"series time {report.seconds:.2f} s; overall {'PASS' if report.ok else 'FAIL'}")
    return EXIT_OK if report.ok else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fsodf", description="DF relay FSO BER: analysis, simulation, validation")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="BER versus SNR, analytic and Monte Carlo, as CSV")
    for key, (kind, _) in SWEEP_KEYS.items():
        sw.add_argument("--" + key.replace("_", "-"), dest=key, type=kind if kind is not str else None, default=None)
    sw.add_argument("--config", default=None, help="key=value file; explicit flags take precedence")
    sw.set_defaults(func=cmd_sweep)

    di = sub.add_parser("dist", help="CDF or PDF of Y = aZ^2 + bZE at one point")
    di.add_argument("--y", type=float, required=True)
    di.add_argument("--alpha", type=float, required=True)
    di.add_argument("--beta", type=float, required=True)
    di.add_argument("--a", type=float, required=True)
    di.add_argument("--b", type=float, required=True)
    di.add_argument("--which", choices=("cdf", "pdf"), default="cdf")
    di.add_argument("--max-terms", type=int, default=60)
    di.add_argument("--rel-tol", type=float, default=1e-10)
    di.add_argument("--fallback", choices=("on", "off"), default="on")
    di.set_defaults(func=cmd_dist)

    va = sub.add_parser("validate", help="series versus quadrature oracle")
    va.add_argument("--level", choices=("fast", "full"), default="fast")
    va.add_argument("--mutate", choices=validation.MUTATIONS, default=None, help="inject a known defect")
    va.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (InputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
