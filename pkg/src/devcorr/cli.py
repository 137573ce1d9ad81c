"""``devcorr`` command-line interface.

Subcommands::

    devcorr prepare psi+ -o psi.dev
    devcorr evolve psi.dev -o psi_series.csv
    devcorr correlations psi_series.csv -o psi_corr.csv [--exact] [--bits]
    devcorr fit psi_series.csv -o report.txt [--noise 0.01 --seed 1] [--curves curves.csv]
    devcorr reproduce -o results/

Every subcommand accepts ``--config FILE`` (flat ``key = value``) and
``--set KEY=VALUE`` overrides; ``$DEVCORR_CONFIG`` supplies defaults.

Exit codes: 0 ok, 2 bad input, 3 I/O failure, 4 optimizer failure, 5 fit failure.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from . import io as dio
from .config import RunConfig, load_config
from .core import DeviationMatrix, ThermalState
from .correlations import BITS, EXPANSION_UNITS, one_sided_exact, quantum_correlation_Q
from .errors import FitDivergence, InconsistentFits, InconsistentFitsWarning, OptimizerFailure
from .fitting import add_noise, combinations, estimate_parameters
from .relaxation import evolve, time_series
from .states import bell_pseudopure, computational, equilibrium_deviation, random_x

EXIT_OK, EXIT_INPUT, EXIT_IO, EXIT_OPTIMIZER, EXIT_FIT = 0, 2, 3, 4, 5

STATE_NAMES = ("psi+", "psi-", "phi+", "phi-", "x-random", "computational:ij", "equilibrium")
# the five initial states of the relaxation experiment
REPRODUCE_STATES = ("x-random", "psi+", "psi-", "phi+", "phi-")
MONOTONE_TOL = 1e-10
Q_DROP_FRACTION = 0.05


class RowFailure(OptimizerFailure):
    pass


def prepare_state(name: str, cfg: RunConfig) -> DeviationMatrix:
    """Deviation matrix for a named state. ``equilibrium`` ignores ``alpha``."""
    key = name.lower().replace("−", "-")
    if key in ("psi+", "psi-", "phi+", "phi-"):
        return bell_pseudopure(key, cfg.alpha)
    if key == "x-random":
        return random_x(cfg.seed, cfg.alpha)
    if key == "equilibrium":
        return equilibrium_deviation()
    if key.startswith("computational:"):
        return computational(key.split(":", 1)[1], cfg.alpha)
    raise ValueError(f"unknown state {name!r}; expected one of {', '.join(STATE_NAMES)}")


def correlation_rows(series, cfg: RunConfig, exact: bool = False, bits: bool = False) -> list[dict]:
    rows = []
    for idx, (t, d) in enumerate(series):
        try:
            rep = quantum_correlation_Q(d, cfg.optimizer, epsilon=cfg.epsilon if bits else None)
        except OptimizerFailure as exc:
            raise RowFailure(f"row {idx} (t = {t:g} s): {exc}") from exc
        b = rep.optimal_basis
        row = {
            "t_s": t, "I": rep.total_I, "K": rep.classical_K, "Q": rep.quantum_Q,
            "theta_A": b.theta_A, "phi_A": b.phi_A, "theta_B": b.theta_B, "phi_B": b.phi_B,
        }
        if exact:
            try:
                one = one_sided_exact(ThermalState(cfg.epsilon, d), "B", cfg.optimizer)
            except OptimizerFailure as exc:
                raise RowFailure(f"row {idx} (t = {t:g} s): {exc}") from exc
            row.update(I_exact_bits=one.total_I, D_exact_bits=one.discord_D, C_exact_bits=one.classical_C)
        rows.append(row)
    return rows


def _read_matrix_or_series(path) -> list[tuple[float, DeviationMatrix]]:
    text = Path(path).read_text()
    if dio.looks_like_series(text):
        return dio.parse_series(text)
    return [(0.0, dio.parse_deviation(text))]


def _nonincreasing(values: np.ndarray, tol: float = MONOTONE_TOL) -> bool:
    return bool(np.all(np.diff(values) <= tol))


# subcommands ---------------------------------------------------------------


def cmd_prepare(args, cfg: RunConfig) -> int:
    d = prepare_state(args.state, cfg)
    dio.write_deviation(args.output, d)
    return EXIT_OK


def cmd_evolve(args, cfg: RunConfig) -> int:
    d0 = dio.read_deviation(args.input)
    dio.write_series(args.output, time_series(d0, cfg.relaxation, cfg.dt, cfg.n_steps))
    return EXIT_OK


def cmd_correlations(args, cfg: RunConfig) -> int:
    series = _read_matrix_or_series(args.input)
    rows = correlation_rows(series, cfg, exact=args.exact, bits=args.bits)
    units = BITS if args.bits else EXPANSION_UNITS
    if args.bits:
        units += f" (epsilon = {dio.fmt(cfg.epsilon)})"
    dio.atomic_write_text(args.output, dio.format_correlations(rows, units, args.exact, cfg.epsilon))
    return EXIT_OK


def cmd_fit(args, cfg: RunConfig) -> int:
    series = dio.read_series(args.input)
    if args.noise:
        series = add_noise(series, args.noise, cfg.seed)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", InconsistentFitsWarning)
        report = estimate_parameters(
            series, cfg.C, consistency_threshold=cfg.fit_consistency_threshold, strict=args.strict
        )
    for w in caught:
        print(f"devcorr: warning: {w.message}", file=sys.stderr)
    values = {"noise_sigma": float(args.noise or 0.0), **report.as_dict()}
    dio.atomic_write_text(args.output, dio.format_report(values))
    if args.curves:
        t, signals = combinations(series)
        fitted = {name: report.fits[name](t) for name in signals}
        dio.atomic_write_text(args.curves, dio.format_curves(t, signals, fitted))
    return EXIT_OK


def reproduce(cfg: RunConfig, out_dir) -> list[dict]:
    """Prepare, evolve and analyse the five initial states; returns the summary rows."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dio.atomic_write_text(out_dir / "run_config.txt", cfg.to_text())
    summary = []
    for name in REPRODUCE_STATES:
        d0 = prepare_state(name, cfg)
        series = [(0.0, d0)] + time_series(d0, cfg.relaxation, cfg.dt, cfg.n_steps)
        stem = name.replace("+", "_plus").replace("-", "_minus") if name != "x-random" else "x_random"
        dio.write_deviation(out_dir / f"{stem}.dev", d0)
        dio.write_series(out_dir / f"{stem}_series.csv", series[1:])
        rows = correlation_rows(series, cfg)
        dio.atomic_write_text(out_dir / f"{stem}_correlations.csv", dio.format_correlations(rows, EXPANSION_UNITS))
        t = np.array([r["t_s"] for r in rows])
        cols = {k: np.array([r[k] for r in rows]) for k in ("I", "K", "Q")}
        q0 = cols["Q"][0]
        below = np.nonzero(cols["Q"] < Q_DROP_FRACTION * q0)[0] if q0 > 0 else np.array([], dtype=int)
        summary.append({
            "state": name,
            "I0": cols["I"][0], "K0": cols["K"][0], "Q0": q0,
            "t_Q_below_5pct_s": float(t[below[0]]) if len(below) else math.nan,
            "monotone_I": _nonincreasing(cols["I"]),
            "monotone_K": _nonincreasing(cols["K"]),
            "monotone_Q": _nonincreasing(cols["Q"]),
        })
    header = list(summary[0])
    body = [[r["state"]] + [dio.fmt(r[k]) if isinstance(r[k], float) else str(r[k]).lower() for k in header[1:]]
            for r in summary]
    dio.atomic_write_text(out_dir / "summary.csv", dio._csv_text(header, body, [f"I, K, Q in units of {EXPANSION_UNITS}"]))
    return summary


def cmd_reproduce(args, cfg: RunConfig) -> int:
    summary = reproduce(cfg, args.output)
    for r in summary:
        flags = "monotone" if r["monotone_I"] and r["monotone_K"] and r["monotone_Q"] else "NOT monotone"
        print(f"{r['state']:>9}: I={r['I0']:.6g} K={r['K0']:.6g} Q={r['Q0']:.6g}  "
              f"Q<5% at t={r['t_Q_below_5pct_s']:.4g} s  {flags}")
    return EXIT_OK


# argument parsing ----------------------------------------------------------


def _set_pair(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    k, v = text.split("=", 1)
    return k.strip(), v.strip()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value config file (overrides $DEVCORR_CONFIG)")
    common.add_argument("--set", dest="overrides", action="append", type=_set_pair, default=[],
                        metavar="KEY=VALUE", help="override one config value (repeatable)")

    ap = argparse.ArgumentParser(
        prog="devcorr",
        description="Correlations and relaxation of two-qubit NMR deviation matrices.",
        epilog="exit codes: 0 ok, 2 input, 3 I/O, 4 optimizer, 5 fit",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("prepare", parents=[common], help="write an initial deviation matrix")
    p.add_argument("state", help=f"one of {', '.join(STATE_NAMES)}")
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--alpha", type=float, help="pseudopure scale")
    p.add_argument("--seed", type=int, help="seed for x-random")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("evolve", parents=[common], help="relax a deviation matrix on the k*dt grid")
    p.add_argument("input", type=Path, help="deviation-matrix file")
    p.add_argument("-o", "--output", type=Path, required=True, help="time-series CSV")
    p.add_argument("--dt", type=float, help="time step (s)")
    p.add_argument("--n-steps", type=int, help="number of time points")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("correlations", parents=[common], help="I, K, Q for a matrix or a time series")
    p.add_argument("input", type=Path, help="deviation-matrix file or time-series CSV")
    p.add_argument("-o", "--output", type=Path, required=True)
    p.add_argument("--exact", action="store_true", help="add exact I, D, C columns (bits) at the config epsilon")
    p.add_argument("--bits", action="store_true", help="report I, K, Q in bits (times eps^2/ln2)")
    p.add_argument("--epsilon", type=float, help="polarization scale epsilon")
    p.set_defaults(func=cmd_correlations)

    p = sub.add_parser("fit", parents=[common], help="estimate J0, J1, J2 and R1, R2, R3 from a time series")
    p.add_argument("input", type=Path, help="time-series CSV")
    p.add_argument("-o", "--output", type=Path, required=True, help="key = value report")
    p.add_argument("--C", type=float, help="coupling constant C (1/s^2)")
    p.add_argument("--noise", type=float, default=0.0, help="add Gaussian noise of this width first")
    p.add_argument("--seed", type=int, help="noise seed")
    p.add_argument("--curves", type=Path, help="also write observed vs fitted curves (CSV)")
    p.add_argument("--strict", action="store_true", help="fail when the two J1/J2 estimates disagree")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("reproduce", parents=[common], help="full pipeline for the five initial states")
    p.add_argument("-o", "--output", type=Path, required=True, help="output directory")
    p.set_defaults(func=cmd_reproduce)
    return ap


_FLAG_KEYS = {"alpha": "alpha", "seed": "seed", "dt": "dt", "n_steps": "n_steps", "epsilon": "epsilon", "C": "C"}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = dict(args.overrides)
        for attr, key in _FLAG_KEYS.items():
            if getattr(args, attr, None) is not None:
                overrides[key] = getattr(args, attr)
        cfg = load_config(args.config, overrides)
        return args.func(args, cfg)
    except OSError as exc:
        print(f"devcorr: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OptimizerFailure as exc:
        print(f"devcorr: optimizer failure: {exc}", file=sys.stderr)
        return EXIT_OPTIMIZER
    except (FitDivergence, InconsistentFits) as exc:
        print(f"devcorr: fit failed ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_FIT
    except (ValueError, ZeroDivisionError) as exc:
        print(f"devcorr: invalid input ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
