"""Command-line entry point.

Reports are printed as JSON on stdout with a one-line human summary on
stderr. Any error prints ``error: ...`` on stderr and exits with status 1
(argument errors exit with status 2).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import __version__
from .config import ConfigError, ScenarioConfig, load_config
from .dynamics import time_grid
from .exceptions import DefectiveMatrixError, NotHermitianError, NotPositiveError, NumericalRangeError
from .figures import FIGURES, PRESETS, derived_quantities, preset_config, run_figure, run_scenario
from .recurrence import build_witness, detect_recurrence, evolve_witness, theorem_property_suite, \
    witness_gap_positive, witness_time_independence

_ERRORS = (ConfigError, DefectiveMatrixError, NotHermitianError, NotPositiveError,
           NumericalRangeError, ValueError, KeyError, OSError)


def _emit(payload: dict, summary: str) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))
    print(summary, file=sys.stderr)


def _scenario(args) -> ScenarioConfig:
    if args.config and args.preset:
        raise ValueError("give either --config or --preset, not both")
    if args.config:
        return load_config(args.config)
    if args.preset:
        return preset_config(args.preset)
    raise ValueError("a scenario is required: --config <path> or --preset <name>")


def cmd_figure(args) -> int:
    ids = list(FIGURES) if args.id == "all" else [args.id]
    written = {}
    for fig_id in ids:
        out = args.out if len(ids) == 1 else f"{args.out}/{fig_id}"
        written[fig_id] = run_figure(fig_id, out, args.t_max, args.steps, args.format)
    _emit({"out": args.out, "files": written},
          f"wrote {sum(len(v) for v in written.values())} files under {args.out}")
    return 0


def cmd_classify(args) -> int:
    cfg = _scenario(args)
    derived = derived_quantities(cfg)
    _emit(dict(derived, family=cfg.family),
          f"{cfg.family}: phase={derived['phase']} pattern={derived['pattern']} "
          f"real_spectrum={derived['has_real_spectrum']}")
    return 0


def cmd_evolve(args) -> int:
    cfg = _scenario(args)
    out = args.out or cfg.output_dir
    files = run_scenario(cfg, out, args.format)
    _emit({"out": out, "files": files}, f"wrote {len(files)} files under {out}")
    return 0


def cmd_recurrence(args) -> int:
    cfg = _scenario(args)
    report = detect_recurrence(cfg.hamiltonian(), cfg.initial_state(), args.epsilon,
                               args.horizon, args.coarse_steps)
    _emit(report.as_dict(),
          f"{report.verdict.value}: t_best={report.t_best:.12g} d_best={report.d_best:.3e}")
    return 0


def cmd_witness(args) -> int:
    cfg = _scenario(args)
    h = cfg.hamiltonian()
    w = build_witness(h, args.alphas or ())
    t_max = args.t_max if args.t_max is not None else cfg.t_max
    grid = time_grid(t_max, args.steps)
    static, deviation = witness_time_independence(h, w, grid, args.tol)
    payload = {
        "time_independent": static,
        "max_relative_deviation": deviation,
        "tol": args.tol,
        "t_max": t_max,
        "mu": w.mu,
        "alphas": w.alphas.tolist(),
        "gap_positive_at_0": witness_gap_positive(w.m0),
        "gap_positive_at_t_max": witness_gap_positive(evolve_witness(h, w, t_max)),
        "has_real_spectrum": derived_quantities(cfg)["has_real_spectrum"],
    }
    _emit(payload, f"witness {'time-independent' if static else 'time-dependent'} "
                   f"(max deviation {deviation:.3e})")
    return 0


def cmd_suite(args) -> int:
    summary = theorem_property_suite(args.dim, args.n, args.seed, epsilon=args.epsilon,
                                     check_recurrence=not args.witness_only)
    _emit(summary.as_dict(), f"dim {args.dim}: {summary.consistent}/{summary.total} consistent "
                             f"({100 * summary.consistency:.1f}%)")
    return 0 if summary.passed else 1


def _add_scenario(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="scenario YAML file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="built-in figure scenario")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nhrecur", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure", help="write CSV/SVG data for a figure panel")
    p.add_argument("id", choices=[*FIGURES, "all"])
    p.add_argument("--out", default="out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=2001)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("classify", help="report delta, eigenvalues, phase and pattern")
    _add_scenario(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evolve", help="evolve a scenario and write its measures")
    _add_scenario(p)
    p.add_argument("--out", help="output directory (default: the config's output_dir)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("recurrence", help="detect an epsilon-recurrence of Omega(t)")
    _add_scenario(p)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, default=10.0)
    p.add_argument("--coarse-steps", type=int, default=1000)
    p.set_defaults(func=cmd_recurrence)

    p = sub.add_parser("witness", help="check time independence of the dilation witness")
    _add_scenario(p)
    p.add_argument("--t-max", type=float, help="default: the scenario's t_max")
    p.add_argument("--steps", type=int, default=201)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--alphas", type=float, nargs="+", help="witness weights, each > 1 (default 2)")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("suite", help="spectrum reality vs recurrence and witness verdicts")
    p.add_argument("--dim", type=int, choices=(2, 3, 4), default=2)
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--witness-only", action="store_true", help="skip the recurrence scans")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _ERRORS as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
