"""Command-line interface: ``urnctrw <subcommand> [flags]``.

Exit codes: 0 success (all gates passed), 2 configuration or usage error,
3 gate failure. Errors are reported on stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, DomainError, EmbeddingError, InvalidParameterError, UrnCtrwError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GATE = 3


class UsageError(Exception):
    def __init__(self, message, flag=None):
        super().__init__(message)
        self.flag = flag


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _chain_flags(p):
    p.add_argument("--kind", required=True, choices=["ou", "jacobi", "cir"])
    p.add_argument("--theta", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--d", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="urnctrw", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"urnctrw {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("simulate-chain", help="simulate one rescaled urn-chain path (CSV)")
    _chain_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--x0", type=float, help="start; default stationary mean")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path, help="CSV file; default stdout")

    p = sub.add_parser("simulate-ctrw", help="CTRW ensemble at one time")
    _chain_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--waiting", choices=["pareto", "stable", "deterministic"], default="stable")
    p.add_argument("--x0", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--output-dir", type=Path, default=Path("results"))

    p = sub.add_parser("density", help="fractional transition density or CDF curve (CSV)")
    _chain_flags(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--order", type=int, default=50)
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--cdf", action="store_true", help="emit the CDF instead of the density")
    p.add_argument("--output", type=Path, help="CSV file; default stdout")

    p = sub.add_parser("study", help="run one study from a TOML config")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--config", type=Path)
    g.add_argument("--study", help="run the bundled config of this study")
    p.add_argument("--output-dir", type=Path)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("selftest", help="run every bundled acceptance study")
    p.add_argument("--output-dir", type=Path)
    p.add_argument("--only", action="append", help="restrict to these studies")
    p.add_argument("--workers", type=int)
    return parser


def _chain_params(args):
    from .pearson import DEFAULT_CHAIN_PARAMS, ChainParams, DiffusionKind

    kind = DiffusionKind.parse(args.kind)
    base = DEFAULT_CHAIN_PARAMS[kind]
    pick = lambda v, d: d if v is None else v
    cp = ChainParams(pick(args.theta, base.theta), pick(args.a, base.a), pick(args.b, base.b),
                     pick(args.d, base.d))
    return kind, cp.validate(kind)


def _emit(text: str, path: Path | None):
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def cmd_simulate_chain(args) -> int:
    from .chains import simulate_path
    from .pearson import derive_params, stationary_law
    from .rng import path_rng

    kind, cp = _chain_params(args)
    x0 = args.x0
    if x0 is None:
        x0 = float(stationary_law(kind, derive_params(kind, cp)).mean())
    if args.steps < 0:
        raise InvalidParameterError("--steps must be nonnegative")
    path = simulate_path(kind, cp, args.n, x0, args.steps, path_rng(args.seed, 0))
    _emit(path.to_csv(), args.output)
    return EXIT_OK


def cmd_simulate_ctrw(args) -> int:
    import datetime as _dt

    from .ctrw import CtrwSpec, empirical_cdf, run_ensemble
    from .heavy_tails import WaitingTimeModel

    kind, cp = _chain_params(args)
    spec = CtrwSpec(kind, cp, args.n, args.beta, WaitingTimeModel(args.beta, law=args.waiting),
                    args.x0)
    res = run_ensemble(spec, args.t, args.paths, args.seed, args.workers)
    stamp = _dt.datetime.now(_dt.timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
    run = args.output_dir / "simulate_ctrw" / stamp
    run.mkdir(parents=True)
    (run / "samples.csv").write_text(res.to_csv())
    (run / "ecdf.csv").write_text(empirical_cdf(res).to_csv())
    (run / "meta.json").write_text(res.to_json() + "\n")
    print(json.dumps({"run_dir": str(run), "paths": res.paths,
                      "mean": float(res.samples.mean())}))
    return EXIT_OK


def cmd_density(args) -> int:
    import warnings

    from .errors import TruncationWarning
    from .pearson import derive_params, stationary_law, state_space
    from .spectral import SpectralDensity, eigen_system

    kind, cp = _chain_params(args)
    params = derive_params(kind, cp)
    sd = SpectralDensity(eigen_system(kind, params, args.order), args.beta, args.y, args.t)
    law = stationary_law(kind, params)
    space = state_space(kind)
    lo = float(law.ppf(1e-4)) if args.lo is None else args.lo
    hi = float(law.ppf(1 - 1e-4)) if args.hi is None else args.hi
    if args.points < 2 or not lo < hi:
        raise InvalidParameterError("need --points >= 2 and --lo < --hi")
    xs = np.linspace(lo, hi, args.points)
    if not args.cdf:
        xs = xs[space.contains(xs, strict=True)]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        text = sd.curve_csv(xs, "cdf" if args.cdf else "density")
    if caught:
        print(json.dumps({"warning": "truncation", "message": str(caught[0].message)}),
              file=sys.stderr)
    _emit(text, args.output)
    return EXIT_OK


def _run_config(config, output_dir) -> tuple:
    from .harness import run_study, write_run

    table = run_study(config)
    run = write_run(table, config, output_dir)
    return table, run


def cmd_study(args) -> int:
    from .harness import default_config, load_config

    config = load_config(args.config) if args.config else default_config(_study_name(args.study))
    if args.workers is not None:
        config = config.replace(workers=args.workers)
    table, run = _run_config(config, args.output_dir)
    print(table.summary())
    print(json.dumps({"run_dir": str(run), "passed": table.passed}))
    return EXIT_OK if table.passed else EXIT_GATE


def _study_name(name):
    from .harness import Study

    try:
        return Study(name)
    except ValueError:
        raise ConfigError(f"unknown study {name!r}", key="--study") from None


def cmd_selftest(args) -> int:
    from .harness import Study, default_config

    studies = [_study_name(s) for s in args.only] if args.only else list(Study)
    ok = True
    for study in studies:
        config = default_config(study)
        if args.workers is not None:
            config = config.replace(workers=args.workers)
        table, run = _run_config(config, args.output_dir)
        ok &= table.passed
        print(f"[{'PASS' if table.passed else 'FAIL'}] {study.value}  ({run})")
        for r in table.failures():
            print(f"    failed {r.label} {r.statistic}={r.value!r} ({r.tolerance})")
    return EXIT_OK if ok else EXIT_GATE


COMMANDS = {
    "simulate-chain": cmd_simulate_chain,
    "simulate-ctrw": cmd_simulate_ctrw,
    "density": cmd_density,
    "study": cmd_study,
    "selftest": cmd_selftest,
}


def _error(kind: str, message: str, flag=None) -> None:
    payload = {"error": kind, "message": message}
    if flag is not None:
        payload["flag"] = flag
    print(json.dumps(payload), file=sys.stderr)


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if extra:
            bad = next((e for e in extra if e.startswith("-")), extra[0])
            raise UsageError(f"unrecognized argument {bad!r}", flag=bad.split("=")[0])
        if args.command is None:
            raise UsageError("missing subcommand; choose one of " + ", ".join(COMMANDS))
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _error("usage", str(exc), exc.flag)
        return EXIT_CONFIG
    except ConfigError as exc:
        _error("config", str(exc), exc.key)
        return EXIT_CONFIG
    except (InvalidParameterError, DomainError, EmbeddingError) as exc:
        _error("invalid_parameter", str(exc))
        return EXIT_CONFIG
    except UrnCtrwError as exc:
        _error(type(exc).__name__, str(exc))
        return 1


def main(argv=None) -> None:
    sys.exit(run_cli(argv))


if __name__ == "__main__":  # pragma: no cover
    main()
