"""Command-line entry point: ``msura simulate|search|predict|validate``."""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from ..config import SystemConfig
from ..errors import ConfigError, InfeasibleError, MsuraError, ParameterError
from .results import FORMATS, emit_results, to_csv, to_ndtext
from .sweep import predict_grid, run_grid, search_target

log = logging.getLogger("msura")


def _grid(spec: str) -> list:
    """``a:b:step`` (inclusive) or a comma-separated list of Eb/N0 values."""
    try:
        if ":" in spec:
            start, stop, step = (float(v) for v in spec.split(":"))
            if step <= 0:
                raise ConfigError("grid step must be positive")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 10) for i in range(count)]
        return [float(v) for v in spec.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad Eb/N0 grid {spec!r}") from exc


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one configuration key (repeatable)")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--trials", type=int, help="trials per Eb/N0 point")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="msura", description="Unsourced random access link simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Monte Carlo sweep over an Eb/N0 grid")
    _common(p)
    p.add_argument("--grid", default=None, help="Eb/N0 grid, 'start:stop:step' or 'a,b,c' (dB)")

    p = sub.add_parser("search", help="smallest Eb/N0 meeting a target error rate")
    _common(p)
    p.add_argument("--target", type=float, default=0.05)
    p.add_argument("--low", type=float, default=-10.0)
    p.add_argument("--high", type=float, default=5.0)
    p.add_argument("--resolution", type=float, default=0.25)

    p = sub.add_parser("predict", help="analytic error prediction over an Eb/N0 grid")
    _common(p)
    p.add_argument("--grid", default=None, help="Eb/N0 grid, 'start:stop:step' or 'a,b,c' (dB)")

    p = sub.add_parser("validate", help="run the statistical self-checks")
    _common(p)
    p.add_argument("--quick", action="store_true", help="skip the end-to-end sweep checks")
    return parser


def resolve_config(args) -> SystemConfig:
    overrides = dict(kv.split("=", 1) for kv in args.set if "=" in kv)
    if len(overrides) != len(args.set):
        raise ConfigError("--set expects KEY=VALUE")
    overrides = {k.strip(): v.strip() for k, v in overrides.items()}
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.trials is not None:
        overrides["trials"] = str(args.trials)
    if args.config:
        cfg = SystemConfig.load(args.config, **overrides)
    else:
        cfg = SystemConfig.from_mapping(overrides)
    cfg.validate()
    return cfg


def _write(rows, args, cfg) -> None:
    if args.out:
        emit_results(rows, args.out, args.format, cfg)
        log.info("wrote %d rows to %s", len(rows), args.out)
    else:
        sys.stdout.write("".join("# " + line + "\n" for line in cfg.to_text().splitlines()))
        sys.stdout.write(to_csv(rows) if args.format == "csv" else to_ndtext(rows))


def _simulate(args, cfg) -> int:
    grid = _grid(args.grid) if args.grid else [cfg.ebn0_db]
    _write(run_grid(cfg, grid, args.threads), args, cfg)
    return 0


def _search(args, cfg) -> int:
    res = search_target(cfg, args.target, args.low, args.high, args.resolution, args.threads)
    _write(list(res.rows), args, cfg)
    if res.attained:
        log.info("target %.3g reached at Eb/N0 = %.2f dB (bracket %s)", args.target, res.ebn0_db, res.bracket)
        return 0
    log.error("target %.3g not reached on [%.2f, %.2f] dB", args.target, *res.bracket)
    return 3


def _predict(args, cfg) -> int:
    grid = _grid(args.grid) if args.grid else [cfg.ebn0_db]
    _write(predict_grid(cfg, grid), args, cfg)
    return 0


def _validate(args, cfg) -> int:
    from ..validation import run_all

    results = run_all(include_sweep=not args.quick, threads=args.threads)
    lines = [r.line() for r in results]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {"simulate": _simulate, "search": _search, "predict": _predict, "validate": _validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, ParameterError) as exc:
        log.error("configuration error: %s", exc)
        return 2
    except InfeasibleError as exc:
        log.error("infeasible: %s", exc)
        return 3
    except (MsuraError, OSError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
