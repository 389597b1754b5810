"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import replace
from pathlib import Path

from . import hilbert as hb
from . import model as m
from .config import LOOP_SWEEP, LOOPS, ConfigError, RunConfig
from .fitting import FitError, contrast, fit_interferogram
from .io import DataError, read_interferogram, render_text, write_interferogram, write_report
from .reproduce import MODES, TARGETS, UnknownTargetError, fig8_csv, reproduce
from .selftest import SUITES, format_results, run_selftest
from .synth import Interferogram, Scenario, ScenarioKind, poissonize, sweep_ideal

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
OUTPUT_ENV = "QCHESHIRE_OUTPUT_DIR"

KIND_NAMES = {"dc": m.Kind.DC, "rf": m.Kind.RF, "abs": m.Kind.ABSORBER}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- scenarios


def parse_scenario(text: str, cfg) -> Scenario:
    """``prep[:PATH]``, ``weak:KIND:PATH[@SWEEP]`` or ``empty:LOOP``.

    KIND is dc, rf or abs; PATH and SWEEP are I, II or III. Prep scenarios
    sweep PATH; weak scenarios sweep PATH unless ``@SWEEP`` is given.
    """
    grid = tuple(cfg.chi_grid())
    parts = text.split(":")
    try:
        if parts[0] == "prep" and len(parts) <= 2:
            j = m.path_index(parts[1]) if len(parts) == 2 else 0
            return Scenario(ScenarioKind.PREP, j, grid)
        if parts[0] == "empty" and len(parts) == 2 and parts[1] in LOOPS:
            return Scenario(ScenarioKind.EMPTY, LOOP_SWEEP[parts[1]], grid, loop=parts[1])
        if parts[0] == "weak" and len(parts) == 3 and parts[1] in KIND_NAMES:
            kind = KIND_NAMES[parts[1]]
            path, _, sweep = parts[2].partition("@")
            j = m.path_index(path)
            sj = m.path_index(sweep) if sweep else j
            strength = cfg.absorption if kind is m.Kind.ABSORBER else cfg.alpha_rot
            return Scenario(ScenarioKind.WEAK, sj, grid, m.Interaction(kind, j, strength))
    except ValueError as exc:
        raise UsageError(f"bad scenario {text!r}: {exc}") from None
    raise UsageError(
        f"bad scenario {text!r}; expected prep[:PATH], weak:dc|rf|abs:PATH[@SWEEP] or empty:front|rear|outer"
    )


def scenario_filename(sc: Scenario, fmt: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", sc.scenario_id).strip("_") + "." + fmt


def simulate_one(sc: Scenario, cfg, noise: bool) -> Interferogram:
    ifg = sweep_ideal(sc, m.Selection(), cfg)
    return poissonize(ifg, cfg.counting, sc.scenario_id) if noise else ifg


def output_dir(args_out: str | None, run: RunConfig) -> Path:
    return Path(args_out or os.environ.get(OUTPUT_ENV) or run.output_dir)


def _ensure_dir(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create output directory {path}: {exc.strerror}") from exc
    if not os.access(path, os.W_OK):
        raise DataError(f"output directory {path} is not writable")


# ----------------------------------------------------------------- commands


def cmd_simulate(args) -> int:
    run = RunConfig.load(args.config) if args.config else RunConfig()
    if args.format:
        run = replace(run, format=args.format)
    cfg = run.experiment
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    scenarios = [parse_scenario(s, cfg) for s in (args.scenario or ["prep"])]
    out = output_dir(args.out, run)
    _ensure_dir(out)
    noise = args.noise == "on"
    for sc in scenarios:
        ifg = simulate_one(sc, cfg, noise)
        path = write_interferogram(ifg, out / scenario_filename(sc, run.format), run.format)
        print(path)
    return EXIT_OK


def cmd_fit(args) -> int:
    ifg = read_interferogram(args.file)
    res = fit_interferogram(ifg, fixed_omega=args.fix_omega, nominal_omega=args.nominal_omega)
    d = res.to_dict()
    if res.i0 > 0:
        c, dc = contrast(res)
        d["contrast"] = c
        d["contrast_error"] = dc
    d["n_points"] = len(ifg)
    d["source"] = str(args.file)
    print(json.dumps(d, indent=2))
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    report = reproduce(args.target, mode=args.mode, seed=args.seed, runs=args.runs)
    out = output_dir(args.out, RunConfig())
    _ensure_dir(out)
    stem = out / f"{args.target}_{args.mode}"
    write_report(report, stem.with_suffix(".json"))
    text = render_text(report)
    stem.with_suffix(".txt").write_text(text, encoding="utf-8")
    if args.target == "fig8":
        stem.with_suffix(".csv").write_text(fig8_csv(report["scan"]), encoding="utf-8")
    sys.stdout.write(text)
    print(f"wrote {stem.with_suffix('.json')}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = run_selftest(faults=args.inject_fault or ())
    sys.stdout.write(format_results(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcheshire", description="Three-path weak-value interferometry simulator and analysis.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="write interferogram files for one or more scenarios")
    s.add_argument("--config", help="run configuration (JSON)")
    s.add_argument("--scenario", action="append",
                   help="prep[:PATH] | weak:dc|rf|abs:PATH[@SWEEP] | empty:front|rear|outer (repeatable)")
    s.add_argument("--noise", choices=("on", "off"), default="on")
    s.add_argument("--seed", type=int)
    s.add_argument("--format", choices=("csv", "json"))
    s.add_argument("--out", help=f"output directory (overrides ${OUTPUT_ENV} and the config)")
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fit", help="fit I0 + B sin(omega chi + phi) to an interferogram file")
    f.add_argument("file")
    f.add_argument("--fix-omega", type=float, default=None)
    f.add_argument("--nominal-omega", type=float, default=1.0)
    f.set_defaults(func=cmd_fit)

    r = sub.add_parser("reproduce", help="run the full pipeline for a table or figure target")
    r.add_argument("--target", required=True, choices=TARGETS)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--mode", choices=MODES, default="realistic")
    r.add_argument("--runs", type=int, default=1)
    r.add_argument("--out", help=f"output directory (overrides ${OUTPUT_ENV})")
    r.set_defaults(func=cmd_reproduce)

    t = sub.add_parser("selftest", help="run the oracle suites")
    t.add_argument("--inject-fault", action="append", choices=SUITES, help=argparse.SUPPRESS)
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qcheshire: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownTargetError as exc:
        print(f"qcheshire: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ConfigError, OSError) as exc:
        print(f"qcheshire: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FitError as exc:
        print(f"qcheshire: fit failed: {exc}", file=sys.stderr)
        if exc.diagnostics:
            print(json.dumps(exc.diagnostics), file=sys.stderr)
        return EXIT_NUMERIC
    except (hb.ConvergenceError, m.VanishingOverlapError, ArithmeticError) as exc:
        print(f"qcheshire: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
