"""Command-line front end.

    extendkit extend --operator omega --extender tietze --set A.csv --queries Q.csv --out out.csv
    extendkit validate-extender riesz --tau 0.01 --grid 64
    extendkit suite --all --seed 7152 --out reports/

Exit codes: 0 success, 1 property failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .extenders import (
    EXTENDERS,
    DomainError,
    get_dual_weight,
    get_extender,
    validate_extender,
)
from .io import InputError, read_queries, read_set, write_values_csv
from .operators import OPERATORS, STRATEGIES, Extension, NegativeValuesError
from .verify import DEFAULT_SEED, ISOMETRY_OPS, SUITES, run_suites, write_reports

EXIT_OK, EXIT_PROPERTY, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("extendkit")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    operator: str | None = None
    extender: str | None = None
    set_path: Path | None = None
    queries_path: Path | None = None
    out: Path | None = None
    strategy: str = "brute"
    kappa: float | None = None
    metric: str | None = None
    seed: int = DEFAULT_SEED
    suites: list = field(default_factory=list)
    ops: list = field(default_factory=list)

    def check(self):
        """Reject invalid operator/weight combinations and missing files."""
        op, ext = self.operator, self.extender
        if op in ("omega", "theta"):
            if ext is None:
                raise UsageError(f"--operator {op} needs --extender ({', '.join(EXTENDERS)})")
            if ext not in EXTENDERS:
                raise UsageError(f"unknown extender {ext!r} for {op}; "
                                 f"choose from {', '.join(EXTENDERS)}")
        elif op == "mho":
            if ext is None:
                raise UsageError("--operator mho needs a dual weight via --extender "
                                 "(dieudonne or reciprocal-of-<extender>)")
            try:
                get_dual_weight(ext)
            except ValueError:
                raise UsageError(f"unknown dual weight {ext!r} for mho") from None
        elif ext is not None:
            raise UsageError(f"--operator {op} takes no extender")
        if self.kappa is not None and op != "pasch":
            raise UsageError("--kappa applies to --operator pasch only")
        for p in (self.set_path, self.queries_path):
            if p is not None and not p.exists():
                raise UsageError(f"no such file: {p}")

    def weight(self):
        if self.operator in ("omega", "theta"):
            return get_extender(self.extender)
        if self.operator == "mho":
            return get_dual_weight(self.extender)
        return None


def _seed(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="extendkit",
                                description="Extend functions given on a finite sample of a "
                                            "metric space, and check operator properties.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("extend", help="evaluate an extension at query points")
    e.add_argument("--operator", required=True, choices=OPERATORS)
    e.add_argument("--extender", help="extender (omega, theta) or dual weight (mho)")
    e.add_argument("--set", dest="set_path", required=True, type=Path,
                   help="CSV x1..xd,value or JSON distance-matrix file")
    e.add_argument("--queries", required=True, type=Path)
    e.add_argument("--out", type=Path, help="output CSV (default: stdout)")
    e.add_argument("--strategy", default="brute", choices=STRATEGIES)
    e.add_argument("--kappa", type=float, help="slope for pasch (default: phi-weighted form)")
    e.add_argument("--metric", choices=("auto", "euclidean", "real-line"), default="auto")

    v = sub.add_parser("validate-extender", help="sample the extender axioms")
    v.add_argument("name")
    v.add_argument("--tau", type=float, default=0.01)
    v.add_argument("--grid", type=int, default=64)
    v.add_argument("--out", type=Path, help="write the JSON report here")

    s = sub.add_parser("suite", help="run property suites and counterexample demos")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--all", action="store_true", help="run every suite (default)")
    g.add_argument("--only", action="append", choices=SUITES, metavar="SUITE",
                   help=f"run one suite; repeatable ({', '.join(SUITES)})")
    s.add_argument("--op", action="append", metavar="OP",
                   help=f"restrict isometry/monotone suites to an operator "
                        f"({', '.join(ISOMETRY_OPS)})")
    s.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    s.add_argument("--out", type=Path, help="directory for reports.json and demo CSVs")
    s.add_argument("--quick", action="store_true", help="fewer trials")
    return p


def cmd_extend(cfg: RunConfig, stdout=None) -> int:
    cfg.check()
    loaded = read_set(cfg.set_path, metric=cfg.metric)
    Q = read_queries(cfg.queries_path, loaded)
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        ext = Extension(loaded.cloud, loaded.phi, cfg.operator, weight=cfg.weight(),
                        kappa=cfg.kappa, strategy=cfg.strategy)
    values = ext.evaluate_many(Q)
    if cfg.out is None:
        write_values_csv(stdout or sys.stdout, Q, values, loaded.kind)
    else:
        with open(cfg.out, "w", newline="", encoding="utf-8") as fh:
            write_values_csv(fh, Q, values, loaded.kind)
    return EXIT_OK


def cmd_validate_extender(name: str, tau: float, grid_n: int, out: Path | None = None,
                          stdout=None) -> int:
    try:
        F = get_extender(name)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        report = validate_extender(F, tau, grid_n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if out is not None:
        out.write_text(text)
    (stdout or sys.stdout).write(text)
    return EXIT_OK if report.passed else EXIT_PROPERTY


def cmd_suite(cfg: RunConfig, out_dir: Path | None = None, quick: bool = False,
              stdout=None) -> int:
    stdout = stdout or sys.stdout
    if cfg.ops:
        bad = set(cfg.ops) - set(ISOMETRY_OPS)
        if bad:
            raise UsageError(f"unknown --op {sorted(bad)}; choose from {', '.join(ISOMETRY_OPS)}")
    reports = run_suites(cfg.suites or None, seed=cfg.seed, ops=cfg.ops or None,
                         out_dir=out_dir, quick=quick)
    for r in reports:
        label = "  [paper counterexample]" if r.expected_failure else ""
        stdout.write(r.line() + label + "\n")
    if out_dir is not None:
        write_reports(reports, out_dir)
    failed = [r for r in reports if not r.ok]
    stdout.write(f"{len(reports) - len(failed)}/{len(reports)} reports ok\n")
    return EXIT_OK if not failed else EXIT_PROPERTY


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "extend":
            cfg = RunConfig(operator=args.operator, extender=args.extender,
                            set_path=args.set_path, queries_path=args.queries, out=args.out,
                            strategy=args.strategy, kappa=args.kappa, metric=args.metric)
            return cmd_extend(cfg)
        if args.command == "validate-extender":
            return cmd_validate_extender(args.name, args.tau, args.grid, args.out)
        cfg = RunConfig(seed=args.seed, suites=args.only or [], ops=args.op or [])
        return cmd_suite(cfg, args.out, args.quick)
    except (UsageError, InputError, NegativeValuesError, DomainError) as exc:
        print(f"extendkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
