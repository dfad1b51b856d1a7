"""Command-line front door: every model claim as a runnable report.

Commands
--------
reproduce-example1   dominance of the switching control plus the spike test
                     of the zero control, with the generation-anchor table
reproduce-example2   naive vs dominating closed forms over a grid
optimize             truncated-objective maximization and the witness chain
verify-equilibrium   spike test of a chosen candidate over a dyadic grid
verify               the full property-check registry

Reports go to stdout or --output as JSON (default) or CSV; JSON reports
validate against the schema shipped in ticlab/data/report_schema.json.
Exit codes: 0 success, 1 configuration error, 2 verification failure.
The TICLAB_OUTPUT_DIR environment variable prefixes relative output paths.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .control import PiecewiseControl, alpha_hat, constant, zero_control
from .dynamics import y2
from .equilibrium import verify_equilibrium
from .errors import ConfigurationError
from .naive import DeviationKernel, comparison_rows, dominating_cost_closed, naive_cost_closed
from .pareto import dominance_check, y2_hat_closed
from .precommit import inconsistency_witness, maximize_F
from .rational import decimal_str, format_rational
from .report import dump_json, put_rational, validate_report, write_csv_rows
from .schedule import DyadicSchedule, dyadic_grid, t_point
from .verification import run_all

ZERO = Fraction(0)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VERIFICATION = 2

OUTPUT_DIR_ENV = "TICLAB_OUTPUT_DIR"


@dataclass
class RunConfig:
    command: str
    depth: int = 12
    grid_depth: int = 8
    arithmetic: str = "exact"
    tol: Fraction = ZERO
    seed: int = 42
    output_format: str = "json"
    output_path: str | None = None
    precision: int = 12
    horizon: Fraction = Fraction(1)

    def __post_init__(self):
        if self.depth < 2:
            raise ConfigurationError("depth must be >= 2, got %d" % self.depth)
        if self.grid_depth < 1:
            raise ConfigurationError("grid-depth must be >= 1, got %d" % self.grid_depth)
        if self.tol < 0:
            raise ConfigurationError("tol must be >= 0")
        if self.precision < 0:
            raise ConfigurationError("precision must be >= 0")
        if self.arithmetic not in ("exact", "float"):
            raise ConfigurationError("arithmetic must be exact or float")
        if self.output_format not in ("json", "csv"):
            raise ConfigurationError("format must be json or csv")
        if self.horizon <= 0:
            raise ConfigurationError("horizon must be positive")


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigurationError("cannot parse rational %r: %s" % (text, exc))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ticlab",
        description="verification lab for two time-inconsistent control counterexamples",
    )
    parser.add_argument("--version", action="version", version="ticlab " + __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--depth", type=int, default=12,
                       help="generations / truncation depth (default 12)")
        p.add_argument("--grid-depth", type=int, default=8,
                       help="dyadic evaluation grid depth (default 8)")
        p.add_argument("--arithmetic", choices=("exact", "float"), default="exact")
        p.add_argument("--tol", default="0", help="tolerance as a rational string")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--output", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--precision", type=int, default=12,
                       help="decimal digits for rendered rationals")

    p1 = sub.add_parser("reproduce-example1",
                        help="dominated equilibrium: anchors, dominance, spike test")
    common(p1)
    p1.add_argument("--debug-flip-sign", action="store_true", help=argparse.SUPPRESS)

    p2 = sub.add_parser("reproduce-example2", help="dominated naive strategy over a grid")
    common(p2)
    p2.add_argument("--horizon", default="1", help="model horizon (rational, default 1)")

    p3 = sub.add_parser("optimize", help="precommitted bound and inconsistency witness")
    common(p3)
    p3.add_argument("--restarts", type=int, default=8)
    p3.add_argument("--iterations", type=int, default=200)
    p3.add_argument("--starts", default=None,
                    help="comma list of starts (zero, analytic, analytic_boundary, alpha_hat, random)")

    p4 = sub.add_parser("verify-equilibrium", help="spike test of a candidate control")
    common(p4)
    p4.add_argument("--candidate", choices=("zero", "alpha-hat", "const"), default="zero")
    p4.add_argument("--value", default="0", help="constant value for --candidate const")

    p5 = sub.add_parser("verify", help="run the property-check registry")
    common(p5)
    return parser


def _config_from(args) -> RunConfig:
    tol = _parse_fraction(args.tol)
    if args.arithmetic == "float" and tol == 0 and args.command != "verify":
        tol = Fraction(1, 10**9)
    return RunConfig(
        command=args.command,
        depth=args.depth,
        grid_depth=args.grid_depth,
        arithmetic=args.arithmetic,
        tol=tol,
        seed=args.seed,
        output_format=args.format,
        output_path=args.output,
        precision=args.precision,
        horizon=_parse_fraction(getattr(args, "horizon", "1")),
    )


def _settings_dict(config: RunConfig) -> dict:
    return {
        "command": config.command,
        "depth": config.depth,
        "grid_depth": config.grid_depth,
        "arithmetic": config.arithmetic,
        "tol": format_rational(config.tol),
        "seed": config.seed,
        "format": config.output_format,
        "precision": config.precision,
        "horizon": format_rational(config.horizon),
    }


def _emit(config: RunConfig, doc: dict, csv_spec=None):
    """Write the JSON report (schema-validated) or its CSV slice."""
    if config.output_format == "json":
        validate_report(doc)
        text = dump_json(doc)
    else:
        fieldnames, rows = csv_spec
        buf = io.StringIO()
        write_csv_rows(buf, fieldnames, rows)
        text = buf.getvalue()
    path = config.output_path
    if path is None:
        sys.stdout.write(text)
        return
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    with open(path, "w") as fh:
        fh.write(text)


def _flipped_alpha_hat(schedule: DyadicSchedule) -> PiecewiseControl:
    hat = alpha_hat(schedule)
    from .control import Segment

    segs = [Segment(s.start, -s.c0, -s.c1) for s in hat.segments]
    segs.append(Segment(hat.tail_start, ZERO, ZERO))
    return PiecewiseControl(segments=tuple(segs), bound=hat.bound)


def cmd_reproduce_example1(config: RunConfig, flip_sign: bool = False) -> tuple[int, dict]:
    schedule = DyadicSchedule(depth=max(config.depth, 12))
    candidate = _flipped_alpha_hat(schedule) if flip_sign else alpha_hat(schedule)
    baseline = zero_control()

    dominance = dominance_check(candidate, baseline, config.depth, schedule=schedule)
    equilibrium = verify_equilibrium(
        baseline, dyadic_grid(config.grid_depth), tol=config.tol)

    table = []
    for n in range(config.depth + 1):
        row = {"n": n}
        put_rational(row, "t", t_point(n), config.precision)
        value = y2(candidate, t_point(n))
        put_rational(row, "cost_at_generation_start", value, config.precision)
        row["matches_anchor_law"] = bool(value == y2_hat_closed(n))
        table.append(row)

    doc = {
        "command": "reproduce-example1",
        "settings": _settings_dict(config),
        "verdict": "PASS" if dominance.dominates and equilibrium.passed else "FAIL",
        "dominance": dominance.to_json_dict(),
        "equilibrium": equilibrium.to_json_dict(config.precision),
        "anchor_table": table,
    }
    code = EXIT_OK if dominance.dominates and equilibrium.passed else EXIT_VERIFICATION
    csv_rows = dominance.csv_rows(config.precision)
    fields = list(csv_rows[0].keys()) if csv_rows else []
    return code, (doc, (fields, csv_rows))


def cmd_reproduce_example2(config: RunConfig) -> tuple[int, dict]:
    kernel = DeviationKernel(horizon=config.horizon)
    grid = list(dyadic_grid(config.grid_depth, horizon=config.horizon)) + [config.horizon]
    rows = comparison_rows(kernel, grid, config.precision)
    margins_ok = True
    table = []
    for t in grid:
        j_n = naive_cost_closed(t, kernel)
        j_d = dominating_cost_closed(t, kernel)
        margin = j_d - j_n
        if t < config.horizon and margin >= 0:
            margins_ok = False
        entry = {}
        put_rational(entry, "t", t, config.precision)
        put_rational(entry, "j_naive", j_n, config.precision)
        put_rational(entry, "j_dominating", j_d, config.precision)
        put_rational(entry, "margin", margin, config.precision)
        table.append(entry)
    doc = {
        "command": "reproduce-example2",
        "settings": _settings_dict(config),
        "verdict": "PASS" if margins_ok else "FAIL",
        "comparison": table,
    }
    code = EXIT_OK if margins_ok else EXIT_VERIFICATION
    fields = list(rows[0].keys()) if rows else []
    return code, (doc, (fields, rows))


def cmd_optimize(config: RunConfig, restarts: int, iterations: int,
                 starts: str | None) -> tuple[int, dict]:
    start_list = tuple(s.strip() for s in starts.split(",")) if starts else None
    if restarts < 0 or iterations < 0:
        raise ConfigurationError("restarts and iterations must be >= 0")
    result = maximize_F(config.depth, restarts=restarts, iterations=iterations,
                        seed=config.seed, starts=start_list)
    witness = inconsistency_witness(config.depth, optimum=result) \
        if config.depth >= 4 else None
    target = Fraction(5, 96) - config.tol
    ok = result.best_value >= target and witness is not None and witness.complete
    doc = {
        "command": "optimize",
        "settings": _settings_dict(config),
        "verdict": "PASS" if ok else "FAIL",
        "optimization": result.to_json_dict(),
        "witness": witness.to_json_dict() if witness else None,
    }
    rows = [
        {"u": format_rational(u), "x": format_rational(x),
         "u_decimal": decimal_str(u, config.precision),
         "x_decimal": decimal_str(x, config.precision)}
        for u, x in zip(result.best_path.times, result.best_path.values)
    ]
    fields = ["u", "x", "u_decimal", "x_decimal"]
    return (EXIT_OK if ok else EXIT_VERIFICATION), (doc, (fields, rows))


def cmd_verify_equilibrium(config: RunConfig, candidate: str, value: str) -> tuple[int, dict]:
    if candidate == "zero":
        ctl_obj = zero_control()
    elif candidate == "alpha-hat":
        ctl_obj = alpha_hat(DyadicSchedule(depth=max(config.depth, 12)))
    else:
        v = _parse_fraction(value)
        ctl_obj = constant(v, bound=max(abs(v), Fraction(1)))
    rep = verify_equilibrium(ctl_obj, dyadic_grid(config.grid_depth), tol=config.tol)
    doc = {
        "command": "verify-equilibrium",
        "settings": _settings_dict(config),
        "candidate": candidate,
        "verdict": rep.verdict,
        "equilibrium": rep.to_json_dict(config.precision),
    }
    rows = []
    for w in doc["equilibrium"]["witnesses"]:
        rows.append({"t": w["t"], "perturbation_id": w["perturbation_id"],
                     "rate": w["rate"], "rate_decimal": w["rate_decimal"]})
    fields = ["t", "perturbation_id", "rate", "rate_decimal"]
    return (EXIT_OK if rep.passed else EXIT_VERIFICATION), (doc, (fields, rows))


def cmd_verify(config: RunConfig) -> tuple[int, dict]:
    results = run_all(arithmetic=config.arithmetic, tol=config.tol, seed=config.seed)
    failures = [r for r in results if not r.passed]
    doc = {
        "command": "verify",
        "settings": _settings_dict(config),
        "verdict": "PASS" if not failures else "FAIL",
        "checks": [
            {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
        ],
        "failures": [r.name for r in failures],
    }
    rows = [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]
    fields = ["name", "passed", "detail"]
    return (EXIT_OK if not failures else EXIT_VERIFICATION), (doc, (fields, rows))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from(args)
        if args.command == "reproduce-example1":
            code, (doc, csv_spec) = cmd_reproduce_example1(config, args.debug_flip_sign)
        elif args.command == "reproduce-example2":
            code, (doc, csv_spec) = cmd_reproduce_example2(config)
        elif args.command == "optimize":
            code, (doc, csv_spec) = cmd_optimize(config, args.restarts, args.iterations,
                                                 args.starts)
        elif args.command == "verify-equilibrium":
            code, (doc, csv_spec) = cmd_verify_equilibrium(config, args.candidate, args.value)
        else:
            code, (doc, csv_spec) = cmd_verify(config)
    except ConfigurationError as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    _emit(config, doc, csv_spec)
    return code


if __name__ == "__main__":
    sys.exit(main())
