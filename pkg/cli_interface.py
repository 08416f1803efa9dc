# \file    cli_interface.py
# \brief   Command-line front end: parses a subcommand, runs the matching
#          engine and writes one JSON document to stdout. Diagnostics go to
#          stderr through logging and the warning()/information() channel.

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from acceptance import Budget, run_selftest
from errors import DuplicatePoint, InconsistencyDetected, SchemaError, ToolkitError
from lattice_core import Covector, Infinite, SupportSet
from projection_census import census, newton_polygon_of_projection, strata_mismatches
from resultant_strata import strata_report
from settings import G_CONVENTIONS, Settings, from_environment
from sparse_delta import (delta_oracle, delta_sparse, is_zero_nondegenerate,
                          sample_nondegenerate_coefficients)
from ultratrop import (ConventionDecision, check_assumptions, fan_directions, g_sum,
                       resolve_convention, tangency_matrix, thsum_terms)
from vandermonde_lab import DEFAULT_WIDTH_BOUND, conjecture_search

logger = logging.getLogger(__name__)


@dataclass
class RunReport:
    command: List[str]
    inputs: dict
    outputs: object = None
    warnings: List[str] = field(default_factory=list)
    seconds: float = 0.0
    g_convention: Optional[ConventionDecision] = None


class _WarningCollector(logging.Handler):
    def __init__(self):
        super().__init__(logging.WARNING)
        self.messages: List[str] = []

    def emit(self, record):
        self.messages.append(f"{record.name}: {record.getMessage()}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SchemaError(f"bad arguments: {message}", usage=self.format_usage().strip())


def to_jsonable(value):
    """Exact, deterministic JSON form: rationals as [num, den] pairs."""
    if hasattr(value, "to_json"):
        return to_jsonable(value.to_json())
    if isinstance(value, bool) or value is None or isinstance(value, (str, float)):
        return value
    if isinstance(value, int):
        return int(value)
    if isinstance(value, Fraction):
        return [value.numerator, value.denominator]
    if isinstance(value, Infinite):
        return value.value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [to_jsonable(v) for v in value]
    if dataclasses.is_dataclass(value):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)
                if not f.name.startswith("_")}
    raise SchemaError(f"cannot serialize {type(value).__name__}")


def dumps(value) -> str:
    return json.dumps(to_jsonable(value), sort_keys=True)


def load_supports(source: str) -> SupportSet:
    """A JSON file {"dim": d, "points": [...]} or an inline list such as 0,2,3."""
    if os.path.isfile(source):
        try:
            with open(source) as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError(f"{source} is not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise SchemaError(f"{source} must hold a JSON object", path=source)
        return SupportSet.from_json(data)
    try:
        values = [int(v) for v in source.split(",") if v.strip()]
    except ValueError:
        raise SchemaError(f"`{source}` is neither a file nor an integer list") from None
    if len(set(values)) != len(values):
        raise DuplicatePoint("inline support repeats a value", support=values)
    return SupportSet.line(values)


def _line(source: str) -> SupportSet:
    support = load_supports(source)
    if support.dim != 1:
        raise SchemaError("expected a support in Z^1", dim=support.dim)
    return support


def _rational(value) -> Fraction:
    if isinstance(value, list) and len(value) == 2:
        return Fraction(int(value[0]), int(value[1]))
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise SchemaError("coefficient must be an integer, \"p/q\" or [p, q]", value=value)


def load_coefficients(path: str) -> tuple:
    try:
        with open(path) as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise SchemaError(f"cannot read coefficients: {e}", path=path) from None
    try:
        return tuple({int(b): _rational(c) for b, c in data[key].items()} for key in ("f1", "f2"))
    except (KeyError, AttributeError, TypeError, ValueError) as e:
        raise SchemaError(f"malformed coefficient file: {e}", path=path) from None


def _direction(text: str) -> Covector:
    try:
        return Covector(tuple(int(v) for v in text.split(",")))
    except ValueError:
        raise SchemaError(f"direction `{text}` must be a comma separated integer pair") from None


def _key(delta: Covector) -> str:
    return ",".join(str(c) for c in delta.coords)


class Interface:
    def __init__(self, env=None):
        self._env = env
        self.settings: Optional[Settings] = None
        self.decision: Optional[ConventionDecision] = None
        self.parser = self._build_parser()

    def is_gui(self):
        return False

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = _Parser(prog="tropsing", description="Exact toolkit for sparse singularities.")
        parser.add_argument("--verbose", action="store_true", help="log at INFO level")
        parser.add_argument("--debug", action="store_true", help="log at DEBUG level")
        parser.add_argument("--seed", type=int, help="sampling seed (TROPSING_SEED)")
        parser.add_argument("--jobs", type=int, help="worker processes (TROPSING_JOBS)")
        parser.add_argument("--g-convention", choices=G_CONVENTIONS,
                            help="G-sum convention (TROPSING_G_CONVENTION)")
        parser.add_argument("--report", action="store_true",
                            help="wrap the result in a run report with inputs, warnings and timing")
        sub = parser.add_subparsers(dest="command", parser_class=_Parser)

        p = sub.add_parser("delta", help="delta-invariant of a sparse germ")
        p.add_argument("--b1", required=True)
        p.add_argument("--b2", required=True)
        p.add_argument("--coeffs", help="JSON file {\"f1\": {b: c}, \"f2\": {b: c}}")
        p.add_argument("--oracle", action="store_true", help="also run the intersection oracle")

        p = sub.add_parser("strata", help="singular strata of the sparse resultant")
        p.add_argument("--b1", required=True)
        p.add_argument("--b2", required=True)
        p.add_argument("--cross-check", action="store_true",
                       help="compare degrees with the census of B_i x triangle")

        for name, text in (("project", "singularity census of the plane projection"),
                           ("newton", "Newton polygon of the plane projection")):
            p = sub.add_parser(name, help=text)
            p.add_argument("--a1", required=True)
            p.add_argument("--a2", required=True)

        p = sub.add_parser("utrop", help="tangency matrices and G-sums")
        p.add_argument("--a1", required=True)
        p.add_argument("--a2", required=True)
        p.add_argument("--dir", help="a single direction dx,dy")

        p = sub.add_parser("vdm-sweep", help="search for splitting-conjecture counterexamples")
        p.add_argument("--k", type=int, default=2)
        p.add_argument("--max-order", type=int, default=12)
        p.add_argument("--max-exp", type=int, default=10)
        p.add_argument("--max-width", type=int, default=DEFAULT_WIDTH_BOUND)

        p = sub.add_parser("selftest", help="run the acceptance suite")
        p.add_argument("--full", action="store_true", help="use the full acceptance bounds")
        return parser

    def print_help(self):
        print(self.parser.format_help(), file=sys.stderr)

    def warning(self, message: str):
        print(f"Warning: {message}", file=sys.stderr)

    def information(self, message: str):
        print(f"Info: {message}", file=sys.stderr)

    def _configure(self, args) -> None:
        level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
        logging.getLogger().setLevel(level)
        self.settings = from_environment(self._env).override(
            seed=args.seed, jobs=args.jobs, g_convention=args.g_convention)
        self.decision = None

    # Subcommands

    def run_delta(self, args) -> dict:
        B1, B2 = _line(args.b1), _line(args.b2)
        result = delta_sparse(B1, B2, self.settings.rescale)
        out = {"delta": result.delta, "milnor": result.milnor,
               "j_sequence": list(result.j_sequence)}
        coefficients = load_coefficients(args.coeffs) if args.coeffs else None
        if coefficients:
            out["nondegenerate"] = is_zero_nondegenerate(*coefficients).nondegenerate
        if args.oracle:
            if coefficients is None:
                rng = np.random.default_rng(self.settings.seed)
                coefficients = sample_nondegenerate_coefficients(B1, B2, rng)
            out["oracle"] = delta_oracle(*coefficients)
        return out

    def run_strata(self, args) -> list:
        B1, B2 = _line(args.b1), _line(args.b2)
        reports = strata_report(B1, B2)
        if args.cross_check:
            self.decision = resolve_convention(self.settings.g_convention)
            mismatches = strata_mismatches(B1.values, B2.values, self.settings.g_convention)
            if mismatches:
                raise InconsistencyDetected("strata degrees disagree with the census",
                                            mismatches=mismatches)
            self.information("strata degrees agree with the census")
        return reports

    def run_project(self, args):
        result = census(load_supports(args.a1), load_supports(args.a2), self.settings.g_convention)
        self.decision = result.g_convention
        return result

    def run_newton(self, args):
        return newton_polygon_of_projection(load_supports(args.a1), load_supports(args.a2))

    def run_utrop(self, args) -> dict:
        As = (load_supports(args.a1), load_supports(args.a2))
        diagnostics = check_assumptions(As)
        directions = [_direction(args.dir)] if args.dir else fan_directions(As)
        blocks, matrices, direct, closed, calibrated = [], {}, {}, {}, {}
        for delta in directions:
            matrix = tangency_matrix(As, delta)
            g = g_sum(As, delta)
            blocks += matrix.to_json()["blocks"]
            matrices[_key(delta)] = [list(row) for row in matrix.entries]
            direct[_key(delta)], closed[_key(delta)] = g.direct, g.closed_form
            calibrated[_key(delta)] = g.calibrated
        out = {"blocks": blocks, "matrices": matrices, "g_direct": direct,
               "g_closed": closed, "g_calibrated": calibrated,
               "assumptions": {"vertical_index": diagnostics.vertical_index,
                               "same_proj": diagnostics.same_proj}}
        if diagnostics:
            terms = thsum_terms(*As, self.settings.g_convention)
            out["thsum_total"], out["g_convention"] = terms.total, terms.decision
            self.decision = terms.decision
        return out

    def run_vdm_sweep(self, args):
        report = conjecture_search(args.k, args.max_order, args.max_exp, args.max_width,
                                   self.settings.jobs)
        if report.counterexamples:
            self.warning(f"{len(report.counterexamples)} splitting counterexamples found")
        return report

    def run_selftest(self, args) -> dict:
        budget = Budget.full() if args.full else Budget()
        self.decision = resolve_convention(self.settings.g_convention)
        results = run_selftest(self.settings, budget)
        failed = [r.name for r in results if not r.passed]
        if failed:
            raise InconsistencyDetected("selftest failed", failed=failed,
                                        results=[r.to_json() for r in results])
        return {"passed": True, "checks": results}

    def dispatch(self, argv: Sequence[str]) -> int:
        collector = _WarningCollector()
        root = logging.getLogger()
        root.addHandler(collector)
        start = time.perf_counter()
        report = RunReport(list(argv), {})
        try:
            args = self.parser.parse_args(list(argv))
            if not args.command:
                self.print_help()
                return 2
            self._configure(args)
            report.inputs = {k: v for k, v in vars(args).items()
                             if k not in ("verbose", "debug", "report")}
            handler = getattr(self, "run_" + args.command.replace("-", "_"))
            report.outputs = handler(args)
            report.warnings = collector.messages
            report.seconds = round(time.perf_counter() - start, 3)
            report.g_convention = self.decision
            print(dumps(report if args.report else report.outputs))
            return 0
        except ToolkitError as e:
            print(dumps(e.as_dict()))
            logger.debug("%s: %s", type(e).__name__, e.context)
            return e.exit_code
        finally:
            root.removeHandler(collector)

    def start_interface(self, argv: Optional[Sequence[str]] = None) -> int:
        return self.dispatch(sys.argv[1:] if argv is None else argv)
