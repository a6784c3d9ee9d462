#!/usr/bin/env python3
"""
Hochschild Calculator - Command-line entry point for HH*(N_m) computations and verification suites

Computes Hochschild cohomology of the algebra N_m of upper triangular matrices
with constant diagonal, its spectral-sequence pages, cup products and
Gerstenhaber brackets, and runs the verification suites.

Usage:
    python run_hochschild.py phi --m M --max-n N
    python run_hochschild.py hh --m M --target {N,B,M/N,B/N,M/J,R} --ring RING --max-n N [--model bar]
    python run_hochschild.py e2 --m M --target TARGET --ring RING --max-n N
    python run_hochschild.py cup --m M --x EXPR --y EXPR [--ring RING]
    python run_hochschild.py bracket --m M --x EXPR --y EXPR [--method closed_form|cochain]
    python run_hochschild.py tangent --m M
    python run_hochschild.py verify --suite {phi,ranks,...,all} [--m M] [--workers W]
    python run_hochschild.py n2 --ring RING --max-n N

RING is one of Z, Q, Fp:<p>, Zmod:<N>. Output goes to stdout as json (default), csv or latex.

Example:
    python run_hochschild.py hh --m 3 --target N --ring Q --max-n 4
"""

import os
import sys
import argparse
import logging
import time
from typing import Any, Dict, List, Literal, Optional, Tuple

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from hochschild.bimod import parse_kind, standard_bimodule, tangent_dimension
from hochschild.exactla import CoeffRing, HochschildError
from hochschild.ghstructure import BracketMethod, cup_with_certificate, format_class, gerstenhaber_bracket, parse_class
from hochschild.homology import Model, hochschild_bigraded
from hochschild.n2_theory import n2_theory
from hochschild.qma import PhiMethod, phi_sequence
from hochschild.specseq import e1_page, e2_page
from hochschild.verifier import SUITES, run_suites
from lib.config import settings
from lib.performance_tracker import perf_tracker
from lib.table_emitter import FORMATS, emit, envelope

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

Command = Literal["phi", "hh", "e2", "cup", "bracket", "tangent", "verify", "n2"]


class CommandSpec(BaseModel):
    """Validated parameters of one invocation"""

    command: Command
    m: Optional[int] = Field(default=None, ge=2)
    max_n: int = Field(default=6, ge=0)
    ring: str = "Q"
    target: str = "N"
    model: Literal["koszul", "bar"] = "koszul"
    method: str = "recursion"
    x: Optional[str] = None
    y: Optional[str] = None
    suite: str = "all"
    workers: Optional[int] = Field(default=None, ge=1)
    fmt: Literal["json", "csv", "latex"] = "json"

    @field_validator("ring")
    @classmethod
    def _ring_parses(cls, value: str) -> str:
        try:
            CoeffRing.parse(value)
        except HochschildError as e:
            raise ValueError(str(e)) from e
        return value

    @field_validator("target")
    @classmethod
    def _target_known(cls, value: str) -> str:
        parse_kind(value)
        return value

    @field_validator("suite")
    @classmethod
    def _suite_known(cls, value: str) -> str:
        if value != "all" and value not in SUITES:
            raise ValueError(f"unknown suite {value!r}")
        return value

    @model_validator(mode="after")
    def _required_for_command(self) -> "CommandSpec":
        if self.command in ("phi", "hh", "e2", "cup", "bracket", "tangent") and self.m is None:
            raise ValueError(f"{self.command} needs --m")
        if self.command in ("cup", "bracket") and (self.x is None or self.y is None):
            raise ValueError(f"{self.command} needs --x and --y")
        return self

    @property
    def coeff_ring(self) -> CoeffRing:
        return CoeffRing.parse(self.ring)

    def params(self) -> Dict[str, Any]:
        """Parameters relevant to the command, for the output envelope"""
        keys = {
            "phi": ("m", "max_n", "method"),
            "hh": ("m", "target", "ring", "max_n", "model"),
            "e2": ("m", "target", "ring", "max_n"),
            "cup": ("m", "ring", "x", "y"),
            "bracket": ("m", "ring", "x", "y", "method"),
            "tangent": ("m",),
            "verify": ("suite", "m", "workers"),
            "n2": ("ring", "max_n"),
        }[self.command]
        return {k: getattr(self, k) for k in keys}


class HochschildRunner:
    """Dispatches a CommandSpec to the library and serializes the result"""

    def __init__(self):
        self.execution_metrics: Dict[str, float] = {}

    def run(self, spec: CommandSpec) -> Tuple[str, int]:
        start = time.time()
        logger.info(f"Running {spec.command} with {spec.params()}")
        handler = getattr(self, f"_run_{spec.command}")
        result, exit_code = handler(spec)
        self.execution_metrics[f"{spec.command}_time"] = time.time() - start
        logger.info(f"   ✓ {spec.command} finished in {self.execution_metrics[f'{spec.command}_time']:.2f}s")
        return emit(envelope(spec.command, spec.params(), result), spec.fmt), exit_code

    def _run_phi(self, spec: CommandSpec):
        return phi_sequence(spec.m, spec.max_n, PhiMethod(spec.method)), EXIT_OK

    def _run_hh(self, spec: CommandSpec):
        coeff = standard_bimodule(spec.m, spec.target)
        table = hochschild_bigraded(spec.m, coeff, spec.coeff_ring, spec.max_n, Model(spec.model))
        groups: List[Dict[str, Any]] = [{"n": n, **g.to_dict()} for n, g in sorted(table.totals.items())]
        result = {
            "ranks": [table.totals[n].size_rank for n in range(spec.max_n + 1)],
            "groups": groups,
            "bigraded": table.to_dict()["entries"],
        }
        return result, EXIT_OK

    def _run_e2(self, spec: CommandSpec):
        page = e1_page(spec.m, spec.target, spec.max_n)
        e2 = e2_page(page, spec.coeff_ring)
        result = e2.to_dict()
        result["d1_agreement"] = page.agreement
        return result, EXIT_OK

    def _classes(self, spec: CommandSpec):
        return parse_class(spec.m, spec.x), parse_class(spec.m, spec.y)

    def _run_cup(self, spec: CommandSpec):
        x, y = self._classes(spec)
        value, certificate = cup_with_certificate(spec.m, x, y, spec.coeff_ring)
        result = {"x": format_class(x), "y": format_class(y), "value": format_class(value)}
        if certificate is not None:
            result["certificate"] = certificate.to_dict()
        return result, EXIT_OK

    def _run_bracket(self, spec: CommandSpec):
        x, y = self._classes(spec)
        method = BracketMethod(spec.method)
        value = gerstenhaber_bracket(spec.m, x, y, method, spec.coeff_ring)
        return {"x": format_class(x), "y": format_class(y), "method": method.value, "value": format_class(value)}, EXIT_OK

    def _run_tangent(self, spec: CommandSpec):
        m = spec.m
        return {"m": m, "tangent_dimension": tangent_dimension(m), "formula": (3 * m * m - 7 * m + 4) // 2}, EXIT_OK

    def _run_verify(self, spec: CommandSpec):
        reports = run_suites(spec.suite, spec.m, spec.workers)
        passed = all(r.passed for r in reports)
        records = []
        for report in reports:
            for record in report.to_dict()["records"]:
                records.append({"suite": report.suite, **record})
        result = {
            "pass": passed,
            "suites": [{k: v for k, v in r.to_dict().items() if k != "records"} for r in reports],
            "records": records,
            "timing": perf_tracker.get_session_summary(),
        }
        return result, EXIT_OK if passed else EXIT_FAILED

    def _run_n2(self, spec: CommandSpec):
        report = n2_theory(spec.coeff_ring, spec.max_n)
        return report.to_dict(), EXIT_OK if report.passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Hochschild cohomology of N_m: computations and verification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("Usage:")[1] if __doc__ else None,
    )
    parser.add_argument("--format", dest="fmt", choices=FORMATS, default="json", help="Output format")
    parser.add_argument("--verbose", action="store_true", help="Log progress at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str, *, m: bool = True, ring: bool = False, max_n: bool = False):
        p = sub.add_parser(name, help=help_text)
        if m:
            p.add_argument("--m", type=int, help="Matrix size")
        if ring:
            p.add_argument("--ring", default="Q", help="Z | Q | Fp:<p> | Zmod:<N>")
        if max_n:
            p.add_argument("--max-n", dest="max_n", type=int, default=6, help="Largest cohomological degree")
        return p

    p = command("phi", "Ranks phi(0..max-n) of the Koszul dual", max_n=True)
    p.add_argument("--method", default="recursion", choices=[m.value for m in PhiMethod])

    p = command("hh", "HH^n(N_m, target), totals and bigraded", ring=True, max_n=True)
    p.add_argument("--target", default="N", help="N | B | M/N | B/N | M/J | R")
    p.add_argument("--model", default="koszul", choices=[m.value for m in Model])

    p = command("e2", "E2 page of the J-adic spectral sequence", ring=True, max_n=True)
    p.add_argument("--target", default="N", help="N | B | M/N | B/N | M/J | R")

    for name in ("cup", "bracket"):
        p = command(name, f"{name} of two class expressions", ring=True)
        p.add_argument("--x", required=True, help="Class expression, e.g. 'a(1,[1,1])'")
        p.add_argument("--y", required=True, help="Class expression")
        if name == "bracket":
            p.add_argument("--method", default=BracketMethod.COCHAIN.value, choices=[b.value for b in BracketMethod])

    command("tangent", "dim of the tangent space at N_m in the variety of algebras")

    p = command("verify", "Run verification suites")
    p.add_argument("--suite", default="all", choices=list(SUITES) + ["all"])
    p.add_argument("--workers", type=int, default=None, help=f"Worker processes (default {settings.workers})")

    command("n2", "Complete theory of N_2", m=False, ring=True, max_n=True)
    return parser


def setup_environment(verbose: bool = False):
    """Configure logging on stderr; stdout carries only the result"""
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level, logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_environment(args.verbose)

    fields = {k: v for k, v in vars(args).items() if k != "verbose" and v is not None}
    try:
        spec = CommandSpec(**fields)
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e}")
        return EXIT_USAGE

    runner = HochschildRunner()
    try:
        output, exit_code = runner.run(spec)
    except KeyboardInterrupt:
        logger.info("Execution interrupted by user")
        return EXIT_FAILED
    except (HochschildError, ValueError) as e:
        logger.error(f"Execution failed: {e}")
        return EXIT_USAGE
    except ArithmeticError as e:
        logger.error(f"✗ Consistency check failed: {e}")
        return EXIT_FAILED

    sys.stdout.write(output)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
