"""
Interfaz de línea de comandos del reparto de riesgos.
Un subcomando por operación; JSON a stdout, diagnósticos a stderr.

Códigos de salida: 0 éxito, 2 especificación inválida, 3 error de dominio o
precondición, 4 fallo de verificación.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .allocation import (
    agent_risks,
    optimal_allocation,
    optimal_selector,
    optimal_value,
    psi_curve,
    regularity_check,
)
from .config import SolverConfig
from .distortion import check_domain, parse_kernel_id, risk_choquet_form, risk_quantile_form
from .distributions import parse_shorthand
from .duality import FiniteSpace, bounded_report
from .errors import DomainError, SpecValidationError, VerificationFailure
from .oracles import moral_hazard_counterexample, run_verification, strict_gap_check
from .piecewise import PiecewiseMonotoneFn
from .reporting import (
    agents_summary,
    allocation_payload,
    bounded_payload,
    emit_json,
    regularity_payload,
    write_csv_outputs,
)
from .schema import ProblemSpec, spec_from_flags

logger = logging.getLogger(__name__)

# Códigos de salida
EXIT_OK = 0
EXIT_SPEC = 2
EXIT_DOMAIN = 3
EXIT_VERIFICATION = 4

# Niveles de -v
VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}


# ============================================================================
# PARSER
# ============================================================================

def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"lista de números inválida: {text!r}") from e


def _add_problem_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--spec", type=Path, help="archivo JSON de especificación")
    parser.add_argument("--kernel", action="append", default=None,
                        help="núcleo corto (expectation, var:α, cvar:α, ph:r, wang:λ); repetible")
    parser.add_argument("--lambda", dest="weights", action="append", type=float, default=None,
                        help="peso λ de cada --kernel")
    parser.add_argument("--total", help="ley corta (exp:1, uniform:0:1, point:7, atoms:1,2,3,4) o CSV")
    parser.add_argument("--tol", type=float, default=None, help="tolerancia (por defecto 1e-9)")
    parser.add_argument("--seed", type=int, default=None, help="semilla (por defecto 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risk_sharing",
        description="Medidas de distorsión y reparto óptimo co-monótono de riesgos",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v INFO, -vv DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    measure = sub.add_parser("measure", help="ρ_Φ(X) en forma de quantiles y de Choquet")
    _add_problem_flags(measure)
    measure.add_argument("--trunc", type=_float_list, default=None, help="niveles m1,m2,... de truncamiento")

    allocate = sub.add_parser("allocate", help="asignación óptima co-monótona")
    _add_problem_flags(allocate)
    allocate.add_argument("--emit-csv", type=Path, default=None, help="directorio para psi.csv, alloc_i.csv, selector.csv")

    verify = sub.add_parser("verify", help="contraste con los oráculos")
    _add_problem_flags(verify)
    verify.add_argument("--cells", type=int, default=None, help="celdas de la malla de fuerza bruta (<= 8)")
    verify.add_argument("--mc-samples", type=int, default=None, help="muestras Monte Carlo")
    verify.add_argument("--corrupt-value", type=float, default=0.0, help=argparse.SUPPRESS)

    bounded = sub.add_parser("bounded", help="acotación del problema sin co-monotonía")
    _add_problem_flags(bounded)
    bounded.add_argument("--iters", type=int, default=None, help="candidatos de la búsqueda aleatoria")

    counter = sub.add_parser("counterexample", help="contraejemplo de riesgo moral (VaR_α, VaR_β)")
    counter.add_argument("--alpha", type=float, required=True)
    counter.add_argument("--beta", type=float, required=True)
    counter.add_argument("--total", default="exp:1", help="ley continua (exp:r o uniform:a:b)")
    counter.add_argument("--tol", type=float, default=None)
    return parser


# ============================================================================
# CARGA DEL PROBLEMA
# ============================================================================

def load_spec(args: argparse.Namespace) -> ProblemSpec:
    """Spec desde --spec, o desde --kernel/--total; los flags cortos reemplazan campos del archivo."""
    if args.spec is not None:
        spec = ProblemSpec.from_file(args.spec)
        if args.total is not None:
            spec = ProblemSpec.from_dict({**spec.to_dict(), "total": args.total})
        return spec
    if not args.kernel or args.total is None:
        raise SpecValidationError("se requiere --spec, o bien --kernel y --total", path="spec")
    return spec_from_flags(args.kernel, args.total, args.weights)


def build_config(args: argparse.Namespace, spec: Optional[ProblemSpec] = None) -> SolverConfig:
    """Flags > opciones del spec > valores por defecto."""
    def pick(flag: str, option: str, default: Any) -> Any:
        value = getattr(args, flag, None)
        if value is not None:
            return value
        if spec is not None:
            return spec.option(option, default)
        return default

    params: Dict[str, Any] = {
        "tol": pick("tol", "tol", 1e-9),
        "seed": pick("seed", "seed", 0),
        "cells": pick("cells", "cells", None),
        "iterations": pick("iters", "iters", 10_000),
        "truncation_levels": pick("trunc", "trunc", ()),
        "emit_csv": getattr(args, "emit_csv", None),
    }
    mc_samples = getattr(args, "mc_samples", None)
    if mc_samples is not None:
        params["mc_samples"] = mc_samples
    try:
        return SolverConfig.from_simple_params(**params)
    except ValueError as e:
        raise SpecValidationError(str(e), path="options") from e


# ============================================================================
# SUBCOMANDOS
# ============================================================================

def cmd_measure(args: argparse.Namespace) -> int:
    spec = load_spec(args)
    config = build_config(args, spec)
    total = spec.total
    kernels = spec.kernels
    if args.spec is not None and args.kernel:
        kernels = [parse_kernel_id(k) for k in args.kernel]

    rows = []
    for kernel in kernels:
        check_domain(total, kernel)
        quantile_form = risk_quantile_form(total, kernel)
        choquet_form = risk_choquet_form(total, kernel)
        regularity = None
        if config.run.truncation_levels:
            regularity = regularity_check(
                kernel, total, config.run.truncation_levels, config.tolerance.regularity_tol
            )
        rows.append({
            "kernel": str(kernel),
            "quantile_form": quantile_form,
            "choquet_form": choquet_form,
            "difference": abs(quantile_form - choquet_form),
            "domain": "ok",
            "regularity": regularity_payload(regularity),
        })
    emit_json({"command": "measure", "measures": rows}, sys.stdout)
    return EXIT_OK


def cmd_allocate(args: argparse.Namespace) -> int:
    spec = load_spec(args)
    config = build_config(args, spec)
    problem = spec.to_problem()

    selector = optimal_selector(problem.agents)
    allocation = optimal_allocation(problem, selector)
    value = optimal_value(problem)
    risks = agent_risks(problem, allocation)
    emit_json(allocation_payload(problem.agents, selector, allocation, value, risks), sys.stdout)

    if config.run.emit_csv is not None:
        write_csv_outputs(Path(config.run.emit_csv), psi_curve(problem.agents), selector, allocation)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    spec = load_spec(args)
    config = build_config(args, spec)
    problem = spec.to_problem()
    checks = run_verification(problem, config, corrupt_value=args.corrupt_value)
    passed = all(c.passed for c in checks)
    emit_json({
        "command": "verify",
        "agents": agents_summary(problem.agents),
        "checks": [c.to_dict() for c in checks],
        "pass": passed,
    }, sys.stdout)
    return EXIT_OK if passed else EXIT_VERIFICATION


def cmd_bounded(args: argparse.Namespace) -> int:
    spec = load_spec(args)
    config = build_config(args, spec)
    problem = spec.to_problem()
    space, x0 = FiniteSpace.from_distribution(problem.total)
    report = bounded_report(
        problem.agents, space, x0,
        iterations=config.search.iterations, seed=config.run.seed, tol=config.tolerance.tol,
        feasibility_tol=config.tolerance.feasibility_tol, slope_threshold=config.tolerance.slope_threshold,
    )
    emit_json(bounded_payload(problem.agents, report), sys.stdout)
    return EXIT_OK


def cmd_counterexample(args: argparse.Namespace) -> int:
    config = build_config(args)
    total = parse_shorthand(args.total)
    report = moral_hazard_counterexample(args.alpha, args.beta, total)
    identity = PiecewiseMonotoneFn.identity()
    strict = strict_gap_check(
        args.alpha, args.beta, total,
        [identity, PiecewiseMonotoneFn.zero(), identity.scaled(0.5)],
    )
    payload = report.to_dict()
    payload = {"command": "counterexample", "total": args.total, **payload}
    payload["cdf_identity_gap"] = report.cdf_identity_gap()
    payload["discretized_value"] = report.discretized_check()
    payload["strict_gap"] = {
        "candidates": ["id", "0", "id/2"],
        "left_sides": list(strict.left_sides),
        "bound": strict.constant + strict.reference,
        "pass": strict.passed,
    }
    passed = report.value + report.gap_constant <= report.comonotone_value + config.tolerance.tol
    payload["pass"] = passed and strict.passed
    emit_json(payload, sys.stdout)
    return EXIT_OK if payload["pass"] else EXIT_VERIFICATION


COMMANDS = {
    "measure": cmd_measure,
    "allocate": cmd_allocate,
    "verify": cmd_verify,
    "bounded": cmd_bounded,
    "counterexample": cmd_counterexample,
}


# ============================================================================
# PUNTO DE ENTRADA
# ============================================================================

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=VERBOSITY_LEVELS.get(min(args.verbose, 2), logging.DEBUG),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        return COMMANDS[args.command](args)
    except SpecValidationError as e:
        print(f"error de especificación: {e}", file=sys.stderr)
        return EXIT_SPEC
    except DomainError as e:
        print(f"error de dominio: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except VerificationFailure as e:
        print(f"fallo de verificación: {e}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
