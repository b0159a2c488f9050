#!/usr/bin/env python3
"""
Radial Yamabe CLI - sign-changing Yamabe-type solutions on radial model manifolds

Commands:
- check: coercivity, condition at the center, feasibility of gamma
- solve: constrained minimizer at the configured exponent
- continue: continuation of the minimum up to the critical exponent
- bubble-scan: bubble quotients and their expansion coefficient
- oracle: reference values of the special functions and eigenvalues

Exit codes: 0 success, 1 runtime/numeric failure, 2 hypothesis not satisfied,
3 expansion gap above threshold, 64 configuration error.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root))

import yaml
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from src.core.config import RunConfig, load_run_config, settings
from src.core.errors import ConfigError, YamabeError
from src.core.logger import get_logger, init_logging
from src.core.utils import format_number, write_csv
from src.numerics import AVAILABLE_EXPERIMENTS
from src.numerics.pipeline import CheckReport, Pipeline

console = Console()

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_HYPOTHESIS = 2
EXIT_GAP = 3
EXIT_CONFIG = 64


def _mark(ok: bool) -> str:
    return "[green][OK][/green]" if ok else "[red][X][/red]"


def _output_dir(args: argparse.Namespace, command: str) -> Path:
    path = Path(args.out) if args.out else settings.output_path / command
    path.mkdir(parents=True, exist_ok=True)
    return path


def _pipeline(args: argparse.Namespace) -> Pipeline:
    config = load_run_config(Path(args.config))
    return Pipeline(config, jobs=args.jobs or settings.jobs, seed=args.seed)


def run_experiment(pipeline: Pipeline, name: str):
    """Call the Pipeline method registered for an experiment"""
    return getattr(pipeline, AVAILABLE_EXPERIMENTS[name]["method"])()


def _config_header(pipeline: Pipeline) -> List[str]:
    """Materialized configuration as YAML comment lines"""
    text = yaml.safe_dump(pipeline.materialize(), sort_keys=False, default_flow_style=None)
    return [f"# {line}" if line else "#" for line in text.splitlines()]


def _write_summary(path: Path, pipeline: Pipeline, entries: Sequence[tuple]) -> Path:
    lines = _config_header(pipeline)
    for key, value in entries:
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = format_number(value)
        lines.append(f"{key} = {value}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def print_check(report: CheckReport):
    """Render the hypothesis verdicts"""
    table = Table(title="Hypotheses")
    table.add_column("Check", style="cyan", no_wrap=True)
    table.add_column("Value", style="magenta")
    table.add_column("Verdict")

    c = report.coercivity
    table.add_row("coercivity", f"lambda_min = {c.lambda_min:.10g}", _mark(c.coercive))
    if report.condition is None:
        table.add_row("H(x0) < 0", report.condition_note, "[yellow][!][/yellow]")
    else:
        table.add_row("H(x0) < 0", f"H = {report.condition.H:.10g}", _mark(report.condition.satisfied))
    if report.gamma is None:
        table.add_row("gamma > int f|h|^2#", "needs a coercive operator", _mark(False))
    else:
        table.add_row("gamma > int f|h|^2#", f"{report.gamma:.10g} > {report.gamma_threshold:.10g}",
                      _mark(report.gamma_admissible))
    console.print(table)


def cmd_check(args: argparse.Namespace) -> int:
    pipeline = _pipeline(args)
    report = run_experiment(pipeline, "check")
    print_check(report)
    return EXIT_OK if report.all_hold else EXIT_HYPOTHESIS


def _require_hypotheses(pipeline: Pipeline, force: bool) -> Optional[int]:
    report = pipeline.check()
    if report.all_hold:
        return None
    print_check(report)
    if force:
        console.print("[yellow][!]  Hypotheses not satisfied, continuing because of --force[/yellow]")
        return None
    console.print("[red]Hypotheses not satisfied; use --force to run anyway[/red]")
    return EXIT_HYPOTHESIS


def cmd_solve(args: argparse.Namespace) -> int:
    pipeline = _pipeline(args)
    blocked = _require_hypotheses(pipeline, args.force)
    if blocked is not None:
        return blocked

    outcome = run_experiment(pipeline, "solve")
    result = outcome.result
    out = _output_dir(args, "solve")
    write_csv(out / "solve_trace.csv", ["iter", "I", "constraint_gap", "step"], result.trace)
    nodes = pipeline.problem.nodes
    write_csv(out / "solve_solution.csv", ["r", "w", "h", "u"], zip(nodes, result.w, result.h, result.u))
    intervals = "; ".join(f"[{format_number(lo)}, {format_number(hi)}]" for lo, hi in result.sign_changes)
    _write_summary(out / "solve_summary.txt", pipeline, [
        ("q", result.q),
        ("gamma", result.gamma),
        ("mu", result.mu),
        ("lambda", result.lam),
        ("residual", result.residual),
        ("iterations", result.iterations),
        ("constraint_gap", result.constraint_gap),
        ("sign_changes", result.changes_sign),
        ("sign_change_intervals", intervals or "none"),
        ("multiplier_bound", result.multiplier_bound),
        ("lq_power", result.bound.lq_power),
        ("bound_stated_holds", result.bound.stated_holds),
        ("bound_complete_holds", result.bound.complete_holds),
        ("nontriviality_value", outcome.nontriviality.value),
        ("nontriviality_satisfied", outcome.nontriviality.satisfied),
    ])

    console.print(Panel(
        f"mu = {result.mu:.12g}\nlambda = {result.lam:.12g}\nresidual = {result.residual:.3e}\n"
        f"sign_changes = {'true' if result.changes_sign else 'false'} ({intervals or 'none'})\n"
        f"nontriviality value = {outcome.nontriviality.value:.8g}\nOutput: {out}",
        title=f"Solve at q = {result.q:.10g}",
    ))
    return EXIT_OK


def cmd_continue(args: argparse.Namespace) -> int:
    pipeline = _pipeline(args)
    blocked = _require_hypotheses(pipeline, args.force)
    if blocked is not None:
        return blocked

    results = run_experiment(pipeline, "continue")
    out = _output_dir(args, "continue")
    rows = [(r.q, r.mu, r.lam, r.residual) for r in results]
    write_csv(out / "continuation.csv", ["q", "mu", "lambda", "residual"], rows)
    final = results[-1]
    _write_summary(out / "continuation_summary.txt", pipeline, [
        ("steps", len(results)),
        ("final_q", final.q),
        ("final_mu", final.mu),
        ("final_lambda", final.lam),
        ("final_residual", final.residual),
        ("lambda_positive", all(r.lam > 0.0 for r in results)),
        ("sign_changes", final.changes_sign),
    ])

    table = Table(title="Continuation to the critical exponent")
    for column in ("q", "mu", "lambda", "residual"):
        table.add_column(column, style="cyan" if column == "q" else None)
    for q, mu, lam, residual in rows:
        table.add_row(f"{q:.10g}", f"{mu:.12g}", f"{lam:.12g}", f"{residual:.2e}")
    console.print(table)
    return EXIT_OK


def cmd_bubble_scan(args: argparse.Namespace) -> int:
    pipeline = _pipeline(args)
    threshold = args.gap_threshold if args.gap_threshold is not None else pipeline.config.bubble.gap_threshold
    report = run_experiment(pipeline, "bubble-scan")

    out = _output_dir(args, "bubble-scan")
    write_csv(out / "bubble_scan.csv", ["eps", "mu_eps", "gamma_eps", "Q_eps"],
              [(s.eps, s.mu, s.gamma, s.quotient) for s in report.per_epsilon_table])

    entries = [
        ("n", report.n),
        ("branch", report.branch),
        ("H", report.H_value),
        ("condition_satisfied", report.condition_satisfied),
        ("fitted_coefficient", report.fitted_coefficient),
        ("predicted_coefficient", report.predicted_coefficient),
    ]
    if report.degenerate:
        entries.append(("relative_gap", "degenerate: coefficient below noise floor"))
    else:
        entries.append(("relative_gap", report.relative_gap))
    entries += [
        ("literal_coefficient", report.literal_coefficient),
        ("literal_gap", "n/a" if report.literal_gap is None else report.literal_gap),
        ("supported_reading", report.supported_reading),
        ("leading_constant", report.leading_constant),
        ("residual_rate", report.residual_rate),
        ("condition_number", report.condition_number),
    ]
    for component in report.components:
        entries.append((f"{component.name}_fitted", component.fitted))
        entries.append((f"{component.name}_predicted", component.predicted))
    passed = report.passed(threshold)
    entries += [("gap_threshold", threshold), ("passed", passed)]
    _write_summary(out / "bubble_report.txt", pipeline, entries)

    table = Table(title=f"Bubble scan (n={report.n}, branch {report.branch})")
    for column in ("eps", "mu_eps", "gamma_eps", "Q_eps"):
        table.add_column(column)
    for s in report.per_epsilon_table:
        table.add_row(f"{s.eps:.6g}", f"{s.mu:.12g}", f"{s.gamma:.12g}", f"{s.quotient:.12g}")
    console.print(table)
    gap = ("degenerate: coefficient below noise floor" if report.degenerate
           else f"{report.relative_gap:.3e}")
    console.print(Panel(
        f"H(x0) = {report.H_value:.10g} ({'satisfied' if report.condition_satisfied else 'not satisfied'})\n"
        f"fitted = {report.fitted_coefficient:.10g}\npredicted = {report.predicted_coefficient:.10g}\n"
        f"relative gap = {gap}\nsupported reading = {report.supported_reading}\n"
        f"{_mark(passed)} threshold {threshold:g}",
        title="Expansion coefficient",
    ))
    return EXIT_OK if passed else EXIT_GAP


def _oracle_rows(subject: str, values: List[str]) -> List[tuple]:
    from src.numerics import special_functions as sf

    def number(i: int, cast=float):
        try:
            return cast(values[i])
        except (IndexError, ValueError) as e:
            raise ConfigError(f"oracle {subject}: argument {i + 1} missing or malformed") from e

    if subject == "aubin":
        p, q = number(0), number(1)
        return [(f"I_{p:g}^{q:g}", sf.aubin_integral((p, q))),
                ("quadrature", sf.aubin_quadrature(p, q))]
    if subject == "omega":
        return [(f"omega_{number(0, int)}", sf.sphere_volume(number(0, int)))]
    if subject == "k0":
        return [(f"K0({number(0, int)})", sf.best_sobolev_constant(number(0, int)))]
    if subject == "critical":
        return [(f"2#({number(0, int)})", sf.critical_exponent(number(0, int)))]
    if subject == "lambda1":
        from src.numerics.discretization import CoefficientField, RadialMesh, assemble
        from src.numerics.linear_solvers import first_eigenpair
        from src.numerics.model_geometry import RadialManifold

        n, r_max = number(0, int), number(1)
        elements = number(2, int) if len(values) > 2 else 400
        m = RadialManifold(n=n, r_max=r_max)
        p = assemble(m, CoefficientField.from_lists([1.0], [0.0], [1.0]), RadialMesh.for_manifold(m, elements))
        return [(f"lambda_1 (n={n}, r_max={r_max:g}, N={elements})", first_eigenpair(p).eigenvalue)]
    if subject == "identities":
        return [(name, gap) for name, gap in sf.check_identities(number(0, int)).items()]
    raise ConfigError(f"unknown oracle subject '{subject}'")


def cmd_oracle(args: argparse.Namespace) -> int:
    rows = _oracle_rows(args.subject, args.values)
    table = Table(title=f"Oracle: {args.subject}")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="magenta")
    for name, value in rows:
        table.add_row(name, format_number(value))
    console.print(table)
    return EXIT_OK


def list_experiments() -> int:
    table = Table(title="Radial Yamabe experiments")
    table.add_column("Command", style="cyan", no_wrap=True)
    table.add_column("Description", style="magenta")
    table.add_column("Outputs", style="green")
    for name, info in AVAILABLE_EXPERIMENTS.items():
        table.add_row(name, info["description"], ", ".join(info["outputs"]) or "None")
    console.print(table)
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "solve": cmd_solve,
    "continue": cmd_continue,
    "bubble-scan": cmd_bubble_scan,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="yamabe",
        description="Sign-changing Yamabe-type solutions on radial model manifolds",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Usage examples:
  %(prog)s list                                             # List experiments
  %(prog)s check --config config/runs/flat_n5_ball.yaml      # Check hypotheses
  %(prog)s solve --config config/runs/annulus_sign_change.yaml --seed 1
  %(prog)s continue --config config/runs/flat_n5_ball.yaml
  %(prog)s bubble-scan --config config/runs/bubble_n5.yaml --jobs 4
  %(prog)s oracle aubin 6 3                                  # Reference values
        """
    )

    parser.add_argument("--log-level",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        default=settings.log_level.upper(),
                        help=f"Log level (default: {settings.log_level.upper()})")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    subparsers.add_parser("list", help="List available experiments")

    for name, info in AVAILABLE_EXPERIMENTS.items():
        sub = subparsers.add_parser(name, help=info["description"])
        sub.add_argument("--config", "-c", required=True, help="Run configuration (YAML)")
        sub.add_argument("--out", "-o", help="Output directory (default: runtime/output/<command>)")
        sub.add_argument("--seed", type=int, help="Override solver.seed")
        sub.add_argument("--jobs", "-j", type=int, help=f"Worker threads (default: {settings.jobs})")
        if name in ("solve", "continue"):
            sub.add_argument("--force", action="store_true", help="Run even if the hypotheses fail")
        if name == "bubble-scan":
            sub.add_argument("--gap-threshold", type=float,
                             help="Relative gap accepted for the expansion coefficient")

    oracle_parser = subparsers.add_parser("oracle", help="Print reference values")
    oracle_parser.add_argument("subject", choices=["aubin", "omega", "k0", "critical", "lambda1", "identities"])
    oracle_parser.add_argument("values", nargs="*", help="Parameters of the subject")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main program entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    init_logging(args.log_level, console_output=settings.console_logging, file_output=settings.file_logging)
    logger = get_logger("yamabe.cli")
    logger.debug(f"Radial Yamabe CLI started, log level: {args.log_level}")

    if args.command == "list":
        return list_experiments()
    if args.command not in COMMANDS:
        parser.print_help()
        return EXIT_OK

    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        console.print(f"[red]Configuration error: {e}[/red]")
        return EXIT_CONFIG
    except YamabeError as e:
        logger.error(f"{args.command} failed: {e}")
        console.print(f"[red]{args.command} failed: {e}[/red]")
        return EXIT_FAILURE
    except KeyboardInterrupt:
        logger.info("Program execution interrupted by user")
        console.print("\n[yellow]Program interrupted by user[/yellow]")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
