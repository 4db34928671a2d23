"""Command-line interface for solving, sweeping and reporting.

Exit codes: 0 on success, 1 on usage errors (bad flags, unknown builtins,
malformed problem files), 2 on numerical failure, 3 when a single-point
solve fails to converge within its budget.
"""

import json
import sys

import click
import numpy as np

from . import ib as ibmod
from . import rd as rdmod
from .ib import IbProblem
from .probability import NumericalError
from .problems import BUILTIN_PROBLEMS, builtin_problem, dump_problem, load_problem
from .rd import RdProblem, SolverConfig
from .reports import emit_reports
from .spectral import eigen_spectrum, jacobian
from .sweeps import SweepConfig, detect_transitions, rate_study, sweep

EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_NO_CONVERGENCE = 3


def _load(problem_path, builtin):
    if (problem_path is None) == (builtin is None):
        raise click.UsageError("provide exactly one of --problem or --builtin")
    if builtin is not None:
        try:
            return builtin_problem(builtin)
        except ValueError as exc:
            raise click.UsageError(str(exc)) from exc
    try:
        return load_problem(problem_path)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"cannot load {problem_path}: {exc}") from exc


def _solver_config(epsilon, norm, max_iters, zero_tol) -> SolverConfig:
    try:
        return SolverConfig(
            epsilon=epsilon, norm=norm, max_iterations=max_iters, zero_tol=zero_tol
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _beta_grid(beta_min, beta_max, beta_steps, log_grid, descending):
    if beta_min is None or beta_max is None:
        raise click.UsageError("--beta-min and --beta-max are required for sweeps")
    if not 0 <= beta_min < beta_max:
        raise click.UsageError("need 0 <= beta-min < beta-max")
    if beta_steps < 2:
        raise click.UsageError("--beta-steps must be at least 2")
    if log_grid:
        if beta_min <= 0:
            raise click.UsageError("--log-grid needs beta-min > 0")
        grid = np.geomspace(beta_min, beta_max, beta_steps)
    else:
        grid = np.linspace(beta_min, beta_max, beta_steps)
    return grid[::-1] if descending else grid


def problem_options(f):
    f = click.option("--problem", "problem_path", type=click.Path(), default=None,
                     help="JSON problem file.")(f)
    f = click.option("--builtin", type=str, default=None,
                     help="Name of a builtin problem.")(f)
    return f


def solver_options(f):
    f = click.option("--epsilon", type=float, default=rdmod.DEFAULT_EPSILON,
                     show_default=True, help="Successive-iterate stopping distance.")(f)
    f = click.option("--norm", type=click.Choice(["l1", "linf"]), default="linf",
                     show_default=True)(f)
    f = click.option("--max-iters", type=int, default=rdmod.DEFAULT_MAX_ITERATIONS,
                     show_default=True)(f)
    f = click.option("--zero-tol", type=float, default=1e-10, show_default=True,
                     help="Mass threshold treated as zero.")(f)
    return f


def sweep_options(f):
    f = click.option("--beta-min", type=float, default=None)(f)
    f = click.option("--beta-max", type=float, default=None)(f)
    f = click.option("--beta-steps", type=int, default=600, show_default=True)(f)
    f = click.option("--log-grid/--linear-grid", default=True, show_default=True)(f)
    f = click.option("--init", type=click.Choice(["uniform", "dirichlet", "reverse",
                                                  "forward"]),
                     default="uniform", show_default=True)(f)
    f = click.option("--seed", type=int, default=0, show_default=True)(f)
    f = click.option("--support-tol", type=float, default=None,
                     help="Support-count threshold; defaults to --zero-tol.")(f)
    f = click.option("--merge-tol", type=float, default=ibmod.DEFAULT_MERGE_TOL,
                     show_default=True,
                     help="Decoder-row clustering tolerance (bottleneck only).")(f)
    f = click.option("--out", "out_dir", type=click.Path(), default="rdspectral-out",
                     show_default=True)(f)
    f = click.option("--formats", type=str, default="csv,json,svg", show_default=True,
                     help="Comma-separated subset of csv,json,svg.")(f)
    return f


def _parse_formats(text):
    formats = tuple(t.strip() for t in text.split(",") if t.strip())
    unknown = set(formats) - {"csv", "json", "svg"}
    if unknown:
        raise click.UsageError(f"unknown formats: {sorted(unknown)}")
    return formats


@click.group()
def cli():
    """Rate-distortion and information-bottleneck solvers with spectral
    convergence diagnostics."""


@cli.command("solve")
@problem_options
@solver_options
@click.option("--beta", type=float, required=True)
def solve_cmd(problem_path, builtin, beta, epsilon, norm, max_iters, zero_tol):
    """Solve one problem at a single beta and print the solution as JSON."""
    problem = _load(problem_path, builtin)
    config = _solver_config(epsilon, norm, max_iters, zero_tol)
    if isinstance(problem, IbProblem):
        sol = ibmod.ib_solve(problem, beta, config=config)
    else:
        sol = rdmod.solve(problem, beta, config=config)
    click.echo(json.dumps(sol.to_json_dict(), indent=1))
    if not sol.converged:
        click.echo(f"did not converge within {max_iters} iterations", err=True)
        sys.exit(EXIT_NO_CONVERGENCE)


@cli.command("spectrum")
@problem_options
@solver_options
@click.option("--beta", type=float, required=True)
def spectrum_cmd(problem_path, builtin, beta, epsilon, norm, max_iters, zero_tol):
    """Solve at one beta and print the fixed-point spectral report as JSON."""
    problem = _load(problem_path, builtin)
    if isinstance(problem, IbProblem):
        raise click.UsageError(
            "spectrum applies to rate-distortion problems; analyze a bottleneck "
            "through its tangent problem instead (see the tangent command)"
        )
    config = _solver_config(epsilon, norm, max_iters, zero_tol)
    sol = rdmod.solve(problem, beta, config=config)
    jac = jacobian(problem, sol.marginal, beta,
                   fixed_point_tol=float("inf") if not sol.converged else 1e-6)
    report = eigen_spectrum(jac, zero_tol=zero_tol)
    click.echo(json.dumps(report.to_json_dict(), indent=1))
    if not sol.converged:
        click.echo("warning: diagnostics taken at an unconverged point", err=True)
        sys.exit(EXIT_NO_CONVERGENCE)


def _run_sweep(problem, beta_min, beta_max, beta_steps, log_grid, init, seed,
               support_tol, merge_tol, config, out_dir, formats):
    grid = _beta_grid(beta_min, beta_max, beta_steps, log_grid,
                      descending=(init == "reverse"))
    try:
        sweep_cfg = SweepConfig(
            beta_grid=grid, init=init, solver=config, seed=seed,
            merge_tol=merge_tol, support_tol=support_tol,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    records = sweep(problem, sweep_cfg)
    transitions = detect_transitions(records)
    manifest = emit_reports(records, transitions, out_dir, formats)
    for interval in transitions.intervals:
        click.echo(f"transition bracketed in beta = ({interval[0]:g}, {interval[1]:g})")
    for path in manifest:
        click.echo(f"wrote {path}")
    return records, transitions


@cli.command("sweep")
@problem_options
@solver_options
@sweep_options
def sweep_cmd(problem_path, builtin, epsilon, norm, max_iters, zero_tol,
              beta_min, beta_max, beta_steps, log_grid, init, seed, support_tol,
              merge_tol, out_dir, formats):
    """Sweep a rate-distortion problem over a beta grid and emit reports."""
    problem = _load(problem_path, builtin)
    if isinstance(problem, IbProblem):
        raise click.UsageError("use ib-sweep for bottleneck problems")
    config = _solver_config(epsilon, norm, max_iters, zero_tol)
    _run_sweep(problem, beta_min, beta_max, beta_steps, log_grid, init, seed,
               support_tol, merge_tol, config, out_dir, _parse_formats(formats))


@cli.command("ib-sweep")
@problem_options
@solver_options
@sweep_options
def ib_sweep_cmd(problem_path, builtin, epsilon, norm, max_iters, zero_tol,
                 beta_min, beta_max, beta_steps, log_grid, init, seed, support_tol,
                 merge_tol, out_dir, formats):
    """Sweep a bottleneck problem over a beta grid and emit reports."""
    problem = _load(problem_path, builtin)
    if isinstance(problem, RdProblem):
        raise click.UsageError("use sweep for rate-distortion problems")
    config = _solver_config(epsilon, norm, max_iters, zero_tol)
    _run_sweep(problem, beta_min, beta_max, beta_steps, log_grid, init, seed,
               support_tol, merge_tol, config, out_dir, _parse_formats(formats))


@cli.command("rate-study")
@problem_options
@solver_options
@click.option("--beta", type=float, required=True)
@click.option("--anchor-beta", type=float, default=None,
              help="Warm-start solution's beta; defaults to 2x target.")
@click.option("--epsilons", type=str, default="1e-6,1e-9,1e-12", show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Optional CSV output path.")
def rate_study_cmd(problem_path, builtin, beta, anchor_beta, epsilons, out_path,
                   epsilon, norm, max_iters, zero_tol):
    """Measured vs predicted convergence rate at one beta, across accuracies."""
    problem = _load(problem_path, builtin)
    if isinstance(problem, IbProblem):
        raise click.UsageError("rate-study applies to rate-distortion problems")
    try:
        eps_list = [float(t) for t in epsilons.split(",") if t.strip()]
    except ValueError as exc:
        raise click.UsageError(f"bad --epsilons: {exc}") from exc
    config = SolverConfig(epsilon=epsilon, norm="l1", max_iterations=max_iters,
                          zero_tol=zero_tol)
    try:
        points = rate_study(problem, beta, eps_list, anchor_beta=anchor_beta,
                            config=config)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    click.echo(json.dumps([p.to_json_dict() for p in points], indent=1))
    if out_path:
        lines = ["epsilon,iterations,measured_rate,lambda0,lambda_max,predicted_rate"]
        for p in points:
            lines.append(
                f"{p.epsilon:g},{p.iterations},{p.measured_rate:.17g},"
                f"{p.lambda0:.17g},{p.lambda_max:.17g},{p.predicted_rate:.17g}"
            )
        with open(out_path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        click.echo(f"wrote {out_path}")


@cli.command("tangent")
@problem_options
@solver_options
@sweep_options
@click.option("--transition-index", type=int, default=0, show_default=True,
              help="Which detected transition to expand (0-based, ascending).")
@click.option("--tangent-steps", type=int, default=40, show_default=True)
@click.option("--dedup-tol", type=float, default=None,
              help="Cross-side decoder dedup tolerance; defaults to --merge-tol.")
def tangent_cmd(problem_path, builtin, epsilon, norm, max_iters, zero_tol,
                beta_min, beta_max, beta_steps, log_grid, init, seed, support_tol,
                merge_tol, out_dir, formats, transition_index, tangent_steps,
                dedup_tol):
    """Sweep a bottleneck problem, build the tangent problem at one detected
    transition, and sweep that tangent problem across the bracketing interval."""
    problem = _load(problem_path, builtin)
    if not isinstance(problem, IbProblem):
        raise click.UsageError("tangent needs a bottleneck problem")
    config = _solver_config(epsilon, norm, max_iters, zero_tol)
    formats = _parse_formats(formats)
    if init not in ("reverse", "forward"):
        init = "reverse"
    records, transitions = _run_sweep(
        problem, beta_min, beta_max, beta_steps, log_grid, init, seed,
        support_tol, merge_tol, config, f"{out_dir}/ib", formats,
    )
    if not transitions.intervals:
        click.echo("no transitions detected; nothing to expand", err=True)
        sys.exit(EXIT_NO_CONVERGENCE)
    if not 0 <= transition_index < len(transitions.intervals):
        raise click.UsageError(
            f"--transition-index out of range; {len(transitions.intervals)} detected"
        )
    lo_idx, hi_idx = transitions.index_pairs[transition_index]
    sol_minus = records[lo_idx].solution
    sol_plus = records[hi_idx].solution
    class_zero_tol = zero_tol if support_tol is None else support_tol
    try:
        tangent = ibmod.tangent_rd(problem, sol_minus, sol_plus,
                                   merge_tol=merge_tol, dedup_tol=dedup_tol,
                                   zero_tol=class_zero_tol)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    click.echo(f"tangent problem over {tangent.m} representatives: {tangent.to_json()}")
    fine = np.geomspace(sol_plus.beta, sol_minus.beta, tangent_steps)
    tangent_cfg = SweepConfig(
        beta_grid=fine, init="reverse", solver=config, seed=seed,
        support_tol=support_tol,
    )
    tr_records = sweep(tangent, tangent_cfg)
    tr_transitions = detect_transitions(tr_records)
    manifest = emit_reports(tr_records, tr_transitions, f"{out_dir}/tangent", formats)
    for interval in tr_transitions.intervals:
        click.echo(
            f"tangent support transition in beta = ({interval[0]:g}, {interval[1]:g})"
        )
    for path in manifest:
        click.echo(f"wrote {path}")


@cli.command("builtin")
@click.option("--name", type=str, default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
def builtin_cmd(name, out_path):
    """List builtin problems, or emit one as JSON (to stdout or --out)."""
    if name is None:
        for key in sorted(BUILTIN_PROBLEMS):
            kind = "bottleneck" if isinstance(builtin_problem(key), IbProblem) \
                else "rate-distortion"
            click.echo(f"{key}\t{kind}")
        return
    try:
        problem = builtin_problem(name)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    if out_path:
        dump_problem(problem, out_path)
        click.echo(f"wrote {out_path}")
    else:
        click.echo(problem.to_json())


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(EXIT_USAGE)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_USAGE)
    except click.exceptions.Abort:
        sys.exit(EXIT_USAGE)
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    except (ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    return 0


if __name__ == "__main__":
    main()
