"""Annealing sweeps over beta grids, transition detection and rate studies.

A sweep solves one problem at every point of a monotone beta grid under an
initialization policy and returns per-point records (always sorted by
ascending beta). Annealing policies warm-start each solve from the previous
converged state with sub-threshold coordinates pinned to exact zero; those
sweeps are inherently sequential.
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import ib as ibmod
from . import rd as rdmod
from .ib import IbProblem
from .rd import RdProblem, SolverConfig
from .spectral import eigen_spectrum, jacobian, predicted_iterations

INIT_POLICIES = ("uniform", "dirichlet", "reverse", "forward")


@dataclass
class SweepConfig:
    """Grid, policy and solver settings for one sweep.

    support_tol is the mass threshold used when counting a record's support
    (and the marginal floor for effective-cardinality classes); it defaults
    to the solver's zero_tol but is worth raising when the solver epsilon is
    loose, because a successive-iterate stopping rule leaves dying
    coordinates stranded at masses of order epsilon / (1 - decay rate).
    merge_tol clusters decoder rows for bottleneck cardinality counts.
    """

    beta_grid: np.ndarray
    init: str = "uniform"
    solver: SolverConfig = field(default_factory=SolverConfig)
    seed: int = 0
    merge_tol: float = ibmod.DEFAULT_MERGE_TOL
    support_tol: float | None = None

    def __post_init__(self):
        grid = np.asarray(self.beta_grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("beta grid needs at least two points")
        diffs = np.diff(grid)
        if np.all(diffs > 0):
            ascending = True
        elif np.all(diffs < 0):
            ascending = False
        else:
            raise ValueError("beta grid must be strictly monotone")
        if self.init not in INIT_POLICIES:
            raise ValueError(f"init must be one of {INIT_POLICIES}")
        if self.init == "reverse" and ascending:
            raise ValueError("reverse annealing requires a descending beta grid")
        if self.init == "forward" and not ascending:
            raise ValueError("forward annealing requires an ascending beta grid")
        object.__setattr__(self, "beta_grid", grid)

    @property
    def effective_support_tol(self) -> float:
        return self.solver.zero_tol if self.support_tol is None else self.support_tol


@dataclass
class SweepRecord:
    """One grid point of a sweep.

    effective_cardinality is None for rate-distortion sweeps; the spectral
    fields are NaN for bottleneck sweeps (the fixed-point Jacobian theory is
    a rate-distortion object; bottleneck transitions are analyzed through
    tangent problems instead). measured_rate is iterations per unit of
    -log epsilon. solution keeps the full solver output and is not
    serialized.
    """

    beta: float
    iterations: int
    converged: bool
    support_size: int
    effective_cardinality: int | None
    lambda0: float
    lambda_max: float
    predicted_rate: float
    measured_rate: float
    marginal: np.ndarray
    rate: float
    distortion_or_info: float
    solution: object = None
    eigenvalues: np.ndarray | None = None

    def to_json_dict(self) -> dict:
        return {
            "beta": self.beta,
            "iterations": self.iterations,
            "converged": self.converged,
            "support_size": self.support_size,
            "effective_cardinality": self.effective_cardinality,
            "lambda0": self.lambda0,
            "lambda_max": self.lambda_max,
            "predicted_rate": self.predicted_rate,
            "measured_rate": self.measured_rate,
            "marginal": self.marginal.tolist(),
            "rate": self.rate,
            "distortion_or_info": self.distortion_or_info,
        }


@dataclass
class TransitionReport:
    """Grid intervals bracketing detected topological transitions.

    kind is "support" for rate-distortion sweeps and "effective_cardinality"
    for bottleneck sweeps. index_pairs holds the positions of the flanking
    records in the ascending record list.
    """

    intervals: list
    kind: str
    index_pairs: list

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "intervals": [[lo, hi] for lo, hi in self.intervals],
        }


def _snap_marginal(marginal: np.ndarray, zero_tol: float) -> np.ndarray:
    """Pin sub-threshold coordinates to exact zero and renormalize."""
    snapped = np.where(marginal > zero_tol, marginal, 0.0)
    total = snapped.sum()
    if total <= 0:
        raise rdmod.NumericalError("warm start lost all probability mass")
    return snapped / total


def _snap_encoder(encoder: np.ndarray, marginal: np.ndarray, zero_tol: float) -> np.ndarray:
    """Zero out encoder columns of representatives below the mass threshold."""
    snapped = np.where(marginal[None, :] > zero_tol, encoder, 0.0)
    sums = snapped.sum(axis=1, keepdims=True)
    if np.any(sums <= 0):
        raise rdmod.NumericalError("warm start zeroed a whole encoder row")
    return snapped / sums


def _rd_record(problem, beta, sol, config) -> SweepRecord:
    # The record's spectral bookkeeping uses the same mass threshold as its
    # support count, so lambda0 reads the supported block even when a loose
    # epsilon has left dying coordinates stranded at tiny positive masses.
    sup_tol = config.effective_support_tol
    jac = jacobian(problem, sol.marginal, beta, fixed_point_tol=float("inf"))
    report = eigen_spectrum(jac, zero_tol=sup_tol)
    return SweepRecord(
        beta=float(beta),
        iterations=sol.iterations,
        converged=sol.converged,
        support_size=int(np.sum(sol.marginal > sup_tol)),
        effective_cardinality=None,
        lambda0=report.lambda0,
        lambda_max=report.lambda_max,
        predicted_rate=report.predicted_rate,
        measured_rate=sol.iterations / (-np.log(config.solver.epsilon)),
        marginal=sol.marginal,
        rate=sol.rate,
        distortion_or_info=sol.distortion,
        solution=sol,
        eigenvalues=report.eigenvalues,
    )


def _ib_record(problem, beta, sol, config) -> SweepRecord:
    sup_tol = config.effective_support_tol
    card = ibmod.effective_cardinality(
        sol, merge_tol=config.merge_tol, zero_tol=sup_tol
    )
    return SweepRecord(
        beta=float(beta),
        iterations=sol.iterations,
        converged=sol.converged,
        support_size=int(np.sum(sol.marginal > sup_tol)),
        effective_cardinality=card,
        lambda0=float("nan"),
        lambda_max=float("nan"),
        predicted_rate=float("nan"),
        measured_rate=sol.iterations / (-np.log(config.solver.epsilon)),
        marginal=sol.marginal,
        rate=sol.rate,
        distortion_or_info=sol.relevant_info,
        solution=sol,
    )


def sweep(problem, config: SweepConfig) -> list[SweepRecord]:
    """Solve at every grid point under the configured policy.

    Works for both problem kinds. Reverse annealing pins sub-threshold
    coordinates to exact zero at each warm start, so the support shrinks
    cleanly along the descent. Forward annealing carries the previous state
    unpinned; note that once a coordinate's mass has decayed far below the
    simplex scale the warm-started iteration keeps tracking the restricted
    (metastable) solution branch well past that coordinate's transition, so
    a forward sweep is not a reliable way to grow support. Records come
    back sorted by ascending beta whatever the execution order;
    non-convergence at a point flags that record and the sweep continues.
    """
    if isinstance(problem, RdProblem):
        return _sweep_rd(problem, config)
    if isinstance(problem, IbProblem):
        return _sweep_ib(problem, config)
    raise TypeError(f"cannot sweep a {type(problem).__name__}")


def _sweep_rd(problem: RdProblem, config: SweepConfig) -> list[SweepRecord]:
    grid = config.beta_grid
    records = []
    rng = np.random.default_rng(config.seed)
    carry = None
    for beta in grid:
        if config.init == "uniform":
            init = rdmod.uniform_init(problem)
        elif config.init == "dirichlet":
            init = rng.dirichlet(np.ones(problem.m))
        elif carry is None:
            init = rdmod.uniform_init(problem)
        elif config.init == "reverse":
            # Pinning sub-threshold mass to zero is what makes a reverse
            # sweep track the shrinking support. A forward sweep must NOT
            # pin: the tiny leftover masses are the seeds from which
            # representatives regrow past their transitions.
            init = _snap_marginal(carry, config.solver.zero_tol)
        else:
            init = carry
        sol = rdmod.solve(problem, beta, init=init, config=config.solver)
        carry = sol.marginal
        records.append(_rd_record(problem, beta, sol, config))
    records.sort(key=lambda r: r.beta)
    return records


def _sweep_ib(problem: IbProblem, config: SweepConfig) -> list[SweepRecord]:
    grid = config.beta_grid
    records = []
    rng = np.random.default_rng(config.seed)
    carry = None
    for beta in grid:
        if config.init == "uniform":
            init = ibmod.uniform_encoder_init(problem)
        elif config.init == "dirichlet":
            init = rng.dirichlet(np.ones(problem.m), size=problem.n)
        elif carry is None:
            # A reverse sweep starts beyond every expected transition, where
            # the refined near-deterministic encoder is the right opening
            # state; a forward sweep starts in the trivial phase.
            init = (
                ibmod.identity_encoder_init(problem)
                if config.init == "reverse"
                else ibmod.uniform_encoder_init(problem)
            )
        elif config.init == "reverse":
            enc_prev, marg_prev = carry
            init = _snap_encoder(enc_prev, marg_prev, config.solver.zero_tol)
        else:
            init = carry[0]
        sol = ibmod.ib_solve(problem, beta, init_encoder=init, config=config.solver)
        carry = (sol.encoder, sol.marginal)
        records.append(_ib_record(problem, beta, sol, config))
    records.sort(key=lambda r: r.beta)
    return records


def detect_transitions(records: list[SweepRecord]) -> TransitionReport:
    """Bracket every change of representation topology between grid points.

    Compares support size (rate-distortion) or effective cardinality
    (bottleneck) between consecutive converged records; unconverged records
    are skipped with a warning. Each reported interval spans one step of the
    surviving record sequence.
    """
    if not records:
        return TransitionReport(intervals=[], kind="support", index_pairs=[])
    betas = [r.beta for r in records]
    if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("records must be sorted by strictly ascending beta")
    is_ib = records[0].effective_cardinality is not None
    kind = "effective_cardinality" if is_ib else "support"

    usable = [i for i, r in enumerate(records) if r.converged]
    dropped = len(records) - len(usable)
    if dropped:
        warnings.warn(
            f"excluding {dropped} unconverged record(s) from transition detection",
            stacklevel=2,
        )
    intervals = []
    pairs = []
    for a, b in zip(usable, usable[1:]):
        va = records[a].effective_cardinality if is_ib else records[a].support_size
        vb = records[b].effective_cardinality if is_ib else records[b].support_size
        if va != vb:
            intervals.append((records[a].beta, records[b].beta))
            pairs.append((a, b))
    return TransitionReport(intervals=intervals, kind=kind, index_pairs=pairs)


@dataclass
class RateStudyPoint:
    """Measured-vs-predicted convergence rate at one stopping accuracy."""

    epsilon: float
    iterations: int
    converged: bool
    measured_rate: float
    lambda0: float
    lambda_max: float
    predicted_rate: float

    def to_json_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "iterations": self.iterations,
            "converged": self.converged,
            "measured_rate": self.measured_rate,
            "lambda0": self.lambda0,
            "lambda_max": self.lambda_max,
            "predicted_rate": self.predicted_rate,
        }


def rate_study(
    problem: RdProblem,
    beta: float,
    epsilons,
    anchor_beta: float | None = None,
    config: SolverConfig | None = None,
) -> list[RateStudyPoint]:
    """Compare measured iterations against the spectral rate prediction.

    Solves once at anchor_beta (default twice beta), then re-solves at beta
    from that warm start for each stopping accuracy, pairing the measured
    iterations per unit of -log eps with the prediction from the smallest
    positive eigenvalue at the solution. Stopping distances default to the
    L1 norm here, matching the norm the asymptotic rate statement is phrased
    in. At a critical point the prediction is +inf and the pairing is
    recorded as such.
    """
    if beta <= 0:
        raise ValueError("rate study needs beta > 0; the iteration is the identity at 0")
    epsilons = [float(e) for e in epsilons]
    if not epsilons or any(not 0 < e < 1 for e in epsilons):
        raise ValueError("epsilons must be a non-empty list of values in (0, 1)")
    if config is None:
        config = SolverConfig(norm="l1")
    if anchor_beta is None:
        anchor_beta = 2.0 * beta
    if anchor_beta <= beta:
        raise ValueError("anchor_beta must exceed beta (a reverse-annealing start)")

    anchor_cfg = replace(config, epsilon=1e-13)
    anchor = rdmod.solve(problem, anchor_beta, config=anchor_cfg)
    reference = rdmod.solve(problem, beta, init=anchor.marginal, config=anchor_cfg)
    jac = jacobian(problem, reference.marginal, beta, fixed_point_tol=float("inf"))
    report = eigen_spectrum(jac, zero_tol=config.zero_tol)

    points = []
    for eps in sorted(epsilons, reverse=True):
        run = rdmod.solve(
            problem, beta, init=anchor.marginal, config=replace(config, epsilon=eps)
        )
        predicted = predicted_iterations(report, eps) / (-np.log(eps))
        points.append(
            RateStudyPoint(
                epsilon=eps,
                iterations=run.iterations,
                converged=run.converged,
                measured_rate=run.iterations / (-np.log(eps)),
                lambda0=report.lambda0,
                lambda_max=report.lambda_max,
                predicted_rate=predicted,
            )
        )
    return points
