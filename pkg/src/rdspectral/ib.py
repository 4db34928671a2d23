"""Information bottleneck problems and the extended alternating iteration.

The bottleneck iteration carries three coupled objects: an encoder p(xhat|x),
its marginal, and a decoder p(y|xhat). Each step refreshes the decoder from
the current encoder, rebuilds the relevance distortion (a KL divergence to
the decoder rows), then applies the usual Boltzmann encoder and marginal
updates with that distortion. Convergence is measured on the encoder, since
the marginal alone does not determine a bottleneck solution.
"""

import json
from dataclasses import dataclass

import numpy as np

from .probability import (
    DEFAULT_ZERO_TOL,
    TINY_MASS,
    NumericalError,
    as_channel,
    as_distribution,
    kl_divergence,
    mutual_information,
)
from .rd import RdProblem, SolverConfig

_FINITE_CHECK_STRIDE = 512

DEFAULT_MERGE_TOL = 1e-6


@dataclass(frozen=True)
class IbProblem:
    """Joint source-relevance distribution with a capped representation size.

    pxy[i, j] is the joint mass of (x=i, y=j). The x-marginal must be
    strictly positive and x must actually carry information about y;
    m representatives (default |X|, which is always enough) are optimized.
    """

    pxy: np.ndarray
    m: int = 0

    def __post_init__(self):
        pxy = np.asarray(self.pxy, dtype=float)
        if pxy.ndim != 2 or pxy.size == 0:
            raise ValueError("pxy must be a non-empty 2-d matrix")
        if not np.all(np.isfinite(pxy)) or np.any(pxy < 0):
            raise ValueError("pxy entries must be finite and non-negative")
        total = pxy.sum()
        if total <= 0:
            raise ValueError("pxy is identically zero")
        if abs(total - 1.0) > 1e-12:
            pxy = pxy / total
        px = pxy.sum(axis=1)
        if np.any(px <= 0):
            raise ValueError("every source symbol must have positive mass")
        m = self.m if self.m else pxy.shape[0]
        if m < 1:
            raise ValueError("representation alphabet must be non-empty")
        object.__setattr__(self, "pxy", pxy)
        object.__setattr__(self, "m", int(m))
        if self.relevant_information_ceiling() <= 1e-12:
            raise ValueError("x carries no information about y (I(X;Y) = 0)")

    @property
    def n(self) -> int:
        return self.pxy.shape[0]

    @property
    def ny(self) -> int:
        return self.pxy.shape[1]

    @property
    def px(self) -> np.ndarray:
        return self.pxy.sum(axis=1)

    @property
    def py(self) -> np.ndarray:
        return self.pxy.sum(axis=0)

    @property
    def py_given_x(self) -> np.ndarray:
        return self.pxy / self.px[:, None]

    def relevant_information_ceiling(self) -> float:
        """I(X;Y), the most relevance any representation can retain."""
        return mutual_information(self.px, self.py_given_x)

    def to_json_dict(self) -> dict:
        return {"pxy": self.pxy.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, obj: dict) -> "IbProblem":
        if "pxy" in obj:
            pxy = np.asarray(obj["pxy"], dtype=float)
        elif "px" in obj and "py_given_x" in obj:
            px = as_distribution(np.asarray(obj["px"], dtype=float), name="px")
            rows = as_channel(np.asarray(obj["py_given_x"], dtype=float),
                              name="py_given_x")
            pxy = px[:, None] * rows
        else:
            raise ValueError(
                "bottleneck problem needs either 'pxy' or 'px' + 'py_given_x'"
            )
        return cls(pxy=pxy, m=int(obj.get("m", 0)))

    @classmethod
    def from_json(cls, text: str) -> "IbProblem":
        return cls.from_json_dict(json.loads(text))


@dataclass
class IbSolution:
    """State of a bottleneck solve: encoder, marginal, decoder and scores."""

    beta: float
    encoder: np.ndarray
    marginal: np.ndarray
    decoder: np.ndarray
    rate: float
    relevant_info: float
    iterations: int
    converged: bool

    def to_json_dict(self) -> dict:
        return {
            "beta": self.beta,
            "encoder": self.encoder.tolist(),
            "marginal": self.marginal.tolist(),
            "decoder": self.decoder.tolist(),
            "rate": self.rate,
            "relevant_info": self.relevant_info,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def ib_decoder(problem: IbProblem, encoder, marginal=None) -> np.ndarray:
    """Decoder rows p(y | xhat) implied by an encoder via Bayes' rule.

    Rows of representatives with zero marginal mass are set to the global
    p(y): the vanishing-compression limit. That keeps the relevance
    distortion finite without contaminating anything that carries mass.
    """
    encoder = np.asarray(encoder, dtype=float)
    if encoder.shape != (problem.n, problem.m):
        raise ValueError("encoder shape does not match the problem")
    if marginal is None:
        marginal = problem.px @ encoder
    marginal = np.asarray(marginal, dtype=float)
    if marginal.sum() <= 0:
        raise ValueError("encoder induces an all-zero marginal")
    weighted = encoder * problem.px[:, None]
    safe = np.where(marginal > 0, marginal, 1.0)
    dec = (weighted.T @ problem.py_given_x) / safe[:, None]
    return np.where(marginal[:, None] > 0, dec, problem.py[None, :])


def ib_distortion(problem: IbProblem, decoder) -> np.ndarray:
    """Relevance distortion matrix d[x, xhat] = KL(p(y|x) || decoder row xhat).

    Entries are +inf where a decoder row lacks mass that p(y|x) has;
    infinities propagate by design.
    """
    decoder = np.asarray(decoder, dtype=float)
    pygx = problem.py_given_x
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = pygx[:, None, :] * (
            np.log(pygx[:, None, :]) - np.log(decoder[None, :, :])
        )
    logs = np.where(pygx[:, None, :] > 0, logs, 0.0)
    return logs.sum(axis=-1)


def ib_step(problem: IbProblem, encoder, beta: float):
    """One bottleneck step: decoder, then encoder, then marginal.

    Returns (new_encoder, new_marginal, decoder_used). The encoder update is
    done in shifted log space, so large beta never overflows and exact zero
    marginal mass is preserved.
    """
    encoder = np.asarray(encoder, dtype=float)
    marginal = problem.px @ encoder
    dec = ib_decoder(problem, encoder, marginal)
    dist = ib_distortion(problem, dec)
    with np.errstate(divide="ignore"):
        logits = np.where(
            marginal[None, :] > 0,
            np.log(np.where(marginal > 0, marginal, 1.0))[None, :] - beta * dist,
            -np.inf,
        )
    logits -= logits.max(axis=1, keepdims=True)
    new_encoder = np.exp(logits)
    norms = new_encoder.sum(axis=1, keepdims=True)
    if np.any(norms <= 0) or not np.all(np.isfinite(norms)):
        raise NumericalError("encoder update lost all mass on some row")
    new_encoder /= norms
    new_encoder[new_encoder < TINY_MASS] = 0.0
    return new_encoder, problem.px @ new_encoder, dec


def relevant_information(problem: IbProblem, marginal, decoder) -> float:
    """I(Xhat; Y) of a representation given its marginal and decoder rows."""
    marginal = np.asarray(marginal, dtype=float)
    decoder = np.asarray(decoder, dtype=float)
    py = problem.py
    total = 0.0
    for i in range(marginal.size):
        if marginal[i] > 0:
            total += marginal[i] * kl_divergence(decoder[i], py)
    return max(total, 0.0)


def ib_functional(problem: IbProblem, encoder, beta: float) -> float:
    """The bottleneck objective I(X;Xhat) - beta I(Xhat;Y) for an encoder."""
    encoder = np.asarray(encoder, dtype=float)
    marginal = problem.px @ encoder
    dec = ib_decoder(problem, encoder, marginal)
    return mutual_information(problem.px, encoder) - beta * relevant_information(
        problem, marginal, dec
    )


def uniform_encoder_init(problem: IbProblem, identity_weight: float = 0.5) -> np.ndarray:
    """Uniform encoder blended with an identity pattern.

    The exactly uniform encoder is a fixed point of the iteration at every
    beta (all decoder rows coincide, so nothing ever breaks the tie), which
    makes it useless as a starting point. The identity-leaning blend is the
    deterministic tie-break that tracks the refined solution branch.
    """
    if not 0 <= identity_weight < 1:
        raise ValueError("identity_weight must lie in [0, 1)")
    base = np.full((problem.n, problem.m), 1.0 / problem.m)
    eye = np.eye(problem.n, problem.m)
    enc = (1.0 - identity_weight) * base + identity_weight * eye
    return enc / enc.sum(axis=1, keepdims=True)


def identity_encoder_init(problem: IbProblem, leak: float = 1e-6) -> np.ndarray:
    """Near-deterministic encoder mapping each source symbol to its own slot."""
    enc = np.full((problem.n, problem.m), leak)
    for i in range(problem.n):
        enc[i, min(i, problem.m - 1)] = 1.0
    return enc / enc.sum(axis=1, keepdims=True)


def dirichlet_encoder_init(problem: IbProblem, seed: int = 0) -> np.ndarray:
    """Encoder rows drawn independently from a symmetric Dirichlet(1)."""
    rng = np.random.default_rng(seed)
    return rng.dirichlet(np.ones(problem.m), size=problem.n)


def ib_solve(
    problem: IbProblem,
    beta: float,
    init_encoder=None,
    config: SolverConfig | None = None,
    trace: list | None = None,
) -> IbSolution:
    """Iterate the bottleneck step until successive encoders are epsilon-close.

    The returned decoder is recomputed from the final encoder, so the
    decoder equation holds exactly for the stored triple. Non-convergence
    within the budget returns converged=False.
    """
    if config is None:
        config = SolverConfig()
    if beta < 0:
        raise ValueError("beta must be non-negative")
    enc = (
        uniform_encoder_init(problem)
        if init_encoder is None
        else np.asarray(init_encoder, dtype=float).copy()
    )
    if enc.shape != (problem.n, problem.m):
        raise ValueError("init encoder shape does not match the problem")
    if np.any(enc < 0):
        raise ValueError("init encoder has negative entries")
    enc = enc / enc.sum(axis=1, keepdims=True)

    if trace is not None:
        trace.append(enc.copy())
    converged = False
    iterations = 0
    for k in range(1, config.max_iterations + 1):
        new_enc, _, _ = ib_step(problem, enc, beta)
        if trace is not None:
            trace.append(new_enc.copy())
        delta = config.distance((new_enc - enc).ravel())
        enc = new_enc
        iterations = k
        if k % _FINITE_CHECK_STRIDE == 0 and not np.all(np.isfinite(enc)):
            raise NumericalError(f"non-finite encoder at iteration {k}")
        if delta < config.epsilon:
            converged = True
            break

    if not np.all(np.isfinite(enc)):
        raise NumericalError("non-finite encoder at termination")
    marginal = problem.px @ enc
    dec = ib_decoder(problem, enc, marginal)
    return IbSolution(
        beta=float(beta),
        encoder=enc,
        marginal=marginal,
        decoder=dec,
        rate=mutual_information(problem.px, enc),
        relevant_info=relevant_information(problem, marginal, dec),
        iterations=iterations,
        converged=converged,
    )


def decoder_classes(
    solution: IbSolution,
    merge_tol: float = DEFAULT_MERGE_TOL,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> list[np.ndarray]:
    """Distinct decoder rows among representatives that carry mass.

    Rows within merge_tol (sup norm) of an existing class representative are
    merged into it; classes are seeded in decreasing order of marginal mass,
    so each returned row is the decoder of its class's dominant
    representative.
    """
    if merge_tol <= 0:
        raise ValueError("merge_tol must be positive")
    reps: list[np.ndarray] = []
    order = np.argsort(-solution.marginal, kind="stable")
    for i in order:
        if solution.marginal[i] <= zero_tol:
            continue
        row = solution.decoder[i]
        if not any(np.abs(row - rep).max() <= merge_tol for rep in reps):
            reps.append(row.copy())
    return reps


def effective_cardinality(
    solution: IbSolution,
    merge_tol: float = DEFAULT_MERGE_TOL,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> int:
    """Number of distinct non-empty decoder distributions in a solution."""
    return len(decoder_classes(solution, merge_tol=merge_tol, zero_tol=zero_tol))


def tangent_rd(
    problem: IbProblem,
    sol_minus: IbSolution,
    sol_plus: IbSolution,
    merge_tol: float = DEFAULT_MERGE_TOL,
    dedup_tol: float | None = None,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> RdProblem:
    """Fixed-distortion problem whose curve touches the bottleneck curve.

    The representation alphabet is the union of the decoder classes of the
    two flanking solutions, with the plus-side copies of classes already
    present on the minus side dropped (they are the same representative seen
    through a small beta shift, and duplicated columns are degenerate).
    The distortion to each representative is the KL divergence from p(y|x)
    to that class's decoder row. Decoder zeros opposite positive p(y|x)
    would make the distortion infinite and are rejected.
    """
    if not (sol_minus.converged and sol_plus.converged):
        raise ValueError("tangent construction needs converged flanking solutions")
    if not sol_minus.beta < sol_plus.beta:
        raise ValueError("flanking solutions must satisfy beta_minus < beta_plus")
    if dedup_tol is None:
        dedup_tol = merge_tol
    reps_minus = decoder_classes(sol_minus, merge_tol=merge_tol, zero_tol=zero_tol)
    reps_plus = decoder_classes(sol_plus, merge_tol=merge_tol, zero_tol=zero_tol)
    columns = list(reps_minus)
    for row in reps_plus:
        if not any(np.abs(row - kept).max() <= dedup_tol for kept in columns):
            columns.append(row)
    d = ib_distortion(problem, np.stack(columns))
    if not np.all(np.isfinite(d)):
        raise ValueError(
            "tangent distortion has infinite entries; a flanking decoder row "
            "is missing mass where p(y|x) has some"
        )
    return RdProblem(px=problem.px, d=d)
