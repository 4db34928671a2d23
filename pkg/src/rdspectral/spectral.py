"""Spectral diagnostics of the alternating iteration's fixed points.

The object of interest is the transposed Jacobian of the fixed-point
residual at a reproduction marginal q:

    A[i, j] = q(j) * sum_x px(x) exp(-beta (d(x,i) + d(x,j))) / Z(x)^2

A is similar to a Gram matrix via the diagonal scaling diag(q)^(1/2), so its
eigenvalues are real and non-negative; columns of zero-mass representatives
vanish, making the kernel dimension equal to the number of dead
representatives at a solution. The smallest positive eigenvalue lambda0
controls the local convergence factor 1 - lambda0 of the iteration, which is
what the predicted iteration counts below are built from.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .probability import DEFAULT_ZERO_TOL, NumericalError, support
from .rd import RdProblem, RdSolution, boltzmann_factors, residual

# Eigenvalues of A below this are structurally impossible and indicate a
# numerical failure rather than roundoff.
NEGATIVE_EIGENVALUE_TOL = -1e-8


@dataclass
class FixedPointJacobian:
    """Transposed residual Jacobian evaluated at (marginal, beta).

    The formula only needs a marginal, not a fixed point, so diagnostics at
    arbitrary points are allowed; residual_linf records how far from
    stationarity the evaluation point was so downstream consumers can
    discount reports taken at poor points.
    """

    matrix: np.ndarray
    beta: float
    marginal: np.ndarray
    problem: RdProblem
    residual_linf: float


@dataclass
class SpectralReport:
    """Eigenvalue summary of a FixedPointJacobian.

    eigenvalues are sorted ascending; kernel_dim counts those below
    zero_tol. lambda0 is the smallest eigenvalue above zero_tol, lambda_max
    the matching contraction factor 1 - lambda0 of the iteration map, and
    predicted_rate the asymptotic iterations needed per unit of -log eps.
    at_criticality is set when a full-support point carries more kernel
    directions than its dead representatives explain, where the rate
    prediction degenerates to +inf.
    """

    beta: float
    eigenvalues: np.ndarray
    kernel_dim: int
    lambda0: float
    lambda_max: float
    predicted_rate: float
    zero_tol: float
    at_criticality: bool
    residual_linf: float

    def to_json_dict(self) -> dict:
        return {
            "beta": self.beta,
            "eigenvalues": self.eigenvalues.tolist(),
            "kernel_dim": self.kernel_dim,
            "lambda0": self.lambda0,
            "lambda_max": self.lambda_max,
            "predicted_rate": self.predicted_rate,
        }


def jacobian(
    problem: RdProblem,
    marginal,
    beta: float,
    fixed_point_tol: float = 1e-6,
) -> FixedPointJacobian:
    """Evaluate the transposed residual Jacobian directly.

    Uses the product form with explicit Boltzmann factors, which stays
    defined on zero-mass columns (the conditional-probability form does
    not). Warns when the evaluation point is not a fixed point to within
    fixed_point_tol.
    """
    marginal = np.asarray(marginal, dtype=float)
    a = boltzmann_factors(problem, marginal, beta)
    matrix = (a.T * problem.px) @ a * marginal[None, :]
    if not np.all(np.isfinite(matrix)):
        raise NumericalError("Jacobian evaluation produced non-finite entries")
    res = float(np.abs(residual(problem, marginal, beta)).max())
    if res > fixed_point_tol:
        warnings.warn(
            f"Jacobian evaluated at a non-fixed point (residual {res:.3g}); "
            "spectral diagnostics there are only indicative",
            stacklevel=2,
        )
    return FixedPointJacobian(
        matrix=matrix,
        beta=float(beta),
        marginal=marginal,
        problem=problem,
        residual_linf=res,
    )


def jacobian_product_form(problem: RdProblem, marginal, beta: float) -> np.ndarray:
    """The same matrix as the product of backward and forward channels.

    A = p(x | xhat) composed with p(xhat' | x), defined only where the
    marginal has full support. Kept as an independent computation path for
    cross-checking the direct formula.
    """
    marginal = np.asarray(marginal, dtype=float)
    if np.any(marginal <= 0):
        raise ValueError("the channel-product form needs a full-support marginal")
    a = boltzmann_factors(problem, marginal, beta)
    backward = (a * problem.px[:, None]).T      # rows: p(x | xhat)
    forward = marginal[None, :] * a             # rows: p(xhat' | x)
    return backward @ forward


def jacobian_finite_difference(
    problem: RdProblem, marginal, beta: float, step: float = 1e-6
) -> np.ndarray:
    """Transposed central-difference Jacobian of the residual map.

    Perturbs one coordinate at a time without renormalizing; the residual is
    a map on the ambient positive orthant, so no simplex projection is
    wanted here. The marginal must be strictly interior by more than step.
    """
    marginal = np.asarray(marginal, dtype=float)
    if not 0 < step <= 1e-3:
        raise ValueError("step must lie in (0, 1e-3]")
    if np.any(marginal <= step):
        raise ValueError("finite differences need an interior marginal (> step)")
    m = marginal.shape[0]
    grad = np.empty((m, m))
    for j in range(m):
        hi = marginal.copy()
        lo = marginal.copy()
        hi[j] += step
        lo[j] -= step
        grad[:, j] = (residual(problem, hi, beta) - residual(problem, lo, beta)) / (
            2 * step
        )
    return grad.T


def symmetrized_support_block(
    problem: RdProblem, marginal, beta: float, zero_tol: float = DEFAULT_ZERO_TOL
) -> np.ndarray:
    """Symmetric matrix similar to A restricted to the supported block.

    With B[xhat, x] = sqrt(px(x)) exp(-beta d)/Z(x) and C = diag(q), the
    scaling C^(1/2) A C^(-1/2) equals (C^(1/2) B)(C^(1/2) B)^T on the
    support, a Gram matrix whose eigenvalues are exactly the nonzero-block
    eigenvalues of A.
    """
    marginal = np.asarray(marginal, dtype=float)
    sup = marginal > zero_tol
    a = boltzmann_factors(problem, marginal, beta)
    b_sup = (np.sqrt(problem.px)[:, None] * a).T[sup]
    scaled = np.sqrt(marginal[sup])[:, None] * b_sup
    return scaled @ scaled.T


def eigen_spectrum(
    jac: FixedPointJacobian, zero_tol: float = DEFAULT_ZERO_TOL
) -> SpectralReport:
    """Eigenvalues of A via the symmetrizing similarity transform.

    Representatives at or below zero_tol contribute exact zero eigenvalues
    through the block structure of A; the supported block is diagonalized
    with a symmetric eigensolver, which guarantees a real spectrum.
    """
    marginal = jac.marginal
    m = marginal.shape[0]
    sup = marginal > zero_tol
    n_dead = int(m - sup.sum())
    if sup.any():
        gram = symmetrized_support_block(jac.problem, marginal, jac.beta, zero_tol)
        block = np.linalg.eigvalsh(gram)
    else:
        block = np.empty(0)
    if block.size and block.min() < NEGATIVE_EIGENVALUE_TOL:
        raise NumericalError(
            f"eigenvalue {block.min():.3g} below {NEGATIVE_EIGENVALUE_TOL}; "
            "the evaluation point is inconsistent with a fixed point"
        )
    eigenvalues = np.sort(np.concatenate([np.zeros(n_dead), block]))

    kernel_dim = int(np.sum(eigenvalues < zero_tol))
    positive = eigenvalues[eigenvalues > zero_tol]
    at_criticality = kernel_dim > n_dead
    if positive.size == 0:
        lambda0 = float("nan")
        lambda_max = float("nan")
        predicted_rate = float("inf")
        at_criticality = True
    else:
        lambda0 = float(positive.min())
        lambda_max = 1.0 - lambda0
        if at_criticality:
            predicted_rate = float("inf")
        elif lambda_max <= 0.0:
            predicted_rate = 0.0
        else:
            predicted_rate = 1.0 / (-np.log(lambda_max))
    return SpectralReport(
        beta=jac.beta,
        eigenvalues=eigenvalues,
        kernel_dim=kernel_dim,
        lambda0=lambda0,
        lambda_max=lambda_max,
        predicted_rate=predicted_rate,
        zero_tol=zero_tol,
        at_criticality=at_criticality,
        residual_linf=jac.residual_linf,
    )


def eigenvalues_nonsymmetric(jac: FixedPointJacobian) -> np.ndarray:
    """Raw eigenvalues from a general eigensolver, sorted by real part.

    Validation path only: the symmetrized route is the production one. Kept
    for cross-checking realness and agreement on small alphabets.
    """
    ev = np.linalg.eigvals(jac.matrix)
    return ev[np.argsort(ev.real)]


def predicted_iterations(report: SpectralReport, epsilon: float) -> float:
    """Asymptotic iteration count (-log eps) / (-log lambda_max).

    Returns +inf at criticality (contraction factor 1) and 0 when the
    supported block is a single representative, which converges in one step.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if report.at_criticality or not np.isfinite(report.lambda_max):
        return float("inf")
    if report.lambda_max >= 1.0:
        return float("inf")
    if report.lambda_max <= 0.0:
        return 0.0
    return float(-np.log(epsilon) / (-np.log(report.lambda_max)))


def kernel_dimension_check(
    problem: RdProblem,
    solution: RdSolution,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> tuple[int, int, bool]:
    """Compare the kernel dimension of A with the count of dead representatives.

    At a solution these must satisfy kernel_dim = m - |support|; the result
    is returned as (kernel_dim, support_size, consistent) rather than
    raised, since an inconsistency is a finding about the solution.
    """
    jac = jacobian(problem, solution.marginal, solution.beta)
    report = eigen_spectrum(jac, zero_tol=zero_tol)
    support_size = int(support(solution.marginal, zero_tol).size)
    consistent = report.kernel_dim == problem.m - support_size
    return report.kernel_dim, support_size, consistent
