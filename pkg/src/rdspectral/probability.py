"""Probability vectors, stochastic matrices and information measures.

All quantities are in nats. Distributions are plain numpy arrays; the
constructors below validate and, where sensible, repair them. The
conventions 0*log(0) = 0 and p*log(p/0) = +inf are used throughout.
"""

import warnings

import numpy as np

# Absolute tolerance for "sums to one" checks. Inputs further off than this
# are renormalized with a warning rather than rejected, since long iterate
# chains accumulate rounding.
SIMPLEX_ATOL = 1e-12

# Default threshold below which a probability mass counts as zero when
# computing supports.
DEFAULT_ZERO_TOL = 1e-10

# Smallest normal double. Iteration maps flush masses below this to exact
# zero: a denormal mass can underflow to 0 in one derived quantity but not
# another, which would fabricate infinite divergences out of roundoff.
TINY_MASS = float(np.finfo(float).tiny)


class NumericalError(RuntimeError):
    """A solver produced NaN/Inf or an otherwise impossible numeric state."""


def normalize(v) -> np.ndarray:
    """Scale a non-negative vector to sum to one.

    Raises ValueError on negative entries or an all-zero vector.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a non-empty 1-d vector")
    if np.any(v < 0):
        raise ValueError("negative entries cannot be normalized to a distribution")
    total = v.sum()
    if total <= 0:
        raise ValueError("cannot normalize an all-zero vector")
    if abs(total - 1.0) <= SIMPLEX_ATOL:
        # Already on the simplex to working tolerance; returning the input
        # unchanged makes the operation exactly idempotent.
        return v.copy()
    return v / total


def as_distribution(p, name: str = "p") -> np.ndarray:
    """Validate a probability vector, renormalizing with a warning if needed."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d vector")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{name} contains non-finite entries")
    if np.any(p < 0):
        raise ValueError(f"{name} has negative entries")
    total = p.sum()
    if total <= 0:
        raise ValueError(f"{name} is identically zero")
    if abs(total - 1.0) > SIMPLEX_ATOL:
        warnings.warn(f"{name} sums to {total!r}; renormalizing", stacklevel=2)
        p = p / total
    return p


def as_channel(rows, name: str = "channel") -> np.ndarray:
    """Validate a row-stochastic matrix (one conditional distribution per row)."""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.size == 0:
        raise ValueError(f"{name} must be a non-empty 2-d matrix")
    if not np.all(np.isfinite(rows)):
        raise ValueError(f"{name} contains non-finite entries")
    if np.any(rows < 0):
        raise ValueError(f"{name} has negative entries")
    sums = rows.sum(axis=1)
    if np.any(sums <= 0):
        raise ValueError(f"{name} has an all-zero row")
    if np.max(np.abs(sums - 1.0)) > SIMPLEX_ATOL:
        warnings.warn(f"{name} rows sum to {sums!r}; renormalizing", stacklevel=2)
        rows = rows / sums[:, None]
    return rows


def entropy(p) -> float:
    """Shannon entropy -sum p log p in nats, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    mask = p > 0
    return float(-np.sum(p[mask] * np.log(p[mask])))


def kl_divergence(p, q) -> float:
    """Relative entropy sum p log(p/q) in nats.

    Returns +inf when the support of p is not contained in the support of q.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("p and q must have the same length")
    mask = p > 0
    if np.any(q[mask] <= 0):
        return float("inf")
    return float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))


def mutual_information(px, channel) -> float:
    """Mutual information between an input with law px and a channel output.

    channel[i] is the conditional output distribution given input i. Computed
    as the px-average of KL(channel row || output marginal); never negative.
    """
    px = np.asarray(px, dtype=float)
    channel = np.asarray(channel, dtype=float)
    if channel.ndim != 2 or channel.shape[0] != px.shape[0]:
        raise ValueError("channel must have one row per input symbol")
    out = px @ channel
    total = 0.0
    for i in range(px.size):
        if px[i] > 0:
            total += px[i] * kl_divergence(channel[i], out)
    # Roundoff can leave a tiny negative residue on independent inputs.
    return max(total, 0.0)


def support(p, zero_tol: float = DEFAULT_ZERO_TOL) -> np.ndarray:
    """Indices with mass strictly above zero_tol, in increasing order."""
    if not 0 <= zero_tol < 1:
        raise ValueError("zero_tol must lie in [0, 1)")
    p = np.asarray(p, dtype=float)
    return np.flatnonzero(p > zero_tol)
