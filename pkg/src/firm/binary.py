"""Exact importance of binary features.

For a feature taking two values a > b with probabilities p_a, p_b and
conditional mean scores q_a, q_b, the importance is

    Q = (q_a - q_b) * sqrt(p_a * p_b)

signed, so the direction of the feature's effect is retained. Anchoring
`a` at the larger feature value makes the sign deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import SequenceDataset, TabularDataset
from .errors import DegenerateFeatureError, FirmError
from .features import FeatureFunction, Projection, SignedConjunction, evaluate_rows
from .results import BinaryStats, FirmResult
from .scoring import Scorer, score_many


@dataclass(frozen=True)
class PointDistribution:
    """An explicit distribution: support points plus probabilities."""

    points: object  # n-by-d array, or sequence of strings
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64).ravel()
        if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-9:
            raise FirmError("probabilities must be nonnegative and sum to 1")
        npoints = len(self.points)
        if npoints != probs.size:
            raise FirmError("need one probability per point")
        probs = probs / probs.sum()
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, points) -> "PointDistribution":
        n = len(points)
        return cls(points=points, probs=np.full(n, 1.0 / n))

    @classmethod
    def from_dataset(cls, data: TabularDataset | SequenceDataset) -> "PointDistribution":
        pts = data.X if isinstance(data, TabularDataset) else data.sequences
        return cls.uniform(pts)


def firm_binary_values(scores, fvals, probs=None, feature: str = "f",
                       method: str = "binary_exact") -> FirmResult:
    """Exact signed importance from aligned score and feature-value vectors."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    fvals = np.asarray(fvals, dtype=np.float64).ravel()
    if probs is None:
        probs = np.full(scores.size, 1.0 / scores.size)
    uniq = np.unique(fvals)
    if len(uniq) == 1:
        raise DegenerateFeatureError(
            f"feature {feature} takes a single value on this support")
    if len(uniq) > 2:
        raise FirmError(f"feature {feature} takes {len(uniq)} values; "
                        "binary importance needs exactly 2")
    hi = float(uniq[1])
    mask_hi = fvals == hi
    p_hi = float(probs[mask_hi].sum())
    p_lo = 1.0 - p_hi
    if p_hi <= 0.0 or p_lo <= 0.0:
        raise DegenerateFeatureError(
            f"feature {feature}: a value has zero probability")
    q_hi = float(probs[mask_hi] @ scores[mask_hi]) / p_hi
    q_lo = float(probs[~mask_hi] @ scores[~mask_hi]) / p_lo
    q = (q_hi - q_lo) * math.sqrt(p_hi * p_lo)
    return FirmResult(feature=feature, q_signed=q, q_abs=abs(q), method=method,
                      extras=BinaryStats(q_a=q_hi, q_b=q_lo, p_a=p_hi, p_b=p_lo))


def firm_binary_exact(scorer: Scorer, f: FeatureFunction,
                      dist: PointDistribution) -> FirmResult:
    """Exact signed importance of a binary feature under an explicit distribution."""
    return firm_binary_values(score_many(scorer, dist.points),
                              evaluate_rows(f, dist.points),
                              probs=dist.probs, feature=f.describe())


def empirical_matrix_diagonals(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-column diagonals (d0, d1) of the empirical importance matrix.

    With n_plus, n_minus the per-column value counts,

        d1 = 1 / (2 sqrt(n_plus n_minus))
        d0 = (n_minus - n_plus) / (2 n sqrt(n_plus n_minus))

    so that rows of M = 1*d0 + X*d1 weight each example by the reciprocal
    of its value count, reproducing the exact binary importance.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    n_plus = (X == 1.0).sum(axis=0)
    n_minus = (X == -1.0).sum(axis=0)
    bad = np.nonzero((n_plus == 0) | (n_minus == 0))[0]
    if bad.size:
        raise DegenerateFeatureError(
            f"column x{bad[0] + 1} takes a single value")
    root = np.sqrt(n_plus * n_minus)
    d1 = 1.0 / (2.0 * root)
    d0 = (n_minus - n_plus) / (2.0 * n * root)
    return d0, d1


def firm_binary_empirical_matrix(X: np.ndarray, w: np.ndarray,
                                 b: float = 0.0) -> list[FirmResult]:
    """Per-column importances of a linear scorer on ±1 data, in matrix form.

    Computes Q = M'(Xw + b) with M = 1*d0 + X*d1; equal to the exact
    binary importance of every column projection under the empirical
    distribution.
    """
    X = np.asarray(X, dtype=np.float64)
    if not np.isin(X, (-1.0, 1.0)).all():
        raise FirmError("matrix form requires ±1 entries")
    w = np.asarray(w, dtype=np.float64).ravel()
    n, d = X.shape
    if w.size != d:
        raise FirmError(f"weight vector has size {w.size}, data has {d} columns")
    d0, d1 = empirical_matrix_diagonals(X)
    scores = X @ w + b
    M = d0[None, :] + X * d1[None, :]
    q = M.T @ scores
    # conditional means for the extras
    plus = X == 1.0
    n_plus = plus.sum(axis=0)
    q_hi = (scores @ plus) / n_plus
    q_lo = (scores @ ~plus) / (n - n_plus)
    p_hi = n_plus / n
    out = []
    for j in range(d):
        out.append(FirmResult(
            feature=Projection(j).describe(), q_signed=float(q[j]),
            q_abs=abs(float(q[j])), method="binary_matrix",
            extras=BinaryStats(q_a=float(q_hi[j]), q_b=float(q_lo[j]),
                               p_a=float(p_hi[j]), p_b=float(1 - p_hi[j]))))
    return out


def firm_uniform_conjunction(w: np.ndarray, b: float,
                             literals: tuple[tuple[int, int], ...]) -> FirmResult:
    """Closed-form importance of a signed conjunction under uniform ±1 inputs.

    For m distinct literals the indicator fires with probability p = 2^-m
    and the importance of the conjunction under a linear scorer w is
    (sum of signed weights) * sqrt(p / (1 - p)).
    """
    f = SignedConjunction(literals=tuple(literals))  # validates
    w = np.asarray(w, dtype=np.float64).ravel()
    for j, _ in f.literals:
        if not 0 <= j < w.size:
            raise FirmError(f"literal index {j} out of range for d={w.size}")
    m = len(f.literals)
    p = 2.0 ** (-m)
    signed_sum = float(sum(s * w[j] for j, s in f.literals))
    q = signed_sum * math.sqrt(p / (1.0 - p))
    q_a = signed_sum + b
    q_b = -signed_sum * p / (1.0 - p) + b
    return FirmResult(feature=f.describe(), q_signed=q, q_abs=abs(q),
                      method="uniform_conjunction",
                      extras=BinaryStats(q_a=q_a, q_b=q_b, p_a=p, p_b=1.0 - p))


def poim_firm_conversion(q_prime: float, p: float) -> float:
    """Rescale a conditional-mean-shift importance to the binary importance.

    q_prime is E[s | feature value] - E[s]; p is the probability of that
    feature value. Under a uniform background the factor is constant, so
    rankings within a table slice are unchanged.
    """
    if not 0.0 < p < 1.0:
        raise FirmError("p must lie strictly between 0 and 1")
    return q_prime * math.sqrt((1.0 - p) / p)
