"""Importance under a normal model of the inputs.

For zero-mean normal inputs with covariance S, conditioning on one
coordinate moves the mean of all others along the corresponding covariance
column. A first-order expansion of the score around the mean then gives

    Q_j = (S_j. ' g) / sqrt(S_jj),    g = gradient of the score at the mean,

which is exact (not approximate) for linear scorers. Correlated inputs
therefore spread importance across related coordinates, unlike the
gradient-only sensitivity index, which this module also provides as a
baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import CovarianceEstimate, TabularDataset
from .errors import FirmError
from .features import Projection
from .results import FirmResult
from .scoring import LinearScorer, Scorer, gradient_at
from typing import Sequence


@dataclass(frozen=True)
class GaussianModel:
    """Covariance (plus recorded mean) of the working normal model.

    Computations run in centered coordinates; `mean` records where the
    original data sat so scorers trained on raw coordinates can be
    expanded around the right point.
    """

    sigma: CovarianceEstimate
    mean: np.ndarray | None = None

    def __post_init__(self):
        mean = self.mean
        if mean is None:
            mean = np.zeros(self.sigma.d)
        mean = np.asarray(mean, dtype=np.float64).ravel()
        if mean.size != self.sigma.d:
            raise FirmError("mean dimension does not match covariance")
        mean.setflags(write=False)
        object.__setattr__(self, "mean", mean)

    @property
    def d(self) -> int:
        return self.sigma.d


def _check_variances(sigma: np.ndarray) -> np.ndarray:
    var = np.diag(sigma)
    if (var <= 0).any():
        j = int(np.argmin(var))
        raise FirmError(f"zero variance at coordinate {j + 1}")
    return var


def _names(names: Sequence[str] | None, d: int) -> list[str]:
    if names is None:
        return [Projection(j).describe() for j in range(d)]
    if len(names) != d:
        raise FirmError(f"got {len(names)} names for {d} coordinates")
    return list(names)


def conditional_mean(model: GaussianModel, j: int, t: float) -> np.ndarray:
    """Mean of the (centered) inputs given coordinate j equals t."""
    sigma = model.sigma.sigma
    var_j = sigma[j, j]
    if var_j <= 0:
        raise FirmError(f"zero variance at coordinate {j + 1}")
    return (t / var_j) * sigma[:, j]


def firm_gaussian_general(scorer: Scorer, model: GaussianModel,
                          names: Sequence[str] | None = None) -> list[FirmResult]:
    """First-order importance of every coordinate for a differentiable scorer.

    The score is expanded around the model mean; exact for linear scorers.
    """
    sigma = model.sigma.sigma
    var = _check_variances(sigma)
    g = gradient_at(scorer, model.mean)
    q = (sigma @ g) / np.sqrt(var)
    labels = _names(names, model.d)
    return [FirmResult(feature=labels[j], q_signed=float(q[j]),
                       q_abs=abs(float(q[j])), method="gaussian")
            for j in range(model.d)]


def firm_gaussian_linear(w: np.ndarray, b: float, model: GaussianModel,
                         names: Sequence[str] | None = None) -> list[FirmResult]:
    """Exact importance of a linear scorer under the normal model.

    Q = D^-1 S w with D the diagonal matrix of standard deviations.
    """
    w = np.asarray(w, dtype=np.float64).ravel()
    sigma = model.sigma.sigma
    if w.size != model.d:
        raise FirmError(f"weight vector has size {w.size}, model is {model.d}-dimensional")
    var = _check_variances(sigma)
    q = (sigma @ w) / np.sqrt(var)
    labels = _names(names, model.d)
    return [FirmResult(feature=labels[j], q_signed=float(q[j]),
                       q_abs=abs(float(q[j])), method="gaussian_linear")
            for j in range(model.d)]


def sensitivity_index(scorer: Scorer, data: TabularDataset) -> list[float]:
    """Gradient-based importance baseline, estimated over the data rows.

    I_j = sqrt(mean_i (ds/dx_j at x_i)^2 * Var(X_j)). Blind to correlations
    between coordinates: a zero weight gives a zero index no matter how the
    coordinate co-varies with the rest.
    """
    var = np.var(data.X, axis=0)
    if isinstance(scorer, LinearScorer):
        g_sq = scorer.w ** 2  # constant gradient
    else:
        grads = np.array([gradient_at(scorer, x) for x in data.X])
        g_sq = (grads ** 2).mean(axis=0)
    return [float(v) for v in np.sqrt(g_sq * var)]


def firm_regression_closed_form(X: np.ndarray, y: np.ndarray, model: GaussianModel,
                                names: Sequence[str] | None = None) -> list[FirmResult]:
    """Importance of the unregularized regression fit, without training it.

    Q = D^-1 S (X'X)^-1 X'y. With the model covariance set to X'X/n this
    collapses to Q = D^-1 X'y / n, the infinite-data limit. The implied
    regression has no intercept, so pass column-centered X when comparing
    against an intercept-fitting trainer.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    n, d = X.shape
    if y.size != n:
        raise FirmError("label vector length does not match row count")
    if d != model.d:
        raise FirmError("data dimension does not match model")
    sigma = model.sigma.sigma
    var = _check_variances(sigma)
    G = X.T @ X
    if np.linalg.matrix_rank(G) < d:
        raise FirmError("singular empirical covariance; cannot invert X'X")
    q = (sigma @ np.linalg.solve(G, X.T @ y)) / np.sqrt(var)
    labels = _names(names, d)
    return [FirmResult(feature=labels[j], q_signed=float(q[j]),
                       q_abs=abs(float(q[j])), method="regression_closed_form")
            for j in range(d)]
