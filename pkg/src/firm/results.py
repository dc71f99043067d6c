"""Common result record for all importance computations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple


class BinaryStats(NamedTuple):
    """Conditional statistics of a binary feature.

    `a` is the larger of the two feature values, so the sign of
    ``(q_a - q_b) * sqrt(p_a * p_b)`` is deterministic.
    """

    q_a: float
    q_b: float
    p_a: float
    p_b: float


@dataclass(frozen=True)
class FirmResult:
    """Importance of one feature.

    q_signed carries the direction of the feature's effect on the score;
    q_abs = |q_signed| is the importance used for ranking. `extras` is
    populated by the binary paths with the conditional means and value
    probabilities that produced the number.
    """

    feature: str
    q_signed: float
    q_abs: float
    method: str
    extras: BinaryStats | None = None

    def __post_init__(self):
        if abs(self.q_abs - abs(self.q_signed)) > 1e-12 * max(1.0, abs(self.q_signed)):
            raise ValueError("q_abs must equal |q_signed|")
