"""Finite information calculus in nats.

Event information from probabilities, the entropy set of a joint table
(marginal, joint, conditional, mutual), and conservation of entropy under
bijective relabelings versus strict loss under merges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NumericFailure, ValidationError

__all__ = [
    "LN2",
    "InfoEvent",
    "JointDistribution",
    "EntropySet",
    "info_measure",
    "nats_to_bits",
    "shannon_entropy",
    "mutual_information",
    "entropies",
    "transform_conservation_check",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class InfoEvent:
    """An observed outcome of probability p; information is -ln p."""

    p: float

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise ValidationError(f"event probability must lie in (0, 1], got {self.p}")


def info_measure(event: InfoEvent) -> float:
    return -math.log(event.p)


def nats_to_bits(nats: float) -> float:
    return nats / LN2


@dataclass(frozen=True)
class JointDistribution:
    """Nonnegative table over a finite X x Y grid, normalized to 1."""

    table: np.ndarray

    def __post_init__(self):
        arr = np.array(self.table, dtype=float)
        if arr.ndim != 2 or arr.size == 0:
            raise ValidationError("joint table must be a nonempty 2-D array")
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValidationError("joint table entries must be finite and nonnegative")
        if abs(arr.sum() - 1.0) > 1e-12:
            raise ValidationError(f"joint table sums to {arr.sum()}, not 1 within 1e-12")
        arr.setflags(write=False)
        object.__setattr__(self, "table", arr)

    def marginal_x(self) -> np.ndarray:
        return self.table.sum(axis=1)

    def marginal_y(self) -> np.ndarray:
        return self.table.sum(axis=0)


def shannon_entropy(probs) -> float:
    """-sum p ln p with 0 ln 0 := 0.

    Terms are accumulated in sorted order, so the value is invariant under
    any permutation of the probabilities (bit-exact, not just approximate).
    """
    arr = np.asarray(probs, dtype=float).ravel()
    if np.any(arr < 0):
        raise ValidationError("probabilities must be nonnegative")
    arr = arr[arr > 0]
    if arr.size == 0:
        return 0.0
    terms = np.sort(arr * np.log(arr))
    return float(-terms.sum())


class EntropySet(NamedTuple):
    h_x: float
    h_y: float
    h_xy: float
    h_x_given_y: float
    h_mutual: float


def _clip_dust(value: float) -> float:
    if value < -1e-9:
        raise NumericFailure(f"entropy quantity {value} is negative beyond numerical dust")
    return max(0.0, value)


def mutual_information(joint: JointDistribution) -> float:
    """sum P(x,y) ln[P(x,y)/(P(x)P(y))]; zero iff X and Y are independent."""
    p = joint.table
    px = joint.marginal_x()[:, None]
    py = joint.marginal_y()[None, :]
    mask = p > 0
    ratio = p[mask] / (px * py + (~mask))[mask]
    return _clip_dust(float(np.sum(p[mask] * np.log(ratio))))


def entropies(joint: JointDistribution) -> EntropySet:
    """Marginal, joint, conditional, and mutual entropies of a joint table.

    Each quantity is summed directly from its own formula, so the chain
    rule H(X,Y) = H(Y) + H(X|Y) is a genuine consistency check.
    """
    p = joint.table
    h_x = shannon_entropy(joint.marginal_x())
    h_y = shannon_entropy(joint.marginal_y())
    h_xy = shannon_entropy(p)
    py = joint.marginal_y()[None, :]
    mask = p > 0
    cond = p[mask] / (py + (~mask))[mask]
    h_x_given_y = _clip_dust(float(-np.sum(p[mask] * np.log(cond))))
    return EntropySet(h_x, h_y, h_xy, h_x_given_y, mutual_information(joint))


def transform_conservation_check(dist, mapping: Sequence[int]) -> tuple[float, float]:
    """Entropy before and after pushing a distribution through a mapping.

    Bijective relabelings (on the support) conserve entropy exactly;
    merging outcomes can only lower it.
    """
    p = np.asarray(dist, dtype=float).ravel()
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValidationError("distribution must be nonnegative and normalized")
    targets = np.asarray(mapping, dtype=int)
    if targets.shape != p.shape:
        raise ValidationError("mapping must assign a target to every outcome")
    if targets.min() < 0:
        raise ValidationError("mapping targets must be nonnegative indices")
    pushed = np.zeros(targets.max() + 1)
    np.add.at(pushed, targets, p)
    return shannon_entropy(p), shannon_entropy(pushed)
