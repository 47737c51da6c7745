"""Weighted rejection score: weighted count of pairwise t-test rejections.

For every pair of protected groups and every (confidence, weight) level, a
two-sided Welch rejection (|t| > t_crit) adds the level's weight. Pairs are
reduced in sorted label order so the score is bit-stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import math

import numpy as np

from ..errors import GroupTooSmall, SchemaError
from ..tabular import GroupPartition
from .ttest import t_critical, welch_t_test

DEFAULT_LEVELS = ((0.95, 1.0), (0.75, 0.8), (0.60, 0.6))


@dataclass
class WrsConfig:
    levels: tuple = DEFAULT_LEVELS

    def __post_init__(self):
        confs = [c for c, _ in self.levels]
        weights = [w for _, w in self.levels]
        if not confs:
            raise SchemaError("WRS needs at least one confidence level")
        if any(not 0 < c < 1 for c in confs):
            raise SchemaError("confidences must lie in (0, 1)")
        if any(c2 >= c1 for c1, c2 in zip(confs, confs[1:])):
            raise SchemaError("confidences must be strictly decreasing")
        if any(w <= 0 for w in weights):
            raise SchemaError("weights must be positive")
        if any(w2 > w1 for w1, w2 in zip(weights, weights[1:])):
            raise SchemaError("weights must be non-increasing")
        self.levels = tuple((float(c), float(w)) for c, w in self.levels)

    @property
    def max_per_pair(self) -> float:
        return sum(w for _, w in self.levels)

    def to_json(self) -> dict:
        return {"levels": [list(l) for l in self.levels]}

    @classmethod
    def from_json(cls, obj: dict) -> "WrsConfig":
        levels = obj.get("levels")
        return cls(tuple(tuple(l) for l in levels)) if levels else cls()


@dataclass
class WrsBreakdown:
    score: float
    pairs: list = field(default_factory=list)  # (label_a, label_b, t, dof, rejected levels)


def compute_wrs(outcomes, partition: GroupPartition, config: WrsConfig | None = None,
                detailed: bool = False):
    """psi = sum over group pairs and levels of weight * 1[|t| > t_crit]."""
    config = config or WrsConfig()
    values = np.asarray(outcomes, dtype=float)
    samples = {}
    for label in partition.labels:
        idx = partition.groups[label]
        vals = values[idx]
        vals = vals[np.isfinite(vals)]
        if len(vals) < 2:
            raise GroupTooSmall(
                f"group {label!r} has {len(vals)} usable outcomes; need >= 2"
            )
        samples[label] = vals
    # psi = sum_i w_i * x_i with x_i the integer rejection count at level i;
    # weighting the counts (not accumulating per pair) keeps the score exactly
    # invariant under group relabeling
    counts = [0] * len(config.levels)
    breakdown = []
    for la, lb in combinations(partition.labels, 2):
        res = welch_t_test(samples[la], samples[lb])
        rejected = []
        for i, (conf, weight) in enumerate(config.levels):
            crit = t_critical(conf, res.dof) if math.isfinite(res.t) else 0.0
            if abs(res.t) > crit:
                counts[i] += 1
                rejected.append(conf)
        breakdown.append((la, lb, res.t, res.dof, rejected))
    psi = float(sum(w * x for (_, w), x in zip(config.levels, counts)))
    if detailed:
        return WrsBreakdown(score=psi, pairs=breakdown)
    return psi
