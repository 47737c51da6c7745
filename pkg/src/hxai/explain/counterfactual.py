"""Counterfactual search: smallest MAD-weighted L1 change flipping a decision.

Greedy coordinate moves (numeric steps of step_frac x observed range,
categorical swaps) climb toward the target class; once flipped, each changed
numeric feature is line-searched back toward its original value so the
result sits on the decision boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import AlreadyTargetClass, NoMutableFeatures
from ..tabular import Column, Dataset, MISSING


@dataclass
class CfConfig:
    step_frac: float = 0.05
    max_iter: int = 500
    lam: float = 1.0
    threshold: float = 0.5
    mutable_only: list[str] | None = None  # additional restriction on top of schema flags
    shrink_tol: float = 0.02               # relative tolerance of the boundary line-search


@dataclass
class CounterfactualResult:
    x_cf: dict
    target: int
    distance: float
    changed_features: list[str]
    found: bool
    n_evals: int = 0
    trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "x_cf": {k: (None if v is MISSING else v) for k, v in self.x_cf.items()},
            "target": self.target,
            "distance": self.distance,
            "changed_features": self.changed_features,
            "found": self.found,
            "n_evals": self.n_evals,
        }


def _mad(values: np.ndarray) -> float:
    med = np.median(values)
    mad = float(np.median(np.abs(values - med)))
    if mad > 0:
        return mad
    sd = float(values.std())
    return sd if sd > 0 else 1.0


class _RowScorer:
    """Scores candidate rows in the dataset's schema without rebuilding it."""

    def __init__(self, model, dataset: Dataset, row: int):
        self.model = model
        self.dataset = dataset
        self.row = row
        self.n_evals = 0

    def prob(self, overrides: dict) -> float:
        ds = self.dataset.take([self.row])
        for name, value in overrides.items():
            f = ds.feature(name)
            if f.kind == "categorical":
                code = f.categories.index(value)
                ds = ds.with_column(name, Column(np.array([code], dtype=np.int64),
                                                 np.zeros(1, bool)))
            else:
                ds = ds.with_column(name, Column(np.array([float(value)]),
                                                 np.zeros(1, bool)))
        self.n_evals += 1
        return float(self.model.predict(ds)[0])


def find_counterfactual(model, dataset: Dataset, row: int, target_class: int,
                        config: CfConfig | None = None) -> CounterfactualResult:
    config = config or CfConfig()
    target = int(target_class)
    scorer = _RowScorer(model, dataset, row)
    p0 = scorer.prob({})
    if _is_target(p0, target, config.threshold):
        raise AlreadyTargetClass(
            f"row {row} already classifies as {target} (p={p0:.3f})"
        )

    original = dataset.row_dict(row)
    mutable = []
    for f in dataset.schema:
        if f.name == dataset.outcome_name or not f.mutable:
            continue
        if config.mutable_only is not None and f.name not in config.mutable_only:
            continue
        if original[f.name] is MISSING:
            continue
        mutable.append(f)
    if not mutable:
        raise NoMutableFeatures("no mutable features available for the search")

    stats = {}
    for f in mutable:
        if f.kind == "categorical":
            stats[f.name] = {"mad": 1.0}
        else:
            vals = dataset.numeric(f.name)
            vals = vals[~np.isnan(vals)]
            rng = float(vals.max() - vals.min())
            stats[f.name] = {
                "mad": _mad(vals),
                "step": max(config.step_frac * rng, 1e-9),
                "lo": float(vals.min()),
                "hi": float(vals.max()),
            }

    def distance(x: dict) -> float:
        d = 0.0
        for f in mutable:
            if f.kind == "categorical":
                d += 0.0 if x[f.name] == original[f.name] else 1.0
            else:
                d += abs(float(x[f.name]) - float(original[f.name])) / stats[f.name]["mad"]
        return d

    current = dict(original)
    p_cur = p0
    for _ in range(config.max_iter):
        if _is_target(p_cur, target, config.threshold):
            break
        best_move = None
        best_score = -np.inf
        for f in mutable:
            for cand in _candidates(f, current[f.name], stats.get(f.name, {})):
                p = scorer.prob({**_diff(current, original), f.name: cand})
                gain = (p - p_cur) if target == 1 else (p_cur - p)
                step_cost = _move_cost(f, current[f.name], cand, stats[f.name], config.lam)
                score = gain / (step_cost + 1e-9)
                if score > best_score:
                    best_score = score
                    best_move = (f.name, cand, p)
        if best_move is None or best_score <= 0:
            break
        current[best_move[0]] = best_move[1]
        p_cur = best_move[2]
    found = _is_target(p_cur, target, config.threshold)

    if found:
        current = _shrink(scorer, current, original, mutable, stats, target, config)

    changed = [f.name for f in mutable if current[f.name] != original[f.name]]
    return CounterfactualResult(
        x_cf=current, target=target, distance=distance(current),
        changed_features=changed, found=found, n_evals=scorer.n_evals,
    )


def _is_target(p: float, target: int, threshold: float) -> bool:
    label = 1 if p >= threshold else 0
    return label == target


def _diff(current: dict, original: dict) -> dict:
    return {k: v for k, v in current.items() if original[k] != v}


def _candidates(f, value, st):
    if f.kind == "categorical":
        return [c for c in f.categories if c != value]
    step = st["step"]
    lo, hi = st["lo"], st["hi"]
    out = []
    # geometric step ladder so flat score plateaus (trees, hard thresholds)
    # can still be crossed; the shrink pass restores minimality afterwards
    for mult in (1, 2, 4, 8, 16):
        up = min(float(value) + mult * step, hi)
        down = max(float(value) - mult * step, lo)
        if up != value and up not in out:
            out.append(up)
        if down != value and down not in out:
            out.append(down)
    return out


def _move_cost(f, old, new, st, lam):
    if f.kind == "categorical":
        return lam
    return lam * abs(float(new) - float(old)) / st["mad"]


def _shrink(scorer, current, original, mutable, stats, target, config):
    """Per changed feature, binary-search the smallest change keeping the flip."""
    threshold = config.threshold
    ordered = sorted(
        (f for f in mutable if f.kind != "categorical" and current[f.name] != original[f.name]),
        key=lambda f: -abs(float(current[f.name]) - float(original[f.name])) / stats[f.name]["mad"],
    )
    for f in ordered:
        x_cf = float(current[f.name])
        x_orig = float(original[f.name])
        # can the feature revert completely?
        trial = dict(current)
        trial[f.name] = x_orig
        if _is_target(scorer.prob(_diff(trial, original)), target, threshold):
            current[f.name] = x_orig
            continue
        lo, hi = x_orig, x_cf  # lo loses the target, hi keeps it
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            trial[f.name] = mid
            if _is_target(scorer.prob(_diff(trial, original)), target, threshold):
                hi = mid
            else:
                lo = mid
            # gap small relative to the REMAINING change, so backing off a few
            # percent of the final change is guaranteed to cross the boundary
            if abs(hi - lo) <= max(config.shrink_tol * abs(hi - x_orig), 1e-12):
                break
        current[f.name] = hi
    return current
