"""Propensity score matching: 1:1 nearest neighbor on the propensity logit."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import AllRowsOneArm, NoMatchesWithinCaliper
from ..models.logistic import LogisticConfig, train_logistic
from ..tabular import Column, Dataset, FeatureSchema


@dataclass
class MatchConfig:
    caliper_mult: float = 0.2
    with_replacement: bool = True


@dataclass
class MatchResult:
    pairs: list = field(default_factory=list)        # (treated_row, control_row)
    unmatched_treated: list = field(default_factory=list)
    propensity: np.ndarray | None = None
    logit: np.ndarray | None = None
    caliper: float = 0.0

    @property
    def match_rate(self) -> float:
        total = len(self.pairs) + len(self.unmatched_treated)
        return len(self.pairs) / total if total else 0.0


def _covariate_dataset(dataset: Dataset, treatment_flag: np.ndarray,
                       covariates: list[str]) -> Dataset:
    schema = [dataset.feature(c) for c in covariates]
    cols = {c: dataset.columns[c] for c in covariates}
    flag_schema = FeatureSchema(name="__treated__", kind="binary")
    cols["__treated__"] = Column(treatment_flag.astype(float), np.zeros(len(treatment_flag), bool))
    return Dataset(schema + [flag_schema], cols, outcome_name="__treated__")


def fit_propensity_and_match(dataset: Dataset, treatment_flag, covariates: list[str],
                             config: MatchConfig | None = None) -> MatchResult:
    """Logistic propensity on the covariates, then greedy 1:1 matching.

    Matching runs on logit(propensity) with caliper = caliper_mult * SD(logit).
    Ties break toward the lowest control row index; treated rows beyond the
    caliper are reported unmatched.
    """
    config = config or MatchConfig()
    flag = np.asarray(treatment_flag, dtype=float)
    if set(np.unique(flag).tolist()) - {0.0, 1.0}:
        raise AllRowsOneArm("treatment flag must be binary 0/1")
    n_treated = int(flag.sum())
    if n_treated == 0 or n_treated == len(flag):
        raise AllRowsOneArm(
            f"{n_treated} treated of {len(flag)} rows leaves an empty arm"
        )
    prop_data = _covariate_dataset(dataset, flag, covariates)
    model = train_logistic(prop_data, "__treated__",
                           LogisticConfig(l2=1e-3, max_iter=200, tol=1e-8))
    p = np.clip(model.predict(prop_data), 1e-9, 1 - 1e-9)
    logit = np.log(p / (1 - p))
    sd = float(logit.std(ddof=1)) if len(logit) > 1 else 0.0
    caliper = config.caliper_mult * sd
    treated_rows = np.nonzero(flag == 1.0)[0]
    control_rows = np.nonzero(flag == 0.0)[0]
    control_logit = logit[control_rows]
    order = np.argsort(control_logit, kind="mergesort")
    sorted_logit = control_logit[order]
    sorted_rows = control_rows[order]

    pairs = []
    unmatched = []
    used = np.zeros(len(sorted_rows), dtype=bool)
    for t_row in treated_rows:
        lt = logit[t_row]
        k = _nearest(sorted_logit, sorted_rows, lt, used, config.with_replacement)
        if k is None or abs(sorted_logit[k] - lt) > caliper:
            unmatched.append(int(t_row))
            continue
        pairs.append((int(t_row), int(sorted_rows[k])))
        if not config.with_replacement:
            used[k] = True
    if not pairs:
        raise NoMatchesWithinCaliper(
            f"no treated row found a control within caliper {caliper:.6g}"
        )
    return MatchResult(pairs=pairs, unmatched_treated=unmatched,
                       propensity=p, logit=logit, caliper=caliper)


def _nearest(sorted_logit, sorted_rows, value, used, with_replacement):
    """Index into the sorted control arrays of the closest usable control.

    Among equal distances prefers the lower original row index.
    """
    n = len(sorted_logit)
    pos = int(np.searchsorted(sorted_logit, value))
    best = None
    best_dist = np.inf
    best_row = -1
    lo, hi = pos - 1, pos
    while lo >= 0 or hi < n:
        for k in (lo, hi):
            if k < 0 or k >= n or k == lo == hi:
                continue
            if not with_replacement and used[k]:
                continue
            d = abs(float(sorted_logit[k]) - value)
            if d < best_dist or (d == best_dist and sorted_rows[k] < best_row):
                best, best_dist, best_row = k, d, int(sorted_rows[k])
        lo_done = lo < 0 or abs(float(sorted_logit[lo]) - value) > best_dist
        hi_done = hi >= n or abs(float(sorted_logit[hi]) - value) > best_dist
        if best is not None and lo_done and hi_done:
            break
        lo -= 1
        hi += 1
    return best
