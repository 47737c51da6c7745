"""Generate the bundled German-Credit-shaped synthetic file.

Deterministic (seed below). Matches the documented marginals of the public
dataset where they matter to the test suite: 1000 rows, 700/300 outcome
split, code A95 never occurring (so the personal-status partition has four
observed groups), A47 never occurring, median age 33. The outcome is a
noisy logistic function of the features with planted monotone directions:
higher credit amount, longer duration, and higher age all lower the
good-risk probability, and age correlates with credit amount so age acts
as a genuine confounder of the credit -> risk relationship.

Usage: python tools/make_german_synthetic.py [dest]
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

SEED = 20240901
N = 1000

# per-column value counts (sum to N); outcome is generated, not listed
CATEGORICAL_COUNTS = {
    "Status of existing checking account": {
        "A11": 274, "A12": 269, "A13": 63, "A14": 394,
    },
    "Credit history": {"A30": 40, "A31": 49, "A32": 530, "A33": 88, "A34": 293},
    "Purpose": {
        "A40": 234, "A41": 103, "A42": 181, "A43": 280, "A44": 12, "A45": 22,
        "A46": 50, "A48": 9, "A49": 97, "A410": 12,
    },
    "Savings account/bonds": {"A61": 603, "A62": 103, "A63": 63, "A64": 48, "A65": 183},
    "Present employment since": {"A71": 62, "A72": 172, "A73": 339, "A74": 174, "A75": 253},
    "Installment rate in percentage of disposable income": {
        "1": 136, "2": 231, "3": 157, "4": 476,
    },
    "Personal status and sex": {"A91": 50, "A92": 310, "A93": 548, "A94": 92},
    "Other debtors / guarantors": {"A101": 907, "A102": 41, "A103": 52},
    "Present residence since": {"1": 130, "2": 308, "3": 149, "4": 413},
    "Property": {"A121": 282, "A122": 232, "A123": 332, "A124": 154},
    "Other installment plans": {"A141": 139, "A142": 47, "A143": 814},
    "Housing": {"A151": 179, "A152": 713, "A153": 108},
    "Number of existing credits at this bank": {"1": 633, "2": 333, "3": 28, "4": 6},
    "Job": {"A171": 22, "A172": 200, "A173": 630, "A174": 148},
    "Number of people being liable to provide maintenance for": {"1": 845, "2": 155},
    "Telephone": {"A191": 596, "A192": 404},
    "foreign worker": {"A201": 963, "A202": 37},
}

COLUMN_ORDER = [
    "Status of existing checking account", "Duration in month", "Credit history",
    "Purpose", "Credit amount", "Savings account/bonds", "Present employment since",
    "Installment rate in percentage of disposable income", "Personal status and sex",
    "Other debtors / guarantors", "Present residence since", "Property", "Age in years",
    "Other installment plans", "Housing", "Number of existing credits at this bank",
    "Job", "Number of people being liable to provide maintenance for", "Telephone",
    "foreign worker", "Cost Matrix(Risk)",
]


def _column_from_counts(rng, counts: dict) -> np.ndarray:
    values = []
    for code, cnt in counts.items():
        values.extend([code] * cnt)
    total = len(values)
    if total != N:  # pad or trim on the largest bucket
        largest = max(counts, key=counts.get)
        if total < N:
            values.extend([largest] * (N - total))
        else:
            removed = 0
            out = []
            for v in values:
                if v == largest and removed < total - N:
                    removed += 1
                    continue
                out.append(v)
            values = out
    arr = np.array(values)
    rng.shuffle(arr)
    return arr


def generate() -> list[str]:
    rng = np.random.default_rng(SEED)
    cols = {name: _column_from_counts(rng, counts)
            for name, counts in CATEGORICAL_COUNTS.items()}

    # age: right-skewed, clipped to 19..75, median pinned to 33
    age = 19 + rng.gamma(shape=2.4, scale=6.5, size=N)
    age = np.clip(np.round(age), 19, 75)
    age += 33 - np.median(age)
    age = np.clip(np.round(age), 19, 75).astype(int)

    # credit amount: lognormal, mildly increasing with age (confounding path)
    z_age = (age - age.mean()) / age.std()
    credit = np.exp(7.6 + 0.55 * rng.normal(size=N) + 0.25 * z_age)
    credit = np.clip(np.round(credit), 250, 18424).astype(int)

    # duration: correlated with credit size, typical month grid
    z_credit = (np.log(credit) - np.log(credit).mean()) / np.log(credit).std()
    duration = 4 + np.round(17 + 8 * z_credit + 6 * rng.normal(size=N))
    duration = np.clip(duration, 4, 72).astype(int)

    # outcome: planted monotone directions + categorical effects + noise
    z_dur = (duration - duration.mean()) / duration.std()
    chk = cols["Status of existing checking account"]
    sav = cols["Savings account/bonds"]
    hist = cols["Credit history"]
    logit = (
        1.35
        - 0.85 * z_credit
        - 0.55 * z_dur
        - 0.50 * z_age
        + np.where(chk == "A14", 0.8, 0.0)
        + np.where(chk == "A11", -0.7, 0.0)
        + np.where(np.isin(sav, ("A64", "A65")), 0.45, 0.0)
        + np.where(hist == "A34", 0.5, 0.0)
        + np.where(hist == "A30", -0.6, 0.0)
        + 0.6 * rng.normal(size=N)
    )
    p_good = 1.0 / (1.0 + np.exp(-logit))
    good = rng.random(N) < p_good
    # pin the class balance at exactly 700/300 by flipping borderline rows
    excess = int(good.sum()) - 700
    if excess > 0:
        candidates = np.nonzero(good)[0]
        flip = candidates[np.argsort(p_good[candidates])][:excess]
        good[flip] = False
    elif excess < 0:
        candidates = np.nonzero(~good)[0]
        flip = candidates[np.argsort(-p_good[candidates])][:-excess]
        good[flip] = True
    outcome = np.where(good, "1", "2")

    cols["Age in years"] = age.astype(str)
    cols["Credit amount"] = credit.astype(str)
    cols["Duration in month"] = duration.astype(str)
    cols["Cost Matrix(Risk)"] = outcome
    lines = []
    for i in range(N):
        lines.append(" ".join(str(cols[c][i]) for c in COLUMN_ORDER))
    return lines


def main():
    dest = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "hxai" / "data" / "german_synthetic.data"
    )
    dest.parent.mkdir(parents=True, exist_ok=True)
    lines = generate()
    dest.write_text("\n".join(lines) + "\n")
    good = sum(1 for ln in lines if ln.rsplit(" ", 1)[1] == "1")
    print(f"wrote {dest} ({len(lines)} rows, {good} good / {len(lines) - good} bad)")


if __name__ == "__main__":
    main()
