"""Generate the bundled synthetic daily-close stock file.

Six tickers across three sectors, 260 business days starting 2023-03-28,
geometric random walks with per-company drift/volatility/level. Deterministic.

Usage: python tools/make_stocks_synthetic.py [dest]
"""

from __future__ import annotations

import sys
from datetime import date, timedelta
from pathlib import Path

import numpy as np

SEED = 20240902
N_DAYS = 260
START = date(2023, 3, 28)

COMPANIES = {
    # name: (start level, daily drift, daily volatility)
    "META": (205.0, 0.0022, 0.016),
    "GOO": (101.0, 0.0012, 0.013),
    "PFE": (40.5, -0.0011, 0.010),
    "MRK": (106.0, 0.0006, 0.009),
    "WFC": (37.5, 0.0009, 0.012),
    "C": (46.0, 0.0004, 0.012),
}


def business_days(start: date, count: int) -> list[date]:
    out = []
    d = start
    while len(out) < count:
        if d.weekday() < 5:
            out.append(d)
        d += timedelta(days=1)
    return out


def main():
    dest = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "hxai" / "data" / "stocks_synthetic.csv"
    )
    dest.parent.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    days = business_days(START, N_DAYS)
    lines = ["date,close,company"]
    for name, (level, drift, vol) in COMPANIES.items():
        steps = rng.normal(loc=drift, scale=vol, size=N_DAYS - 1)
        prices = level * np.exp(np.concatenate([[0.0], np.cumsum(steps)]))
        for d, p in zip(days, prices):
            lines.append(f"{d.isoformat()},{p:.2f},{name}")
    dest.write_text("\n".join(lines) + "\n")
    print(f"wrote {dest} ({len(lines) - 1} rows, {len(COMPANIES)} companies x {N_DAYS} days)")


if __name__ == "__main__":
    main()
