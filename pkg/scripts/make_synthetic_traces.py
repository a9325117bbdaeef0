#!/usr/bin/env python3
"""Regenerate the bundled synthetic carbon-intensity traces.

The shapes mimic three grid archetypes: a volatile renewables-heavy grid
(de_synthetic), a low-intensity low-variability grid (fr_synthetic), and a
high-intensity low-variability grid (pl_synthetic). They are deterministic
sinusoid mixes, clearly synthetic, and not derived from any vendor data.
"""

import math
from datetime import datetime, timedelta, timezone
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "embudget" / "data" / "traces"
HOURS = 336  # two weeks, hourly
START = datetime(2024, 1, 1, tzinfo=timezone.utc)

TWO_PI = 2.0 * math.pi


def de_like(h: float) -> float:
    # Deep diurnal solar swing plus a slow weekly drift; high CV.
    ci = 360.0 + 260.0 * math.sin(TWO_PI * (h - 14.0) / 24.0) + 70.0 * math.sin(TWO_PI * h / 168.0 + 1.0)
    return max(ci, 30.0)


def fr_like(h: float) -> float:
    # Low intensity, small ripple; low CV.
    return 30.0 + 8.0 * math.sin(TWO_PI * (h - 3.0) / 24.0) + 3.0 * math.sin(TWO_PI * h / 168.0)


def pl_like(h: float) -> float:
    # High intensity, small ripple; low CV.
    return 750.0 + 60.0 * math.sin(TWO_PI * (h - 2.0) / 24.0) + 20.0 * math.sin(TWO_PI * h / 168.0)


def write(name: str, fn) -> None:
    lines = ["timestamp,ci_g_per_kwh"]
    for h in range(HOURS):
        ts = (START + timedelta(hours=h)).strftime("%Y-%m-%dT%H:%M:%SZ")
        lines.append(f"{ts},{fn(float(h)):.2f}")
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / name).write_text("\n".join(lines) + "\n")
    print(f"wrote {OUT / name}")


if __name__ == "__main__":
    write("de_synthetic.csv", de_like)
    write("fr_synthetic.csv", fr_like)
    write("pl_synthetic.csv", pl_like)
