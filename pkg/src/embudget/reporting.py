"""Summary statistics, emissions cost, and coarse time aggregation of reports."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Sequence

from .carbon import WS_PER_KWH, coefficient_of_variation
from .engine import SimulationReport

DEFAULT_PRICES_EUR_PER_TON = (80.0, 150.0, 700.0)
SIX_HOURS = 21_600


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class SummaryRow:
    """One scenario's summary in the shape of the results table."""

    label: str
    power_mean_w: float
    power_median_w: float
    energy_kwh: float
    emissions_mean_mg: float
    emissions_median_mg: float
    emissions_total_kg: float
    costs_eur: tuple[tuple[float, float], ...]  # (price EUR/t, cost EUR), price ascending
    finished_tasks: int


def emission_cost_eur(total_kg: float, price_eur_per_ton: float) -> float:
    """Cost of emissions at a carbon price; full precision, rounding is display-only."""
    return total_kg / 1000.0 * price_eur_per_ton


def summarize(report: SimulationReport,
              prices: Sequence[float] = DEFAULT_PRICES_EUR_PER_TON) -> SummaryRow:
    """Mean/median/total statistics over every horizon step, suspended steps included."""
    if report.horizon == 0 or len(report.power_w) == 0:
        raise ReportError("cannot summarize an empty report")
    power = report.power_w
    emission = report.emission_g
    n = len(power)
    total_g = math.fsum(emission)
    total_kg = total_g / 1000.0
    ordered_prices = sorted(prices)
    return SummaryRow(
        label=report.label,
        power_mean_w=math.fsum(power) / n,
        power_median_w=statistics.median(power),
        energy_kwh=math.fsum(power) / WS_PER_KWH,
        emissions_mean_mg=total_g / n * 1000.0,
        emissions_median_mg=statistics.median(emission) * 1000.0,
        emissions_total_kg=total_kg,
        costs_eur=tuple((p, emission_cost_eur(total_kg, p)) for p in ordered_prices),
        finished_tasks=report.finished_tasks,
    )


def aggregate(series: Sequence[float], bucket: int, mode: str = "sum") -> list[float]:
    """Bucket a per-second series into sums or means; the last bucket may be partial."""
    if bucket <= 0:
        raise ReportError(f"bucket must be positive, got {bucket}")
    if mode not in ("sum", "mean"):
        raise ReportError(f"mode must be 'sum' or 'mean', got {mode!r}")
    out = []
    n = len(series)
    for start in range(0, n, bucket):
        chunk = series[start:start + bucket]
        total = math.fsum(chunk)
        out.append(total if mode == "sum" else total / len(chunk))
    return out


def trace_cv(report: SimulationReport) -> float:
    """Variability of the scenario's carbon intensity window (population CV)."""
    return coefficient_of_variation(report.trace_values)


def summary_csv(rows: Sequence[SummaryRow]) -> str:
    """Results-table-shaped CSV, one row per scenario."""
    if not rows:
        raise ReportError("no summary rows")
    prices = [p for p, _ in rows[0].costs_eur]
    header = (
        ["scenario", "power_mean_w", "power_median_w", "energy_kwh",
         "emissions_mean_mg", "emissions_median_mg", "emissions_total_kg"]
        + [f"cost_eur_{p:g}" for p in prices]
        + ["finished_tasks"]
    )
    lines = [",".join(header)]
    for row in rows:
        cells = [
            row.label,
            f"{row.power_mean_w:.2f}",
            f"{row.power_median_w:.2f}",
            f"{row.energy_kwh:.2f}",
            f"{row.emissions_mean_mg:.2f}",
            f"{row.emissions_median_mg:.2f}",
            f"{row.emissions_total_kg:.2f}",
        ]
        cells += [f"{cost:.2f}" for _, cost in row.costs_eur]
        cells.append(str(row.finished_tasks))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def steps_csv(report: SimulationReport) -> str:
    """Per-step CSV of a single scenario (one row per simulation second)."""
    lines = ["t,action,node,power_w,emission_g,allowance_g,completions,drops"]
    action_names = ("scale", "migrate", "suspend")
    node_names = report.node_names
    power = report.power_w
    emission = report.emission_g
    allowance = report.allowance_g
    completions = report.completions
    drops = report.drops
    action = report.action
    node_idx = report.node_index
    for t in range(report.horizon):
        idx = node_idx[t]
        lines.append(
            f"{t},{action_names[action[t]]},{node_names[idx] if idx >= 0 else ''},"
            f"{power[t]:.6f},{emission[t]:.9g},{allowance[t]:.9g},"
            f"{completions[t]},{drops[t]}"
        )
    return "\n".join(lines) + "\n"


def buckets_csv(report: SimulationReport, bucket: int = SIX_HOURS) -> str:
    """Plot-ready aggregates: summed completions/emissions and mean power per bucket."""
    completions = aggregate(report.completions, bucket, "sum")
    emissions = aggregate(report.emission_g, bucket, "sum")
    emission_means = aggregate(report.emission_g, bucket, "mean")
    power_means = aggregate(report.power_w, bucket, "mean")
    lines = ["bucket_start_s,completions_sum,emission_sum_g,emission_mean_g,power_mean_w"]
    for i in range(len(completions)):
        lines.append(
            f"{i * bucket},{completions[i]:.0f},{emissions[i]:.9g},"
            f"{emission_means[i]:.9g},{power_means[i]:.6f}"
        )
    return "\n".join(lines) + "\n"
