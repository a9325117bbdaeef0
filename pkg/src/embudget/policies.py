"""Plan-phase policies: map budget state, migration targets, and demand to actions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .budget import BudgetState
from .cluster import MigrationTargetSet, Node, NodeSpec

# Migrations with equal served CU must save at least this fraction of current
# power, otherwise the application stays put (hysteresis against thrashing).
MIGRATION_SAVING_FRACTION = 0.01

_SERVED_EPS = 1e-9


class ActionKind(enum.Enum):
    SCALE = "scale"
    MIGRATE = "migrate"
    SUSPEND = "suspend"
    NO_ACTION = "no_action"


@dataclass(frozen=True)
class PolicyAction:
    kind: ActionKind
    target_utilization: float = 0.0
    node: str | None = None

    @classmethod
    def scale(cls, utilization: float) -> "PolicyAction":
        return cls(ActionKind.SCALE, utilization)

    @classmethod
    def migrate(cls, node: str, utilization: float) -> "PolicyAction":
        return cls(ActionKind.MIGRATE, utilization, node)

    @classmethod
    def suspend(cls) -> "PolicyAction":
        return cls(ActionKind.SUSPEND)

    @classmethod
    def no_action(cls) -> "PolicyAction":
        return cls(ActionKind.NO_ACTION)


@dataclass(frozen=True)
class PolicyInput:
    """Analyze-phase outputs fed to a policy for one control step."""

    budget_state: BudgetState | None
    allowance: float            # grams spendable this second (inf when unconstrained)
    migration_targets: MigrationTargetSet
    demand: float               # queued CU demand this step
    current_node: Node | None   # None while suspended
    intensity_ws: float         # g CO2eq per watt-second

    def __post_init__(self) -> None:
        if self.allowance < 0:
            raise ValueError(f"negative allowance {self.allowance}")
        if self.demand < 0:
            raise ValueError(f"negative demand {self.demand}")


def choose_option(specs: Sequence[NodeSpec], current_index: int | None,
                  demand: float, power_cap: float) -> tuple[int | None, float]:
    """Pick the node and utilization serving the most CU under a power cap.

    Candidates are the current node plus every alternative in `specs`. Objective:
    maximize served CU, then minimize power; remaining ties prefer the smaller
    capacity, then the lexically smaller name. A migration that merely matches
    the current node's served CU must also beat its power by more than the
    hysteresis margin. Returns (index, utilization), or (None, 0.0) when not
    even idle power fits under the cap anywhere (suspend).
    """
    best = None  # (index, u, served, power, capacity, name)
    current = None
    for i, spec in enumerate(specs):
        idle = spec.idle_power
        span = spec.peak_power - idle
        if power_cap == math.inf:
            u_cap = 1.0
        elif power_cap < idle:
            continue
        else:
            u_cap = (power_cap - idle) / span
            if u_cap > 1.0:
                u_cap = 1.0
        u = demand / spec.capacity
        if u > 1.0:
            u = 1.0
        if u > u_cap:
            u = u_cap
        served = u * spec.capacity
        power = idle + span * u
        entry = (i, u, served, power, spec.capacity, spec.name)
        if i == current_index:
            current = entry
        if best is None:
            best = entry
            continue
        if (served > best[2] + _SERVED_EPS
                or (served >= best[2] - _SERVED_EPS
                    and (power, spec.capacity, spec.name) < (best[3], best[4], best[5]))):
            best = entry
    if best is None:
        return None, 0.0
    if current is not None and best[0] != current[0]:
        gain = best[2] - current[2]
        saving = current[3] - best[3]
        if gain <= _SERVED_EPS and saving <= MIGRATION_SAVING_FRACTION * current[3]:
            return current[0], current[1]
    return best[0], best[1]


def _decide(inp: PolicyInput, power_cap: float) -> PolicyAction:
    specs: list[NodeSpec] = []
    current_index = None
    if inp.current_node is not None:
        current_index = 0
        specs.append(inp.current_node.spec)
    for target in inp.migration_targets:
        specs.append(target.node.spec)
    index, utilization = choose_option(specs, current_index, inp.demand, power_cap)
    if index is None:
        return PolicyAction.suspend()
    if index == current_index:
        return PolicyAction.scale(utilization)
    return PolicyAction.migrate(specs[index].name, utilization)


def unlimited_policy(inp: PolicyInput) -> PolicyAction:
    """Serve as much demand as possible at minimum power; ignores any budget."""
    return _decide(inp, math.inf)


def fixed_rate_policy(inp: PolicyInput, rate_limit: float) -> PolicyAction:
    """Keep every second's emission under a constant rate limit via throttling."""
    if rate_limit < 0:
        raise ValueError(f"negative rate limit {rate_limit}")
    if inp.intensity_ws > 0:
        power_cap = rate_limit / inp.intensity_ws
    else:
        power_cap = math.inf
    return _decide(inp, power_cap)


def greedy_budget_policy(inp: PolicyInput) -> PolicyAction:
    """Like the fixed-rate policy, but capped by the dynamic per-second allowance.

    The allowance carries all banked surplus, so low-demand seconds are saved up
    and spent immediately on later spikes. Once the allowance cannot cover any
    node's idle emission the application suspends; after exhaustion the
    allowance stays at zero, so suspension persists for the rest of the horizon
    (unless intensity is zero, in which case running is free).
    """
    if inp.budget_state is None:
        raise ValueError("greedy budget policy needs a budget state")
    if inp.intensity_ws > 0:
        power_cap = inp.allowance / inp.intensity_ws
    else:
        power_cap = math.inf
    return _decide(inp, power_cap)
