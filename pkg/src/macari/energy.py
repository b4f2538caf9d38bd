"""Radio-on energy: the closed-form cycle model and the simulated ledger.

Energy is counted in node-seconds of radio-on time; idle, receive and
transmit all draw the same power.
"""

from __future__ import annotations

from dataclasses import dataclass

from .metrics import RunMetrics
from .schedule import GlobalCycle, sync_period_duration
from .topology import Tree


class EnergyError(ValueError):
    pass


def energy_always_on(m: int, n: int, d_cycle: float) -> float:
    """Every node awake for the whole cycle."""
    _check_counts(m, n)
    return (m + n) * d_cycle


def energy_beacon_only(m: int, n: int, d_t0t3: float) -> float:
    """Every node awake from T0 to T3, i.e. the beacon period plus [T1;T3]."""
    _check_counts(m, n)
    return (m + n) * d_t0t3


def energy_macari(m: int, n: int, d_t0t1: float, d_t1t2: float, d_t2t3: float, rm: int) -> float:
    """Everyone awake for synchronization; coordinators for their own star slot,
    their children's relay intervals (a third of a slot each) and [T2;T3]."""
    _check_counts(m, n)
    if n == 0:
        raise EnergyError("need at least one coordinator")
    if rm < 0:
        raise EnergyError("rm must be >= 0")
    slot = d_t1t2 / n
    return (m + n) * d_t0t1 + n * (slot + rm * slot / 3 + d_t2t3)


def _check_counts(m, n):
    if m < 0 or n < 0:
        raise EnergyError("node counts must be >= 0")


@dataclass(frozen=True)
class CycleDurations:
    d_t0t1: float
    d_t1t2: float
    d_t2t3: float
    d_t3t0: float = 0.0

    @property
    def d_t0t3(self) -> float:
        return self.d_t0t1 + self.d_t1t2 + self.d_t2t3

    @property
    def cycle(self) -> float:
        return self.d_t0t3 + self.d_t3t0

    @classmethod
    def for_stars(cls, n: int, slot: float, rho: float = 1.0, d_t3t0: float = 0.0) -> "CycleDurations":
        """Equal slots of ``slot`` seconds (relay included) for ``n`` stars."""
        t1t2 = n * slot
        return cls(sync_period_duration(n), t1t2, rho * t1t2, d_t3t0)

    @classmethod
    def from_cycle(cls, cycle: GlobalCycle) -> "CycleDurations":
        return cls(cycle.d_t0t1, cycle.d_t1t2, cycle.d_t2t3, cycle.d_t3t0)


def energy_gain(m: int, n: int, durations: CycleDurations, rm: int,
                reference: str = "beacon_only") -> float:
    """1 - E''/E_ref, with E_ref the beacon-only or the always-on energy."""
    e2 = energy_macari(m, n, durations.d_t0t1, durations.d_t1t2, durations.d_t2t3, rm)
    if reference == "beacon_only":
        ref = energy_beacon_only(m, n, durations.d_t0t3)
    elif reference == "always_on":
        ref = energy_always_on(m, n, durations.cycle)
    else:
        raise EnergyError(f"unknown reference {reference!r}")
    if ref == 0:
        raise EnergyError("reference energy is zero")
    return 1.0 - e2 / ref


def inactivity_gain_table(scenarios, slot: float, rho: float = 1.0, rm: int = 3) -> list[dict]:
    """Gain per scenario for inactivity 0, T1T3/2, T1T3 and 2*T1T3.

    ``scenarios`` holds (label, n_coordinators, n_end_devices) triples.
    """
    rows = []
    for label, n, m in scenarios:
        base = CycleDurations.for_stars(n, slot, rho)
        t1t3 = base.d_t1t2 + base.d_t2t3
        for factor in (0.0, 0.5, 1.0, 2.0):
            d = CycleDurations(base.d_t0t1, base.d_t1t2, base.d_t2t3, factor * t1t3)
            rows.append({
                "scenario": label,
                "n": n,
                "m": m,
                "d_t3t0": d.d_t3t0,
                "gain_vs_beacon_only": energy_gain(m, n, d, rm, "beacon_only"),
                "gain_vs_always_on": energy_gain(m, n, d, rm, "always_on"),
            })
    return rows


@dataclass(frozen=True)
class LedgerComparison:
    coordinator_ledger: float  # node-seconds per cycle
    coordinator_model: float
    end_device_ledger: float
    end_device_sync_model: float
    end_device_slot_time: float  # star-slot time the closed form leaves out

    @property
    def coordinator_error(self) -> float:
        return abs(self.coordinator_ledger - self.coordinator_model) / self.coordinator_model

    @property
    def total_error(self) -> float:
        model = self.coordinator_model + self.end_device_sync_model
        return abs(self.coordinator_ledger + self.end_device_ledger - model) / model


def ledger_vs_model(metrics: RunMetrics, tree: Tree, cycle: GlobalCycle) -> LedgerComparison:
    """Compare a run's radio-on ledger with the closed form, per cycle.

    Coordinators are checked against the coordinator terms of E''; for
    end-devices the model only has the synchronization share, so the time
    they spend in their own star slot is reported separately.
    """
    if metrics.cycles <= 0:
        raise EnergyError("run has no complete cycle")
    k = metrics.cycles
    coords = set(tree.coordinators)
    n, m = len(coords), len(tree.end_devices)
    rm = tree.params.rm
    per_cycle = {nid: metrics.energy.get(nid, 0.0) / k for nid in tree.nodes}
    c_ledger = sum(v for nid, v in per_cycle.items() if nid in coords)
    e_ledger = sum(v for nid, v in per_cycle.items() if nid not in coords)
    slot = cycle.d_t1t2 / n
    c_model = n * cycle.d_t0t1 + n * (slot + rm * slot / 3 + cycle.d_t2t3)
    e_sync = m * cycle.d_t0t1
    return LedgerComparison(c_ledger, c_model, e_ledger, e_sync, e_ledger - e_sync)
