"""Per-run counters, delay records and report serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterable, Sequence

from .schedule import TICK

COUNTERS = (
    "frames_generated",
    "frames_generated_high",
    "frames_sent",
    "bytes_sent",
    "frames_received",
    "bytes_received",
    "collisions",
    "collisions_protected",
    "below_sensitivity",
    "receiver_asleep",
    "in_air_at_horizon",
    "acks_sent",
    "ack_collisions",
    "drops_channel_access",
    "drops_retry",
    "deferrals",
    "deferred_high_priority",
    "hop_tasks",
    "hop_acked",
    "pending_at_horizon",
    "duplicates",
    "delivered",
    "delivered_high",
    "beacons_sent",
)


@dataclass(frozen=True)
class DelayEntry:
    frame_id: int
    origin: int
    priority: str
    ticks: int
    deferred: bool
    gen_cycle_seq: int
    timestamp_backoffs: int

    @property
    def seconds(self) -> float:
        return self.ticks * TICK


@dataclass
class RunMetrics:
    scenario: str = ""
    mode: str = ""
    topology_seed: int = 0
    traffic_seed: int = 0
    cycles: int = 0
    horizon_ticks: int = 0
    cycle_ticks: int = 0
    t1t2_ticks: int = 0
    frames_generated: int = 0
    frames_generated_high: int = 0
    frames_sent: int = 0
    bytes_sent: int = 0
    frames_received: int = 0
    bytes_received: int = 0
    collisions: int = 0
    collisions_protected: int = 0
    below_sensitivity: int = 0
    receiver_asleep: int = 0
    in_air_at_horizon: int = 0
    acks_sent: int = 0
    ack_collisions: int = 0
    drops_channel_access: int = 0
    drops_retry: int = 0
    deferrals: int = 0
    deferred_high_priority: int = 0
    hop_tasks: int = 0
    hop_acked: int = 0
    pending_at_horizon: int = 0
    duplicates: int = 0
    delivered: int = 0
    delivered_high: int = 0
    beacons_sent: int = 0
    delays: list[DelayEntry] = field(default_factory=list)
    energy: dict[int, float] = field(default_factory=dict)  # radio-on seconds per node
    trace_hash: str = ""

    @property
    def cycle_duration(self) -> float:
        return self.cycle_ticks * TICK

    @property
    def delay_bound_ticks(self) -> int:
        return self.cycle_ticks + self.t1t2_ticks

    def high_delays(self) -> list[DelayEntry]:
        return [d for d in self.delays if d.priority == "high"]

    def high_over_bound(self) -> int:
        bound = self.delay_bound_ticks
        return sum(1 for d in self.delays if d.priority == "high" and d.ticks > bound)

    def phy_balance(self) -> int:
        """sent minus every terminal PHY outcome; zero when the books close."""
        return self.frames_sent - (
            self.frames_received
            + self.collisions
            + self.below_sensitivity
            + self.receiver_asleep
            + self.in_air_at_horizon
        )

    def hop_balance(self) -> int:
        return self.hop_tasks - (
            self.hop_acked + self.drops_channel_access + self.drops_retry + self.pending_at_horizon
        )

    def counters(self) -> dict[str, int]:
        return {k: getattr(self, k) for k in COUNTERS}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["delays"] = [asdict(e) for e in self.delays]
        d["energy"] = {str(k): v for k, v in sorted(self.energy.items())}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "RunMetrics":
        d = dict(d)
        d["delays"] = [DelayEntry(**e) for e in d.get("delays", [])]
        d["energy"] = {int(k): float(v) for k, v in d.get("energy", {}).items()}
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})

    @classmethod
    def from_json(cls, text: str) -> "RunMetrics":
        return cls.from_dict(json.loads(text))


class Recorder:
    """Mutable sink the simulator writes into; one per run."""

    def __init__(self, metrics: RunMetrics):
        self.m = metrics
        self._deferred_high: set[int] = set()

    def record_generated(self, frame) -> None:
        self.m.frames_generated += 1
        if frame.priority == "high":
            self.m.frames_generated_high += 1

    def record_tx(self, mpdu_len: int) -> None:
        self.m.frames_sent += 1
        self.m.bytes_sent += mpdu_len

    def record_rx(self, mpdu_len: int) -> None:
        self.m.frames_received += 1
        self.m.bytes_received += mpdu_len

    def record_collision(self, protected: bool) -> None:
        self.m.collisions += 1
        if protected:
            self.m.collisions_protected += 1

    def record_below_sensitivity(self) -> None:
        self.m.below_sensitivity += 1

    def record_receiver_asleep(self) -> None:
        self.m.receiver_asleep += 1

    def record_ack(self, lost: bool) -> None:
        self.m.acks_sent += 1
        if lost:
            self.m.ack_collisions += 1

    def record_deferral(self, frame) -> None:
        self.m.deferrals += 1
        if frame.priority == "high" and frame.id not in self._deferred_high:
            self._deferred_high.add(frame.id)
            self.m.deferred_high_priority += 1

    def record_drop(self, channel_access: bool) -> None:
        if channel_access:
            self.m.drops_channel_access += 1
        else:
            self.m.drops_retry += 1

    def record_hop_task(self) -> None:
        self.m.hop_tasks += 1

    def record_hop_acked(self) -> None:
        self.m.hop_acked += 1

    def record_duplicate(self) -> None:
        self.m.duplicates += 1

    def record_delivery(self, frame, now: int, t1_of_cycle: int) -> None:
        self.m.delivered += 1
        if frame.priority == "high":
            self.m.delivered_high += 1
        # Delay from the beacon-relative timestamp, as a sink would compute it.
        ticks = now - (t1_of_cycle + frame.timestamp_backoffs)
        self.m.delays.append(
            DelayEntry(
                frame_id=frame.id,
                origin=frame.origin,
                priority=frame.priority,
                ticks=ticks,
                deferred=frame.id in self._deferred_high or frame.deferred,
                gen_cycle_seq=frame.gen_cycle_seq,
                timestamp_backoffs=frame.timestamp_backoffs,
            )
        )

    def record_energy(self, node: int, seconds: float) -> None:
        self.m.energy[node] = self.m.energy.get(node, 0.0) + seconds

    def record_beacon(self) -> None:
        self.m.beacons_sent += 1


def delay_histogram(metrics: RunMetrics, bin_width: float, upper: float | None = None,
                    priority: str | None = None) -> list[tuple[float, float, int]]:
    """Fixed-width bins over [0, upper]; upper defaults to the guaranteed bound."""
    if bin_width <= 0:
        raise ValueError("bin_width must be > 0")
    entries = [d for d in metrics.delays if priority is None or d.priority == priority]
    top = metrics.delay_bound_ticks * TICK if upper is None else upper
    if entries:
        top = max(top, max(e.seconds for e in entries))
    n_bins = max(1, math.ceil(round(top / bin_width, 9)))
    counts = [0] * n_bins
    for e in entries:
        counts[min(int(e.seconds // bin_width), n_bins - 1)] += 1
    return [(i * bin_width, (i + 1) * bin_width, c) for i, c in enumerate(counts)]


def write_histogram(path: str | Path, bins: Sequence[tuple[float, float, int]]) -> None:
    """Two columns (bin centre, count), readable by gnuplot."""
    lines = ["# delay_s count"]
    lines += [f"{(lo + hi) / 2:.6f} {c}" for lo, hi, c in bins]
    Path(path).write_text("\n".join(lines) + "\n")


def aggregate(runs: Sequence[RunMetrics]) -> dict:
    if not runs:
        raise ValueError("cannot aggregate an empty list of runs")
    out = {
        "scenario": runs[0].scenario,
        "mode": runs[0].mode,
        "runs": len(runs),
    }
    for name in COUNTERS:
        values = [getattr(r, name) for r in runs]
        out[name] = {
            "mean": statistics.fmean(values),
            "min": min(values),
            "max": max(values),
        }
    energy = [sum(r.energy.values()) for r in runs]
    out["energy_total_s"] = {"mean": statistics.fmean(energy), "min": min(energy), "max": max(energy)}
    return out


CSV_FIELDS = ("scenario", "mode", "topology_seed", "traffic_seed", "cycles", "cycle_ticks",
              "t1t2_ticks") + COUNTERS + ("energy_total_s", "max_high_delay_s", "high_over_bound",
                                                   "trace_hash")


def csv_row(m: RunMetrics) -> dict:
    row = {k: getattr(m, k) for k in CSV_FIELDS if hasattr(m, k) and k != "energy_total_s"}
    row["energy_total_s"] = round(sum(m.energy.values()), 9)
    high = m.high_delays()
    row["max_high_delay_s"] = round(max(d.seconds for d in high), 9) if high else ""
    row["high_over_bound"] = m.high_over_bound()
    return row


def runs_to_csv(runs: Iterable[RunMetrics]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for m in runs:
        w.writerow(csv_row(m))
    return buf.getvalue()


def aggregate_to_csv(summaries: Iterable[dict]) -> str:
    buf = io.StringIO()
    header = ["scenario", "mode", "runs"]
    for name in COUNTERS + ("energy_total_s",):
        header += [f"{name}_mean", f"{name}_min", f"{name}_max"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for s in summaries:
        row = [s["scenario"], s["mode"], s["runs"]]
        for name in COUNTERS + ("energy_total_s",):
            row += [s[name]["mean"], s[name]["min"], s[name]["max"]]
        w.writerow(row)
    return buf.getvalue()
