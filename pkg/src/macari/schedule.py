"""Global-cycle timetable: sync period, up-stream star slots, routed period.

All boundaries are kept as integer backoff-period ticks (320 us). Star
slot boundaries are rounded from the exact cumulative time, so the total
never drifts more than half a tick from the real-valued schedule.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

from .topology import Star, Tree

TICK = 320e-6  # backoff period, seconds
SYNC_BASE = 0.008
SYNC_PER_COORDINATOR = 0.00032


class ScheduleError(ValueError):
    pass


class GtsOverflow(ScheduleError):
    pass


def to_ticks(seconds: float) -> int:
    """Round half up to the nearest tick, tolerant of float noise."""
    return math.floor(round(seconds / TICK, 9) + 0.5)


def ticks_to_seconds(ticks: int) -> float:
    return ticks * TICK


def sync_slot_duration(n_coordinators: int) -> float:
    if n_coordinators < 1:
        raise ScheduleError("need at least one coordinator")
    return SYNC_PER_COORDINATOR * n_coordinators + SYNC_BASE


def sync_period_duration(n_coordinators: int) -> float:
    """Beacon cascade length: n * (0.00032 n + 0.008) seconds."""
    return n_coordinators * sync_slot_duration(n_coordinators)


def star_order(tree: Tree) -> list[Star]:
    """Deepest stars first, ties by address; the PAN coordinator's star is last."""
    stars = tree.stars()
    return sorted(stars, key=lambda s: (-tree.nodes[s.coordinator].depth,
                                        tree.nodes[s.coordinator].address))


@dataclass(frozen=True)
class GtsSlot:
    end_device: int
    start: int
    length: int

    @property
    def end(self) -> int:
        return self.start + self.length


@dataclass(frozen=True)
class StarSlot:
    """One star's activity period; ticks are offsets from T1."""

    star: int
    start: int
    cap_end: int
    gts_slots: tuple[GtsSlot, ...]
    relay_start: int
    end: int

    @property
    def cap_duration(self) -> float:
        return ticks_to_seconds(self.cap_end - self.start)

    @property
    def relay_duration(self) -> float:
        return ticks_to_seconds(self.end - self.relay_start)

    @property
    def duration(self) -> float:
        return ticks_to_seconds(self.end - self.start)

    @property
    def relay_ticks(self) -> int:
        return self.end - self.relay_start


@dataclass(frozen=True)
class SyncSlot:
    coordinator: int
    start: int
    length: int


@dataclass(frozen=True)
class GlobalCycle:
    seq: int
    sync_ticks: int
    beacon_order: tuple[SyncSlot, ...]
    star_slots: tuple[StarSlot, ...]
    t1t2_ticks: int
    t2t3_ticks: int
    t3t0_ticks: int
    exact: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def cycle_ticks(self) -> int:
        return self.sync_ticks + self.t1t2_ticks + self.t2t3_ticks + self.t3t0_ticks

    @property
    def d_t0t1(self) -> float:
        return ticks_to_seconds(self.sync_ticks)

    @property
    def d_t1t2(self) -> float:
        return ticks_to_seconds(self.t1t2_ticks)

    @property
    def d_t2t3(self) -> float:
        return ticks_to_seconds(self.t2t3_ticks)

    @property
    def d_t3t0(self) -> float:
        return ticks_to_seconds(self.t3t0_ticks)

    @property
    def cycle_duration(self) -> float:
        return ticks_to_seconds(self.cycle_ticks)

    def slot_of(self, coordinator: int) -> StarSlot:
        for s in self.star_slots:
            if s.star == coordinator:
                return s
        raise KeyError(coordinator)

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "tick_seconds": TICK,
            "d_t0t1": self.d_t0t1,
            "d_t1t2": self.d_t1t2,
            "d_t2t3": self.d_t2t3,
            "d_t3t0": self.d_t3t0,
            "cycle_duration": self.cycle_duration,
            "ticks": {
                "t0t1": self.sync_ticks,
                "t1t2": self.t1t2_ticks,
                "t2t3": self.t2t3_ticks,
                "t3t0": self.t3t0_ticks,
            },
            "beacon_order": [
                {"coordinator": b.coordinator, "start": b.start, "length": b.length}
                for b in self.beacon_order
            ],
            "star_slots": [
                {
                    "star": s.star,
                    "start": s.start,
                    "cap_end": s.cap_end,
                    "gts": [
                        {"end_device": g.end_device, "start": g.start, "length": g.length}
                        for g in s.gts_slots
                    ],
                    "relay_start": s.relay_start,
                    "end": s.end,
                }
                for s in self.star_slots
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _per_star(value, star: int, what: str) -> float:
    v = value[star] if isinstance(value, Mapping) else value
    if v < 0:
        raise ScheduleError(f"negative {what}: {v}")
    return float(v)


def build_cycle(
    tree: Tree,
    collect_duration_per_star: float | Mapping[int, float],
    relay_duration: float | Mapping[int, float],
    gts_per_ed: float,
    rho: float,
    inactive_duration: float = 0.0,
    seq: int = 0,
) -> GlobalCycle:
    """Lay out one global cycle for ``tree``.

    Collect and relay durations may be given per star (keyed by
    coordinator id). Inside a slot the CAP comes first, then one GTS per
    end-device in ascending id, then the relay interval.
    """
    if gts_per_ed < 0 or rho < 0 or inactive_duration < 0:
        raise ScheduleError("durations and rho must be >= 0")
    coords = sorted(tree.coordinators, key=lambda c: tree.nodes[c].address)
    n = len(coords)
    slot_len = to_ticks(sync_slot_duration(n))
    beacons = tuple(SyncSlot(c, i * slot_len, slot_len) for i, c in enumerate(coords))
    gts_len = to_ticks(gts_per_ed)

    slots = []
    cursor = 0.0
    for star in star_order(tree):
        collect = _per_star(collect_duration_per_star, star.coordinator, "collect duration")
        relay = _per_star(relay_duration, star.coordinator, "relay duration")
        if len(star.end_devices) * gts_per_ed > collect + 1e-12:
            raise GtsOverflow(
                f"star {star.coordinator}: {len(star.end_devices)} GTS of {gts_per_ed}s "
                f"exceed collect duration {collect}s"
            )
        start = to_ticks(cursor)
        relay_start = to_ticks(cursor + collect)
        end = to_ticks(cursor + collect + relay)
        cap_end = relay_start - gts_len * len(star.end_devices)
        if cap_end < start:
            raise GtsOverflow(f"star {star.coordinator}: GTS block does not fit in whole ticks")
        gts = tuple(
            GtsSlot(ed, cap_end + i * gts_len, gts_len) for i, ed in enumerate(star.end_devices)
        )
        slots.append(StarSlot(star.coordinator, start, cap_end, gts, relay_start, end))
        cursor += collect + relay

    t1t2 = to_ticks(cursor)
    return GlobalCycle(
        seq=seq,
        sync_ticks=n * slot_len,
        beacon_order=beacons,
        star_slots=tuple(slots),
        t1t2_ticks=t1t2,
        t2t3_ticks=to_ticks(rho * cursor),
        t3t0_ticks=to_ticks(inactive_duration),
        exact={
            "d_t0t1": sync_period_duration(n),
            "d_t1t2": cursor,
            "d_t2t3": rho * cursor,
            "d_t3t0": inactive_duration,
        },
    )


def burst_ticks(frames: int, transaction_ticks: int, ifs_ticks: int) -> int:
    """Ticks for ``frames`` back-to-back acknowledged transactions."""
    if frames <= 0:
        return 0
    return frames * transaction_ticks + (frames - 1) * ifs_ticks


def relay_durations_for_load(tree: Tree, frames_per_ed: int, transaction_ticks: int,
                             ifs_ticks: int, minimum: float = 0.0) -> dict[int, float]:
    """Per-star relay durations able to forward a whole cycle of subtree traffic.

    Every end-device below a coordinator may push ``frames_per_ed`` frames
    per cycle; the coordinator's relay interval has to carry all of them to
    its parent in one go. ``minimum`` keeps small stars at a floor value.
    """
    out = {}
    for c in tree.coordinators:
        n = sum(1 for d in tree.descendants(c) if not tree.nodes[d].is_coordinator) * frames_per_ed
        need = ticks_to_seconds(burst_ticks(n, transaction_ticks, ifs_ticks))
        out[c] = max(minimum, need) if c != tree.root else minimum
    return out
