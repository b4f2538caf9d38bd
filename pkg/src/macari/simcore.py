"""Event engine and physical layer.

Time is an integer count of backoff periods. Events at the same tick run
in (priority, insertion order), which makes every run a pure function of
its inputs.
"""

from __future__ import annotations

import hashlib
import heapq
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, TextIO

import numpy as np

from . import _kernels
from .schedule import TICK

# same-tick ordering
P_END = 0
P_BOUNDARY = 1
P_GENERATE = 2
P_MAC = 3

SHR_BYTES = 6  # preamble + SFD + PHY header
ACK_MPDU = 11
TURNAROUND = 192e-6


@dataclass(frozen=True)
class RadioParams:
    tx_power: float = 0.0  # dBm
    sensitivity: float = -92.0  # dBm
    capture_threshold: float = 10.0  # dB; inf disables capture
    frequency: float = 2400.0  # MHz
    n_coeff: float = 30.0  # ITU distance power loss coefficient
    data_rate: float = 250_000.0  # bit/s

    def __post_init__(self):
        if not self.sensitivity < self.tx_power:
            raise ValueError("sensitivity must be below tx_power")
        if not self.capture_threshold > 0:
            raise ValueError("capture_threshold must be > 0")

    def airtime(self, mpdu_len: int) -> float:
        return (SHR_BYTES + mpdu_len) * 8 / self.data_rate

    def airtime_ticks(self, mpdu_len: int) -> int:
        return math.ceil(round(self.airtime(mpdu_len) / TICK, 9))

    def transaction_time(self, mpdu_len: int) -> float:
        """Data frame, turnaround and acknowledgment."""
        return self.airtime(mpdu_len) + TURNAROUND + self.airtime(ACK_MPDU)

    def transaction_ticks(self, mpdu_len: int) -> int:
        return math.ceil(round(self.transaction_time(mpdu_len) / TICK, 9))

    @property
    def range_m(self) -> float:
        budget = self.tx_power - self.sensitivity
        return 10 ** ((budget - 20 * math.log10(self.frequency) + 28) / self.n_coeff)


def path_loss(distance: float, params: RadioParams) -> float:
    """ITU indoor loss in dB, floor penetration term 0, distance clamped to 1 m."""
    d = max(distance, 1.0)
    return 20 * math.log10(params.frequency) + params.n_coeff * math.log10(d) - 28


class Outcome(Enum):
    DECODED = "decoded"
    COLLISION = "collision"
    BELOW_SENSITIVITY = "below_sensitivity"


@dataclass(eq=False)
class Transmission:
    sender: int
    receiver: int | None  # None for broadcast
    kind: str  # data / ack / beacon
    start_tick: int
    end_tick: int
    rx_power_at: Any  # mapping node -> dBm
    frame: Any = None
    access: str = ""  # csma / gts / relay for data frames
    outcome: Outcome | None = None

    def __post_init__(self):
        if self.end_tick <= self.start_tick:
            raise ValueError("transmission must last at least one tick")

    def overlaps(self, other: "Transmission") -> bool:
        return self.start_tick < other.end_tick and other.start_tick < self.end_tick


def _dbm_sum(powers: Iterable[float]) -> float:
    total = sum(10 ** (p / 10) for p in powers)
    return 10 * math.log10(total) if total > 0 else -math.inf


def reception_outcome(receiver: int, candidate: Transmission,
                      overlapping: Iterable[Transmission], params: RadioParams) -> Outcome:
    """Decide whether ``receiver`` decodes ``candidate``.

    ``overlapping`` holds the other transmissions sharing part of the
    candidate's airtime. From its first tick to its last, the candidate
    must beat the linear sum of the audible interferers active in that
    tick by the capture threshold.
    """
    p = candidate.rx_power_at[receiver]
    if p < params.sensitivity:
        return Outcome.BELOW_SENSITIVITY
    others = []
    for t in overlapping:
        if t is candidate:
            continue
        if t.sender == receiver:
            return Outcome.COLLISION  # half duplex: receiver was transmitting
        q = t.rx_power_at[receiver]
        if q >= params.sensitivity:
            others.append((t.start_tick, t.end_tick, q))
    if not others:
        return Outcome.DECODED
    if math.isinf(params.capture_threshold):
        return Outcome.COLLISION
    for tick in range(candidate.start_tick, candidate.end_tick):
        active = [q for s, e, q in others if s <= tick < e]
        if active and p - _dbm_sum(active) < params.capture_threshold:
            return Outcome.COLLISION
    return Outcome.DECODED


class _PowerRow:
    __slots__ = ("row", "index")

    def __init__(self, row, index):
        self.row = row
        self.index = index

    def __getitem__(self, node):
        return self.row[self.index[node]]


class Medium:
    """Shared single channel with deterministic path loss."""

    def __init__(self, positions: dict[int, tuple[float, float]], params: RadioParams):
        self.params = params
        self.ids = sorted(positions)
        self.index = {nid: i for i, nid in enumerate(self.ids)}
        xy = np.array([positions[n] for n in self.ids], dtype=np.float64).reshape(-1, 2)
        self.power = _kernels.rx_power_matrix(xy, params.tx_power, params.frequency, params.n_coeff)
        self._rows = {nid: _PowerRow(self.power[i], self.index) for nid, i in self.index.items()}
        self.recent: list[Transmission] = []
        self._horizon_keep = 256

    def rx_power(self, sender: int, receiver: int) -> float:
        return self.power[self.index[sender], self.index[receiver]]

    def audible(self, sender: int, receiver: int) -> bool:
        return self.rx_power(sender, receiver) >= self.params.sensitivity

    def transmit(self, sender, receiver, kind, start, length, frame=None, access="") -> Transmission:
        tx = Transmission(sender, receiver, kind, start, start + length, self._rows[sender],
                          frame, access)
        self.recent.append(tx)
        if len(self.recent) > 4 * self._horizon_keep:
            cutoff = start - self._horizon_keep
            self.recent = [t for t in self.recent if t.end_tick >= cutoff]
        return tx

    def overlapping(self, tx: Transmission) -> list[Transmission]:
        return [t for t in self.recent if t is not tx and t.overlaps(tx)]

    def resolve(self, tx: Transmission, receiver: int) -> Outcome:
        return reception_outcome(receiver, tx, self.overlapping(tx), self.params)

    def busy(self, node: int, tick: int) -> bool:
        """Clear channel assessment at the start of ``tick``.

        A transmission that begins on this very boundary is not yet
        detectable (RX-to-TX turnaround), matching slotted CSMA/CA.
        """
        sens = self.params.sensitivity
        for t in reversed(self.recent):
            if t.start_tick < tick < t.end_tick:
                if t.sender == node or t.rx_power_at[node] >= sens:
                    return True
        return False

    def transmitting(self, node: int, tick: int) -> bool:
        for t in reversed(self.recent):
            if t.sender == node and t.start_tick <= tick < t.end_tick:
                return True
        return False

    def in_air(self, tick: int) -> list[Transmission]:
        return [t for t in self.recent if t.end_tick > tick and t.start_tick <= tick]


@dataclass(order=True)
class Event:
    time: int
    priority: int
    seq: int
    target: int = field(compare=False)
    kind: str = field(compare=False)
    action: Callable = field(compare=False, repr=False)
    args: tuple = field(compare=False, default=(), repr=False)


class Engine:
    def __init__(self, trace: TextIO | None = None):
        self.now = 0
        self._queue: list[Event] = []
        self._seq = 0
        self._hash = hashlib.sha256()
        self.trace = trace
        self.processed = 0

    def schedule(self, time: int, priority: int, target: int, kind: str,
                 action: Callable, *args) -> Event:
        if time < self.now:
            raise ValueError(f"cannot schedule in the past ({time} < {self.now})")
        ev = Event(time, priority, self._seq, target, kind, action, args)
        self._seq += 1
        heapq.heappush(self._queue, ev)
        return ev

    def run(self, until: int) -> None:
        q = self._queue
        while q and q[0].time <= until:
            ev = heapq.heappop(q)
            self.now = ev.time
            line = f"{ev.time} {ev.target} {ev.kind}\n"
            self._hash.update(line.encode())
            if self.trace is not None:
                self.trace.write(line)
            self.processed += 1
            ev.action(*ev.args)
        self.now = max(self.now, until)

    @property
    def pending(self) -> int:
        return len(self._queue)

    def trace_hash(self) -> str:
        return self._hash.hexdigest()
