"""MAC state machines for MaCARI and the two comparison configurations.

A run is driven by a per-mode timetable (windows relative to T0 of each
cycle). End-devices use slotted CSMA/CA in their star's CAP and their own
GTS for high-priority frames; coordinators forward high-priority frames in
contention-free relay intervals and everything else during [T2;T3].
"""

from __future__ import annotations

import bisect
import math
import random
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

from .metrics import Recorder, RunMetrics
from .routing import NeighborTable, shortcut_next_hop, tree_next_hop
from .schedule import TICK, GlobalCycle, to_ticks
from .simcore import (
    P_BOUNDARY,
    P_END,
    P_GENERATE,
    P_MAC,
    Engine,
    Medium,
    Outcome,
    RadioParams,
)
from .topology import END_DEVICE, Tree

LIFS = 640e-6  # long inter-frame spacing (40 symbols)
BEACON_BASE_MPDU = 17


class SimMode(str, Enum):
    MACARI = "macari"
    MACARI_NO_RELAY = "macari_no_relay"
    BEACON_ONLY = "beacon_only"


@dataclass(frozen=True)
class CsmaParams:
    min_be: int = 3
    max_be: int = 5
    max_csma_backoffs: int = 4
    max_frame_retries: int = 3
    cca_count: int = 2

    def __post_init__(self):
        if not 0 <= self.min_be <= self.max_be <= 8:
            raise ValueError("need 0 <= min_be <= max_be <= 8")
        if self.max_csma_backoffs < 0 or self.max_frame_retries < 0:
            raise ValueError("backoff/retry limits must be >= 0")


@dataclass
class Frame:
    id: int
    src: int
    dst: int
    final_dst: int
    priority: str
    mpdu_len: int
    gen_tick: int
    gen_cycle_seq: int
    timestamp_backoffs: int
    hop_count: int = 0
    origin: int = -1
    deferred: bool = False


# --- timetables --------------------------------------------------------------

@dataclass(frozen=True)
class Window:
    kind: str  # beacon / cap / gts / relay / routed / open
    start: int
    end: int
    owner: int | None = None
    peer: int | None = None


@dataclass(frozen=True)
class Timetable:
    mode: SimMode
    cycle_ticks: int
    t1: int
    t2: int
    t3: int
    windows: tuple[Window, ...]
    radio_on: dict[int, tuple[tuple[int, int], ...]]
    tx_permitted: dict[int, tuple[tuple[int, int, str], ...]]

    def on_ticks(self, node: int) -> int:
        return sum(e - s for s, e in self.radio_on[node])

    def is_on(self, node: int, offset: int) -> bool:
        iv = self.radio_on[node]
        i = bisect.bisect_right(iv, (offset, math.inf)) - 1
        return i >= 0 and iv[i][0] <= offset < iv[i][1]

    def may_transmit(self, node: int, start: int, end: int) -> bool:
        return any(s <= start and end <= e for s, e, _ in self.tx_permitted[node])


def _merge(intervals) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for s, e in sorted(i for i in intervals if i[1] > i[0]):
        if out and s <= out[-1][1]:
            out[-1][1] = max(out[-1][1], e)
        else:
            out.append([s, e])
    return tuple((s, e) for s, e in out)


def mode_timetable(mode: SimMode | str, cycle: GlobalCycle, tree: Tree) -> Timetable:
    """Permitted activity per node for one cycle, offsets from T0."""
    mode = SimMode(mode)
    t1 = cycle.sync_ticks
    t3 = t1 + cycle.t1t2_ticks + cycle.t2t3_ticks
    windows: list[Window] = [
        Window("beacon", b.start, b.start + b.length, b.coordinator) for b in cycle.beacon_order
    ]
    on: dict[int, list] = {n: [(0, t1)] for n in tree.nodes}
    tx: dict[int, list] = {n: [] for n in tree.nodes}
    for b in cycle.beacon_order:
        tx[b.coordinator].append((b.start, b.start + b.length, "beacon"))

    if mode is SimMode.BEACON_ONLY:
        t2 = t1 + cycle.t1t2_ticks
        windows.append(Window("open", t1, t3))
        for n in tree.nodes:
            on[n].append((t1, t3))
            tx[n].append((t1, t3, "open"))
    else:
        relays = mode is SimMode.MACARI
        shift = 0  # ticks removed so far when relay intervals are folded away
        for slot in cycle.star_slots:
            c = slot.star
            base = t1 - shift
            start, cap_end = base + slot.start, base + slot.cap_end
            relay_start, end = base + slot.relay_start, base + slot.end
            if not relays:
                shift += slot.end - slot.relay_start
                end = relay_start
            windows.append(Window("cap", start, cap_end, c))
            members = [c] + tree.end_device_children(c)
            for ed in tree.end_device_children(c):
                tx[ed].append((start, cap_end, "cap"))
            for g in slot.gts_slots:
                gs = base + g.start
                windows.append(Window("gts", gs, gs + g.length, g.end_device, c))
                tx[g.end_device].append((gs, gs + g.length, "gts"))
            for m in members:
                on[m].append((start, end))
            parent = tree.nodes[c].parent
            if relays and parent is not None:
                windows.append(Window("relay", relay_start, end, c, parent))
                tx[c].append((relay_start, end, "relay"))
                on[parent].append((relay_start, end))
        t2 = t1 + cycle.t1t2_ticks - shift
        windows.append(Window("routed", t2, t3))
        for c in tree.coordinators:
            on[c].append((t2, t3))
            tx[c].append((t2, t3, "routed"))

    return Timetable(
        mode=mode,
        cycle_ticks=cycle.cycle_ticks,
        t1=t1,
        t2=t2,
        t3=t3,
        windows=tuple(sorted(windows, key=lambda w: (w.start, w.end, w.kind, w.owner or 0))),
        radio_on={n: _merge(v) for n, v in on.items()},
        tx_permitted={n: tuple(sorted(v)) for n, v in tx.items()},
    )


def sleep_schedule(node: int, timetable: Timetable) -> list[tuple[int, str]]:
    """Radio on/off switching instants for one cycle (offsets from T0)."""
    events = []
    for s, e in timetable.radio_on[node]:
        events.append((s, "on"))
        events.append((e, "off"))
    return events


@dataclass(frozen=True)
class BeaconTx:
    coordinator: int
    start: int
    length: int
    seq: int


def beacon_mpdu(n_coordinators: int) -> int:
    return BEACON_BASE_MPDU + 2 * n_coordinators


def beacon_cascade(cycle: GlobalCycle, radio: RadioParams | None = None) -> tuple[list[BeaconTx], int]:
    """Beacon transmissions of one cycle and the common T1 offset."""
    radio = radio or RadioParams()
    n = len(cycle.beacon_order)
    length = radio.airtime_ticks(beacon_mpdu(n))
    out = []
    for b in cycle.beacon_order:
        out.append(BeaconTx(b.coordinator, b.start, min(length, b.length), cycle.seq))
    return out, cycle.sync_ticks


# --- traffic -----------------------------------------------------------------

@dataclass(frozen=True)
class TrafficSpec:
    pattern: str = "periodic"  # periodic | gts_window | none
    frames_per_ed: int = 16
    period: float = 1.0
    hp_fraction: float = 0.25
    mpdu_len: int = 50
    sources: tuple[int, ...] | None = None  # None: every end-device
    start_cycle: int = 0

    def __post_init__(self):
        if not 0.0 <= self.hp_fraction <= 1.0:
            raise ValueError("hp_fraction must be in [0, 1]")
        if self.pattern not in ("periodic", "gts_window", "none"):
            raise ValueError(f"unknown traffic pattern {self.pattern!r}")
        if self.frames_per_ed < 0 or self.period <= 0:
            raise ValueError("frames_per_ed must be >= 0 and period > 0")


def is_high_priority(index: int, fraction: float) -> bool:
    """Deterministic marking: with fraction 1/4 every 4th frame is high."""
    return math.floor((index + 1) * fraction + 1e-9) > math.floor(index * fraction + 1e-9)


def traffic_plan(spec: TrafficSpec, tree: Tree, cycle: GlobalCycle, seed: int,
                 timetable: Timetable | None = None) -> list[tuple[int, int, str]]:
    """Sorted (tick, end-device, priority) generation instants.

    ``gts_window`` traffic draws one frame per cycle inside the source's GTS
    (taken from ``timetable`` when given, else from the MaCARI layout).
    """
    if spec.pattern == "none":
        return []
    sources = tree.end_devices if spec.sources is None else list(spec.sources)
    for s in sources:
        if tree.nodes[s].role != END_DEVICE:
            raise ValueError(f"traffic source {s} is not an end-device")
    c = cycle.cycle_ticks
    plan = []
    if spec.pattern == "periodic":
        first_t1 = spec.start_cycle * c + cycle.sync_ticks
        for ed in sources:
            rng = random.Random(f"traffic:{seed}:{ed}")
            phase = rng.uniform(0.0, spec.period)
            for i in range(spec.frames_per_ed):
                prio = "high" if is_high_priority(i, spec.hp_fraction) else "low"
                plan.append((first_t1 + to_ticks(phase + i * spec.period), ed, prio))
    else:
        gts = {g.end_device: (cycle.sync_ticks + g.start, g.length)
               for s in cycle.star_slots for g in s.gts_slots}
        if timetable is not None:
            gts.update({w.owner: (w.start, w.end - w.start)
                        for w in timetable.windows if w.kind == "gts"})
        for ed in sources:
            rng = random.Random(f"traffic:{seed}:{ed}")
            start, length = gts[ed]
            for k in range(spec.frames_per_ed):
                base = (spec.start_cycle + k) * c
                plan.append((base + start + rng.randrange(length), ed, "high"))
    plan.sort()
    return plan


# --- per-node MAC ------------------------------------------------------------

class NodeMac:
    def __init__(self, sim: "Simulation", nid: int):
        self.sim = sim
        self.id = nid
        self.node = sim.tree.nodes[nid]
        self.address = self.node.address
        self.parent = self.node.parent
        self.is_ed = not self.node.is_coordinator
        self.hp: deque[Frame] = deque()
        self.lp: deque[Frame] = deque()
        self.rng = random.Random(f"csma:{sim.seed}:{nid}")
        self.table = NeighborTable(nid)
        self.seen: set[int] = set()
        # contention access
        self.csma_end = -1
        self.csma_queues: tuple[str, ...] = ()
        self.csma_active = False
        self.cur: tuple[deque, Frame] | None = None
        self.nb = 0
        self.be = 0
        self.retries: dict[int, int] = {}
        # contention-free access (GTS or relay)
        self.cf_end = -1
        self.cf_kind = ""
        self.cf_active = False
        self.cf_deferred_in_window: set[int] = set()

    # queues
    def enqueue(self, frame: Frame) -> None:
        (self.hp if frame.priority == "high" else self.lp).append(frame)
        self.sim.rec.record_hop_task()

    def pending(self) -> int:
        return len(self.hp) + len(self.lp)

    # contention-free windows
    def open_cf(self, kind: str, end: int) -> None:
        self.cf_kind = kind
        self.cf_end = end
        self.cf_deferred_in_window = set()
        self.cf_send()

    def cf_send(self) -> None:
        sim = self.sim
        now = sim.engine.now
        if self.cf_active or now >= self.cf_end or not self.hp:
            return
        frame = self.hp[0]
        if now + sim.trans_ticks > self.cf_end:
            if frame.id not in self.cf_deferred_in_window:
                self.cf_deferred_in_window.add(frame.id)
                frame.deferred = True
                sim.rec.record_deferral(frame)
            return
        self.cf_active = True
        sim.send_data(self, frame, self.parent, self.cf_kind, self._cf_done)

    def _cf_done(self, frame: Frame, ok: bool) -> None:
        self.cf_active = False
        if ok:
            self.hp.remove(frame)
            self.sim.rec.record_hop_acked()
        now = self.sim.engine.now
        if self.hp and now + self.sim.ifs_ticks < self.cf_end:
            self.sim.engine.schedule(now + self.sim.ifs_ticks, P_MAC, self.id, "cf_next", self.cf_send)
        elif self.hp and now < self.cf_end:
            self.cf_send()

    # contention access
    def open_csma(self, end: int, queues: tuple[str, ...]) -> None:
        self.csma_end = end
        self.csma_queues = queues
        self.kick()

    def _head(self):
        for name in self.csma_queues:
            q = self.hp if name == "hp" else self.lp
            if q:
                return q, q[0]
        return None

    def kick(self) -> None:
        if self.csma_active or self.sim.engine.now >= self.csma_end:
            return
        head = self._head()
        if head is None:
            return
        self.csma_active = True
        self.cur = head
        self.nb = 0
        self.be = self.sim.csma.min_be
        self._backoff()

    def _backoff(self) -> None:
        sim = self.sim
        now = sim.engine.now
        delay = self.rng.randrange(1 << self.be)
        cca_at = now + delay
        if cca_at + sim.csma.cca_count + sim.trans_ticks > self.csma_end:
            frame = self.cur[1]
            frame.deferred = frame.deferred or frame.priority == "high"
            sim.rec.record_deferral(frame)
            self.csma_active = False
            self.cur = None
            return
        sim.engine.schedule(cca_at, P_MAC, self.id, "cca", self._cca, 1)

    def _cca(self, k: int) -> None:
        sim = self.sim
        now = sim.engine.now
        if sim.medium.busy(self.id, now) or sim.medium.transmitting(self.id, now):
            self._channel_busy()
        elif k < sim.csma.cca_count:
            sim.engine.schedule(now + 1, P_MAC, self.id, "cca", self._cca, k + 1)
        else:
            sim.engine.schedule(now + 1, P_MAC, self.id, "csma_tx", self._csma_tx)

    def _channel_busy(self) -> None:
        csma = self.sim.csma
        self.nb += 1
        self.be = min(self.be + 1, csma.max_be)
        if self.nb > csma.max_csma_backoffs:
            q, frame = self.cur
            q.remove(frame)
            self.retries.pop(frame.id, None)
            self.sim.rec.record_drop(channel_access=True)
            self._finish()
        else:
            self._backoff()

    def _csma_tx(self) -> None:
        sim = self.sim
        if sim.medium.transmitting(self.id, sim.engine.now):
            self._channel_busy()
            return
        q, frame = self.cur
        sim.send_data(self, frame, sim.next_hop(self), "csma", self._csma_done)

    def _csma_done(self, frame: Frame, ok: bool) -> None:
        q, _ = self.cur
        if ok:
            q.remove(frame)
            self.retries.pop(frame.id, None)
            self.sim.rec.record_hop_acked()
            self._finish()
            return
        r = self.retries.get(frame.id, 0) + 1
        if r > self.sim.csma.max_frame_retries:
            q.remove(frame)
            self.retries.pop(frame.id, None)
            self.sim.rec.record_drop(channel_access=False)
            self._finish()
            return
        self.retries[frame.id] = r
        self.nb = 0
        self.be = self.sim.csma.min_be
        self._backoff()

    def _finish(self) -> None:
        self.csma_active = False
        self.cur = None
        self.kick()

    # reception
    def receive(self, frame: Frame) -> None:
        sim = self.sim
        if frame.id in self.seen:
            sim.rec.record_duplicate()
            return
        self.seen.add(frame.id)
        if frame.final_dst == self.address:
            sim.deliver(frame)
            return
        self.enqueue(replace(frame, src=self.address, hop_count=frame.hop_count + 1))
        sim.engine.schedule(sim.engine.now + sim.ack_ticks, P_MAC, self.id, "wake", self.wake)

    def wake(self) -> None:
        """New work arrived; start sending if a window is open."""
        self.kick()
        if self.sim.engine.now < self.cf_end:
            self.cf_send()


# --- simulation --------------------------------------------------------------

class Simulation:
    """One run of one mode over one topology and one traffic seed."""

    def __init__(
        self,
        tree: Tree,
        cycle: GlobalCycle,
        mode: SimMode | str = SimMode.MACARI,
        traffic: TrafficSpec = TrafficSpec(),
        radio: RadioParams = RadioParams(),
        csma: CsmaParams = CsmaParams(),
        seed: int = 0,
        horizon_cycles: int | None = None,
        *,
        scenario: str = "",
        topology_seed: int = 0,
        record_transmissions: bool = False,
        trace=None,
    ):
        self.tree = tree
        self.cycle = cycle
        self.mode = SimMode(mode)
        self.traffic = traffic
        self.radio = radio
        self.csma = csma
        self.seed = seed
        self.tt = mode_timetable(self.mode, cycle, tree)
        self.engine = Engine(trace)
        self.medium = Medium({n.id: n.position for n in tree.nodes.values()}, radio)
        self.frame_ticks = radio.airtime_ticks(traffic.mpdu_len)
        self.trans_ticks = radio.transaction_ticks(traffic.mpdu_len)
        self.ack_ticks = self.trans_ticks - self.frame_ticks
        self.ifs_ticks = math.ceil(round(LIFS / TICK, 9))
        self.addr_to_id = tree.by_address()
        self.pan = tree.root
        self.pan_address = tree.nodes[tree.root].address
        self.nodes = {nid: NodeMac(self, nid) for nid in sorted(tree.nodes)}
        self.plan = traffic_plan(traffic, tree, cycle, seed, self.tt)
        c = cycle.cycle_ticks
        if horizon_cycles is None:
            last = self.plan[-1][0] if self.plan else 0
            horizon_cycles = last // c + 3 if self.plan else 1
        self.n_cycles = horizon_cycles
        self.horizon = horizon_cycles * c
        self.metrics = RunMetrics(
            scenario=scenario,
            mode=self.mode.value,
            topology_seed=topology_seed,
            traffic_seed=seed,
            cycles=horizon_cycles,
            horizon_ticks=self.horizon,
            cycle_ticks=c,
            t1t2_ticks=cycle.t1t2_ticks,
        )
        self.rec = Recorder(self.metrics)
        self.record_transmissions = record_transmissions
        self.transmissions: list = []
        self._next_frame_id = 0
        self._beacons, _ = beacon_cascade(cycle, radio)
        self._routed_queues = ("lp",) if self.mode is SimMode.MACARI else ("hp", "lp")

    # wiring
    def cycle_of(self, tick: int) -> tuple[int, int]:
        """(sequence, T1 tick) of the cycle a generation instant belongs to."""
        c, t1 = self.cycle.cycle_ticks, self.cycle.sync_ticks
        k = (tick - t1) // c
        return k, k * c + t1

    def next_hop(self, mac: NodeMac) -> int:
        if mac.is_ed:
            return mac.parent
        params = self.tree.params
        if self.mode is SimMode.BEACON_ONLY:
            addr = tree_next_hop(mac.node, self.pan_address, params)
        else:
            addr = shortcut_next_hop(mac.node, self.pan_address, mac.table, params)
        return self.addr_to_id[addr]

    def run(self) -> RunMetrics:
        for k in range(self.n_cycles):
            self.engine.schedule(k * self.cycle.cycle_ticks, P_BOUNDARY, -1, "cycle", self._start_cycle, k)
        for tick, ed, prio in self.plan:
            if tick < self.horizon:
                self.engine.schedule(tick, P_GENERATE, ed, "generate", self._generate, ed, prio)
        self.engine.run(self.horizon)
        self._close()
        return self.metrics

    def _start_cycle(self, k: int) -> None:
        t0 = k * self.cycle.cycle_ticks
        end = min(t0 + self.cycle.cycle_ticks, self.horizon)
        for nid in self.nodes:
            on = sum(max(0, min(t0 + e, end) - (t0 + s)) for s, e in self.tt.radio_on[nid])
            self.rec.record_energy(nid, on * TICK)
            self.nodes[nid].table.clear()
        for b in self._beacons:
            self.engine.schedule(t0 + b.start, P_MAC, b.coordinator, "beacon", self._send_beacon, b, k)
        for w in self.tt.windows:
            if w.kind != "beacon":
                self.engine.schedule(t0 + w.start, P_BOUNDARY, w.owner if w.owner is not None else -1,
                                     w.kind, self._open_window, w, t0)

    def _open_window(self, w, t0: int) -> None:
        end = t0 + w.end
        if w.kind == "cap":
            for ed in self.tree.end_device_children(w.owner):
                self.nodes[ed].open_csma(end, ("lp",))
        elif w.kind in ("gts", "relay"):
            self.nodes[w.owner].open_cf(w.kind, end)
        elif w.kind == "routed":
            for c in self.tree.coordinators:
                if c != self.pan:
                    self.nodes[c].open_csma(end, self._routed_queues)
        elif w.kind == "open":
            for nid, mac in self.nodes.items():
                if nid != self.pan:
                    mac.open_csma(end, ("hp", "lp"))

    def _send_beacon(self, b: BeaconTx, seq: int) -> None:
        now = self.engine.now
        tx = self.medium.transmit(b.coordinator, None, "beacon", now, b.length)
        self.rec.record_beacon()
        self._log_tx(tx)
        self.engine.schedule(tx.end_tick, P_END, b.coordinator, "beacon_end", self._beacon_end, tx)

    def _beacon_end(self, tx) -> None:
        sender = self.tree.nodes[tx.sender]
        for c in self.tree.coordinators:
            if c == tx.sender:
                continue
            if self.medium.resolve(tx, c) is Outcome.DECODED:
                self.nodes[c].table.add(sender.address, sender.depth)

    def _generate(self, ed: int, prio: str) -> None:
        now = self.engine.now
        seq, t1 = self.cycle_of(now)
        frame = Frame(
            id=self._next_frame_id,
            src=self.tree.nodes[ed].address,
            dst=self.tree.nodes[self.tree.nodes[ed].parent].address,
            final_dst=self.pan_address,
            priority=prio,
            mpdu_len=self.traffic.mpdu_len,
            gen_tick=now,
            gen_cycle_seq=seq,
            timestamp_backoffs=now - t1,
            origin=ed,
        )
        self._next_frame_id += 1
        self.rec.record_generated(frame)
        mac = self.nodes[ed]
        mac.enqueue(frame)
        if prio == "high" and self.mode is not SimMode.BEACON_ONLY:
            if now < mac.cf_end:
                mac.cf_send()
        else:
            mac.kick()

    # data path
    def send_data(self, mac: NodeMac, frame: Frame, receiver: int, access: str, done) -> None:
        now = self.engine.now
        frame.dst = self.tree.nodes[receiver].address
        tx = self.medium.transmit(mac.id, receiver, "data", now, self.frame_ticks, frame, access)
        self.rec.record_tx(frame.mpdu_len)
        self._log_tx(tx)
        self.engine.schedule(tx.end_tick, P_END, mac.id, "data_end", self._data_end, tx, done)

    def _data_end(self, tx, done) -> None:
        now = self.engine.now
        rx = tx.receiver
        c = self.cycle.cycle_ticks
        if not (self.tt.is_on(rx, tx.start_tick % c) and self.tt.is_on(rx, (tx.end_tick - 1) % c)):
            tx.outcome = None
            self.rec.record_receiver_asleep()
            ok = False
        else:
            tx.outcome = self.medium.resolve(tx, rx)
            ok = tx.outcome is Outcome.DECODED
            if ok:
                self.rec.record_rx(tx.frame.mpdu_len)
            elif tx.outcome is Outcome.COLLISION:
                self.rec.record_collision(tx.access in ("gts", "relay"))
            else:
                self.rec.record_below_sensitivity()
        if ok:
            self.nodes[rx].receive(tx.frame)
            ack = self.medium.transmit(rx, tx.sender, "ack", now, self.ack_ticks)
            self._log_tx(ack)
            self.engine.schedule(ack.end_tick, P_END, rx, "ack_end", self._ack_end, ack, tx, done)
        else:
            self.engine.schedule(tx.start_tick + self.trans_ticks, P_END, tx.sender, "ack_timeout",
                                 done, tx.frame, False)

    def _ack_end(self, ack, tx, done) -> None:
        ok = self.medium.resolve(ack, tx.sender) is Outcome.DECODED
        self.rec.record_ack(lost=not ok)
        done(tx.frame, ok)

    def deliver(self, frame: Frame) -> None:
        _, t1 = self.cycle_of(frame.gen_tick)
        self.rec.record_delivery(frame, self.engine.now, t1)

    def _log_tx(self, tx) -> None:
        if self.record_transmissions:
            self.transmissions.append(tx)

    def _close(self) -> None:
        m = self.metrics
        m.in_air_at_horizon = sum(
            1 for t in self.medium.recent if t.kind == "data" and t.end_tick > self.horizon
        )
        m.pending_at_horizon = sum(mac.pending() for mac in self.nodes.values())
        m.trace_hash = self.engine.trace_hash()


def simulate(tree: Tree, cycle: GlobalCycle, mode: SimMode | str = SimMode.MACARI,
             traffic: TrafficSpec = TrafficSpec(), seed: int = 0, **kwargs) -> RunMetrics:
    return Simulation(tree, cycle, mode, traffic, seed=seed, **kwargs).run()
