import csv
import io

import pytest
from hypothesis import given, strategies as st

from macari.mac import TrafficSpec, simulate
from macari.metrics import (
    COUNTERS,
    CSV_FIELDS,
    DelayEntry,
    RunMetrics,
    aggregate,
    aggregate_to_csv,
    delay_histogram,
    runs_to_csv,
    write_histogram,
)
from macari.schedule import TICK, build_cycle
from macari.topology import tree_from_dict


def metrics_with(delays, cycle_ticks=1000, t1t2=400):
    m = RunMetrics(scenario="s", mode="macari", cycle_ticks=cycle_ticks, t1t2_ticks=t1t2)
    for i, (ticks, prio) in enumerate(delays):
        m.delays.append(DelayEntry(i, 1, prio, ticks, False, 0, 0))
    return m


def test_histogram_single_bin():
    m = metrics_with([(100, "high")] * 5)
    bins = delay_histogram(m, 0.01)
    assert sum(c for *_, c in bins) == 5
    assert len([c for *_, c in bins if c]) == 1
    assert bins[-1][1] >= m.delay_bound_ticks * TICK - 1e-12


def test_histogram_filters_priority():
    m = metrics_with([(10, "high"), (20, "low"), (3000, "low")])
    assert sum(c for *_, c in delay_histogram(m, 0.05, priority="high")) == 1
    all_bins = delay_histogram(m, 0.05)
    assert sum(c for *_, c in all_bins) == 3
    assert all_bins[-1][1] >= 3000 * TICK
    with pytest.raises(ValueError):
        delay_histogram(m, 0)


def test_write_histogram(tmp_path):
    bins = delay_histogram(metrics_with([(100, "high")]), 0.1)
    p = tmp_path / "h.dat"
    write_histogram(p, bins)
    lines = p.read_text().splitlines()
    assert lines[0].startswith("#") and len(lines) == len(bins) + 1
    assert len(lines[1].split()) == 2


def test_zero_traffic_counters():
    tree = tree_from_dict({"params": {"rm": 3, "cm": 6, "lm": 5}, "nodes": [
        {"id": 0, "role": "pan_coordinator", "parent": None},
        {"id": 1, "role": "end_device", "parent": 0, "position": [5, 0]},
    ]})
    cycle = build_cycle(tree, 0.03, 0.0, 0.0, 1.0)
    m = simulate(tree, cycle, "macari", TrafficSpec(pattern="none"), horizon_cycles=2)
    counters = m.counters()
    assert counters.pop("beacons_sent") == 2
    assert not any(counters.values())
    assert sum(m.energy.values()) > 0

    one = simulate(tree, cycle, "macari", TrafficSpec(frames_per_ed=1, hp_fraction=0.0))
    assert (one.frames_sent, one.frames_received, one.collisions) == (1, 1, 0)
    assert len(one.delays) == one.delivered == 1


def test_json_roundtrip():
    m = metrics_with([(5, "high"), (7, "low")])
    m.energy = {0: 0.5, 3: 1.25}
    m.collisions = 4
    m.trace_hash = "abc"
    back = RunMetrics.from_json(m.to_json())
    assert back == m
    assert back.to_json() == m.to_json()


@given(st.lists(st.tuples(st.integers(0, 10_000), st.sampled_from(["high", "low"])), max_size=20),
       st.dictionaries(st.integers(0, 50), st.floats(0, 100, allow_nan=False), max_size=5))
def test_json_roundtrip_property(delays, energy):
    m = metrics_with(delays)
    m.energy = energy
    assert RunMetrics.from_json(m.to_json()) == m


def test_aggregate():
    a = metrics_with([])
    a.frames_sent = 10
    b = metrics_with([])
    b.frames_sent = 20
    s = aggregate([a, b])
    assert s["runs"] == 2
    assert s["frames_sent"] == {"mean": 15.0, "min": 10, "max": 20}
    assert aggregate([a])["frames_sent"]["mean"] == 10
    assert aggregate([a, a])["frames_sent"]["mean"] == 10
    with pytest.raises(ValueError):
        aggregate([])


def test_csv_outputs():
    a = metrics_with([(2000, "high")], cycle_ticks=1000, t1t2=400)
    text = runs_to_csv([a, a])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_FIELDS and len(rows) == 2
    assert rows[0]["high_over_bound"] == "1"
    agg = list(csv.reader(io.StringIO(aggregate_to_csv([aggregate([a])]))))
    assert len(agg) == 2 and len(agg[0]) == len(agg[1]) == 3 + 3 * (len(COUNTERS) + 1)
