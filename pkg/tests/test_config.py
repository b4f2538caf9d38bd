import json

import pytest

from macari.config import ConfigError, bundled_names, cycle_for, load_config, parse_config, resolve_path
from macari.mac import SimMode
from macari.schedule import TICK

BASE_SCENARIOS = {"scenario1": (9, 25, 6), "scenario2": (9, 36, 7), "scenario3": (16, 49, 6),
          "scenario4": (16, 64, 7), "scenario5": (25, 81, 7)}


def minimal(**over):
    data = {"topology": {"params": {"rm": 3, "cm": 6, "lm": 5},
                         "generator": {"n_coordinators": 3, "n_end_devices": 4}}}
    data.update(over)
    return data


def test_bundled_names():
    names = bundled_names()
    assert set(BASE_SCENARIOS) | {"delay_5x8", "delay_9x2"} == set(names)


@pytest.mark.parametrize("name", sorted(BASE_SCENARIOS))
def test_base_scenario_configs(name):
    n, m, cm = BASE_SCENARIOS[name]
    cfg = load_config(name)
    assert cfg.params.cm == cm and cfg.params.rm == 3 and cfg.params.lm == 5
    assert set(cfg.modes) == set(SimMode)
    assert len(cfg.topology_seeds) == 10 and len(cfg.traffic_seeds) == 10
    tree = cfg.tree(cfg.topology_seeds[0])
    assert len(tree.coordinators) == n and len(tree.end_devices) == m
    assert cfg.traffic.frames_per_ed == 16 and cfg.traffic.hp_fraction == 0.25


@pytest.mark.parametrize("name,n,depth", [("delay_5x8", 5, 2), ("delay_9x2", 9, 3)])
def test_delay_configs(name, n, depth):
    cfg = load_config(name)
    tree = cfg.tree(0)
    assert len(tree.coordinators) == n
    assert cfg.topology_file.exists()
    (src,) = cfg.traffic.sources
    assert tree.nodes[tree.nodes[src].parent].depth == depth


def test_auto_sizing_fits_high_priority_load():
    cfg = load_config("scenario1")
    tree = cfg.tree(0)
    cycle = cycle_for(tree, cfg)
    per_cycle = cycle.cycle_duration / (cfg.traffic.period / cfg.traffic.hp_fraction)
    trans = cfg.radio.transaction_ticks(cfg.traffic.mpdu_len)
    for slot in cycle.star_slots:
        for g in slot.gts_slots:
            assert g.length >= trans * max(1, int(per_cycle))
        assert slot.relay_ticks * TICK >= cfg.relay_min - 1e-12


def test_path_or_name(tmp_path):
    p = tmp_path / "mine.json"
    p.write_text(json.dumps(minimal()))
    assert load_config(p).name == "mine"
    assert resolve_path("scenario1").name == "scenario1.json"
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(p)


@pytest.mark.parametrize("data", [
    [],
    {},
    minimal(traffic={"bogus": 1}),
    minimal(extra=1),
    minimal(durations={"colect": 0.05}),
    minimal(seeds={"traffic": [0], "phase": [1]}),
    minimal(traffic={"hp_fraction": 2}),
    minimal(seeds={"traffic": []}),
    minimal(seeds={"topology": ["a"]}),
    minimal(durations={"collect": -1}),
    minimal(durations={"relay": "table"}),
    minimal(durations={"rho": -0.5}),
    minimal(modes=[]),
    minimal(modes=["tdma"]),
    minimal(horizon_cycles=-1),
    {"topology": {"params": {"rm": 3, "cm": 6, "lm": 5}}},
    {"topology": {"params": {"rm": 3, "cm": 6, "lm": 5}, "file": "nowhere.json"}},
    {"topology": {"params": {"rm": 9, "cm": 6, "lm": 5}, "generator": {"n_coordinators": 2}}},
])
def test_config_errors(data):
    with pytest.raises(ConfigError):
        parse_config(data)


def test_seed_forms():
    cfg = parse_config(minimal(seeds={"topology": 4, "traffic": {"start": 2, "stop": 5}}))
    assert cfg.topology_seeds == (4,) and cfg.traffic_seeds == (2, 3, 4)


def test_collect_from_table():
    cfg = parse_config(minimal(durations={"collect": "table", "relay": 0.01, "gts": 0.0}))
    tree = cfg.tree(0)
    cycle = cfg.cycle(tree)
    for s in cycle.star_slots:
        assert s.cap_duration > 0
