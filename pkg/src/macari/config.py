"""Scenario files: JSON documents describing topology, timing, traffic and seeds.

The schema is documented in docs/config-schema.md. Bundled scenarios live
in the package (``macari/data/configs``) and can be referred to by name.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any

from .dimensioning import collect_duration
from .mac import LIFS, CsmaParams, SimMode, TrafficSpec
from .schedule import TICK, GlobalCycle, burst_ticks, build_cycle, relay_durations_for_load, ticks_to_seconds
from .simcore import RadioParams
from .topology import TopologyError, TopologyParams, Tree, generate_random_tree, load_tree

DATA = "data"

TOP_KEYS = {"name", "topology", "durations", "traffic", "phy", "csma", "modes", "seeds", "horizon_cycles"}
TOPOLOGY_KEYS = {"params", "generator", "file"}
GENERATOR_KEYS = {"n_coordinators", "n_end_devices", "ed_per_star", "area"}
DURATION_KEYS = {"collect", "relay", "relay_min", "gts", "rho", "inactive"}
SEED_KEYS = {"topology", "traffic"}


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    name: str
    params: TopologyParams
    generator: dict | None  # n_coordinators, n_end_devices or ed_per_star, area
    topology_file: Path | None
    collect: Any  # seconds, or "table"
    relay: Any  # seconds, or "auto"
    relay_min: float
    gts: Any  # seconds, or "auto"
    rho: float
    inactive: float
    traffic: TrafficSpec
    radio: RadioParams
    csma: CsmaParams
    modes: tuple[SimMode, ...]
    topology_seeds: tuple[int, ...]
    traffic_seeds: tuple[int, ...]
    horizon_cycles: int | None = None
    source: Path | None = field(default=None, repr=False)

    def tree(self, topology_seed: int) -> Tree:
        if self.topology_file is not None:
            return load_tree(self.topology_file)
        g = self.generator
        return generate_random_tree(
            self.params,
            g["n_coordinators"],
            g.get("ed_per_star", 0),
            area=tuple(g.get("area", (200.0, 200.0))),
            seed=topology_seed,
            radio_range_m=self.radio.range_m,
            n_end_devices=g.get("n_end_devices"),
        )

    def cycle(self, tree: Tree) -> GlobalCycle:
        return cycle_for(tree, self)


def _hp_spacing(traffic: TrafficSpec) -> float:
    if traffic.hp_fraction <= 0:
        return math.inf
    return traffic.period / traffic.hp_fraction


def cycle_for(tree: Tree, cfg: ScenarioConfig) -> GlobalCycle:
    """Build the cycle, sizing GTS and relay intervals when asked to.

    With ``auto`` sizing each end-device gets room for every high-priority
    frame it can generate in one cycle, and each relay can carry the whole
    subtree's share. The per-end-device count depends on the cycle length,
    so it is iterated to a fixed point.
    """
    trans = cfg.radio.transaction_ticks(cfg.traffic.mpdu_len)
    ifs = math.ceil(round(LIFS / TICK, 9))
    stars = tree.stars()
    if cfg.collect == "table":
        collect = {s.coordinator: collect_duration(max(1, len(s.end_devices))) for s in stars}
    else:
        collect = float(cfg.collect)
    spacing = _hp_spacing(cfg.traffic)
    k = 1
    if cfg.traffic.pattern == "gts_window":
        # one frame per cycle, plus the previous cycle's frame if it was deferred
        k, spacing = 2, math.inf
    for _ in range(50):
        gts = ticks_to_seconds(burst_ticks(k, trans, ifs)) if cfg.gts == "auto" else float(cfg.gts)
        if cfg.relay == "auto":
            relay = relay_durations_for_load(tree, k, trans, ifs, cfg.relay_min)
        else:
            relay = float(cfg.relay)
        cycle = build_cycle(tree, collect, relay, gts, cfg.rho, cfg.inactive)
        need = max(1, math.ceil(round(cycle.cycle_duration / spacing, 9))) if spacing < math.inf else k
        if need <= k or (cfg.gts != "auto" and cfg.relay != "auto"):
            return cycle
        k = need
    raise ConfigError("automatic GTS/relay sizing did not converge")


# --- loading -----------------------------------------------------------------

def bundled_names() -> list[str]:
    root = resources.files("macari").joinpath(DATA, "configs")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_path(ref: str | Path) -> Path:
    """A filesystem path, or the name of a bundled scenario."""
    p = Path(ref)
    if p.exists():
        return p
    bundled = resources.files("macari").joinpath(DATA, "configs", f"{ref}.json")
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError(f"no such config file or bundled scenario: {ref}")


def load_config(ref: str | Path) -> ScenarioConfig:
    path = resolve_path(ref)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return parse_config(data, base=path.parent, name=path.stem, source=path)


def _seeds(v, what) -> tuple[int, ...]:
    if isinstance(v, int):
        v = [v]
    if isinstance(v, dict):
        v = list(range(v.get("start", 0), v["stop"]))
    if not isinstance(v, list) or not all(isinstance(s, int) for s in v):
        raise ConfigError(f"{what} seeds must be a list of integers")
    if not v:
        raise ConfigError(f"empty {what} seed list")
    return tuple(v)


def _check_keys(raw, allowed, what: str) -> None:
    if not isinstance(raw, dict):
        raise ConfigError(f"{what} must be a JSON object")
    extra = set(raw) - allowed
    if extra:
        raise ConfigError(f"unknown {what} keys: {sorted(extra)}")


def _dataclass_kwargs(cls, raw: dict, what: str) -> dict:
    _check_keys(raw, {f.name for f in fields(cls)}, what)
    return dict(raw)


def parse_config(data: dict, base: Path = Path("."), name: str = "", source: Path | None = None) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(data, TOP_KEYS, "top-level")
    try:
        topo = data["topology"]
        _check_keys(topo, TOPOLOGY_KEYS, "topology")
        params = TopologyParams(**topo.get("params", {}))
        generator = topo.get("generator")
        tfile = topo.get("file")
        if (generator is None) == (tfile is None):
            raise ConfigError("topology needs exactly one of 'generator' or 'file'")
        if tfile is not None:
            tpath = Path(tfile)
            if not tpath.is_absolute():
                tpath = base / tpath
            if not tpath.exists():
                raise ConfigError(f"topology file not found: {tpath}")
        else:
            tpath = None
            _check_keys(generator, GENERATOR_KEYS, "generator")
            if "n_coordinators" not in generator:
                raise ConfigError("generator needs n_coordinators")

        dur = data.get("durations", {})
        _check_keys(dur, DURATION_KEYS, "durations")
        collect = dur.get("collect", 0.06144)
        relay = dur.get("relay", "auto")
        gts = dur.get("gts", "auto")
        for key, v in (("collect", collect), ("relay", relay), ("gts", gts)):
            if isinstance(v, str):
                if v not in ("auto", "table") or (key == "collect") != (v == "table"):
                    raise ConfigError(f"durations.{key}: bad value {v!r}")
            elif not isinstance(v, (int, float)) or v < 0:
                raise ConfigError(f"durations.{key} must be a non-negative number")
        rho = float(dur.get("rho", 1.0))
        inactive = float(dur.get("inactive", 0.0))
        if rho < 0 or inactive < 0:
            raise ConfigError("rho and inactive must be >= 0")

        traffic_raw = _dataclass_kwargs(TrafficSpec, data.get("traffic", {}), "traffic")
        if traffic_raw.get("sources") is not None:
            traffic_raw["sources"] = tuple(traffic_raw["sources"])
        traffic = TrafficSpec(**traffic_raw)
        radio = RadioParams(**_dataclass_kwargs(RadioParams, data.get("phy", {}), "phy"))
        csma = CsmaParams(**_dataclass_kwargs(CsmaParams, data.get("csma", {}), "csma"))
        modes = tuple(SimMode(m) for m in data.get("modes", [m.value for m in SimMode]))
        if not modes:
            raise ConfigError("empty mode list")
        seeds = data.get("seeds", {})
        _check_keys(seeds, SEED_KEYS, "seeds")
        topo_seeds = _seeds(seeds.get("topology", [0]), "topology")
        traffic_seeds = _seeds(seeds.get("traffic", [0]), "traffic")
        horizon = data.get("horizon_cycles")
        if horizon is not None and (not isinstance(horizon, int) or horizon < 0):
            raise ConfigError("horizon_cycles must be a non-negative integer")
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, TopologyError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    return ScenarioConfig(
        name=data.get("name", name),
        params=params,
        generator=generator,
        topology_file=tpath,
        collect=collect,
        relay=relay,
        relay_min=float(dur.get("relay_min", 0.01536)),
        gts=gts,
        rho=rho,
        inactive=inactive,
        traffic=traffic,
        radio=radio,
        csma=csma,
        modes=modes,
        topology_seeds=topo_seeds,
        traffic_seeds=traffic_seeds,
        horizon_cycles=horizon,
        source=source,
    )
