"""Command line entry point: ``macari <command> ...``.

Exit codes: 0 success, 2 usage error, 3 configuration error, 4 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .config import ConfigError, bundled_names, load_config
from .dimensioning import (
    SWEEP_D_MAX,
    SWEEP_ED,
    SWEEP_RHO,
    DimensioningError,
    DimensioningInput,
    NoCapacity,
    max_stars,
    sweep,
    sweep_to_csv,
)
from .energy import (
    CycleDurations,
    energy_always_on,
    energy_beacon_only,
    energy_gain,
    energy_macari,
    inactivity_gain_table,
)
from .mac import SimMode, Simulation
from .metrics import RunMetrics, aggregate, aggregate_to_csv, runs_to_csv
from .topology import TopologyError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4

OUT_ENV = "MACARI_OUT_DIR"


class UsageError(Exception):
    pass


def parse_int_list(text: str) -> list[int]:
    """'0-9', '1,3,5' or a mix like '0-2,7' (non-negative values)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip()]


# --- simulate ----------------------------------------------------------------

def _run_one(job) -> RunMetrics:
    cfg_ref, mode, ts, tr, horizon = job
    cfg = load_config(cfg_ref)
    tree = cfg.tree(ts)
    cycle = cfg.cycle(tree)
    sim = Simulation(tree, cycle, mode, cfg.traffic, cfg.radio, cfg.csma, seed=tr,
                     horizon_cycles=horizon, scenario=cfg.name, topology_seed=ts)
    return sim.run()


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    modes = [SimMode(m) for m in args.mode] if args.mode else list(cfg.modes)
    traffic_seeds = parse_int_list(args.seeds) if args.seeds is not None else list(cfg.traffic_seeds)
    topo_seeds = (parse_int_list(args.topology_seeds) if args.topology_seeds is not None
                  else list(cfg.topology_seeds))
    if not traffic_seeds or not topo_seeds:
        raise ConfigError("empty seed list")
    horizon = args.horizon if args.horizon is not None else cfg.horizon_cycles
    ref = str(cfg.source) if cfg.source else args.config
    jobs = [(ref, m.value, ts, tr, horizon) for m in modes for ts in topo_seeds for tr in traffic_seeds]

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            runs = list(pool.map(_run_one, jobs))
    else:
        runs = [_run_one(j) for j in jobs]

    out = Path(args.out or os.environ.get(OUT_ENV) or "results") / cfg.name
    out.mkdir(parents=True, exist_ok=True)
    for r in runs:
        stem = f"{r.mode}_t{r.topology_seed}_s{r.traffic_seed}"
        if args.format == "json":
            (out / f"{stem}.json").write_text(r.to_json() + "\n")
        else:
            (out / f"{stem}.csv").write_text(runs_to_csv([r]))
    (out / "runs.csv").write_text(runs_to_csv(runs))
    summaries = [aggregate([r for r in runs if r.mode == m.value]) for m in modes]
    (out / "aggregate.csv").write_text(aggregate_to_csv(summaries))

    over = sum(r.high_over_bound() for r in runs if r.mode == SimMode.MACARI.value)
    for s in summaries:
        print(f"{s['scenario']} {s['mode']}: runs={s['runs']} "
              f"received={s['frames_received']['mean']:.1f} collisions={s['collisions']['mean']:.1f} "
              f"delivered_high={s['delivered_high']['mean']:.1f}/{s['frames_generated_high']['mean']:.1f}")
    print(f"wrote {len(runs)} runs to {out}")
    if over:
        print(f"warning: {over} high-priority frames exceeded the delay bound", file=sys.stderr)
    return EXIT_OK


# --- analytic commands -------------------------------------------------------

def cmd_dimension(args) -> int:
    try:
        inp = DimensioningInput(args.d_max, args.ed, args.relay, args.rho, args.inactive)
    except DimensioningError as exc:
        raise UsageError(str(exc)) from exc
    r = max_stars(inp)
    if args.json:
        print(json.dumps({"n_max": r.n_max, "n_real": r.n_real, "cycle_duration": r.cycle_at_n_max,
                          "d_t1t2": r.d_t1t2_at_n_max, "delay_bound": r.delay_at_n_max}, indent=2))
    else:
        print(f"n_max={r.n_max}")
        print(f"n_real={r.n_real:.4f}")
        print(f"cycle_duration={r.cycle_at_n_max:.6f}")
        print(f"delay_bound={r.delay_at_n_max:.6f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        eds = parse_int_list(args.ed)
        rhos = parse_float_list(args.rho)
        dmaxs = parse_float_list(args.d_max)
    except ValueError as exc:
        raise UsageError(f"bad grid: {exc}") from exc
    if not eds or not rhos or not dmaxs:
        raise UsageError("empty grid")
    try:
        for v in rhos:
            DimensioningInput(1.0, 1, args.relay, v, args.inactive)
        for e in eds:
            DimensioningInput(1.0, e, args.relay, 1.0, args.inactive)
        for d in dmaxs:
            DimensioningInput(d, 1, args.relay, 1.0, args.inactive)
    except DimensioningError as exc:
        raise UsageError(str(exc)) from exc
    text = sweep_to_csv(sweep(eds, rhos, dmaxs, args.relay, args.inactive))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_energy(args) -> int:
    if args.inactivity_sweep:
        rows = inactivity_gain_table([("scenario", args.n, args.m)], args.slot, args.rho, args.rm)
        for r in rows:
            print(f"d_t3t0={r['d_t3t0']:.5f} gain_vs_beacon_only={r['gain_vs_beacon_only']:.4f} "
                  f"gain_vs_always_on={r['gain_vs_always_on']:.4f}")
        return EXIT_OK
    if args.n < 1 or args.m < 0 or args.slot < 0 or args.rho < 0 or args.inactive < 0:
        raise UsageError("need n >= 1 and non-negative m, slot, rho, inactive")
    d = CycleDurations.for_stars(args.n, args.slot, args.rho, args.inactive)
    e = energy_always_on(args.m, args.n, d.cycle)
    e1 = energy_beacon_only(args.m, args.n, d.d_t0t3)
    e2 = energy_macari(args.m, args.n, d.d_t0t1, d.d_t1t2, d.d_t2t3, args.rm)
    print(f"E={e:.5f} E'={e1:.5f} E''={e2:.5f}")
    print(f"ratio={e2 / e1:.4f} gain={energy_gain(args.m, args.n, d, args.rm):.4f}")
    return EXIT_OK


def cmd_cycle(args) -> int:
    cfg = load_config(args.config)
    tree = cfg.tree(args.topology_seed)
    print(cfg.cycle(tree).to_json())
    return EXIT_OK


def cmd_list(args) -> int:
    for name in bundled_names():
        print(name)
    return EXIT_OK


# --- wiring ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="macari", description="MaCARI simulator and dimensioning tool")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run seeded replications of a scenario")
    s.add_argument("--config", required=True, help="config file or bundled scenario name")
    s.add_argument("--mode", action="append", choices=[m.value for m in SimMode],
                   help="restrict to this mode (repeatable)")
    s.add_argument("--seeds", help="traffic seeds, e.g. 0-9 or 1,4,7")
    s.add_argument("--topology-seeds", help="topology seeds, same syntax")
    s.add_argument("--horizon", type=int, help="cycles to simulate (default: until traffic drains)")
    s.add_argument("--out", help=f"output directory (default ${OUT_ENV} or ./results)")
    s.add_argument("--format", choices=("csv", "json"), default="json")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    d = sub.add_parser("dimension", help="largest number of stars meeting a delay budget")
    d.add_argument("--d-max", type=float, default=1.0)
    d.add_argument("--ed", type=int, default=4)
    d.add_argument("--relay", type=float, default=0.010)
    d.add_argument("--rho", type=float, default=1.0)
    d.add_argument("--inactive", type=float, default=0.0)
    d.add_argument("--json", action="store_true")
    d.set_defaults(func=cmd_dimension)

    w = sub.add_parser("sweep", help="n_max table over end-devices, rho and budget")
    w.add_argument("--ed", default=",".join(map(str, SWEEP_ED)))
    w.add_argument("--rho", default=",".join(map(str, SWEEP_RHO)))
    w.add_argument("--d-max", default=",".join(map(str, SWEEP_D_MAX)))
    w.add_argument("--relay", type=float, default=0.010)
    w.add_argument("--inactive", type=float, default=0.0)
    w.add_argument("--out")
    w.set_defaults(func=cmd_sweep)

    e = sub.add_parser("energy", help="closed-form radio-on energy per cycle")
    e.add_argument("--n", type=int, default=9, help="coordinators")
    e.add_argument("--m", type=int, default=25, help="end-devices")
    e.add_argument("--slot", type=float, default=0.06144, help="star slot, relay included")
    e.add_argument("--rho", type=float, default=1.0)
    e.add_argument("--rm", type=int, default=3)
    e.add_argument("--inactive", type=float, default=0.0)
    e.add_argument("--inactivity-sweep", action="store_true",
                   help="gains for the four inactivity settings")
    e.set_defaults(func=cmd_energy)

    c = sub.add_parser("cycle", help="print the global cycle of a scenario as JSON")
    c.add_argument("--config", required=True)
    c.add_argument("--topology-seed", type=int, default=0)
    c.set_defaults(func=cmd_cycle)

    ls = sub.add_parser("list", help="list bundled scenarios")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"macari: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, TopologyError) as exc:
        print(f"macari: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoCapacity as exc:
        print(f"macari: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"macari: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
