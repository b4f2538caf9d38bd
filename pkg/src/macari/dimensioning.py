"""Closed-form network sizing under an end-to-end delay budget.

With equal star slots s = collect + relay, the worst-case high-priority
delay is one cycle plus one [T1;T2]:

    n(0.00032 n + 0.008) + (2 + rho) s n + d_t3t0 <= d_max

which is a quadratic in the number of stars n.
"""

from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .schedule import SYNC_BASE, SYNC_PER_COORDINATOR, GlobalCycle


class DimensioningError(ValueError):
    pass


class NoCapacity(DimensioningError):
    pass


# Measured time to collect one frame per active end-device (seconds).
COLLECT_TABLE: Mapping[int, float] = {2: 0.020, 4: 0.030, 6: 0.045, 8: 0.050}


def collect_duration(ed: int, table: Mapping[int, float] = COLLECT_TABLE) -> float:
    """Table lookup, linear in between, linear on the end segments outside."""
    if ed < 1:
        raise DimensioningError(f"need at least one active end-device, got {ed}")
    keys = sorted(table)
    if ed in table:
        return table[ed]
    i = bisect.bisect_left(keys, ed)
    i = min(max(i, 1), len(keys) - 1)
    x0, x1 = keys[i - 1], keys[i]
    y0, y1 = table[x0], table[x1]
    return y0 + (y1 - y0) * (ed - x0) / (x1 - x0)


@dataclass(frozen=True)
class DimensioningInput:
    d_max: float
    ed_per_star: int
    relay: float
    rho: float = 1.0
    d_t3t0: float = 0.0

    def __post_init__(self):
        if not self.d_max > 0:
            raise DimensioningError("d_max must be > 0")
        if self.rho < 0 or self.relay < 0 or self.d_t3t0 < 0:
            raise DimensioningError("rho, relay and d_t3t0 must be >= 0")
        if self.ed_per_star < 1:
            raise DimensioningError("ed_per_star must be >= 1")

    @property
    def slot(self) -> float:
        return collect_duration(self.ed_per_star) + self.relay

    def coefficients(self) -> tuple[float, float, float]:
        """(quadratic, linear, constant) terms of the delay as a function of n."""
        return (SYNC_PER_COORDINATOR, SYNC_BASE + (2 + self.rho) * self.slot, self.d_t3t0)

    def delay(self, n: float) -> float:
        a, b, c = self.coefficients()
        return a * n * n + b * n + c

    def cycle(self, n: float) -> float:
        return self.delay(n) - n * self.slot


@dataclass(frozen=True)
class DimensioningResult:
    n_real: float
    n_max: int
    cycle_at_n_max: float
    d_t1t2_at_n_max: float

    @property
    def delay_at_n_max(self) -> float:
        return self.cycle_at_n_max + self.d_t1t2_at_n_max


def max_stars(inp: DimensioningInput) -> DimensioningResult:
    a, b, c = inp.coefficients()
    disc = b * b - 4 * a * (c - inp.d_max)
    n_real = (-b + math.sqrt(disc)) / (2 * a)
    n_max = math.floor(n_real)
    # guard the floor against float noise at exact roots
    if inp.delay(n_max + 1) <= inp.d_max:
        n_max += 1
    elif n_max >= 1 and inp.delay(n_max) > inp.d_max:
        n_max -= 1
    if n_max < 1:
        raise NoCapacity(
            f"a single star already needs {inp.delay(1):.6f}s, over the {inp.d_max}s budget"
        )
    assert inp.delay(n_max) <= inp.d_max < inp.delay(n_max + 1)
    return DimensioningResult(n_real, n_max, inp.cycle(n_max), n_max * inp.slot)


def brute_force_max_stars(inputs: Iterable[DimensioningInput]) -> list[int]:
    """Largest feasible n per input by direct substitution (0 when none)."""
    from . import _kernels

    inputs = list(inputs)
    coeffs = [i.coefficients() for i in inputs]
    found = _kernels.largest_feasible_n(
        [k[0] for k in coeffs], [k[1] for k in coeffs], [k[2] for k in coeffs],
        [i.d_max for i in inputs],
    )
    return [int(v) for v in found]


def worst_case_delay(cycle: GlobalCycle) -> float:
    return cycle.cycle_duration + cycle.d_t1t2


SWEEP_ED = (2, 4, 6, 8)
SWEEP_RHO = (0.25, 0.5, 1.0, 2.0)
SWEEP_D_MAX = (1.0, 2.0)
SWEEP_FIELDS = ("ed", "rho", "d_max", "n_max", "n_real", "cycle_duration")


def sweep(ed_values=SWEEP_ED, rho_values=SWEEP_RHO, d_max_values=SWEEP_D_MAX,
          relay: float = 0.010, d_t3t0: float = 0.0) -> list[dict]:
    rows = []
    for d_max in d_max_values:
        for ed in ed_values:
            for rho in rho_values:
                r = max_stars(DimensioningInput(d_max, ed, relay, rho, d_t3t0))
                rows.append({
                    "ed": ed,
                    "rho": rho,
                    "d_max": d_max,
                    "n_max": r.n_max,
                    "n_real": r.n_real,
                    "cycle_duration": r.cycle_at_n_max,
                })
    return rows


def sweep_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r[k] for k in SWEEP_FIELDS})
    return buf.getvalue()
