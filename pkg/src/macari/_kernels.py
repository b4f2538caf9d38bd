"""Numeric kernels with a numba path and a pure-numpy fallback.

Set ``MACARI_DISABLE_NUMBA=1`` to force the numpy implementations (also
used automatically when numba is not importable).
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None

USE_NUMBA = njit is not None and os.environ.get("MACARI_DISABLE_NUMBA", "").lower() not in (
    "1",
    "true",
    "yes",
)


# --- received power matrix ---------------------------------------------------

def rx_power_matrix_numpy(xy, tx_power, freq_mhz, n_coeff):
    xy = np.asarray(xy, dtype=np.float64)
    diff = xy[:, None, :] - xy[None, :, :]
    d = np.sqrt((diff**2).sum(axis=-1))
    d = np.maximum(d, 1.0)
    loss = 20.0 * np.log10(freq_mhz) + n_coeff * np.log10(d) - 28.0
    out = tx_power - loss
    np.fill_diagonal(out, np.inf)
    return out


def _rx_power_matrix_loops(xy, tx_power, freq_mhz, n_coeff):
    n = xy.shape[0]
    out = np.empty((n, n))
    base = 20.0 * math.log10(freq_mhz) - 28.0
    for i in range(n):
        out[i, i] = np.inf
        for j in range(i + 1, n):
            dx = xy[i, 0] - xy[j, 0]
            dy = xy[i, 1] - xy[j, 1]
            d = math.sqrt(dx * dx + dy * dy)
            if d < 1.0:
                d = 1.0
            p = tx_power - (base + n_coeff * math.log10(d))
            out[i, j] = p
            out[j, i] = p
    return out


# --- all-pairs hop distance over a parent array -----------------------------

def tree_distance_matrix_numpy(parent, depth):
    """Hop distance between every pair of nodes; ``parent[root] == -1``."""
    parent = np.asarray(parent, dtype=np.int64)
    depth = np.asarray(depth, dtype=np.int64)
    n = parent.shape[0]
    max_depth = int(depth.max()) if n else 0
    # anc[k, i] = ancestor of i at depth k (or -1)
    anc = np.full((max_depth + 1, n), -1, dtype=np.int64)
    cur = np.arange(n)
    for _ in range(max_depth + 1):
        valid = cur >= 0
        anc[depth[cur[valid]], np.nonzero(valid)[0]] = cur[valid]
        cur = np.where(valid, parent[np.maximum(cur, 0)], -1)
    # depth of lowest common ancestor = deepest level where ancestors agree
    same = (anc[:, :, None] == anc[:, None, :]) & (anc[:, :, None] >= 0)
    lca_depth = same.sum(axis=0) - 1
    return depth[:, None] + depth[None, :] - 2 * lca_depth


def _tree_distance_matrix_loops(parent, depth):
    n = parent.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = i, j
            hops = 0
            while depth[a] > depth[b]:
                a = parent[a]
                hops += 1
            while depth[b] > depth[a]:
                b = parent[b]
                hops += 1
            while a != b:
                a = parent[a]
                b = parent[b]
                hops += 2
            out[i, j] = hops
            out[j, i] = hops
    return out


# --- brute-force delay-budget search -----------------------------------------

def largest_feasible_n_numpy(quad, lin, const, d_max, n_cap=10000):
    """Largest integer n with quad*n^2 + lin*n + const <= d_max (0 if none)."""
    quad, lin, const, d_max = np.broadcast_arrays(
        *(np.asarray(v, dtype=np.float64) for v in (quad, lin, const, d_max))
    )
    out = np.zeros(quad.shape, dtype=np.int64)
    flat = out.reshape(-1)
    q, l, c, d = (v.reshape(-1) for v in (quad, lin, const, d_max))
    for k in range(flat.size):
        n = np.arange(1, n_cap + 1, dtype=np.float64)
        ok = q[k] * n * n + l[k] * n + c[k] <= d[k]
        # Constraint is increasing in n, so feasible values form a prefix.
        flat[k] = int(np.argmin(ok)) if not ok.all() else n_cap
    return out


def _largest_feasible_n_loops(q, l, c, d, n_cap):
    out = np.zeros(q.shape[0], dtype=np.int64)
    for k in range(q.shape[0]):
        n = 0
        while n < n_cap:
            m = n + 1.0
            if q[k] * m * m + l[k] * m + c[k] <= d[k]:
                n += 1
            else:
                break
        out[k] = n
    return out


if USE_NUMBA:
    _rx_power_matrix_jit = njit(cache=True)(_rx_power_matrix_loops)
    _tree_distance_matrix_jit = njit(cache=True)(_tree_distance_matrix_loops)
    _largest_feasible_n_jit = njit(cache=True)(_largest_feasible_n_loops)
else:
    _rx_power_matrix_jit = _rx_power_matrix_loops
    _tree_distance_matrix_jit = _tree_distance_matrix_loops
    _largest_feasible_n_jit = _largest_feasible_n_loops


def rx_power_matrix_numba(xy, tx_power, freq_mhz, n_coeff):
    return _rx_power_matrix_jit(np.ascontiguousarray(xy, dtype=np.float64),
                                float(tx_power), float(freq_mhz), float(n_coeff))


def tree_distance_matrix_numba(parent, depth):
    return _tree_distance_matrix_jit(np.ascontiguousarray(parent, dtype=np.int64),
                                     np.ascontiguousarray(depth, dtype=np.int64))


def largest_feasible_n_numba(quad, lin, const, d_max, n_cap=10000):
    arrs = np.broadcast_arrays(*(np.asarray(v, dtype=np.float64) for v in (quad, lin, const, d_max)))
    shape = arrs[0].shape
    flat = [np.ascontiguousarray(a.reshape(-1)) for a in arrs]
    return _largest_feasible_n_jit(*flat, n_cap).reshape(shape)


if USE_NUMBA:
    rx_power_matrix = rx_power_matrix_numba
    tree_distance_matrix = tree_distance_matrix_numba
    largest_feasible_n = largest_feasible_n_numba
else:
    rx_power_matrix = rx_power_matrix_numpy
    tree_distance_matrix = tree_distance_matrix_numpy
    largest_feasible_n = largest_feasible_n_numpy
