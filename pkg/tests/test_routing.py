import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from macari import _kernels
from macari.routing import (
    NeighborTable,
    Unreachable,
    address_path,
    shortcut_next_hop,
    tree_distance,
    tree_next_hop,
)
from macari.topology import TopologyParams, generate_random_tree, tree_from_dict

P = TopologyParams(3, 6, 5)


def hop_matrix(tree):
    ids = sorted(tree.nodes)
    index = {n: i for i, n in enumerate(ids)}
    parent = [index[tree.nodes[n].parent] if tree.nodes[n].parent is not None else -1 for n in ids]
    depth = [tree.nodes[n].depth for n in ids]
    return index, _kernels.tree_distance_matrix_numpy(parent, depth)


def test_local_delivery_and_parent():
    t = generate_random_tree(P, 9, 2, seed=1)
    for n in t.nodes.values():
        assert tree_next_hop(n, n.address, P) == n.address
    leaves = [c for c in t.coordinators if not t.coordinator_children(c) and c != t.root]
    for c in leaves:
        node = t.nodes[c]
        assert tree_next_hop(node, 0, P) == t.nodes[node.parent].address


def test_pan_routes_into_block():
    nodes = [{"id": 0, "role": "pan_coordinator", "parent": None},
             {"id": 1, "role": "coordinator", "parent": 0},
             {"id": 2, "role": "coordinator", "parent": 0}]
    t = tree_from_dict({"params": {}, "nodes": nodes})
    assert t.nodes[2].address == 242
    assert tree_next_hop(t.nodes[0], 300, P) == 242


def test_unreachable_from_root():
    t = generate_random_tree(P, 3, 0, seed=0)
    with pytest.raises(Unreachable):
        tree_next_hop(t.nodes[0], 0xFFFF, P)


def test_address_path_matches_tree():
    t = generate_random_tree(P, 16, 0, seed=2, n_end_devices=49)
    for n in t.nodes.values():
        chain = [n.id] + t.ancestors(n.id)
        assert address_path(n.address, P) == tuple(t.nodes[x].address for x in reversed(chain))


@pytest.mark.parametrize("seed", range(5))
def test_analytic_distance_matches_oracle(seed):
    t = generate_random_tree(P, 16, 0, seed=seed, n_end_devices=49)
    index, hops = hop_matrix(t)
    for a, b in itertools.combinations(sorted(t.nodes), 2):
        assert tree_distance(t.nodes[a].address, t.nodes[b].address, P) == hops[index[a], index[b]]


def test_loop_freedom():
    t = generate_random_tree(P, 16, 0, seed=7, n_end_devices=49)
    by_addr = t.by_address()
    for src, dst in itertools.product(sorted(t.nodes), repeat=2):
        cur, steps = t.nodes[src], 0
        target = t.nodes[dst].address
        while cur.address != target:
            cur = t.nodes[by_addr[tree_next_hop(cur, target, P)]]
            steps += 1
            assert steps <= 2 * P.lm


def test_empty_table_equals_tree_route():
    t = generate_random_tree(P, 9, 1, seed=3)
    for a, b in itertools.product(sorted(t.nodes), repeat=2):
        n = t.nodes[a]
        dst = t.nodes[b].address
        assert shortcut_next_hop(n, dst, NeighborTable(a), P) == tree_next_hop(n, dst, P)
        assert shortcut_next_hop(n, dst, None, P) == tree_next_hop(n, dst, P)


def test_neighbor_is_destination():
    t = generate_random_tree(P, 9, 0, seed=3)
    a, b = [c for c in t.coordinators if t.nodes[c].depth >= 2][:1] + [0]
    table = NeighborTable(a, {t.nodes[b].address: t.nodes[b].depth})
    assert shortcut_next_hop(t.nodes[a], t.nodes[b].address, table, P) == t.nodes[b].address


def test_ties_keep_tree_route():
    t = generate_random_tree(P, 9, 0, seed=5)
    node = t.nodes[max(t.coordinators, key=lambda c: t.nodes[c].depth)]
    default = tree_next_hop(node, 0, P)
    # a sibling is never strictly closer to the PAN than the parent
    sibs = [s for s in t.coordinator_children(node.parent) if s != node.id]
    table = NeighborTable(node.id, {t.nodes[s].address: t.nodes[s].depth for s in sibs})
    assert shortcut_next_hop(node, 0, table, P) == default


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5000), st.integers(2, 16), st.data())
def test_shortcut_never_worse(seed, n, data):
    t = generate_random_tree(P, n, 0, seed=seed)
    addrs = sorted(t.nodes[c].address for c in t.coordinators)
    for a in t.coordinators:
        picks = data.draw(st.lists(st.sampled_from(addrs), max_size=6))
        table = NeighborTable(a, {x: 0 for x in picks})
        node = t.nodes[a]
        for dst in addrs:
            sc = shortcut_next_hop(node, dst, table, P)
            tr = tree_next_hop(node, dst, P)
            assert tree_distance(sc, dst, P) <= tree_distance(tr, dst, P)


def test_kernel_paths_agree():
    t = generate_random_tree(P, 25, 0, seed=11, n_end_devices=81)
    ids = sorted(t.nodes)
    index = {n: i for i, n in enumerate(ids)}
    parent = [index[t.nodes[n].parent] if t.nodes[n].parent is not None else -1 for n in ids]
    depth = [t.nodes[n].depth for n in ids]
    a = _kernels.tree_distance_matrix_numpy(parent, depth)
    b = _kernels.tree_distance_matrix_numba(parent, depth)
    assert np.array_equal(a, b)
