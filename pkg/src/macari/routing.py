"""Hierarchical tree routing and its shortcut variant.

Everything here works from addresses alone: the Cskip block layout is
enough to recover any node's chain of ancestors, so no global topology
knowledge is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .topology import Node, TopologyParams, cskip


class RoutingError(ValueError):
    pass


class Unreachable(RoutingError):
    pass


@dataclass
class NeighborTable:
    owner: int
    entries: dict[int, int] = field(default_factory=dict)  # address -> depth

    def add(self, address: int, depth: int) -> None:
        self.entries[address] = depth

    def clear(self) -> None:
        self.entries.clear()

    def __len__(self):
        return len(self.entries)


def address_path(address: int, params: TopologyParams) -> tuple[int, ...]:
    """Addresses from the PAN coordinator (0) down to ``address`` inclusive."""
    path = [0]
    a, d = 0, 0
    while a != address:
        if d >= params.lm or address < a:
            raise Unreachable(f"address {address} is not in the tree address space")
        block = cskip(params, d)
        first_ed = a + params.rm * block + 1
        if address >= first_ed:
            if address > a + params.rm * block + (params.cm - params.rm):
                raise Unreachable(f"address {address} is not in the tree address space")
            path.append(address)
            break
        a = a + 1 + ((address - a - 1) // block) * block
        d += 1
        path.append(a)
    return tuple(path)


def tree_distance(a: int, b: int, params: TopologyParams) -> int:
    pa, pb = address_path(a, params), address_path(b, params)
    common = 0
    for x, y in zip(pa, pb):
        if x != y:
            break
        common += 1
    return len(pa) + len(pb) - 2 * common


def _parent_address(node: Node, params: TopologyParams) -> int:
    path = address_path(node.address, params)
    if len(path) < 2:
        raise Unreachable("the PAN coordinator has no parent")
    return path[-2]


def tree_next_hop(current: Node, dst: int, params: TopologyParams) -> int:
    """Next-hop address; returns ``current.address`` for local delivery."""
    a = current.address
    if dst == a:
        return a
    if not current.is_coordinator:
        return _parent_address(current, params)
    if current.depth == 0:
        address_path(dst, params)  # raises Unreachable outside the space
        inside = True
    else:
        inside = a < dst <= a + cskip(params, current.depth - 1) - 1
    if not inside:
        return _parent_address(current, params)
    block = cskip(params, current.depth)
    if dst > a + params.rm * block:
        return dst
    return a + 1 + ((dst - a - 1) // block) * block


def shortcut_next_hop(current: Node, dst: int, table: NeighborTable | None,
                      params: TopologyParams) -> int:
    """Tree next hop, replaced by a neighbor that is strictly closer to ``dst``.

    Ties keep the default tree route; among equally good neighbors the
    lowest address wins.
    """
    default = tree_next_hop(current, dst, params)
    if default == current.address or not table:
        return default
    best, best_dist = default, tree_distance(default, dst, params)
    for nb in sorted(table.entries):
        if nb == current.address:
            continue
        dist = tree_distance(nb, dst, params)
        if dist < best_dist:
            best, best_dist = nb, dist
    return best
