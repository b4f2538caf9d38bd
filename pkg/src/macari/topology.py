"""Cluster-tree topologies with ZigBee-style distributed addressing."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace
from pathlib import Path

PAN_COORDINATOR = "pan_coordinator"
COORDINATOR = "coordinator"
END_DEVICE = "end_device"
ROLES = (PAN_COORDINATOR, COORDINATOR, END_DEVICE)

ADDRESS_SPACE = 1 << 16


class TopologyError(ValueError):
    pass


class InfeasibleParameters(TopologyError):
    pass


class CapacityError(TopologyError):
    pass


class NotACoordinator(TopologyError):
    pass


@dataclass(frozen=True)
class TopologyParams:
    rm: int = 3
    cm: int = 6
    lm: int = 5

    def __post_init__(self):
        if self.rm < 1:
            raise TopologyError(f"rm must be >= 1, got {self.rm}")
        if self.cm < self.rm:
            raise TopologyError(f"cm ({self.cm}) must be >= rm ({self.rm})")
        if self.lm < 1:
            raise TopologyError(f"lm must be >= 1, got {self.lm}")


@dataclass(frozen=True)
class Node:
    id: int
    role: str
    parent: int | None
    depth: int
    position: tuple[float, float] = (0.0, 0.0)
    address: int | None = None

    @property
    def is_coordinator(self) -> bool:
        return self.role != END_DEVICE


@dataclass(frozen=True)
class Star:
    coordinator: int
    end_devices: tuple[int, ...]


@dataclass
class Tree:
    params: TopologyParams
    nodes: dict[int, Node]
    root: int
    _children: dict[int, list[int]] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._children = {nid: [] for nid in self.nodes}
        for node in sorted(self.nodes.values(), key=lambda n: n.id):
            if node.parent is not None:
                self._children[node.parent].append(node.id)

    def children(self, nid: int) -> list[int]:
        return list(self._children[nid])

    def coordinator_children(self, nid: int) -> list[int]:
        return [c for c in self._children[nid] if self.nodes[c].is_coordinator]

    def end_device_children(self, nid: int) -> list[int]:
        return [c for c in self._children[nid] if not self.nodes[c].is_coordinator]

    @property
    def coordinators(self) -> list[int]:
        return sorted(n.id for n in self.nodes.values() if n.is_coordinator)

    @property
    def end_devices(self) -> list[int]:
        return sorted(n.id for n in self.nodes.values() if not n.is_coordinator)

    def stars(self) -> list[Star]:
        return [Star(c, tuple(self.end_device_children(c))) for c in self.coordinators]

    def star_of(self, nid: int) -> int:
        """Coordinator id of the star the node belongs to."""
        node = self.nodes[nid]
        return nid if node.is_coordinator else node.parent

    def ancestors(self, nid: int) -> list[int]:
        out = []
        p = self.nodes[nid].parent
        while p is not None:
            out.append(p)
            p = self.nodes[p].parent
        return out

    def descendants(self, nid: int) -> list[int]:
        out, stack = [], list(self._children[nid])
        while stack:
            c = stack.pop()
            out.append(c)
            stack.extend(self._children[c])
        return sorted(out)

    def by_address(self) -> dict[int, int]:
        return {n.address: n.id for n in self.nodes.values()}

    def validate(self) -> None:
        roots = [n for n in self.nodes.values() if n.role == PAN_COORDINATOR]
        if len(roots) != 1 or roots[0].id != self.root or roots[0].depth != 0:
            raise TopologyError("tree must have exactly one PAN coordinator at depth 0")
        for node in self.nodes.values():
            if node.role not in ROLES:
                raise TopologyError(f"node {node.id}: unknown role {node.role!r}")
            if node.role == PAN_COORDINATOR:
                continue
            if node.parent not in self.nodes:
                raise TopologyError(f"node {node.id}: parent {node.parent} missing")
            parent = self.nodes[node.parent]
            if not parent.is_coordinator:
                raise TopologyError(f"node {node.id}: parent {parent.id} is an end-device")
            if node.depth != parent.depth + 1:
                raise TopologyError(f"node {node.id}: depth {node.depth} != parent depth + 1")
            if node.depth > self.params.lm:
                raise TopologyError(f"node {node.id}: depth {node.depth} exceeds lm")
        for nid in self.nodes:
            kids = self._children[nid]
            if not self.nodes[nid].is_coordinator and kids:
                raise TopologyError(f"end-device {nid} has children")
            if len(self.coordinator_children(nid)) > self.params.rm or len(kids) > self.params.cm:
                raise CapacityError(f"node {nid}: too many children")
            # Coordinators at depth lm get a 1-address block and cannot host anyone.
            if kids and self.nodes[nid].depth >= self.params.lm:
                raise CapacityError(f"node {nid} at depth lm cannot have children")

    def to_dict(self) -> dict:
        return {
            "params": {"rm": self.params.rm, "cm": self.params.cm, "lm": self.params.lm},
            "nodes": [
                {
                    "id": n.id,
                    "role": n.role,
                    "parent": n.parent,
                    "position": [round(n.position[0], 6), round(n.position[1], 6)],
                    **({"address": n.address} if n.address is not None else {}),
                }
                for n in sorted(self.nodes.values(), key=lambda n: n.id)
            ],
        }


def cskip(params: TopologyParams, depth: int) -> int:
    """Address block size handed to each coordinator child of a parent at ``depth``."""
    if depth < 0 or depth >= params.lm:
        raise TopologyError(f"cskip undefined for depth {depth} (lm={params.lm})")
    rm, cm, lm = params.rm, params.cm, params.lm
    if rm == 1:
        return 1 + cm * (lm - depth - 1)
    return (1 + cm - rm - cm * rm ** (lm - depth - 1)) // (1 - rm)


def assign_addresses(tree: Tree) -> Tree:
    params = tree.params
    addresses = {tree.root: 0}
    order = [tree.root]
    while order:
        nid = order.pop(0)
        a = addresses[nid]
        coords = tree.coordinator_children(nid)
        eds = tree.end_device_children(nid)
        if len(coords) > params.rm or len(coords) + len(eds) > params.cm:
            raise CapacityError(f"node {nid} has more children than rm/cm allow")
        if not coords and not eds:
            continue
        depth = tree.nodes[nid].depth
        if depth >= params.lm:
            raise CapacityError(f"node {nid} at depth {depth} cannot host children")
        block = cskip(params, depth)
        for k, child in enumerate(coords, start=1):
            addresses[child] = a + 1 + (k - 1) * block
            order.append(child)
        ed_slots = params.cm - params.rm
        for j, child in enumerate(eds, start=1):
            if j <= ed_slots:
                addresses[child] = a + params.rm * block + j
            else:
                # surplus end-devices borrow the first address of a vacant router block
                k = len(coords) + (j - ed_slots)
                addresses[child] = a + 1 + (k - 1) * block
    if max(addresses.values()) >= ADDRESS_SPACE:
        raise CapacityError("address space exhausted (>= 2^16)")
    nodes = {nid: replace(n, address=addresses[nid]) for nid, n in tree.nodes.items()}
    return Tree(params, nodes, tree.root)


def descendant_range(node: Node, params: TopologyParams) -> tuple[int, int]:
    """Inclusive address interval owned by a coordinator."""
    if not node.is_coordinator:
        raise NotACoordinator(f"node {node.id} is an end-device")
    if node.role == PAN_COORDINATOR:
        return (0, ADDRESS_SPACE - 1)
    return (node.address, node.address + cskip(params, node.depth - 1) - 1)


def coordinator_capacity(params: TopologyParams, max_depth: int) -> int:
    return sum(params.rm**d for d in range(max_depth + 1))


def radio_range(tx_power: float, sensitivity: float, frequency: float, n_coeff: float) -> float:
    """Distance at which the indoor path loss uses up the link budget."""
    budget = tx_power - sensitivity
    return 10 ** ((budget - 20 * math.log10(frequency) + 28) / n_coeff)


def generate_random_tree(
    params: TopologyParams,
    n_coordinators: int,
    ed_per_star: int,
    area: tuple[float, float] = (200.0, 200.0),
    seed: int = 0,
    *,
    radio_range_m: float = 55.0,
    n_end_devices: int | None = None,
) -> Tree:
    """Random cluster tree; a pure function of its arguments.

    ``n_end_devices`` overrides ``ed_per_star`` with a total that is spread
    as evenly as the cm limit allows.
    """
    if n_coordinators < 1:
        raise InfeasibleParameters("need at least one coordinator")
    if ed_per_star < 0:
        raise InfeasibleParameters("ed_per_star must be >= 0")
    total_eds = n_coordinators * ed_per_star if n_end_devices is None else n_end_devices
    # Coordinators hosting end-devices must sit above depth lm.
    max_depth = params.lm if total_eds == 0 else params.lm - 1
    if coordinator_capacity(params, max_depth) < n_coordinators:
        raise InfeasibleParameters(
            f"rm={params.rm}, lm={params.lm} cannot host {n_coordinators} coordinators"
        )
    rng = random.Random(f"topology:{seed}")
    width, height = area
    lo, hi = 5.0, 0.8 * radio_range_m

    def place(parent_pos):
        for _ in range(100):
            r = rng.uniform(lo, hi)
            theta = rng.uniform(0.0, 2 * math.pi)
            x, y = parent_pos[0] + r * math.cos(theta), parent_pos[1] + r * math.sin(theta)
            if 0.0 <= x <= width and 0.0 <= y <= height:
                return (x, y)
        return parent_pos[0] + lo, parent_pos[1]

    depth = {0: 0}
    parent = {0: None}
    pos = {0: (width / 2, height / 2)}
    n_coord_kids = {0: 0}
    for cid in range(1, n_coordinators):
        open_ = [c for c in range(cid) if n_coord_kids[c] < params.rm and depth[c] < max_depth]
        p = rng.choice(open_)
        parent[cid], depth[cid] = p, depth[p] + 1
        n_coord_kids[p] += 1
        n_coord_kids[cid] = 0
        pos[cid] = place(pos[p])

    ed_count = _spread_end_devices(params, n_coord_kids, total_eds, rng)
    nodes = {}
    for cid in range(n_coordinators):
        role = PAN_COORDINATOR if cid == 0 else COORDINATOR
        nodes[cid] = Node(cid, role, parent[cid], depth[cid], pos[cid])
    nid = n_coordinators
    for cid in range(n_coordinators):
        for _ in range(ed_count[cid]):
            nodes[nid] = Node(nid, END_DEVICE, cid, depth[cid] + 1, place(pos[cid]))
            nid += 1
    tree = assign_addresses(Tree(params, nodes, 0))
    tree.validate()
    return tree


def regular_tree(params: TopologyParams, depth: int, ed_per_star: int,
                 spacing: float = 20.0) -> Tree:
    """Complete tree: every coordinator above ``depth`` has rm coordinator
    children and every coordinator hosts ``ed_per_star`` end-devices.

    Children sit ``spacing`` metres from their parent on evenly spread
    bearings, so the layout is fixed and needs no seed.
    """
    if depth < 0 or ed_per_star < 0:
        raise InfeasibleParameters("depth and ed_per_star must be >= 0")
    if depth > (params.lm - 1 if ed_per_star else params.lm):
        raise InfeasibleParameters(f"depth {depth} does not fit lm={params.lm}")
    kids = params.rm if depth > 0 else 0
    if kids + ed_per_star > params.cm:
        raise InfeasibleParameters(f"cm={params.cm} cannot host {kids} + {ed_per_star} children")
    nodes = {0: Node(0, PAN_COORDINATOR, None, 0, (0.0, 0.0))}
    level = [0]
    for d in range(1, depth + 1):
        nxt = []
        for p in level:
            px, py = nodes[p].position
            for k in range(params.rm):
                theta = 2 * math.pi * (k + 0.5 * (d % 2)) / params.rm
                nid = len(nodes)
                nodes[nid] = Node(nid, COORDINATOR, p, d,
                                  (px + spacing * math.cos(theta), py + spacing * math.sin(theta)))
                nxt.append(nid)
        level = nxt
    for c in [n for n in list(nodes)]:
        cx, cy = nodes[c].position
        for j in range(ed_per_star):
            theta = 2 * math.pi * (j + 0.25) / max(ed_per_star, 1)
            nid = len(nodes)
            nodes[nid] = Node(nid, END_DEVICE, c, nodes[c].depth + 1,
                              (cx + spacing / 2 * math.cos(theta), cy + spacing / 2 * math.sin(theta)))
    tree = assign_addresses(Tree(params, nodes, 0))
    tree.validate()
    return tree


def _spread_end_devices(params, n_coord_kids, total, rng) -> dict[int, int]:
    coords = sorted(n_coord_kids)
    room = {c: params.cm - n_coord_kids[c] for c in coords}
    if sum(room.values()) < total:
        raise InfeasibleParameters(f"cm={params.cm} cannot host {total} end-devices")
    base = total // len(coords)
    count = {c: min(base, room[c]) for c in coords}
    left = total - sum(count.values())
    while left:
        open_ = [c for c in coords if count[c] < room[c]]
        fewest = min(count[c] for c in open_)
        pick = rng.choice([c for c in open_ if count[c] == fewest])
        count[pick] += 1
        left -= 1
    return count


def load_tree(path: str | Path) -> Tree:
    """Load an explicit topology file (see docs/topology-format.md)."""
    data = json.loads(Path(path).read_text())
    return tree_from_dict(data)


def tree_from_dict(data: dict) -> Tree:
    try:
        params = TopologyParams(**data["params"])
        raw = data["nodes"]
    except (KeyError, TypeError) as exc:
        raise TopologyError(f"malformed topology: {exc}") from exc
    by_id = {int(r["id"]): r for r in raw}
    if len(by_id) != len(raw):
        raise TopologyError("duplicate node ids")
    roots = [i for i, r in by_id.items() if r["role"] == PAN_COORDINATOR]
    if len(roots) != 1:
        raise TopologyError("exactly one pan_coordinator required")

    depth: dict[int, int] = {}

    def depth_of(i, seen=()):
        if i in depth:
            return depth[i]
        if i in seen:
            raise TopologyError(f"cycle through node {i}")
        p = by_id[i].get("parent")
        if p is None:
            d = 0
        else:
            if int(p) not in by_id:
                raise TopologyError(f"node {i}: unknown parent {p}")
            d = depth_of(int(p), seen + (i,)) + 1
        depth[i] = d
        return d

    nodes = {}
    for i, r in by_id.items():
        p = r.get("parent")
        x, y = r.get("position", (0.0, 0.0))
        nodes[i] = Node(i, r["role"], None if p is None else int(p), depth_of(i), (float(x), float(y)))
    tree = Tree(params, nodes, roots[0])
    tree.validate()
    return assign_addresses(tree)
