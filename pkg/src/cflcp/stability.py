"""Stability verification with certificates.

An allocation is customer stable when no customer strictly prefers an open,
undersubscribed plant; pairwise stable when additionally no two customers at
different plants would both gain by swapping; cyclic-coalition stable when no
group of three or more would all gain under a cyclic rotation of their
plants.  Any improving group reduces to one whose plants are pairwise
distinct, so rotation search runs on a digraph over plants rather than over
customers.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .model import Allocation, Instance, Location

CLASSES = (
    "not-customer-stable",
    "customer-stable-only",
    "pairwise-stable-only",
    "cyclic-coalition-stable",
)


@dataclass(frozen=True)
class BlockingCustomer:
    customer: int
    current_plant: int
    better_plant: int  # most preferred open undersubscribed improvement


@dataclass(frozen=True)
class BlockingPair:
    customer_a: int
    customer_b: int
    plant_a: int
    plant_b: int


@dataclass(frozen=True)
class BlockingCoalition:
    """Customers in cycle order; customer t moves to plants[(t+1) % k]."""

    customers: tuple[int, ...]
    plants: tuple[int, ...]

    def rotation(self) -> dict[int, int]:
        k = len(self.customers)
        return {self.customers[t]: self.plants[(t + 1) % k] for t in range(k)}


@dataclass(frozen=True)
class ImprovementDigraph:
    """Arc j -> j2 iff some customer assigned to j strictly prefers j2.

    ``arcs[(j, j2)]`` stores the smallest-id witness customer.
    """

    nodes: tuple[int, ...]
    arcs: dict[tuple[int, int], int]


@dataclass(frozen=True)
class StabilityReport:
    blocking_customers: tuple[BlockingCustomer, ...]
    blocking_pairs: tuple[BlockingPair, ...]
    blocking_coalition: Optional[BlockingCoalition]
    stability_class: str

    def to_json_dict(self) -> dict:
        # ids are 1-based in reports
        coalition = None
        if self.blocking_coalition is not None:
            c = self.blocking_coalition
            coalition = {
                "customers": [i + 1 for i in c.customers],
                "plants": [j + 1 for j in c.plants],
                "targets": [c.rotation()[i] + 1 for i in c.customers],
            }
        return {
            "blocking_customers": [
                {
                    "customer": b.customer + 1,
                    "current_plant": None if b.current_plant < 0 else b.current_plant + 1,
                    "better_plant": b.better_plant + 1,
                }
                for b in self.blocking_customers
            ],
            "blocking_pairs": [
                {
                    "customers": [p.customer_a + 1, p.customer_b + 1],
                    "plants": [p.plant_a + 1, p.plant_b + 1],
                }
                for p in self.blocking_pairs
            ],
            "blocking_coalition": coalition,
            "class": self.stability_class,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"


def check_feasible(inst: Instance, loc: Location, alloc: Allocation) -> None:
    """Raise unless every assigned plant is open (capacity and full assignment
    are already enforced by the Allocation constructor)."""
    if loc.n_plants != inst.n_plants:
        raise ValueError("location and instance disagree on plant count")
    for i, j in enumerate(alloc.assigned):
        if j is not None and not loc.open[j]:
            raise ValueError(f"allocation uses closed plant {j + 1} (customer {i + 1})")


def find_blocking_customers(
    inst: Instance, loc: Location, alloc: Allocation
) -> list[BlockingCustomer]:
    """All customers preferring some open undersubscribed plant, with the most
    preferred such plant; ascending customer order."""
    check_feasible(inst, loc, alloc)
    room = [
        loc.open[j] and alloc.occupancy[j] < inst.capacity[j] for j in inst.plants()
    ]
    out = []
    for i, cur in enumerate(alloc.assigned):
        if cur is None:
            # cha mode: an unassigned customer blocks via any ranked plant with room
            for j in inst.pref[i]:
                if room[j]:
                    out.append(BlockingCustomer(i, -1, j))
                    break
            continue
        for j in inst.pref[i]:
            if j == cur:
                break
            if room[j]:
                out.append(BlockingCustomer(i, cur, j))
                break
    return out


def has_blocking_customer(inst: Instance, loc: Location, alloc: Allocation) -> bool:
    room = [
        loc.open[j] and alloc.occupancy[j] < inst.capacity[j] for j in inst.plants()
    ]
    if not any(room):
        return False
    for i, cur in enumerate(alloc.assigned):
        for j in inst.pref[i]:
            if j == cur:
                break
            if room[j]:
                return True
    return False


def find_blocking_pairs(inst: Instance, alloc: Allocation) -> list[BlockingPair]:
    """All unordered blocking pairs, smaller customer first, sorted."""
    rank = inst.rank
    assigned = alloc.assigned
    n = inst.n_customers
    out = []
    for a in range(n):
        ja = assigned[a]
        if ja is None:
            continue
        for b in range(a + 1, n):
            jb = assigned[b]
            if jb is None or jb == ja:
                continue
            if rank[a][jb] < rank[a][ja] and rank[b][ja] < rank[b][jb]:
                out.append(BlockingPair(a, b, ja, jb))
    return out


def has_blocking_pair(inst: Instance, alloc: Allocation) -> bool:
    # via the plant digraph: a 2-cycle is exactly a blocking pair
    want = _improvement_matrix(inst, alloc)
    m = inst.n_plants
    for j in range(m):
        for j2 in range(j + 1, m):
            if want[j][j2] and want[j2][j]:
                return True
    return False


def _improvement_matrix(inst: Instance, alloc: Allocation) -> list[list[bool]]:
    """want[j][j2] = some customer at j strictly prefers j2."""
    m = inst.n_plants
    rank = inst.rank
    want = [[False] * m for _ in range(m)]
    for i, j in enumerate(alloc.assigned):
        if j is None:
            continue
        own = rank[i][j]
        row = want[j]
        for pos, j2 in enumerate(inst.pref[i], start=1):
            if pos >= own:
                break
            row[j2] = True
    return want


def build_improvement_digraph(inst: Instance, alloc: Allocation) -> ImprovementDigraph:
    rank = inst.rank
    arcs: dict[tuple[int, int], int] = {}
    for i, j in enumerate(alloc.assigned):
        if j is None:
            continue
        own = rank[i][j]
        for pos, j2 in enumerate(inst.pref[i], start=1):
            if pos >= own:
                break
            if (j, j2) not in arcs:  # smallest witness id wins; i is ascending
                arcs[(j, j2)] = i
    nodes = tuple(j for j in inst.plants() if alloc.occupancy[j] > 0)
    return ImprovementDigraph(nodes, arcs)


def _shortest_long_cycle(nodes, arcs) -> Optional[list[int]]:
    """Shortest directed cycle of length >= 3; deterministic tie-breaks."""
    succ: dict[int, list[int]] = {v: [] for v in nodes}
    for (a, b) in sorted(arcs):
        succ[a].append(b)
    best: Optional[list[int]] = None
    for s in nodes:
        # BFS from s; closing arcs v->s with dist[v] >= 2 give cycles through s
        dist = {s: 0}
        parent: dict[int, int] = {}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in succ[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    queue.append(w)
        closing = [
            (dist[v], v) for v in succ if s in succ[v] and v in dist and dist[v] >= 2
        ]
        if closing:
            _, v = min(closing)
            path = [v]
            while path[-1] != s:
                path.append(parent[path[-1]])
            path.reverse()  # s ... v, cycle closes v -> s
            if best is None or len(path) < len(best):
                best = path
    return best


def find_blocking_coalition(
    inst: Instance, alloc: Allocation
) -> Optional[BlockingCoalition]:
    """A shortest plant-distinct rotation of length >= 3, or None.

    None together with an empty blocking-pair list certifies that no blocking
    group of any size exists; callers wanting the full classification must
    combine both (see :func:`classify`).
    """
    digraph = build_improvement_digraph(inst, alloc)
    cycle = _shortest_long_cycle(digraph.nodes, digraph.arcs)
    if cycle is None:
        return None
    k = len(cycle)
    customers = tuple(
        digraph.arcs[(cycle[t], cycle[(t + 1) % k])] for t in range(k)
    )
    return BlockingCoalition(customers, tuple(cycle))


def has_coalition_cycle(inst: Instance, alloc: Allocation) -> bool:
    """Early-exit variant: is there any improving plant-cycle of length >= 3?"""
    want = _improvement_matrix(inst, alloc)
    m = inst.n_plants
    nodes = [j for j in range(m) if alloc.occupancy[j] > 0]
    succ = {v: [w for w in nodes if w != v and want[v][w]] for v in nodes}
    for s in nodes:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in succ[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        for v in nodes:
            if v in dist and dist[v] >= 2 and want[v][s]:
                return True
    return False


def classify(inst: Instance, loc: Location, alloc: Allocation) -> StabilityReport:
    """Full report with all three certificate families.

    Classes nest: customer stable ⊇ pairwise stable ⊇ cyclic-coalition
    stable.  All certificates are computed even after the first failure so
    reports stay useful for diagnostics.
    """
    check_feasible(inst, loc, alloc)
    bcs = find_blocking_customers(inst, loc, alloc)
    pairs = find_blocking_pairs(inst, alloc)
    coalition = find_blocking_coalition(inst, alloc)
    if bcs:
        cls = "not-customer-stable"
    elif pairs:
        cls = "customer-stable-only"
    elif coalition is not None:
        cls = "pairwise-stable-only"
    else:
        cls = "cyclic-coalition-stable"
    return StabilityReport(tuple(bcs), tuple(pairs), coalition, cls)


def is_cc_stable(inst: Instance, loc: Location, alloc: Allocation) -> bool:
    """Early-exit equivalent of ``classify(...) == cyclic-coalition-stable``."""
    if has_blocking_customer(inst, loc, alloc):
        return False
    want = _improvement_matrix(inst, alloc)
    m = inst.n_plants
    nodes = [j for j in range(m) if alloc.occupancy[j] > 0]
    # pairs are 2-cycles, coalitions are longer cycles: reject any cycle
    succ = {v: [w for w in nodes if w != v and want[v][w]] for v in nodes}
    color = {v: 0 for v in nodes}  # 0 new, 1 on stack, 2 done

    def dfs(v) -> bool:
        color[v] = 1
        for w in succ[v]:
            if color[w] == 1:
                return True
            if color[w] == 0 and dfs(w):
                return True
        color[v] = 2
        return False

    return not any(color[v] == 0 and dfs(v) for v in nodes)
