"""Independent combinatorial ground truth at desk scale.

Everything here is deliberately brute-force or first-principles (greedy
sweeps, min-cost flow, exhaustive enumeration) so results can cross-check
the MILP route without sharing code with it.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from . import stability
from .model import Allocation, Instance, Location


@dataclass(frozen=True)
class SecondLevelSolution:
    """Preference-minimal assignment for a fixed location."""

    allocation: Allocation
    pref_value: int
    cost_value: float


@dataclass(frozen=True)
class SdTrace:
    """Serial-dictatorship bookkeeping used to seed MILP incumbents.

    order[k]      customer processed k-th (0-based step k)
    step_of[i]    1-based step at which customer i chose
    fill_step[j]  1-based step at which plant j became full, or 0
    """

    order: tuple[int, ...]
    step_of: tuple[int, ...]
    fill_step: tuple[int, ...]


def _check_permutation(n: int, perm: Sequence[int]) -> None:
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {list(perm)!r}")


def serial_dictatorship(
    inst: Instance, loc: Location, perm: Sequence[int]
) -> Allocation:
    """Process customers in ``perm`` order, each taking their most preferred
    open plant with remaining capacity.  The result is always
    cyclic-coalition stable.

    In cha mode a customer whose ranked plants are all full stays
    unassigned; in cflcp mode the open capacity must cover every customer.
    """
    alloc, _ = serial_dictatorship_trace(inst, loc, perm)
    return alloc


def serial_dictatorship_trace(
    inst: Instance, loc: Location, perm: Sequence[int]
) -> tuple[Allocation, SdTrace]:
    _check_permutation(inst.n_customers, perm)
    if inst.mode == "cflcp" and loc.open_capacity(inst) < inst.n_customers:
        raise ValueError(
            f"open capacity {loc.open_capacity(inst)} cannot host "
            f"{inst.n_customers} customers"
        )
    remaining = [inst.capacity[j] if loc.open[j] else 0 for j in inst.plants()]
    assigned: list[Optional[int]] = [None] * inst.n_customers
    step_of = [0] * inst.n_customers
    fill_step = [0] * inst.n_plants
    for step, i in enumerate(perm, start=1):
        step_of[i] = step
        for j in inst.pref[i]:
            if loc.open[j] and remaining[j] > 0:
                assigned[i] = j
                remaining[j] -= 1
                if remaining[j] == 0:
                    fill_step[j] = step
                break
        else:
            if inst.mode == "cflcp":
                raise ValueError(f"customer {i + 1} found every open plant full")
    alloc = Allocation.for_instance(inst, assigned)
    return alloc, SdTrace(tuple(perm), tuple(step_of), tuple(fill_step))


def iter_feasible_assignments(
    inst: Instance, loc: Location
) -> Iterator[tuple[int, ...]]:
    """All full assignments onto open plants within capacity, in
    lexicographic assignment-vector order."""
    open_plants = loc.open_plants()
    remaining = list(inst.capacity)
    n = inst.n_customers
    out = [0] * n

    def rec(i: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(out)
            return
        for j in open_plants:
            if remaining[j] > 0:
                remaining[j] -= 1
                out[i] = j
                yield from rec(i + 1)
                remaining[j] += 1

    yield from rec(0)


def enumerate_cc_stable(
    inst: Instance, loc: Location, max_customers: int = 10
) -> list[Allocation]:
    """Every capacity-feasible full allocation onto open plants that is
    cyclic-coalition stable, sorted by assignment vector."""
    if inst.mode != "cflcp":
        raise ValueError("enumeration requires a cflcp instance")
    if inst.n_customers > max_customers:
        raise ValueError(
            f"{inst.n_customers} customers exceeds the enumeration guard"
            f" ({max_customers}); raise max_customers explicitly"
        )
    out = []
    for assigned in iter_feasible_assignments(inst, loc):
        alloc = Allocation.for_instance(inst, assigned)
        if stability.is_cc_stable(inst, loc, alloc):
            out.append(alloc)
    return out


def pref_value(inst: Instance, alloc: Allocation) -> int:
    """Sum of 1-based ranks of the assigned plants."""
    return sum(
        inst.rank[i][j] for i, j in enumerate(alloc.assigned) if j is not None
    )


def cost_value(inst: Instance, loc: Location, alloc: Allocation) -> float:
    total = sum(inst.open_cost[j] for j in loc.open_plants())
    for i, j in enumerate(alloc.assigned):
        if j is not None:
            total += inst.assign_cost[i][j]
    return total


# ---------------------------------------------------------------------------
# Second-level assignment: min sum of ranks subject to capacities, solved as
# a min-cost flow by successive shortest paths with potentials.  Costs are
# small nonnegative integers, so plain Dijkstra works from the start and the
# optimum is integral.
# ---------------------------------------------------------------------------


class _FlowNet:
    def __init__(self, n_nodes: int):
        self.n = n_nodes
        self.head: list[list[int]] = [[] for _ in range(n_nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []
        self.cost: list[int] = []

    def add(self, a: int, b: int, cap: int, cost: int) -> None:
        self.head[a].append(len(self.to))
        self.to.append(b)
        self.cap.append(cap)
        self.cost.append(cost)
        self.head[b].append(len(self.to))
        self.to.append(a)
        self.cap.append(0)
        self.cost.append(-cost)


def _min_cost_flow(net: _FlowNet, s: int, t: int, want: int) -> Optional[int]:
    """Push ``want`` units; returns total cost or None if infeasible."""
    n = net.n
    potential = [0] * n
    total = 0
    pushed = 0
    while pushed < want:
        dist = [None] * n
        prev_edge = [-1] * n
        dist[s] = 0
        heap = [(0, s)]
        while heap:
            d, v = heapq.heappop(heap)
            if dist[v] != d:
                continue
            for e in net.head[v]:
                if net.cap[e] <= 0:
                    continue
                w = net.to[e]
                nd = d + net.cost[e] + potential[v] - potential[w]
                if dist[w] is None or nd < dist[w]:
                    dist[w] = nd
                    prev_edge[w] = e
                    heapq.heappush(heap, (nd, w))
        if dist[t] is None:
            return None
        for v in range(n):
            if dist[v] is not None:
                potential[v] += dist[v]
        # augment one unit along the shortest path (all arcs have cap >= 1)
        step = None
        v = t
        while v != s:
            e = prev_edge[v]
            step = net.cap[e] if step is None else min(step, net.cap[e])
            v = net.to[e ^ 1]
        step = min(step, want - pushed)
        v = t
        while v != s:
            e = prev_edge[v]
            net.cap[e] -= step
            net.cap[e ^ 1] += step
            total += step * net.cost[e]
            v = net.to[e ^ 1]
        pushed += step
    return total


def second_level_assign(inst: Instance, loc: Location) -> SecondLevelSolution:
    """One rank-sum-minimal full assignment for the given open set."""
    if inst.mode != "cflcp":
        raise ValueError("second-level assignment requires a cflcp instance")
    n, m = inst.n_customers, inst.n_plants
    open_plants = loc.open_plants()
    if loc.open_capacity(inst) < n:
        raise ValueError(
            f"open capacity {loc.open_capacity(inst)} cannot host {n} customers"
        )
    # nodes: 0 source, 1..n customers, n+1..n+m plants, n+m+1 sink
    s, t = 0, n + m + 1
    net = _FlowNet(n + m + 2)
    for i in range(n):
        net.add(s, 1 + i, 1, 0)
    for i in range(n):
        for j in open_plants:
            net.add(1 + i, 1 + n + j, 1, inst.rank[i][j])
    for j in open_plants:
        net.add(1 + n + j, t, inst.capacity[j], 0)
    total = _min_cost_flow(net, s, t, n)
    if total is None:
        raise ValueError("infeasible location")
    assigned: list[Optional[int]] = [None] * n
    for i in range(n):
        for e in net.head[1 + i]:
            if e % 2 == 0 and net.cap[e] == 0:
                assigned[i] = net.to[e] - 1 - n
                break
    alloc = Allocation.for_instance(inst, assigned)
    assign_cost = sum(inst.assign_cost[i][j] for i, j in enumerate(assigned))
    return SecondLevelSolution(alloc, total, assign_cost)


def _locations_with_cover(inst: Instance, max_plants: int) -> Iterator[Location]:
    m = inst.n_plants
    if m > max_plants:
        raise ValueError(f"{m} plants exceeds the location-enumeration guard ({max_plants})")
    n = inst.n_customers
    for mask in itertools.product((False, True), repeat=m):
        loc = Location(mask)
        if loc.open_capacity(inst) >= n:
            yield loc


def bilevel_baseline(inst: Instance, max_plants: int = 20):
    """Optimistic two-stage optimum: enumerate open sets, let the second
    level minimize the rank sum, break its ties in favor of assignment cost.

    Returns (Location, Allocation, cost).  The allocation is always
    cyclic-coalition stable.
    """
    from . import milp, solver  # local import; oracles stay import-light

    if inst.mode != "cflcp":
        raise ValueError("the two-stage baseline requires a cflcp instance")
    best = None  # (cost, mask) with lexicographically-first tie-break
    for loc in _locations_with_cover(inst, max_plants):
        open_cost = sum(inst.open_cost[j] for j in loc.open_plants())
        if best is not None and open_cost >= best[0]:
            continue  # assignment costs are nonnegative; bound by open cost
        p_star = second_level_assign(inst, loc).pref_value
        model = milp.build_second_level(inst, loc, pref_target=p_star)
        res = solver.solve_milp(model)
        if res.status != "optimal":
            raise RuntimeError(f"tie-break subproblem not solved: {res.status}")
        cost = open_cost + res.objective
        if best is None or cost < best[0] - 1e-9:
            assigned = milp.extract_assignment(model, res.values, inst)
            best = (cost, loc, Allocation.for_instance(inst, assigned))
    if best is None:
        raise ValueError("no open set can host every customer")
    cost, loc, alloc = best
    return loc, alloc, cost


def brute_force_optimum(inst: Instance, level: str, max_customers: int = 8, max_plants: int = 4):
    """Minimum-cost (location, allocation) over all allocations of the
    requested stability class; ties broken lexicographically by (open
    vector, assignment vector).

    level: "cs" (customer stable), "pw" (pairwise stable), "cc"
    (cyclic-coalition stable).
    """
    if level not in ("cs", "pw", "cc"):
        raise ValueError(f"unknown stability level {level!r}")
    if inst.n_customers > max_customers or inst.n_plants > max_plants:
        raise ValueError(
            f"{inst.n_customers}x{inst.n_plants} exceeds the brute-force guard "
            f"({max_customers}x{max_plants})"
        )
    best = None
    for loc in _locations_with_cover(inst, max_plants):
        open_cost = sum(inst.open_cost[j] for j in loc.open_plants())
        if best is not None and open_cost >= best[0] - 1e-9:
            continue  # assignment costs are nonnegative: no strict improvement left
        for assigned in iter_feasible_assignments(inst, loc):
            alloc = Allocation.for_instance(inst, assigned)
            if stability.has_blocking_customer(inst, loc, alloc):
                continue
            if level in ("pw", "cc") and stability.has_blocking_pair(inst, alloc):
                continue
            if level == "cc" and stability.has_coalition_cycle(inst, alloc):
                continue
            cost = cost_value(inst, loc, alloc)
            if best is None or cost < best[0] - 1e-9:
                best = (cost, loc, alloc)
    if best is None:
        raise ValueError(f"no {level}-stable allocation exists")
    cost, loc, alloc = best
    return loc, alloc, cost


# ---------------------------------------------------------------------------
# Exhaustive definitions used to certify the digraph shortcuts.
# ---------------------------------------------------------------------------


def has_blocking_set_exhaustive(inst: Instance, alloc: Allocation, max_customers: int = 8) -> bool:
    """Definition-level search: a group of >= 3 assigned customers and a
    bijection onto their own (possibly repeated) plants under which everyone
    strictly improves."""
    if inst.n_customers > max_customers:
        raise ValueError("exhaustive blocking-set search guard exceeded")
    rank = inst.rank
    members = [i for i, j in enumerate(alloc.assigned) if j is not None]
    for size in range(3, len(members) + 1):
        for subset in itertools.combinations(members, size):
            plants = [alloc.assigned[i] for i in subset]
            for perm in itertools.permutations(range(size)):
                if all(
                    rank[subset[t]][plants[perm[t]]] < rank[subset[t]][plants[t]]
                    for t in range(size)
                ):
                    return True
    return False


def classify_exhaustive(inst: Instance, loc: Location, alloc: Allocation) -> str:
    """Definition-level classification (no digraph shortcut)."""
    if stability.find_blocking_customers(inst, loc, alloc):
        return "not-customer-stable"
    if stability.find_blocking_pairs(inst, alloc):
        return "customer-stable-only"
    if has_blocking_set_exhaustive(inst, alloc):
        return "pairwise-stable-only"
    return "cyclic-coalition-stable"


# ---------------------------------------------------------------------------
# House-allocation (cha) brute force: enumerate matchings, keep the
# undominated ones.  A matching M' dominates M when every applicant is at
# least as well off (matched beats unmatched, better rank beats worse) and
# someone is strictly better off.
# ---------------------------------------------------------------------------


def _iter_matchings(inst: Instance) -> Iterator[tuple[Optional[int], ...]]:
    remaining = list(inst.capacity)
    n = inst.n_customers
    out: list[Optional[int]] = [None] * n

    def rec(i: int) -> Iterator[tuple[Optional[int], ...]]:
        if i == n:
            yield tuple(out)
            return
        out[i] = None
        yield from rec(i + 1)
        for j in inst.pref[i]:
            if remaining[j] > 0:
                remaining[j] -= 1
                out[i] = j
                yield from rec(i + 1)
                remaining[j] += 1
        out[i] = None

    yield from rec(0)


def enumerate_pareto_matchings(
    inst: Instance, max_customers: int = 6
) -> list[tuple[Optional[int], ...]]:
    if inst.mode != "cha":
        raise ValueError("Pareto matching enumeration requires a cha instance")
    if inst.n_customers > max_customers:
        raise ValueError("Pareto enumeration guard exceeded")
    import numpy as np

    rank = inst.rank
    all_matchings = list(_iter_matchings(inst))
    unmatched_rank = inst.n_plants + 1  # worse than any real rank
    vecs = np.array(
        [
            [unmatched_rank if j is None else rank[i][j] for i, j in enumerate(mt)]
            for mt in all_matchings
        ],
        dtype=np.int64,
    )
    pareto = []
    for k in range(len(all_matchings)):
        vk = vecs[k]
        weakly_better = (vecs <= vk).all(axis=1)
        strictly = (vecs != vk).any(axis=1)
        if not (weakly_better & strictly).any():
            pareto.append(all_matchings[k])
    return pareto


def max_pareto_matching_cardinality(inst: Instance, max_customers: int = 6) -> int:
    pareto = enumerate_pareto_matchings(inst, max_customers)
    return max(sum(1 for j in mt if j is not None) for mt in pareto)
