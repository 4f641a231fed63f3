"""Best-bound branch-and-bound over the bounded-variable simplex.

Branches only on variables flagged integral, picking the most fractional
variable within the highest-priority name class (y before u before v before
x); node relaxations are cold solves of the shared engine, which keeps the
node sequence deterministic on a single worker.  Incumbents are seeded from
greedy preference-order sweeps whenever the model metadata identifies a
known formulation, and every incumbent is re-verified against the original
rows before it is accepted.
"""

from __future__ import annotations

import heapq
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import milp as milp_mod
from .milp import MilpModel
from .simplex import LpEngine, solve_lp

log = logging.getLogger("cflcp.solver")

INT_TOL = 1e-6
VERIFY_TOL = 1e-7
DIVE_CAP = 50000  # open nodes before switching to diving (memory guard)


@dataclass
class MilpSolution:
    status: str  # "optimal" | "infeasible" | "limit"
    objective: Optional[float]  # incumbent, in the model's own sense
    bound: Optional[float]  # best proven bound
    gap_pct: float
    values: dict[str, float] = field(repr=False, default_factory=dict)
    nodes: int = 0
    wall_time: float = 0.0
    workers: int = 1


def gap_percent(ub: float, lb: float) -> float:
    """100 * (UB - LB) / LB with the zero/degenerate cases pinned."""
    if ub is None or lb is None or math.isinf(ub) or math.isinf(lb):
        return math.inf
    if abs(ub - lb) <= 1e-9 * (1 + abs(lb)):
        return 0.0
    if abs(lb) < 1e-12:
        return math.inf
    return 100.0 * (ub - lb) / abs(lb)


def root_bound(model: MilpModel) -> float:
    """Objective of the full linear relaxation."""
    sol = solve_lp(model)
    if sol.status != "optimal":
        raise ValueError(f"relaxation is {sol.status}")
    return sol.objective


def _priority(name: str) -> int:
    if name.startswith("y_"):
        return 0
    if name.startswith(("u_", "ur_")):
        return 1
    if name.startswith("v_"):
        return 2
    return 3


def solve_milp(
    model: MilpModel,
    time_limit: Optional[float] = None,
    node_limit: Optional[int] = None,
    workers: int = 1,
) -> MilpSolution:
    """Exact optimum unless a limit interrupts, in which case the incumbent
    and the best open bound are still valid.

    Node counts and the returned solution are deterministic only with
    ``workers=1``; parallel workers share one monotone incumbent (updates
    never lose a strictly better value).
    """
    t0 = time.monotonic()
    eng = LpEngine(model)
    sgn = eng.sign  # internal objective = sgn * external (always minimized)
    int_idx = np.array(
        [k for k, v in enumerate(model.variables) if v.integer], dtype=int
    )
    names = model.var_names()
    prio = np.array([_priority(names[k]) for k in int_idx], dtype=int)

    # integral objective lift: every nonzero objective coefficient integral
    # and attached to an integral variable
    liftable = all(
        (v.obj == int(v.obj)) and (v.integer or v.obj == 0.0)
        for v in model.variables
    )

    def lift(v: float) -> float:
        return math.ceil(v - 1e-6) if liftable else v

    incumbent_val = math.inf  # internal sense
    incumbent_x: Optional[dict[str, float]] = None

    def offer(values: dict[str, float], source: str) -> None:
        nonlocal incumbent_val, incumbent_x
        worst, where = model.max_violation(values)
        if worst > 1e-6 or model.integrality_violation(values) > INT_TOL:
            log.debug("rejecting %s incumbent: violates %s by %.2e", source, where, worst)
            return
        val = sgn * model.objective_value(values)
        if val < incumbent_val - 1e-9:
            incumbent_val = val
            incumbent_x = dict(values)
            log.debug("incumbent %.6g from %s", sgn * val, source)

    for seed in _heuristic_seeds(model):
        offer(seed, "greedy sweep")

    base_lb = eng.var_lb.copy()
    base_ub = eng.var_ub.copy()

    counter = 0
    nodes_done = 0
    heap: list = []  # (bound, seq, lb_deltas, ub_deltas)
    heapq.heappush(heap, (-math.inf, counter, {}, {}))
    rounded_root = False
    status = "optimal"

    def out_of_budget() -> bool:
        if time_limit is not None and time.monotonic() - t0 > time_limit:
            return True
        if node_limit is not None and nodes_done >= node_limit:
            return True
        return False

    def eval_node(entry):
        _, _, lbd, ubd = entry
        lb_arr = base_lb
        ub_arr = base_ub
        if lbd:
            lb_arr = base_lb.copy()
            for k, v in lbd.items():
                lb_arr[k] = v
        if ubd:
            ub_arr = base_ub.copy()
            for k, v in ubd.items():
                ub_arr[k] = v
        return eng.solve(lb_arr, ub_arr)

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while heap:
            if out_of_budget():
                status = "limit"
                break
            batch = []
            while heap and len(batch) < max(1, workers):
                entry = heapq.heappop(heap)
                if entry[0] >= incumbent_val - 1e-9:
                    continue  # bound already beaten
                batch.append(entry)
                if pool is None:
                    break
            if not batch:
                continue
            if pool is None:
                results = [eval_node(batch[0])]
            else:
                results = list(pool.map(eval_node, batch))

            for entry, raw in zip(batch, results):
                _, _, lbd, ubd = entry
                nodes_done += 1
                if raw.status == "infeasible":
                    continue
                if raw.status != "optimal":
                    raise RuntimeError(f"node relaxation {raw.status}")
                bound = lift(sgn * raw.objective)
                ub_now = incumbent_val
                log.debug(
                    "node=%d lb=%.6g ub=%.6g gap=%.4g%%",
                    nodes_done,
                    sgn * min(bound, ub_now) if sgn < 0 else bound,
                    sgn * ub_now if sgn < 0 else ub_now,
                    gap_percent(ub_now, min(bound, ub_now)),
                )
                if bound >= incumbent_val - 1e-9:
                    continue
                x = raw.x
                if not rounded_root and not lbd and not ubd:
                    rounded_root = True
                    for seed in _rounding_seeds(model, x):
                        offer(seed, "relaxation rounding")
                    if bound >= incumbent_val - 1e-9:
                        continue
                frac = np.abs(x[int_idx] - np.round(x[int_idx]))
                fractional = frac > INT_TOL
                if not fractional.any():
                    values = {nm: float(v) for nm, v in zip(names, x)}
                    for k in int_idx:
                        values[names[k]] = float(round(values[names[k]]))
                    offer(values, "node")
                    continue
                best_prio = prio[fractional].min()
                in_class = fractional & (prio == best_prio)
                scores = np.where(in_class, frac, -1.0)
                pick = int(np.argmax(scores))
                var = int(int_idx[pick])
                val = float(x[var])
                down_ub = dict(ubd)
                down_ub[var] = math.floor(val)
                up_lb = dict(lbd)
                up_lb[var] = math.ceil(val)
                counter += 1
                down = (bound, counter, lbd, down_ub)
                counter += 1
                up = (bound, counter, up_lb, ubd)
                if len(heap) >= DIVE_CAP:
                    # memory guard: keep exploring the cheaper child depth-first
                    heapq.heappush(heap, up)
                    heap.insert(0, down)  # will be popped next (same bound)
                    heapq.heapify(heap)
                else:
                    heapq.heappush(heap, down)
                    heapq.heappush(heap, up)
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    wall = time.monotonic() - t0
    open_bounds = [e[0] for e in heap]
    if status == "limit":
        best_lb = min(open_bounds + [incumbent_val]) if open_bounds else incumbent_val
    else:
        best_lb = incumbent_val
    have = incumbent_x is not None
    if status != "limit" and not have:
        return MilpSolution("infeasible", None, None, math.inf, {}, nodes_done, wall, workers)

    if have:
        worst, where = model.max_violation(incumbent_x)
        if worst > VERIFY_TOL * (1 + abs(incumbent_val)) and worst > 1e-6:
            raise RuntimeError(f"incumbent violates {where} by {worst:.2e}")
    objective = sgn * incumbent_val if have else None
    bound = sgn * best_lb if best_lb is not None and math.isfinite(best_lb) else None
    if status != "limit":
        bound = objective
    gap = gap_percent(incumbent_val if have else math.inf, best_lb)
    sol = MilpSolution(
        status if have or status == "limit" else "infeasible",
        objective,
        bound,
        gap,
        incumbent_x or {},
        nodes_done,
        wall,
        workers,
    )
    log.info(
        "%s: %s obj=%s nodes=%d time=%.2fs gap=%.3g%% workers=%d",
        model.name,
        sol.status,
        f"{sol.objective:.6g}" if sol.objective is not None else "-",
        sol.nodes,
        sol.wall_time,
        sol.gap_pct,
        workers,
    )
    return sol


# ---------------------------------------------------------------------------
# Incumbent seeding: greedy preference-order sweeps (always cyclic-coalition
# stable, hence feasible for every formulation here) translated into full
# variable vectors.
# ---------------------------------------------------------------------------

_SEEDABLE = {"cs", "cs_r", "pw", "pw_r", "cc", "cc_r"}


def _heuristic_seeds(model: MilpModel) -> list[dict[str, float]]:
    kind = model.meta.get("formulation")
    inst = model.meta.get("instance")
    if kind not in _SEEDABLE or inst is None:
        return []
    from .model import Location

    m = inst.n_plants
    candidates = []
    if m <= 8:
        import itertools

        for mask in itertools.product((False, True), repeat=m):
            loc = Location(mask)
            if loc.open_capacity(inst) >= inst.n_customers:
                candidates.append(loc)
    else:
        candidates.append(Location.all_open(m))
        for j in range(m):
            flags = [True] * m
            flags[j] = False
            loc = Location(tuple(flags))
            if loc.open_capacity(inst) >= inst.n_customers:
                candidates.append(loc)
    seeds = []
    best = None
    for loc in candidates:
        vec = _sweep_vector(model, kind, inst, loc)
        if vec is None:
            continue
        val = model.objective_value(vec)
        if best is None or val < best[0]:
            best = (val, vec)
    if best is not None:
        seeds.append(best[1])
    return seeds


def _rounding_seeds(model: MilpModel, x: np.ndarray) -> list[dict[str, float]]:
    """Open the plants the root relaxation leans towards, then sweep."""
    kind = model.meta.get("formulation")
    inst = model.meta.get("instance")
    if kind not in _SEEDABLE or inst is None:
        return []
    from .model import Location

    names = model.var_names()
    weight = {}
    for nm, v in zip(names, x):
        if nm.startswith("y_"):
            weight[int(nm.split("_")[1]) - 1] = float(v)
    open_flags = [weight.get(j, 0.0) >= 0.5 for j in range(inst.n_plants)]
    order = sorted(weight, key=lambda j: -weight[j])
    k = 0
    while (
        sum(inst.capacity[j] for j, o in enumerate(open_flags) if o)
        < inst.n_customers
        and k < len(order)
    ):
        open_flags[order[k]] = True
        k += 1
    loc = Location(tuple(open_flags))
    if loc.open_capacity(inst) < inst.n_customers:
        return []
    vec = _sweep_vector(model, kind, inst, loc)
    return [vec] if vec is not None else []


def _sweep_vector(model, kind, inst, loc) -> Optional[dict[str, float]]:
    from . import oracles
    from .model import Location

    try:
        alloc, trace = oracles.serial_dictatorship_trace(
            inst, loc, list(range(inst.n_customers))
        )
    except ValueError:
        return None
    # drop plants the sweep never used: cheaper and still stable
    used = tuple(alloc.occupancy[j] > 0 for j in range(inst.n_plants))
    loc = Location(used)
    values = {v.name: 0.0 for v in model.variables}
    for j in loc.open_plants():
        values[f"y_{j + 1}"] = 1.0
    full = [
        alloc.occupancy[j] == inst.capacity[j] and loc.open[j]
        for j in range(inst.n_plants)
    ]
    if kind in ("cs", "cs_r", "pw", "pw_r", "cc_r"):
        for i, j in enumerate(alloc.assigned):
            values[f"x_{i + 1}_{j + 1}"] = 1.0
    if kind in ("cs_r", "pw_r"):
        for j in range(inst.n_plants):
            if full[j]:
                values[f"u_{j + 1}"] = 1.0
    if kind == "pw_r":
        rank = inst.rank
        for i, j2 in enumerate(alloc.assigned):
            for j in range(inst.n_plants):
                if j != j2 and rank[i][j] < rank[i][j2]:
                    values[f"v_{j + 1}_{j2 + 1}"] = 1.0
    if kind == "cc":
        for i, j in enumerate(alloc.assigned):
            values[f"xr_{i + 1}_{j + 1}_{trace.step_of[i]}"] = 1.0
        for j in range(inst.n_plants):
            if full[j] and trace.fill_step[j] > 0:
                values[f"ur_{j + 1}_{trace.fill_step[j]}"] = 1.0
    if kind == "cc_r":
        filled = sorted(
            (trace.fill_step[j], j)
            for j in range(inst.n_plants)
            if full[j] and trace.fill_step[j] > 0
        )
        for r, (_, j) in enumerate(filled, start=1):
            values[f"ur_{j + 1}_{r}"] = 1.0
    return values
