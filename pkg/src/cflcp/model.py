"""Problem data: instances, locations, allocations and their validity rules.

Customers rank plants strictly (most preferred first).  In ``cflcp`` mode
every ranking is complete and every customer must be assigned; in ``cha``
mode rankings may cover a subset of the plants and customers may stay
unassigned.  Plant and customer ids are 1-based in files and reports and
0-based everywhere in memory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

#: Rank value used for plants a customer did not rank (cha mode only).
#: Larger than any real rank, so ``rank[i][j] < rank[i][j2]`` keeps working.
UNRANKED = 10**9

MODES = ("cflcp", "cha")


class ParseError(ValueError):
    """Malformed instance or allocation file; the message carries the position."""


@dataclass(frozen=True)
class Instance:
    """One problem instance.

    open_cost[j]      cost of opening plant j
    assign_cost[i][j] cost of serving customer i from plant j
    capacity[j]       number of customers plant j can host (>= 1)
    pref[i]           plant ids ranked by customer i, best first (0-based)
    """

    open_cost: tuple[float, ...]
    assign_cost: tuple[tuple[float, ...], ...]
    capacity: tuple[int, ...]
    pref: tuple[tuple[int, ...], ...]
    mode: str = "cflcp"

    def __post_init__(self):
        problems = _structure_problems(
            self.mode, self.open_cost, self.assign_cost, self.capacity, self.pref
        )
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def n_customers(self) -> int:
        return len(self.assign_cost)

    @property
    def n_plants(self) -> int:
        return len(self.open_cost)

    @cached_property
    def rank(self) -> tuple[tuple[int, ...], ...]:
        """rank[i][j] = 1-based position of plant j in customer i's list (UNRANKED if absent)."""
        rows = []
        for prefs in self.pref:
            row = [UNRANKED] * self.n_plants
            for pos, j in enumerate(prefs, start=1):
                row[j] = pos
            rows.append(tuple(row))
        return tuple(rows)

    def customers(self) -> range:
        return range(self.n_customers)

    def plants(self) -> range:
        return range(self.n_plants)


@dataclass(frozen=True)
class Location:
    """Subset of open plants (per-plant booleans)."""

    open: tuple[bool, ...]

    @classmethod
    def all_open(cls, n_plants: int) -> "Location":
        return cls(tuple([True] * n_plants))

    @classmethod
    def from_open_set(cls, n_plants: int, open_plants: Sequence[int]) -> "Location":
        open_set = set(open_plants)
        bad = [j for j in open_set if not 0 <= j < n_plants]
        if bad:
            raise ValueError(f"plant id {bad[0]} out of range 0..{n_plants - 1}")
        return cls(tuple(j in open_set for j in range(n_plants)))

    @property
    def n_plants(self) -> int:
        return len(self.open)

    def open_plants(self) -> tuple[int, ...]:
        return tuple(j for j, o in enumerate(self.open) if o)

    def open_capacity(self, inst: Instance) -> int:
        return sum(inst.capacity[j] for j in self.open_plants())


@dataclass(frozen=True)
class Allocation:
    """Customer-to-plant map plus derived per-plant occupancy.

    ``assigned[i]`` is a 0-based plant id, or None for an unassigned customer
    (representable only in cha mode).  Build through :meth:`for_instance`,
    which enforces capacity, preference-list membership and full assignment
    in cflcp mode.
    """

    assigned: tuple[Optional[int], ...]
    occupancy: tuple[int, ...] = field(compare=False)

    @classmethod
    def for_instance(cls, inst: Instance, assigned: Sequence[Optional[int]]) -> "Allocation":
        if len(assigned) != inst.n_customers:
            raise ValueError(
                f"allocation length {len(assigned)} != {inst.n_customers} customers"
            )
        occ = [0] * inst.n_plants
        for i, j in enumerate(assigned):
            if j is None:
                if inst.mode == "cflcp":
                    raise ValueError(f"customer {i + 1} unassigned in cflcp mode")
                continue
            if not 0 <= j < inst.n_plants:
                raise ValueError(f"customer {i + 1}: plant id {j + 1} out of range")
            if inst.rank[i][j] == UNRANKED:
                raise ValueError(
                    f"customer {i + 1} assigned to plant {j + 1} absent from their list"
                )
            occ[j] += 1
        for j, c in enumerate(inst.capacity):
            if occ[j] > c:
                raise ValueError(
                    f"plant {j + 1} over capacity: {occ[j]} assigned, capacity {c}"
                )
        return cls(tuple(assigned), tuple(occ))

    @property
    def n_customers(self) -> int:
        return len(self.assigned)

    def n_assigned(self) -> int:
        return sum(1 for j in self.assigned if j is not None)

    def customers_of(self, j: int) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.assigned) if a == j)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _structure_problems(mode, open_cost, assign_cost, capacity, pref) -> list[str]:
    problems = []
    m = len(open_cost)
    n = len(assign_cost)
    if mode not in MODES:
        problems.append(f"mode must be one of {MODES}, got {mode!r}")
        return problems
    if len(capacity) != m:
        problems.append(f"capacity has {len(capacity)} entries, expected {m}")
    if len(pref) != n:
        problems.append(f"pref has {len(pref)} lists, expected {n}")
    for j, f in enumerate(open_cost):
        if f < 0:
            problems.append(f"open_cost[{j + 1}] = {f} is negative")
    for i, row in enumerate(assign_cost):
        if len(row) != m:
            problems.append(f"assign_cost[{i + 1}] has {len(row)} entries, expected {m}")
            continue
        for j, g in enumerate(row):
            if g < 0:
                problems.append(f"assign_cost[{i + 1}][{j + 1}] = {g} is negative")
    for j, c in enumerate(capacity):
        if not isinstance(c, int) or c < 1:
            problems.append(f"capacity[{j + 1}] = {c!r} is not a positive integer")
    for i, prefs in enumerate(pref[:n]):
        seen = set()
        for pos, j in enumerate(prefs):
            if not isinstance(j, int) or not 0 <= j < m:
                problems.append(
                    f"pref[{i + 1}][{pos + 1}]: plant id {j + 1 if isinstance(j, int) else j!r}"
                    f" out of range 1..{m}"
                )
            elif j in seen:
                problems.append(f"pref[{i + 1}][{pos + 1}]: duplicate plant {j + 1}")
            seen.add(j)
        if mode == "cflcp" and len(prefs) != m:
            problems.append(
                f"pref[{i + 1}]: cflcp mode requires a complete ranking of all {m} plants,"
                f" got {len(prefs)}"
            )
        if mode == "cha" and len(prefs) == 0:
            problems.append(f"pref[{i + 1}]: empty preference list")
    return problems


def validate_instance(inst: Instance) -> ValidationReport:
    """Re-check structural invariants and report solvability warnings.

    Never raises: insufficient total capacity and the fully uncapacitated
    degenerate case are warnings, not errors.
    """
    violations = _structure_problems(
        inst.mode, inst.open_cost, inst.assign_cost, inst.capacity, inst.pref
    )
    warnings = []
    total_cap = sum(inst.capacity)
    n = inst.n_customers
    if inst.mode == "cflcp" and total_cap < n:
        warnings.append(
            f"globally infeasible for cflcp: total capacity {total_cap} < {n} customers"
        )
    if all(c >= n for c in inst.capacity):
        warnings.append(
            "uncapacitated: every plant can host all customers; capacities never bind"
        )
    return ValidationReport(tuple(violations), tuple(warnings))


def prefers(inst: Instance, i: int, j: int, j2: int) -> bool:
    """True iff customer i strictly prefers plant j to plant j2."""
    if not 0 <= i < inst.n_customers:
        raise ValueError(f"customer id {i} out of range")
    if not 0 <= j < inst.n_plants or not 0 <= j2 < inst.n_plants:
        raise ValueError(f"plant id out of range: {j}, {j2}")
    return inst.rank[i][j] < inst.rank[i][j2]


def occupancy_state(
    inst: Instance, alloc: Allocation, loc: Optional[Location] = None
) -> tuple[str, ...]:
    """Per-plant state: "closed-or-empty", "undersubscribed" or "full".

    With a Location, an open plant below capacity is undersubscribed even if
    empty, and occupancy at a closed plant is an error.
    """
    states = []
    for j in inst.plants():
        occ = alloc.occupancy[j]
        cap = inst.capacity[j]
        if occ > cap:
            raise ValueError(f"plant {j + 1} over capacity")
        if loc is not None:
            if not loc.open[j]:
                if occ > 0:
                    raise ValueError(f"allocation uses closed plant {j + 1}")
                states.append("closed-or-empty")
                continue
            states.append("full" if occ == cap else "undersubscribed")
            continue
        if occ == 0:
            states.append("closed-or-empty")
        elif occ < cap:
            states.append("undersubscribed")
        else:
            states.append("full")
    return tuple(states)


# ---------------------------------------------------------------------------
# File formats.  Instance: JSON object with keys mode, open_cost, assign_cost,
# capacity, pref (plant ids 1-based).  Allocation: JSON array of 1-based plant
# ids or null.  Canonical emission keeps that key order, one line per array
# row, LF endings.
# ---------------------------------------------------------------------------


def parse_instance(text: str | bytes) -> Instance:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("instance file must be a JSON object")
    for key in ("open_cost", "assign_cost", "capacity", "pref"):
        if key not in raw:
            raise ParseError(f"missing key {key!r}")
    mode = raw.get("mode", "cflcp")
    if mode not in MODES:
        raise ParseError(f"mode: expected one of {MODES}, got {mode!r}")

    open_cost = _number_list(raw["open_cost"], "open_cost")
    m = len(open_cost)
    if m == 0:
        raise ParseError("open_cost: at least one plant required")
    assign_rows = raw["assign_cost"]
    if not isinstance(assign_rows, list) or not assign_rows:
        raise ParseError("assign_cost: expected a non-empty array of arrays")
    assign_cost = []
    for i, row in enumerate(assign_rows):
        vals = _number_list(row, f"assign_cost[{i + 1}]")
        if len(vals) != m:
            raise ParseError(f"assign_cost[{i + 1}]: expected {m} entries, got {len(vals)}")
        assign_cost.append(vals)
    n = len(assign_cost)

    capacity = []
    if not isinstance(raw["capacity"], list) or len(raw["capacity"]) != m:
        raise ParseError(f"capacity: expected {m} entries")
    for j, c in enumerate(raw["capacity"]):
        if not isinstance(c, int) or isinstance(c, bool) or c < 1:
            raise ParseError(f"capacity[{j + 1}]: expected a positive integer, got {c!r}")
        capacity.append(c)

    if not isinstance(raw["pref"], list) or len(raw["pref"]) != n:
        raise ParseError(f"pref: expected {n} lists, got {len(raw['pref'])}")
    pref = []
    for i, lst in enumerate(raw["pref"]):
        if not isinstance(lst, list):
            raise ParseError(f"pref[{i + 1}]: expected an array")
        seen = set()
        row = []
        for pos, j in enumerate(lst):
            if not isinstance(j, int) or isinstance(j, bool) or not 1 <= j <= m:
                raise ParseError(f"pref[{i + 1}][{pos + 1}]: plant id {j!r} out of range 1..{m}")
            if j in seen:
                raise ParseError(f"pref[{i + 1}][{pos + 1}]: duplicate plant {j}")
            seen.add(j)
            row.append(j - 1)
        if mode == "cflcp" and len(row) != m:
            raise ParseError(
                f"pref[{i + 1}]: cflcp mode requires a complete ranking of all {m} plants"
            )
        if not row:
            raise ParseError(f"pref[{i + 1}]: empty preference list")
        pref.append(tuple(row))

    return Instance(
        open_cost=tuple(open_cost),
        assign_cost=tuple(tuple(r) for r in assign_cost),
        capacity=tuple(capacity),
        pref=tuple(pref),
        mode=mode,
    )


def _number_list(raw, where: str) -> list[float]:
    if not isinstance(raw, list):
        raise ParseError(f"{where}: expected an array")
    out = []
    for k, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"{where}[{k + 1}]: expected a number, got {v!r}")
        out.append(v)
    return out


def emit_instance(inst: Instance) -> str:
    """Canonical serialization; parse(emit(inst)) == inst byte-for-byte."""
    lines = ["{"]
    lines.append(f'  "mode": {json.dumps(inst.mode)},')
    lines.append(f'  "open_cost": {json.dumps(list(inst.open_cost))},')
    lines.append('  "assign_cost": [')
    for i, row in enumerate(inst.assign_cost):
        comma = "," if i + 1 < len(inst.assign_cost) else ""
        lines.append(f"    {json.dumps(list(row))}{comma}")
    lines.append("  ],")
    lines.append(f'  "capacity": {json.dumps(list(inst.capacity))},')
    lines.append('  "pref": [')
    for i, row in enumerate(inst.pref):
        comma = "," if i + 1 < len(inst.pref) else ""
        lines.append(f"    {json.dumps([j + 1 for j in row])}{comma}")
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_allocation(text: str | bytes, inst: Instance) -> Allocation:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise ParseError("allocation file must be a JSON array")
    if len(raw) != inst.n_customers:
        raise ParseError(
            f"allocation has {len(raw)} entries, expected {inst.n_customers}"
        )
    assigned: list[Optional[int]] = []
    for i, v in enumerate(raw):
        if v is None:
            assigned.append(None)
        elif isinstance(v, int) and not isinstance(v, bool) and 1 <= v <= inst.n_plants:
            assigned.append(v - 1)
        else:
            raise ParseError(f"allocation[{i + 1}]: plant id {v!r} out of range 1..{inst.n_plants}")
    return Allocation.for_instance(inst, assigned)


def emit_allocation(alloc: Allocation) -> str:
    return json.dumps([None if j is None else j + 1 for j in alloc.assigned]) + "\n"
