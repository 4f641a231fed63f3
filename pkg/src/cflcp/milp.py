"""Mixed-integer linear model representation and one builder per formulation.

Formulations (all minimize open + assignment cost unless stated):

==========  =============================================================
cs          customer stable; binaries y_j, x_ij
cs_r        customer stable, reduced; adds full-plant flags u_j, x relaxable
pw          pairwise stable; one row per customer and preferred plant pair
pw_r        pairwise stable, reduced; adds envy flags v_jj', x relaxable
cc          cyclic-coalition stable via an explicit processing permutation;
            binaries x^r_ij (customer i to plant j at step r) and u^r_j
cc_r        cyclic-coalition stable via plant fill orders; u^r_j means plant
            j is the r-th to fill, x relaxable
cha_po      maximum-cardinality undominated matching for cha instances
            (all plants open, x continuous, u^r_j binary)
==========  =============================================================

Variable naming is fixed so LP files and solution files are stable:
``y_{j}``, ``x_{i}_{j}``, ``u_{j}``, ``v_{j}_{j2}``, ``xr_{i}_{j}_{r}``,
``ur_{j}_{r}``, all 1-based.  Coefficients are exact integers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

from .model import UNRANKED, Instance, Location

CC_SIZE_WARNING = 50000


@dataclass(frozen=True)
class Variable:
    name: str
    lb: float
    ub: float
    integer: bool
    obj: float = 0.0


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: tuple[tuple[int, float], ...]  # (variable index, coefficient)
    sense: str  # "<=", "=" or ">="
    rhs: float


@dataclass(frozen=True)
class BuildOptions:
    """relax_x drops integrality on assignment variables only; relax_all on
    everything; include_vi controls the redundant open-plant link rows where
    they are optional (cs, pw, cc)."""

    relax_x: bool = False
    relax_all: bool = False
    include_vi: bool = True

    @property
    def x_integer(self) -> bool:
        return not (self.relax_x or self.relax_all)

    @property
    def others_integer(self) -> bool:
        return not self.relax_all


class MilpModel:
    """Immutable once built; builders are the only writers."""

    def __init__(self, name: str, sense: str = "min"):
        if sense not in ("min", "max"):
            raise ValueError(f"sense must be min or max, got {sense!r}")
        self.name = name
        self.sense = sense
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.index: dict[str, int] = {}
        self.meta: dict = {}

    # -- construction -------------------------------------------------------

    def add_var(self, name, lb=0.0, ub=1.0, integer=False, obj=0.0) -> int:
        if name in self.index:
            raise ValueError(f"duplicate variable name {name!r}")
        if lb > ub:
            raise ValueError(f"{name}: lower bound {lb} exceeds upper bound {ub}")
        if integer and not (math.isfinite(lb) and math.isfinite(ub)):
            raise ValueError(f"{name}: integer variables need finite bounds")
        self.index[name] = len(self.variables)
        self.variables.append(Variable(name, float(lb), float(ub), integer, float(obj)))
        return self.index[name]

    def add_constr(self, name, coeffs, sense, rhs) -> None:
        if sense not in ("<=", "=", ">="):
            raise ValueError(f"bad sense {sense!r}")
        merged: dict[int, float] = {}
        for idx, c in coeffs:
            if not 0 <= idx < len(self.variables):
                raise ValueError(f"{name}: coefficient references unknown variable {idx}")
            merged[idx] = merged.get(idx, 0.0) + c
        row = tuple((idx, c) for idx, c in merged.items() if c != 0.0)
        self.constraints.append(Constraint(name, row, sense, float(rhs)))

    # -- inspection ----------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_constrs(self) -> int:
        return len(self.constraints)

    def var_names(self) -> list[str]:
        return [v.name for v in self.variables]

    def objective_value(self, values: dict[str, float]) -> float:
        return sum(v.obj * values.get(v.name, 0.0) for v in self.variables)

    def max_violation(self, values: dict[str, float]) -> tuple[float, str]:
        """Largest constraint/bound violation and the offending row name."""
        worst, where = 0.0, ""
        vals = [values.get(v.name, 0.0) for v in self.variables]
        for v, x in zip(self.variables, vals):
            err = max(v.lb - x, x - v.ub, 0.0)
            if err > worst:
                worst, where = err, f"bound {v.name}"
        for con in self.constraints:
            act = sum(c * vals[idx] for idx, c in con.coeffs)
            if con.sense == "<=":
                err = act - con.rhs
            elif con.sense == ">=":
                err = con.rhs - act
            else:
                err = abs(act - con.rhs)
            if err > worst:
                worst, where = err, con.name
        return worst, where

    def integrality_violation(self, values: dict[str, float]) -> float:
        worst = 0.0
        for v in self.variables:
            if v.integer:
                x = values.get(v.name, 0.0)
                worst = max(worst, abs(x - round(x)))
        return worst


# ---------------------------------------------------------------------------
# Builders.  Row order is fixed per formulation (assignment, capacity, link,
# stability) so emitted files are reproducible.
# ---------------------------------------------------------------------------


def _require_mode(inst: Instance, mode: str, what: str) -> None:
    if inst.mode != mode:
        raise ValueError(f"{what} requires a {mode} instance, got {inst.mode}")


def _weakly_preferred(inst: Instance, i: int, j: int) -> list[int]:
    """Plants customer i likes at least as much as j (including j)."""
    out = []
    for j2 in inst.pref[i]:
        out.append(j2)
        if j2 == j:
            return out
    raise ValueError(f"plant {j + 1} not ranked by customer {i + 1}")


def _add_xy(model: MilpModel, inst: Instance, opts: BuildOptions) -> None:
    for j in inst.plants():
        model.add_var(f"y_{j + 1}", 0, 1, opts.others_integer, inst.open_cost[j])
    for i in inst.customers():
        for j in inst.plants():
            model.add_var(
                f"x_{i + 1}_{j + 1}", 0, 1, opts.x_integer, inst.assign_cost[i][j]
            )


def _x(model: MilpModel, i: int, j: int) -> int:
    return model.index[f"x_{i + 1}_{j + 1}"]


def _y(model: MilpModel, j: int) -> int:
    return model.index[f"y_{j + 1}"]


def build_cs(inst: Instance, opts: Optional[BuildOptions] = None) -> MilpModel:
    """Customer stable formulation on binaries (y, x).

    Stability rows: an open plant j must be full unless customer i already
    sits at a plant they like at least as much as j.
    """
    opts = opts or BuildOptions()
    _require_mode(inst, "cflcp", "the customer stable model")
    model = MilpModel("cs")
    _add_xy(model, inst, opts)
    for i in inst.customers():
        model.add_constr(
            f"assign_{i + 1}",
            [(_x(model, i, j), 1.0) for j in inst.plants()],
            "=",
            1,
        )
    for j in inst.plants():
        cap = inst.capacity[j]
        model.add_constr(
            f"cap_{j + 1}",
            [(_x(model, i, j), 1.0) for i in inst.customers()]
            + [(_y(model, j), -float(cap))],
            "<=",
            0,
        )
    if opts.include_vi:
        for i in inst.customers():
            for j in inst.plants():
                model.add_constr(
                    f"link_{i + 1}_{j + 1}",
                    [(_x(model, i, j), 1.0), (_y(model, j), -1.0)],
                    "<=",
                    0,
                )
    for i in inst.customers():
        for j in inst.plants():
            cap = inst.capacity[j]
            coeffs = [(_y(model, j), float(cap))]
            for j2 in _weakly_preferred(inst, i, j):
                coeffs.append((_x(model, i, j2), -float(cap)))
            for i2 in inst.customers():
                if i2 != i:
                    coeffs.append((_x(model, i2, j), -1.0))
            model.add_constr(f"stab_{i + 1}_{j + 1}", coeffs, "<=", 0)
    model.meta = {"formulation": "cs", "instance": inst, "opts": opts}
    return model


def _add_reduced_core(model: MilpModel, inst: Instance, opts: BuildOptions) -> None:
    """Shared rows of the reduced models: assignment, split capacity with
    full-plant flags u_j, open-plant links, and no-blocking-customer rows."""
    for j in inst.plants():
        model.add_var(f"u_{j + 1}", 0, 1, opts.others_integer)
    for i in inst.customers():
        model.add_constr(
            f"assign_{i + 1}",
            [(_x(model, i, j), 1.0) for j in inst.plants()],
            "=",
            1,
        )
    for j in inst.plants():
        cap = inst.capacity[j]
        u = model.index[f"u_{j + 1}"]
        model.add_constr(
            f"capu_{j + 1}",
            [(_x(model, i, j), 1.0) for i in inst.customers()]
            + [(_y(model, j), -float(cap - 1)), (u, -1.0)],
            "<=",
            0,
        )
        model.add_constr(
            f"capl_{j + 1}",
            [(u, float(cap))] + [(_x(model, i, j), -1.0) for i in inst.customers()],
            "<=",
            0,
        )
    for i in inst.customers():
        for j in inst.plants():
            model.add_constr(
                f"link_{i + 1}_{j + 1}",
                [(_x(model, i, j), 1.0), (_y(model, j), -1.0)],
                "<=",
                0,
            )
    for i in inst.customers():
        for j in inst.plants():
            u = model.index[f"u_{j + 1}"]
            coeffs = [(_y(model, j), 1.0), (u, -1.0)]
            for j2 in _weakly_preferred(inst, i, j):
                coeffs.append((_x(model, i, j2), -1.0))
            model.add_constr(f"stab_{i + 1}_{j + 1}", coeffs, "<=", 0)


def build_cs_r(inst: Instance, opts: Optional[BuildOptions] = None) -> MilpModel:
    """Reduced customer stable formulation; x integrality is redundant."""
    opts = opts or BuildOptions()
    _require_mode(inst, "cflcp", "the reduced customer stable model")
    model = MilpModel("cs_r")
    _add_xy(model, inst, opts)
    _add_reduced_core(model, inst, opts)
    model.meta = {"formulation": "cs_r", "instance": inst, "opts": opts}
    return model


def build_pw(inst: Instance, opts: Optional[BuildOptions] = None) -> MilpModel:
    """Pairwise stable formulation on binaries (y, x).

    One row per customer i and ordered plant pair (j better than j') in i's
    ranking: if j is open and i sits at j', then j must be filled entirely by
    customers who also prefer j to j'.
    """
    opts = opts or BuildOptions()
    _require_mode(inst, "cflcp", "the pairwise stable model")
    model = MilpModel("pw")
    _add_xy(model, inst, opts)
    for i in inst.customers():
        model.add_constr(
            f"assign_{i + 1}",
            [(_x(model, i, j), 1.0) for j in inst.plants()],
            "=",
            1,
        )
    for j in inst.plants():
        cap = inst.capacity[j]
        model.add_constr(
            f"cap_{j + 1}",
            [(_x(model, i, j), 1.0) for i in inst.customers()]
            + [(_y(model, j), -float(cap))],
            "<=",
            0,
        )
    if opts.include_vi:
        for i in inst.customers():
            for j in inst.plants():
                model.add_constr(
                    f"link_{i + 1}_{j + 1}",
                    [(_x(model, i, j), 1.0), (_y(model, j), -1.0)],
                    "<=",
                    0,
                )
    rank = inst.rank
    for i in inst.customers():
        for j in inst.plants():
            for j2 in inst.plants():
                if j == j2 or not rank[i][j] < rank[i][j2]:
                    continue
                cap = inst.capacity[j]
                coeffs = [(_y(model, j), float(cap)), (_x(model, i, j2), float(cap))]
                for i2 in inst.customers():
                    if i2 != i and rank[i2][j] < rank[i2][j2]:
                        coeffs.append((_x(model, i2, j), -1.0))
                model.add_constr(f"pw_{i + 1}_{j + 1}_{j2 + 1}", coeffs, "<=", cap)
    model.meta = {"formulation": "pw", "instance": inst, "opts": opts}
    return model


def build_pw_r(inst: Instance, opts: Optional[BuildOptions] = None) -> MilpModel:
    """Reduced pairwise stable formulation: the reduced customer-stable core
    plus envy flags v_jj' (someone prefers j but sits at j') that cannot hold
    in both directions; x integrality is redundant."""
    opts = opts or BuildOptions()
    _require_mode(inst, "cflcp", "the reduced pairwise stable model")
    model = MilpModel("pw_r")
    _add_xy(model, inst, opts)
    for j in inst.plants():
        for j2 in inst.plants():
            if j != j2:
                model.add_var(f"v_{j + 1}_{j2 + 1}", 0, 1, opts.others_integer)
    _add_reduced_core(model, inst, opts)
    for j in inst.plants():
        for j2 in inst.plants():
            if j < j2:
                model.add_constr(
                    f"vsym_{j + 1}_{j2 + 1}",
                    [
                        (model.index[f"v_{j + 1}_{j2 + 1}"], 1.0),
                        (model.index[f"v_{j2 + 1}_{j + 1}"], 1.0),
                    ],
                    "<=",
                    1,
                )
    rank = inst.rank
    for i in inst.customers():
        for j in inst.plants():
            for j2 in inst.plants():
                if j == j2 or not rank[i][j] < rank[i][j2]:
                    continue
                model.add_constr(
                    f"vset_{i + 1}_{j + 1}_{j2 + 1}",
                    [
                        (_x(model, i, j2), 1.0),
                        (model.index[f"v_{j + 1}_{j2 + 1}"], -1.0),
                    ],
                    "<=",
                    0,
                )
    model.meta = {"formulation": "pw_r", "instance": inst, "opts": opts}
    return model


def build_cc(inst: Instance, opts: Optional[BuildOptions] = None) -> MilpModel:
    """Cyclic-coalition stable formulation with an explicit permutation.

    xr_{i}_{j}_{r} = 1 iff customer i is assigned to plant j as the r-th
    customer processed; ur_{j}_{r} = 1 iff plant j fills up at step r.
    """
    opts = opts or BuildOptions()
    _require_mode(inst, "cflcp", "the cyclic-coalition stable model")
    n, m = inst.n_customers, inst.n_plants
    if n * n * m > CC_SIZE_WARNING:
        warnings.warn(
            f"permutation model has {n * n * m} assignment variables; "
            "consider the reduced variant",
            stacklevel=2,
        )
    model = MilpModel("cc")
    for j in inst.plants():
        model.add_var(f"y_{j + 1}", 0, 1, opts.others_integer, inst.open_cost[j])
    for i in inst.customers():
        for j in inst.plants():
            for r in range(n):
                model.add_var(
                    f"xr_{i + 1}_{j + 1}_{r + 1}",
                    0,
                    1,
                    opts.x_integer,
                    inst.assign_cost[i][j],
                )
    for j in inst.plants():
        for r in range(n):
            model.add_var(f"ur_{j + 1}_{r + 1}", 0, 1, opts.others_integer)

    def xr(i, j, r):
        return model.index[f"xr_{i + 1}_{j + 1}_{r + 1}"]

    def ur(j, r):
        return model.index[f"ur_{j + 1}_{r + 1}"]

    for i in inst.customers():
        model.add_constr(
            f"assign_{i + 1}",
            [(xr(i, j, r), 1.0) for j in inst.plants() for r in range(n)],
            "=",
            1,
        )
    for r in range(n):
        model.add_constr(
            f"round_{r + 1}",
            [(xr(i, j, r), 1.0) for i in inst.customers() for j in inst.plants()],
            "=",
            1,
        )
    if opts.include_vi:
        for i in inst.customers():
            for j in inst.plants():
                model.add_constr(
                    f"link_{i + 1}_{j + 1}",
                    [(xr(i, j, r), 1.0) for r in range(n)]
                    + [(_y(model, j), -1.0)],
                    "<=",
                    0,
                )
    for j in inst.plants():
        model.add_constr(
            f"fillopen_{j + 1}",
            [(ur(j, r), 1.0) for r in range(n)] + [(_y(model, j), -1.0)],
            "<=",
            0,
        )
    for r in range(n):
        model.add_constr(
            f"fillonce_{r + 1}",
            [(ur(j, r), 1.0) for j in inst.plants()],
            "<=",
            1,
        )
    for j in inst.plants():
        cap = inst.capacity[j]
        for r in range(n):
            model.add_constr(
                f"capu_{j + 1}_{r + 1}",
                [(xr(i, j, r2), 1.0) for i in inst.customers() for r2 in range(r + 1)]
                + [(_y(model, j), -float(cap - 1))]
                + [(ur(j, r2), -1.0) for r2 in range(r + 1)],
                "<=",
                0,
            )
            model.add_constr(
                f"capl_{j + 1}_{r + 1}",
                [(ur(j, r2), float(cap)) for r2 in range(r + 1)]
                + [(xr(i, j, r2), -1.0) for i in inst.customers() for r2 in range(r + 1)],
                "<=",
                0,
            )
    for i in inst.customers():
        for r in range(n):
            for j in inst.plants():
                coeffs = [(_y(model, j), 1.0)]
                coeffs += [(ur(j, r2), -1.0) for r2 in range(r)]
                for j2 in _weakly_preferred(inst, i, j):
                    coeffs += [(xr(i, j2, r2), -1.0) for r2 in range(r + 1)]
                for j2 in inst.plants():
                    coeffs += [(xr(i, j2, r2), -1.0) for r2 in range(r + 1, n)]
                model.add_constr(f"pref_{i + 1}_{r + 1}_{j + 1}", coeffs, "<=", 0)
    model.meta = {"formulation": "cc", "instance": inst, "opts": opts}
    return model


def _add_fill_order_rows(
    model: MilpModel, inst: Instance, *, fixed_open: bool
) -> None:
    """Fill-order machinery shared by cc_r and cha_po: plants fill one per
    round, a customer's plant may not fill before one they prefer, and a
    never-filling plant forces every customer to sit at least as high."""
    m = inst.n_plants
    rank = inst.rank

    def ur(j, r):
        return model.index[f"ur_{j + 1}_{r + 1}"]

    for j in inst.plants():
        coeffs = [(ur(j, r), 1.0) for r in range(m)]
        rhs = 1.0
        if not fixed_open:
            coeffs.append((_y(model, j), -1.0))
            rhs = 0.0
        model.add_constr(f"fillopen_{j + 1}", coeffs, "<=", rhs)
    model.add_constr(
        "round_1", [(ur(j, 0), 1.0) for j in inst.plants()], "<=", 1
    )
    for r in range(1, m):
        model.add_constr(
            f"roundseq_{r + 1}",
            [(ur(j, r), 1.0) for j in inst.plants()]
            + [(ur(j, r - 1), -1.0) for j in inst.plants()],
            "<=",
            0,
        )
    for j in inst.plants():
        cap = inst.capacity[j]
        x_terms = [
            (_x(model, i, j), 1.0)
            for i in inst.customers()
            if rank[i][j] != UNRANKED
        ]
        coeffs = list(x_terms) + [(ur(j, r), -1.0) for r in range(m)]
        rhs = float(cap - 1)
        if not fixed_open:
            coeffs.append((_y(model, j), -float(cap - 1)))
            rhs = 0.0
        model.add_constr(f"capu_{j + 1}", coeffs, "<=", rhs)
        model.add_constr(
            f"capl_{j + 1}",
            [(ur(j, r), float(cap)) for r in range(m)]
            + [(idx, -c) for idx, c in x_terms],
            "<=",
            0,
        )
    for i in inst.customers():
        for j in inst.pref[i]:
            for r in range(m):
                coeffs = [(_x(model, i, j), 1.0)]
                coeffs += [(ur(j, r2), 1.0) for r2 in range(r)]
                for j2 in inst.pref[i]:
                    if j2 == j:
                        break
                    coeffs.append((ur(j2, r), 1.0))
                rhs = 2.0
                if not fixed_open:
                    coeffs.append((_y(model, j), -1.0))
                    rhs = 1.0
                model.add_constr(f"fillpref_{i + 1}_{j + 1}_{r + 1}", coeffs, "<=", rhs)
    for i in inst.customers():
        for j in inst.pref[i]:
            coeffs = [(ur(j, r), -1.0) for r in range(m)]
            for j2 in _weakly_preferred(inst, i, j):
                coeffs.append((_x(model, i, j2), -1.0))
            if fixed_open:
                model.add_constr(f"underpref_{i + 1}_{j + 1}", coeffs, "<=", -1.0)
            else:
                coeffs.append((_y(model, j), 1.0))
                model.add_constr(f"underpref_{i + 1}_{j + 1}", coeffs, "<=", 0.0)


def build_cc_r(inst: Instance, opts: Optional[BuildOptions] = None) -> MilpModel:
    """Reduced cyclic-coalition stable formulation: ur_{j}_{r} = 1 iff plant
    j is the r-th plant to fill up; x integrality is redundant."""
    opts = opts or BuildOptions()
    _require_mode(inst, "cflcp", "the reduced cyclic-coalition stable model")
    m = inst.n_plants
    model = MilpModel("cc_r")
    _add_xy(model, inst, opts)
    for j in inst.plants():
        for r in range(m):
            model.add_var(f"ur_{j + 1}_{r + 1}", 0, 1, opts.others_integer)
    for i in inst.customers():
        model.add_constr(
            f"assign_{i + 1}",
            [(_x(model, i, j), 1.0) for j in inst.plants()],
            "=",
            1,
        )
    for i in inst.customers():
        for j in inst.plants():
            model.add_constr(
                f"link_{i + 1}_{j + 1}",
                [(_x(model, i, j), 1.0), (_y(model, j), -1.0)],
                "<=",
                0,
            )
    _add_fill_order_rows(model, inst, fixed_open=False)
    model.meta = {"formulation": "cc_r", "instance": inst, "opts": opts}
    return model


def build_cha_po(inst: Instance, opts: Optional[BuildOptions] = None) -> MilpModel:
    """Maximum-cardinality undominated matching for a cha instance.

    All plants are treated as open, assignment is optional, assignment
    variables exist only for ranked pairs and stay continuous; only the
    fill-order flags are binary.
    """
    opts = opts or BuildOptions()
    _require_mode(inst, "cha", "the house-allocation model")
    m = inst.n_plants
    model = MilpModel("cha_po", sense="max")
    for i in inst.customers():
        for j in inst.pref[i]:
            model.add_var(f"x_{i + 1}_{j + 1}", 0, 1, False, 1.0)
    for j in inst.plants():
        for r in range(m):
            model.add_var(f"ur_{j + 1}_{r + 1}", 0, 1, opts.others_integer)
    for i in inst.customers():
        model.add_constr(
            f"assign_{i + 1}",
            [(_x(model, i, j), 1.0) for j in inst.pref[i]],
            "<=",
            1,
        )
    _add_fill_order_rows(model, inst, fixed_open=True)
    model.meta = {"formulation": "cha_po", "instance": inst, "opts": opts}
    return model


def build_second_level(
    inst: Instance, loc: Location, pref_target: Optional[float] = None
) -> MilpModel:
    """Assignment problem for a fixed open set: minimize the rank sum, or,
    with ``pref_target``, minimize assignment cost among assignments whose
    rank sum equals the target."""
    _require_mode(inst, "cflcp", "the second-level assignment model")
    open_plants = loc.open_plants()
    if loc.open_capacity(inst) < inst.n_customers:
        raise ValueError("infeasible location: open capacity below customer count")
    model = MilpModel("second_level")
    for i in inst.customers():
        for j in open_plants:
            obj = inst.assign_cost[i][j] if pref_target is not None else inst.rank[i][j]
            model.add_var(f"x_{i + 1}_{j + 1}", 0, 1, True, obj)
    for i in inst.customers():
        model.add_constr(
            f"assign_{i + 1}",
            [(_x(model, i, j), 1.0) for j in open_plants],
            "=",
            1,
        )
    for j in open_plants:
        model.add_constr(
            f"cap_{j + 1}",
            [(_x(model, i, j), 1.0) for i in inst.customers()],
            "<=",
            inst.capacity[j],
        )
    if pref_target is not None:
        model.add_constr(
            "prefsum",
            [
                (_x(model, i, j), float(inst.rank[i][j]))
                for i in inst.customers()
                for j in open_plants
            ],
            "=",
            pref_target,
        )
    model.meta = {"formulation": "second_level", "instance": inst, "loc": loc}
    return model


BUILDERS = {
    "cs": build_cs,
    "cs_r": build_cs_r,
    "pw": build_pw,
    "pw_r": build_pw_r,
    "cc": build_cc,
    "cc_r": build_cc_r,
    "cha_po": build_cha_po,
}


def extract_assignment(
    model: MilpModel, values: dict[str, float], inst: Instance
) -> list[Optional[int]]:
    """Read the customer-to-plant map out of a solution's x (or xr) values."""
    assigned: list[Optional[int]] = [None] * inst.n_customers
    for name, val in values.items():
        if val < 0.5:
            continue
        if name.startswith("x_"):
            _, i, j = name.split("_")
            assigned[int(i) - 1] = int(j) - 1
        elif name.startswith("xr_"):
            _, i, j, _r = name.split("_")
            assigned[int(i) - 1] = int(j) - 1
    return assigned


def extract_location(model: MilpModel, values: dict[str, float], inst: Instance) -> Location:
    open_flags = [False] * inst.n_plants
    for name, val in values.items():
        if name.startswith("y_") and val >= 0.5:
            open_flags[int(name.split("_")[1]) - 1] = True
    return Location(tuple(open_flags))
