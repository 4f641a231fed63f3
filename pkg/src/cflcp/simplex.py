"""Bounded-variable primal simplex.

Two phases with artificial columns on rows the all-slack point violates;
Dantzig pricing with Bland's rule engaged after a run of degenerate pivots;
explicit basis inverse with outer-product updates and periodic
refactorization.  Integrality flags on the model are ignored here: this is
the pure relaxation solver the branch-and-bound drives.

The engine keeps only immutable standard-form arrays, so one engine may be
shared across threads; every ``solve`` call works on local state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .milp import MilpModel

AT_LB, AT_UB, BASIC = 0, 1, 2

PRICE_TOL = 1e-9
PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
DEGEN_TOL = 1e-10
BLAND_AFTER = 5000  # degenerate pivots before anti-cycling kicks in
REFACTOR_EVERY = 64


class SimplexError(RuntimeError):
    """Numerical failure that survived refactorization and Bland's rule."""

    def __init__(self, message: str, model: Optional[MilpModel] = None):
        if model is not None:
            message += (
                f" [model {model.name}: {model.n_vars} variables,"
                f" {model.n_constrs} rows]"
            )
        super().__init__(message)
        self.model = model


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: Optional[float]
    values: dict[str, float]
    duals: dict[str, float]
    iterations: int


@dataclass
class RawLp:
    """Array-level result used by the branch-and-bound loop."""

    status: str
    objective: Optional[float]
    x: Optional[np.ndarray]  # structural variables only
    duals: Optional[np.ndarray]
    iterations: int


class LpEngine:
    """Standard form built once per model: A x + s = b with bounded slacks."""

    def __init__(self, model: MilpModel):
        self.model = model
        n = model.n_vars
        m = model.n_constrs
        self.n = n
        self.m = m
        self.A = np.zeros((m, n))
        self.b = np.zeros(m)
        self.slack_lb = np.zeros(m)
        self.slack_ub = np.zeros(m)
        for k, con in enumerate(model.constraints):
            for idx, c in con.coeffs:
                self.A[k, idx] += c
            self.b[k] = con.rhs
            if con.sense == "<=":
                self.slack_lb[k], self.slack_ub[k] = 0.0, np.inf
            elif con.sense == ">=":
                self.slack_lb[k], self.slack_ub[k] = -np.inf, 0.0
            else:
                self.slack_lb[k], self.slack_ub[k] = 0.0, 0.0
        self.var_lb = np.array([v.lb for v in model.variables])
        self.var_ub = np.array([v.ub for v in model.variables])
        self.sign = 1.0 if model.sense == "min" else -1.0
        self.c_struct = self.sign * np.array([v.obj for v in model.variables])
        if np.any(np.isinf(self.var_lb) & np.isinf(self.var_ub)):
            raise SimplexError("free variables are not supported", model)

    # ------------------------------------------------------------------

    def solve(
        self,
        lb_override: Optional[np.ndarray] = None,
        ub_override: Optional[np.ndarray] = None,
    ) -> RawLp:
        n, m = self.n, self.m
        lb_s = self.var_lb if lb_override is None else lb_override
        ub_s = self.var_ub if ub_override is None else ub_override
        if np.any(lb_s > ub_s + 1e-12):
            return RawLp("infeasible", None, None, None, 0)
        if m == 0:
            return self._solve_unconstrained(lb_s, ub_s)

        # initial nonbasic point: every structural at its finite bound
        x_s = np.where(np.isfinite(lb_s), lb_s, ub_s)
        resid = self.b - self.A @ x_s

        # columns: [structurals | slacks | artificials for violated rows]
        art_rows = []
        art_sign = []
        slack_val = np.clip(resid, self.slack_lb, self.slack_ub)
        bad = np.flatnonzero(np.abs(resid - slack_val) > FEAS_TOL)
        for k in bad:
            art_rows.append(k)
            art_sign.append(1.0 if resid[k] > slack_val[k] else -1.0)
        n_art = len(art_rows)
        n_tot = n + m + n_art
        art_rows_a = np.array(art_rows, dtype=int)
        art_sign_a = np.array(art_sign)

        lb = np.concatenate([lb_s, self.slack_lb, np.zeros(n_art)])
        ub = np.concatenate([ub_s, self.slack_ub, np.full(n_art, np.inf)])
        x = np.zeros(n_tot)
        x[:n] = x_s
        x[n : n + m] = slack_val
        status = np.full(n_tot, AT_LB, dtype=np.int8)
        status[:n][~np.isfinite(lb_s)] = AT_UB
        status[n : n + m][slack_val == self.slack_ub] = AT_UB

        basis = np.array([n + k for k in range(m)], dtype=int)
        for t, k in enumerate(art_rows):
            z = n + m + t
            x[z] = abs(resid[k] - slack_val[k])
            basis[k] = z
        status[basis] = BASIC

        # basis columns are slack (+e_k) or artificial (sign * e_k)
        diag = np.ones(m)
        if n_art:
            diag[art_rows_a] = art_sign_a
        binv = np.diag(1.0 / diag)

        state = _SolveState(
            self, lb, ub, x, status, basis, binv, art_rows_a, art_sign_a
        )

        if n_art:
            c1 = np.zeros(n_tot)
            c1[n + m :] = 1.0
            res = state.iterate(c1, phase=1)
            if res == "iteration-limit":
                raise SimplexError("phase-1 iteration limit", self.model)
            if state.objective(c1) > 1e-7:
                return RawLp("infeasible", None, None, None, state.iters)
            # pin artificials at zero for phase 2
            state.ub[n + m :] = 0.0
            state.x[n + m :] = np.clip(state.x[n + m :], 0.0, 0.0)

        c2 = np.concatenate([self.c_struct, np.zeros(m + n_art)])
        res = state.iterate(c2, phase=2)
        if res == "unbounded":
            return RawLp("unbounded", None, None, None, state.iters)
        if res == "iteration-limit":
            raise SimplexError("phase-2 iteration limit", self.model)

        state.refactor()
        x = state.x
        worst = max(
            float(np.max(state.lb - x, initial=0.0)),
            float(np.max(x - state.ub, initial=0.0)),
        )
        row_resid = self.b - self.A @ x[:n] - x[n : n + m]
        if n_art:
            row_resid[art_rows_a] -= art_sign_a * x[n + m :]
        worst = max(worst, float(np.max(np.abs(row_resid), initial=0.0)))
        if worst > 1e-6 * (1.0 + float(np.max(np.abs(self.b), initial=0.0))):
            raise SimplexError(f"optimal point infeasible by {worst:.3e}", self.model)
        obj = self.sign * state.objective(c2)
        y = self.sign * (c2[state.basis] @ state.binv)
        return RawLp("optimal", obj, state.x[:n].copy(), y, state.iters)

    def _solve_unconstrained(self, lb_s, ub_s) -> RawLp:
        x = np.where(self.c_struct > 0, lb_s, np.where(self.c_struct < 0, ub_s, lb_s))
        zero_cost = self.c_struct == 0
        x[zero_cost] = np.where(np.isfinite(lb_s[zero_cost]), lb_s[zero_cost], 0.0)
        if np.any(~np.isfinite(x) & (self.c_struct != 0)):
            return RawLp("unbounded", None, None, None, 0)
        x = np.where(np.isfinite(x), x, 0.0)
        obj = self.sign * float(self.c_struct @ x)
        return RawLp("optimal", obj, x, np.zeros(0), 0)


class _SolveState:
    """Mutable per-solve workspace (basis, inverse, point, statuses)."""

    def __init__(self, eng: LpEngine, lb, ub, x, status, basis, binv, art_rows, art_sign):
        self.eng = eng
        self.lb = lb
        self.ub = ub
        self.x = x
        self.status = status
        self.basis = basis
        self.binv = binv
        self.art_rows = art_rows
        self.art_sign = art_sign
        self.iters = 0
        self.degenerate = 0
        self.since_refactor = 0
        self.max_iters = 20000 + 200 * (eng.m + eng.n)

    # -- column access ------------------------------------------------------

    def col(self, j: int) -> np.ndarray:
        n, m = self.eng.n, self.eng.m
        if j < n:
            return self.eng.A[:, j]
        if j < n + m:
            e = np.zeros(m)
            e[j - n] = 1.0
            return e
        t = j - n - m
        e = np.zeros(m)
        e[self.art_rows[t]] = self.art_sign[t]
        return e

    def reduced_costs(self, c: np.ndarray) -> np.ndarray:
        n, m = self.eng.n, self.eng.m
        y = c[self.basis] @ self.binv
        d = np.empty(len(self.x))
        d[:n] = c[:n] - self.eng.A.T @ y
        d[n : n + m] = c[n : n + m] - y
        if len(self.art_rows):
            d[n + m :] = c[n + m :] - self.art_sign * y[self.art_rows]
        return d

    def objective(self, c: np.ndarray) -> float:
        return float(c @ self.x)

    # -- core loop -----------------------------------------------------------

    def iterate(self, c: np.ndarray, phase: int) -> str:
        n, m = self.eng.n, self.eng.m
        movable = (self.ub - self.lb) > 1e-12
        confirmed = False
        while True:
            if self.iters >= self.max_iters:
                return "iteration-limit"
            d = self.reduced_costs(c)
            nonbasic = self.status != BASIC
            enter_up = nonbasic & movable & (self.status == AT_LB) & (d < -PRICE_TOL)
            enter_dn = nonbasic & movable & (self.status == AT_UB) & (d > PRICE_TOL)
            cand = enter_up | enter_dn
            if not cand.any():
                if confirmed or self.since_refactor == 0:
                    return "optimal"
                self.refactor()
                movable = (self.ub - self.lb) > 1e-12
                confirmed = True
                continue
            confirmed = False
            if self.degenerate >= BLAND_AFTER:
                q = int(np.flatnonzero(cand)[0])
            else:
                score = np.where(cand, np.abs(d), 0.0)
                q = int(np.argmax(score))
            dirn = 1.0 if self.status[q] == AT_LB else -1.0

            w = self.binv @ self.col(q)
            g = -dirn * w  # change of basic values per unit step
            xB = self.x[self.basis]
            lbB = self.lb[self.basis]
            ubB = self.ub[self.basis]
            ratios = np.full(m, np.inf)
            hit_lb = g < -PIVOT_TOL
            hit_ub = g > PIVOT_TOL
            with np.errstate(invalid="ignore"):
                ratios[hit_lb] = (xB[hit_lb] - lbB[hit_lb]) / -g[hit_lb]
                ratios[hit_ub] = (ubB[hit_ub] - xB[hit_ub]) / g[hit_ub]
            ratios = np.where(np.isnan(ratios), np.inf, np.maximum(ratios, 0.0))
            theta_basic = float(ratios.min()) if m else np.inf
            theta_self = float(self.ub[q] - self.lb[q])
            theta = min(theta_basic, theta_self)
            if not np.isfinite(theta):
                if phase == 1:
                    raise SimplexError("phase-1 step unbounded", self.eng.model)
                return "unbounded"

            self.iters += 1
            if theta <= DEGEN_TOL:
                self.degenerate += 1

            if theta_self <= theta_basic:
                # bound flip: no basis change
                self.x[self.basis] = xB + g * theta_self
                self.x[q] = self.ub[q] if dirn > 0 else self.lb[q]
                self.status[q] = AT_UB if dirn > 0 else AT_LB
                continue

            near = np.flatnonzero(ratios <= theta + 1e-10)
            if self.degenerate >= BLAND_AFTER:
                r = int(near[np.argmin(self.basis[near])])
            else:
                best = near[np.abs(w[near]) == np.abs(w[near]).max()]
                r = int(best[np.argmin(self.basis[best])])
            p = int(self.basis[r])

            self.x[self.basis] = xB + g * theta
            self.x[q] = self.x[q] + dirn * theta
            self.x[p] = lbB[r] if g[r] < 0 else ubB[r]  # snap exactly
            self.status[p] = AT_LB if g[r] < 0 else AT_UB
            self.status[q] = BASIC
            self.basis[r] = q

            pivrow = self.binv[r] / w[r]
            self.binv -= np.outer(w, pivrow)
            self.binv[r] = pivrow
            self.since_refactor += 1
            if self.since_refactor >= REFACTOR_EVERY:
                self.refactor()

    def refactor(self) -> None:
        m = self.eng.m
        B = np.column_stack([self.col(j) for j in self.basis])
        try:
            self.binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise SimplexError(f"singular basis: {exc}", self.eng.model) from exc
        tmp = self.x.copy()
        tmp[self.basis] = 0.0
        n = self.eng.n
        resid = self.eng.b - self.eng.A @ tmp[:n] - tmp[n : n + m]
        if len(self.art_rows):
            resid[self.art_rows] -= self.art_sign * tmp[n + m :]
        self.x[self.basis] = self.binv @ resid
        self.since_refactor = 0


def solve_lp(model: MilpModel) -> LpSolution:
    """Optimal basic solution of the full linear relaxation.

    Deterministic for a fixed model; raises SimplexError only on numerical
    failure that survives refactorization and the anti-cycling fallback.
    """
    eng = LpEngine(model)
    raw = eng.solve()
    if raw.status != "optimal":
        return LpSolution(raw.status, None, {}, {}, raw.iterations)
    names = model.var_names()
    values = {nm: float(v) for nm, v in zip(names, raw.x)}
    duals = {
        con.name: float(raw.duals[k]) for k, con in enumerate(model.constraints)
    }
    return LpSolution("optimal", float(raw.objective), values, duals, raw.iterations)
