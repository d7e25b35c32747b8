"""Dense two-phase simplex with Bland's anti-cycling rule.

Small deterministic LP kernel for the minimax and envelope checks: exact
vertex answers on desk-scale instances, reported together with a dual
vector so every Optimal solution can be certified by strong duality and
complementary slackness.

Problem form:

    optimize c . x   (minimize or maximize)
    subject to A_ub x <= b_ub,  A_eq x = b_eq,
    x_j >= 0 where nonneg[j], otherwise free.

Reported dual convention (y_ub for inequality rows, y_eq for equalities):
value = b_ub . y_ub + b_eq . y_eq, with y_ub <= 0 for minimization and
y_ub >= 0 for maximization, and stationarity c - A^T y vanishing on free
variables and correctly signed on bound ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from .errors import ConvergenceError, DimensionError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_PIVOT_TOL = 1e-9


@dataclass(frozen=True)
class LpProblem:
    c: np.ndarray
    a_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    a_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    nonneg: Optional[np.ndarray] = None  # default: all variables free
    maximize: bool = False

    def normalized(self):
        c = np.asarray(self.c, dtype=float)
        nvar = len(c)
        a_ub = np.zeros((0, nvar)) if self.a_ub is None else np.atleast_2d(np.asarray(self.a_ub, dtype=float))
        b_ub = np.zeros(0) if self.b_ub is None else np.atleast_1d(np.asarray(self.b_ub, dtype=float))
        a_eq = np.zeros((0, nvar)) if self.a_eq is None else np.atleast_2d(np.asarray(self.a_eq, dtype=float))
        b_eq = np.zeros(0) if self.b_eq is None else np.atleast_1d(np.asarray(self.b_eq, dtype=float))
        nonneg = (np.zeros(nvar, dtype=bool) if self.nonneg is None
                  else np.asarray(self.nonneg, dtype=bool))
        if a_ub.shape != (len(b_ub), nvar) or a_eq.shape != (len(b_eq), nvar):
            raise DimensionError("constraint matrix shapes do not match c / rhs")
        if len(nonneg) != nvar:
            raise DimensionError("nonneg mask length does not match c")
        return c, a_ub, b_ub, a_eq, b_eq, nonneg


@dataclass
class LpSolution:
    status: str
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    dual_ub: Optional[np.ndarray] = None
    dual_eq: Optional[np.ndarray] = None
    pivots: int = 0


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * tableau[row]
    basis[row] = col


def _run_simplex(tableau: np.ndarray, basis: np.ndarray, eligible: np.ndarray,
                 max_pivots: int) -> str:
    """Minimize the cost row in place; Bland's rule throughout."""
    m = tableau.shape[0] - 1
    for pivot_count in range(max_pivots):
        cost = tableau[-1, :-1]
        entering = -1
        for j in np.flatnonzero(eligible):
            if cost[j] < -_PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        col = tableau[:m, entering]
        rows = np.flatnonzero(col > _PIVOT_TOL)
        if len(rows) == 0:
            return UNBOUNDED
        ratios = tableau[rows, -1] / col[rows]
        best = ratios.min()
        # Bland: among minimal ratios, leave the basic variable of least index.
        tied = rows[ratios <= best + _PIVOT_TOL * (1.0 + abs(best))]
        leaving = tied[np.argmin(basis[tied])]
        _pivot(tableau, basis, leaving, entering)
    raise ConvergenceError("simplex exceeded its pivot cap")


def simplex_solve(problem: LpProblem, max_pivots: int = 20000) -> LpSolution:
    c, a_ub, b_ub, a_eq, b_eq, nonneg = problem.normalized()
    sign = -1.0 if problem.maximize else 1.0
    c_int = sign * c

    # Standard form: split free variables, add slacks, make the rhs >= 0.
    nvar = len(c)
    col_of_var = []  # (var index, +1) or (var index, -1)
    for j in range(nvar):
        col_of_var.append((j, 1.0))
        if not nonneg[j]:
            col_of_var.append((j, -1.0))
    nstruct = len(col_of_var)
    n_ub, n_eq = len(b_ub), len(b_eq)
    m = n_ub + n_eq
    ncols = nstruct + n_ub  # structural + slack

    a_std = np.zeros((m, ncols))
    b_std = np.concatenate([b_ub, b_eq])
    for k, (j, s) in enumerate(col_of_var):
        a_std[:n_ub, k] = s * a_ub[:, j]
        a_std[n_ub:, k] = s * a_eq[:, j]
    for r in range(n_ub):
        a_std[r, nstruct + r] = 1.0
    c_std = np.zeros(ncols)
    for k, (j, s) in enumerate(col_of_var):
        c_std[k] = s * c_int[j]

    row_sign = np.ones(m)
    neg = b_std < 0
    row_sign[neg] = -1.0
    a_std[neg] *= -1.0
    b_std[neg] *= -1.0

    # Phase 1: artificial basis, minimize the sum of artificials.
    total = ncols + m
    tableau = np.zeros((m + 1, total + 1))
    tableau[:m, :ncols] = a_std
    tableau[:m, ncols:total] = np.eye(m)
    tableau[:m, -1] = b_std
    tableau[-1, ncols:total] = 1.0
    for i in range(m):
        tableau[-1] -= tableau[i]
    basis = np.arange(ncols, total)
    eligible = np.ones(total, dtype=bool)

    pivots = 0
    status = _run_simplex(tableau, basis, eligible, max_pivots)
    if status != OPTIMAL:  # pragma: no cover - phase 1 is always bounded
        raise ConvergenceError("phase 1 terminated abnormally")
    scale = 1.0 + float(np.max(np.abs(b_std))) if m else 1.0
    if -tableau[-1, -1] > 1e-9 * scale:
        return LpSolution(status=INFEASIBLE)

    # Drive basic artificials to zero level pivots where possible; keep any
    # stragglers basic (their rows are redundant) but bar re-entry.
    for i in range(m):
        if basis[i] >= ncols:
            candidates = np.flatnonzero(np.abs(tableau[i, :ncols]) > _PIVOT_TOL)
            if len(candidates):
                _pivot(tableau, basis, i, int(candidates[0]))

    # Phase 2: original costs, artificial columns ineligible.
    eligible = np.zeros(total, dtype=bool)
    eligible[:ncols] = True
    tableau[-1] = 0.0
    tableau[-1, :ncols] = c_std
    for i in range(m):
        if basis[i] < ncols and c_std[basis[i]] != 0.0:
            tableau[-1] -= c_std[basis[i]] * tableau[i]
    status = _run_simplex(tableau, basis, eligible, max_pivots)
    if status == UNBOUNDED:
        return LpSolution(status=UNBOUNDED)

    # Recover the primal point.
    z = np.zeros(total)
    z[basis] = tableau[:m, -1]
    x = np.zeros(nvar)
    for k, (j, s) in enumerate(col_of_var):
        x[j] += s * z[k]
    value_int = float(-tableau[-1, -1])

    # Dual from the final basis: solve B^T y = c_B in the standardized
    # system, then undo row negations and the maximization flip.
    basis_cols = np.zeros((m, m))
    c_b = np.zeros(m)
    for i, col in enumerate(basis):
        if col < ncols:
            basis_cols[:, i] = a_std[:, col]
            c_b[i] = c_std[col]
        else:  # leftover artificial on a redundant row: unit column, zero cost
            basis_cols[col - ncols, i] = 1.0
    if m:
        y = np.linalg.solve(basis_cols.T, c_b)
        y = row_sign * y * sign
    else:
        y = np.zeros(0)

    return LpSolution(
        status=OPTIMAL,
        x=x,
        value=sign * value_int,
        dual_ub=y[:n_ub],
        dual_eq=y[n_ub:],
        pivots=pivots,
    )


def certificate_residuals(problem: LpProblem, solution: LpSolution) -> Dict[str, float]:
    """Residuals certifying an Optimal solution: primal feasibility, dual
    sign, stationarity, complementary slackness, and strong duality."""
    if solution.status != OPTIMAL:
        raise ValueError("certificate requires an optimal solution")
    c, a_ub, b_ub, a_eq, b_eq, nonneg = problem.normalized()
    x, y_ub, y_eq = solution.x, solution.dual_ub, solution.dual_eq
    slack = b_ub - a_ub @ x if len(b_ub) else np.zeros(0)
    primal = 0.0
    if len(b_ub):
        primal = max(primal, float(np.max(-slack, initial=0.0)))
    if len(b_eq):
        primal = max(primal, float(np.max(np.abs(a_eq @ x - b_eq))))
    if np.any(nonneg):
        primal = max(primal, float(np.max(-x[nonneg], initial=0.0)))

    sign = 1.0 if problem.maximize else -1.0  # required sign of y_ub
    dual_sign = float(np.max(-sign * y_ub, initial=0.0)) if len(b_ub) else 0.0

    reduced = c.copy()
    if len(b_ub):
        reduced -= a_ub.T @ y_ub
    if len(b_eq):
        reduced -= a_eq.T @ y_eq
    stationarity = float(np.max(np.abs(reduced[~nonneg]), initial=0.0))
    if np.any(nonneg):
        # Bound variables: reduced cost >= 0 when minimizing, <= 0 when
        # maximizing; record the worst violation of that sign.
        direction = -1.0 if problem.maximize else 1.0
        stationarity = max(
            stationarity, float(np.max(-direction * reduced[nonneg], initial=0.0))
        )

    comp = 0.0
    if len(b_ub):
        comp = max(comp, float(np.max(np.abs(y_ub * slack), initial=0.0)))
    if np.any(nonneg):
        comp = max(comp, float(np.max(np.abs(reduced[nonneg] * x[nonneg]), initial=0.0)))

    dual_value = float((b_ub @ y_ub if len(b_ub) else 0.0)
                       + (b_eq @ y_eq if len(b_eq) else 0.0))
    return {
        "primal_feasibility": primal,
        "dual_sign": dual_sign,
        "stationarity": stationarity,
        "complementary_slackness": comp,
        "strong_duality": abs(float(c @ x) - dual_value),
    }
