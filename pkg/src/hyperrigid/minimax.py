"""Finite-support verification of the extension minimax identity and the
Choquet-boundary upper envelope.

On a finite point set X with a function-system basis (first element the
constant 1), both sides of the identity

    sup{phi(s) : s in S, s <= x}  =  min{rho(x) : rho a representing
                                           measure for phi}

are exact linear programs, as is the envelope inf{s(p) : s >= u}.  Finite X
replaces the compact continuum so the identity can be checked to solver
precision rather than discretization accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from .errors import DimensionError, DomainError
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, LpProblem, LpSolution, simplex_solve


@dataclass(frozen=True)
class FiniteFunctionSystem:
    """Point set X = {x_1..x_N} with a basis-value matrix (rows = basis
    functions, columns = points); the first basis row must be the unit."""

    points: np.ndarray
    basis: np.ndarray
    labels: Optional[Sequence[str]] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2 or basis.shape[1] != len(pts):
            raise DimensionError(
                f"basis must be (rows, {len(pts)}), got {basis.shape}"
            )
        if np.max(np.abs(basis[0] - 1.0)) > 1e-12:
            raise DomainError("first basis row must be identically 1 (the unit)")
        cols = basis.T
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if np.max(np.abs(cols[i] - cols[j])) <= 1e-12:
                    raise DomainError(
                        f"basis columns {i} and {j} coincide; points are not separated"
                    )
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "basis", basis)

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def rank(self) -> int:
        return self.basis.shape[0]


def build_system(points: Sequence[float],
                 functions: Sequence[Callable[[float], float]],
                 labels: Optional[Sequence[str]] = None) -> FiniteFunctionSystem:
    """Sample basis functions on the points; prepend the unit row."""
    pts = np.asarray(sorted(points), dtype=float)
    rows = [np.ones(len(pts))]
    for f in functions:
        rows.append(np.array([f(float(x)) for x in pts]))
    return FiniteFunctionSystem(pts, np.vstack(rows), labels=labels)


def evaluation_state(fs: FiniteFunctionSystem, p_index: int) -> np.ndarray:
    """State phi = evaluation at the point x_{p_index}: its values on the basis."""
    if not 0 <= p_index < fs.size:
        raise DimensionError(f"point index {p_index} out of range 0..{fs.size - 1}")
    return fs.basis[:, p_index].copy()


def _values_on_points(fs: FiniteFunctionSystem, x) -> np.ndarray:
    if callable(x):
        return np.array([x(float(t)) for t in fs.points], dtype=float)
    v = np.asarray(x, dtype=float)
    if v.shape != (fs.size,):
        raise DimensionError(f"value vector must have length {fs.size}, got {v.shape}")
    return v


def _extension_lp(fs: FiniteFunctionSystem, phi: np.ndarray, x_values: np.ndarray,
                  maximize: bool) -> LpSolution:
    # Probability weights rho on X with B rho = phi; total mass 1 is the
    # unit row of B.  Optimize rho . x.
    return simplex_solve(LpProblem(
        c=x_values,
        a_eq=fs.basis,
        b_eq=np.asarray(phi, dtype=float),
        nonneg=np.ones(fs.size, dtype=bool),
        maximize=maximize,
    ))


def _dominated_lp(fs: FiniteFunctionSystem, phi: np.ndarray, x_values: np.ndarray,
                  dominate_from_above: bool) -> LpSolution:
    # Coefficients c over the basis rows; s = c . B must sit below (or
    # above) x pointwise while phi(s) = c . phi is optimized.
    a = fs.basis.T  # N x R rows: s(x_j)
    if dominate_from_above:
        return simplex_solve(LpProblem(
            c=np.asarray(phi, dtype=float), a_ub=-a, b_ub=-x_values, maximize=False,
        ))
    return simplex_solve(LpProblem(
        c=np.asarray(phi, dtype=float), a_ub=a, b_ub=x_values, maximize=True,
    ))


def _require(solution: LpSolution, what: str, state_hint: bool = False) -> LpSolution:
    if solution.status == OPTIMAL:
        return solution
    if solution.status == INFEASIBLE and state_hint:
        raise DomainError(
            f"{what}: no representing measure exists; phi is not a state of "
            "the system on these points"
        )
    raise DomainError(f"{what}: solver returned {solution.status}")


def sup_dominated(fs: FiniteFunctionSystem, phi, x) -> float:
    """sup{phi(s) : s in span(basis), s <= x on X}."""
    sol = _require(_dominated_lp(fs, np.asarray(phi, float), _values_on_points(fs, x),
                                 dominate_from_above=False), "sup_dominated")
    return float(sol.value)


def inf_dominating(fs: FiniteFunctionSystem, phi, x) -> float:
    """inf{phi(s) : s in span(basis), s >= x on X}."""
    sol = _require(_dominated_lp(fs, np.asarray(phi, float), _values_on_points(fs, x),
                                 dominate_from_above=True), "inf_dominating")
    return float(sol.value)


def min_extension(fs: FiniteFunctionSystem, phi, x) -> float:
    """min{rho(x) : rho a probability measure on X representing phi}."""
    sol = _require(_extension_lp(fs, np.asarray(phi, float), _values_on_points(fs, x),
                                 maximize=False), "min_extension", state_hint=True)
    return float(sol.value)


def max_extension(fs: FiniteFunctionSystem, phi, x) -> float:
    """max{rho(x) : rho a probability measure on X representing phi}."""
    sol = _require(_extension_lp(fs, np.asarray(phi, float), _values_on_points(fs, x),
                                 maximize=True), "max_extension", state_hint=True)
    return float(sol.value)


def verify_minimax(fs: FiniteFunctionSystem, phi, x, tol: float = 1e-8) -> Dict:
    """Both halves of the extension identity on one instance: the dominated
    supremum against the minimal extension, and the dominating infimum
    against the maximal extension."""
    phi = np.asarray(phi, dtype=float)
    values = _values_on_points(fs, x)
    sup_d = sup_dominated(fs, phi, values)
    min_e = min_extension(fs, phi, values)
    inf_d = inf_dominating(fs, phi, values)
    max_e = max_extension(fs, phi, values)
    return {
        "sup_dominated": sup_d,
        "min_extension": min_e,
        "inf_dominating": inf_d,
        "max_extension": max_e,
        "lower_gap": abs(sup_d - min_e),
        "upper_gap": abs(inf_d - max_e),
        "tol": tol,
        "holds": bool(abs(sup_d - min_e) <= tol and abs(inf_d - max_e) <= tol),
    }


def boundary_envelope(fs: FiniteFunctionSystem, p_index: int, u) -> Dict:
    """Upper envelope inf{s(p) : s in span(basis), s >= u on X} and its gap
    to u(p).

    The gap vanishes exactly when evaluation at p admits no other
    representing measure (p is a boundary point of the finite system);
    a strictly positive gap flags a non-boundary point.  The gap is
    reported, never asserted here.
    """
    u_values = _values_on_points(fs, u)
    phi = evaluation_state(fs, p_index)
    envelope = inf_dominating(fs, phi, u_values)
    return {
        "point": float(fs.points[p_index]),
        "envelope": envelope,
        "value": float(u_values[p_index]),
        "gap": envelope - float(u_values[p_index]),
    }
