"""Counterexample construction for non-rigid functions.

If f on [a, b] is neither strictly convex nor strictly concave, some point
of its graph is a convex combination of at most six other graph points.
From such a Caratheodory witness we build a diagonal operator A of dimension
at most 7 and a UCP map (pinch to the diagonal, then reweight) that fixes A
and f(A) exactly but is not multiplicative on polynomials in A: it moves A
squared.  If every sampled graph point is extreme, the function is reported
as a rigidity candidate (grid evidence, not a proof).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from . import choi
from .errors import DomainError
from .function_system import HULL_RTOL, FunctionSystem, choquet_boundary, convex_hull
from .hermitian import apply_function, operator_norm

MAX_SUPPORT = 6  # Caratheodory in the plane: 2 hull points, each a combination of <= 3
MAX_DIMENSION = 7  # witness dimension bound: support plus the point itself
_WEIGHT_FLOOR = 1e-9  # reject degenerate convex weights below this


@dataclass(frozen=True)
class CaratheodoryWitness:
    """A graph point (x0, f(x0)) written as a convex combination of at most
    six other sampled graph points: x0 = sum t_k x_k, f(x0) = sum t_k f(x_k)."""

    x0: float
    support: Tuple[Tuple[float, float], ...]  # ((x_k, t_k), ...)

    def points(self) -> List[float]:
        return [x for x, _ in self.support]

    def weights(self) -> List[float]:
        return [t for _, t in self.support]


def validate_witness(w: CaratheodoryWitness, f: Callable[[float], float],
                     tol: float = 1e-10) -> None:
    """Re-check every witness invariant; raises :class:`DomainError`."""
    if not 1 <= len(w.support) <= MAX_SUPPORT:
        raise DomainError(f"support size {len(w.support)} outside 1..{MAX_SUPPORT}")
    xs = w.points()
    ts = w.weights()
    if any(t <= 0 for t in ts):
        raise DomainError(f"convex weights must be positive, got {ts}")
    if abs(sum(ts) - 1.0) > tol:
        raise DomainError(f"convex weights must sum to 1, got {sum(ts)!r}")
    values = [w.x0] + xs
    if len(set(values)) != len(values):
        raise DomainError(f"support points must be distinct from x0 and each other: {values}")
    if abs(sum(t * x for x, t in w.support) - w.x0) > tol:
        raise DomainError("support does not reproduce x0")
    if abs(sum(t * f(x) for x, t in w.support) - f(w.x0)) > tol:
        raise DomainError("support does not reproduce f(x0)")


def _pair_weights(p0, p1, p2, tol_y: float) -> Optional[Tuple[float, float]]:
    """Weights (t, 1-t) with p0 = t p1 + (1-t) p2, if the chord passes
    through p0 within tolerance."""
    dx = p2[0] - p1[0]
    if dx == 0.0:
        return None
    t = (p2[0] - p0[0]) / dx
    if not (_WEIGHT_FLOOR < t < 1.0 - _WEIGHT_FLOOR):
        return None
    if abs(t * p1[1] + (1.0 - t) * p2[1] - p0[1]) > tol_y:
        return None
    return t, 1.0 - t


def _triangle_weights(p0, tri, tol: float) -> Optional[np.ndarray]:
    """Barycentric weights of p0 in the triangle, when strictly admissible."""
    m = np.array([[p[0] for p in tri], [p[1] for p in tri], [1.0, 1.0, 1.0]])
    rhs = np.array([p0[0], p0[1], 1.0])
    try:
        t = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError:
        return None
    if np.any(t < _WEIGHT_FLOOR):
        return None
    if np.max(np.abs(m @ t - rhs)) > tol:
        return None
    return t


def find_nonextreme_point(fs: FunctionSystem,
                          rtol: float = HULL_RTOL) -> Optional[CaratheodoryWitness]:
    """Leftmost sampled graph point that is not extreme in the hull of the
    sampled graph, written as a minimal convex combination of other sampled
    graph points; ``None`` when every grid point is extreme.

    Search order: candidates left to right; for each, 2-point supports
    (chords between hull vertices of the remaining points, in index order)
    before 3-point supports (fan triangles of the remaining hull).  The
    combination must reproduce (x0, f(x0)) within tolerance, so hull noise
    cannot fabricate a witness.
    """
    pts = fs.graph()
    flags = choquet_boundary(fs, rtol)
    scale = max(1.0, float(np.max(np.abs(pts))))
    tol_match = rtol * scale

    for i in range(fs.m):
        if flags[i]:
            continue
        p0 = pts[i]
        rest_idx = [j for j in range(fs.m) if j != i]
        rest = pts[rest_idx]
        hull_local = convex_hull(rest, rtol)
        hull_pts = [rest[h] for h in hull_local]

        # Chords between any two hull vertices, smallest index pairs first.
        for a, b in combinations(range(len(hull_pts)), 2):
            pa, pb = hull_pts[a], hull_pts[b]
            if pa[0] > pb[0]:
                pa, pb = pb, pa
            weights = _pair_weights(p0, pa, pb, tol_match)
            if weights is not None:
                support = sorted([(float(pa[0]), float(weights[0])),
                                  (float(pb[0]), float(weights[1]))])
                return CaratheodoryWitness(float(p0[0]), tuple(support))

        # Fan triangulation of the hull polygon covers its interior.
        for a in range(1, len(hull_pts) - 1):
            tri = (hull_pts[0], hull_pts[a], hull_pts[a + 1])
            t = _triangle_weights(p0, tri, tol_match)
            if t is not None:
                support = sorted(
                    (float(p[0]), float(tk)) for p, tk in zip(tri, t)
                )
                return CaratheodoryWitness(float(p0[0]), tuple(support))
    return None


@dataclass(frozen=True)
class CounterexampleReport:
    """A verified witness of non-rigidity: diagonal A, the UCP map phi, and
    the residuals certifying phi(A) = A, phi(f(A)) = f(A), phi(A^2) != phi(A)^2."""

    witness: CaratheodoryWitness
    a_matrix: np.ndarray  # diagonal Hermitian, dimension <= 7
    phi: choi.ChoiMatrix
    residual_fix_a: float
    residual_fix_fa: float
    deviation: float  # ||phi(A^2) - phi(A)^2||


def build_counterexample(w: CaratheodoryWitness,
                         f: Callable[[float], float]) -> CounterexampleReport:
    """Assemble the diagonal operator and the reweighting UCP map from a
    Caratheodory witness, then measure the fixing residuals and the
    multiplicativity deviation."""
    validate_witness(w, f)
    xs = [w.x0] + w.points()
    ts = w.weights()
    dim = len(xs)
    a = np.diag(np.array(xs, dtype=complex))

    weights = np.eye(dim)
    weights[0, 0] = 0.0
    weights[0, 1:] = ts
    phi = choi.choi_of_diagonal_map(weights)

    fa = apply_function(a, f)
    phi_a = choi.apply(phi, a)
    residual_fix_a = operator_norm(phi_a - a)
    residual_fix_fa = operator_norm(choi.apply(phi, fa) - fa)
    deviation = operator_norm(choi.apply(phi, a @ a) - phi_a @ phi_a)
    return CounterexampleReport(
        witness=w,
        a_matrix=a,
        phi=phi,
        residual_fix_a=residual_fix_a,
        residual_fix_fa=residual_fix_fa,
        deviation=deviation,
    )


RIGID_CANDIDATE = "rigid-candidate"
NOT_RIGID = "not-rigid"


@dataclass(frozen=True)
class RigidityVerdict:
    """Grid-relative verdict.  "rigid-candidate" is evidence at the probed
    resolution, not a proof; "not-rigid" carries a constructed and
    independently checkable counterexample."""

    status: str
    grid_size: int
    report: Optional[CounterexampleReport] = None

    @property
    def is_rigid_candidate(self) -> bool:
        return self.status == RIGID_CANDIDATE


def rigidity_verdict(fs: FunctionSystem, rtol: float = HULL_RTOL) -> RigidityVerdict:
    w = find_nonextreme_point(fs, rtol)
    if w is None:
        return RigidityVerdict(RIGID_CANDIDATE, fs.m)
    return RigidityVerdict(NOT_RIGID, fs.m, build_counterexample(w, fs.f))


def search_counterexample(f: Callable[[float], float], a: float, b: float,
                          max_grid: int = 129,
                          rtol: float = HULL_RTOL) -> RigidityVerdict:
    """Coarse-to-fine verdict over nested grids m = 5, 9, 17, ... <= max_grid.

    The first (coarsest) witness wins, which keeps reported supports minimal
    and reproducible; a candidate verdict means no grid up to max_grid
    produced a witness.
    """
    m = 5
    grids = []
    while m <= max(max_grid, 5):
        grids.append(m)
        m = 2 * m - 1
    verdict = None
    for m in grids:
        verdict = rigidity_verdict(FunctionSystem(a, b, f, m), rtol)
        if not verdict.is_rigid_candidate:
            return verdict
    return verdict
