"""Function systems span{1, u, f} on an interval, sampled on a uniform grid.

Classifies strict convexity/concavity via second differences and computes
the (grid) Choquet boundary as the extreme points of the convex hull of the
sampled graph.  The grid is the computable surrogate for the continuum; all
verdicts are explicitly grid-relative, and callers are expected to confirm
that flags stabilize under grid refinement.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError

# Relative tolerances (scaled by the data's coordinate magnitude).
HULL_RTOL = 1e-9
CONVEXITY_RTOL = 1e-10


@dataclass(frozen=True)
class FunctionSystem:
    """Interval [a, b], a real continuous function f, and a grid resolution m.

    Represents the three-generator function system span{1, u, f} with
    u(x) = x, probed on the uniform grid x_i = a + i (b-a)/(m-1).
    """

    a: float
    b: float
    f: Callable[[float], float]
    m: int

    def __post_init__(self):
        if not (self.a < self.b):
            raise DomainError(f"interval endpoints must satisfy a < b, got [{self.a}, {self.b}]")
        if self.m < 3:
            raise DomainError(f"grid resolution must be at least 3, got {self.m}")

    def grid(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.m)

    def samples(self) -> np.ndarray:
        values = np.array([self.f(float(x)) for x in self.grid()], dtype=float)
        if not np.all(np.isfinite(values)):
            bad = self.grid()[~np.isfinite(values)][0]
            raise DomainError(f"function produced a non-finite sample at x={bad!r}", x=bad)
        return values

    def graph(self) -> np.ndarray:
        """Sampled graph points (x_i, f(x_i)) as an (m, 2) array."""
        return np.column_stack([self.grid(), self.samples()])


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Sequence[Sequence[float]], rtol: float = HULL_RTOL) -> List[int]:
    """Indices of convex-hull vertices, counterclockwise from the
    lexicographic minimum (Andrew monotone chain).

    Points collinear within tolerance are *not* vertices: only strict turns
    survive.  The tolerance is relative, scaled by the squared coordinate
    magnitude since it thresholds a cross product.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DomainError(f"expected an (n, 2) point array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise DomainError("hull input contains non-finite coordinates")
    n = len(pts)
    if n == 1:
        return [0]
    order = sorted(range(n), key=lambda i: (pts[i, 0], pts[i, 1]))
    scale = max(1.0, float(np.max(np.abs(pts))))
    tol = rtol * scale * scale

    def chain(indices):
        out: List[int] = []
        for i in indices:
            while len(out) >= 2 and _cross(pts[out[-2]], pts[out[-1]], pts[i]) <= tol:
                out.pop()
            out.append(i)
        return out

    lower = chain(order)
    upper = chain(reversed(order))
    hull = lower[:-1] + upper[:-1]
    if not hull:  # all points coincide within tolerance
        return [order[0]]
    return hull


class Convexity(enum.Enum):
    STRICTLY_CONVEX = "strictly-convex"
    STRICTLY_CONCAVE = "strictly-concave"
    NEITHER = "neither"


@dataclass(frozen=True)
class ConvexityVerdict:
    kind: Convexity
    # For NEITHER: the grid triple (x_{i-1}, x_i, x_{i+1}) whose second
    # difference is closest to zero, violating both strict classifications.
    witness: Optional[Tuple[float, float, float]] = None
    second_differences: np.ndarray = field(default=None, repr=False, compare=False)


def classify_convexity(fs: FunctionSystem, tol: Optional[float] = None) -> ConvexityVerdict:
    """Grid-relative strict convexity/concavity via second differences
    D_i = f(x_{i-1}) - 2 f(x_i) + f(x_{i+1})."""
    xs = fs.grid()
    ys = fs.samples()
    d = ys[:-2] - 2.0 * ys[1:-1] + ys[2:]
    if tol is None:
        tol = CONVEXITY_RTOL * max(1.0, float(np.max(np.abs(ys))))
    if np.all(d > tol):
        return ConvexityVerdict(Convexity.STRICTLY_CONVEX, second_differences=d)
    if np.all(d < -tol):
        return ConvexityVerdict(Convexity.STRICTLY_CONCAVE, second_differences=d)
    i = int(np.argmin(np.abs(d)))
    witness = (float(xs[i]), float(xs[i + 1]), float(xs[i + 2]))
    return ConvexityVerdict(Convexity.NEITHER, witness=witness, second_differences=d)


def choquet_boundary(fs: FunctionSystem, rtol: float = HULL_RTOL) -> np.ndarray:
    """Boolean flags per grid point: True iff (x_i, f(x_i)) is an extreme
    point of the convex hull of the sampled graph.

    Extremity from below and above is detected with two hull passes (graph
    and vertically reflected graph); the interval endpoints are always
    extreme because their x-coordinate is extremal.
    """
    pts = fs.graph()
    flags = np.zeros(fs.m, dtype=bool)
    flags[convex_hull(pts, rtol)] = True
    reflected = pts * np.array([1.0, -1.0])
    flags[convex_hull(reflected, rtol)] = True
    flags[0] = flags[-1] = True
    return flags
