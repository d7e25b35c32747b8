"""Korovkin-type convergence harnesses.

Classical side: Bernstein operators on C[0,1], whose errors on the three
test functions 1, x, x^2 control the error on every continuous probe.
Matrix side: block pinchings of a diagonal grid operator, wrapped in a
decaying unitary conjugation so the maps never commute with the operator
algebra yet still converge on the tests and probes as the blocks refine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import choi
from .errors import DomainError
from .hermitian import hermitian_part, operator_norm, random_hermitian

DEFAULT_GRID = 257  # odd so the grid contains 1/2, where x(1-x) peaks

#: Default probe battery: smooth, Lipschitz-nonsmooth, polynomial, analytic.
DEFAULT_PROBES: Tuple[Tuple[str, Callable[[float], float]], ...] = (
    ("sin(pi x)", lambda x: math.sin(math.pi * x)),
    ("|2x-1|", lambda x: abs(2.0 * x - 1.0)),
    ("x^3", lambda x: x ** 3),
    ("exp(x)", lambda x: math.exp(x)),
)

KOROVKIN_TESTS: Tuple[Tuple[str, Callable[[float], float]], ...] = (
    ("1", lambda x: 1.0),
    ("x", lambda x: x),
    ("x^2", lambda x: x * x),
)


@dataclass(frozen=True)
class SampledFunction:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise DomainError("grid and value lengths differ")
        if not (np.all(np.isfinite(self.grid)) and np.all(np.isfinite(self.values))):
            raise DomainError("sampled function contains non-finite entries")


def _bernstein_weights(n: int, x: float) -> np.ndarray:
    """Binomial weights C(n,k) x^k (1-x)^(n-k), k = 0..n, via log-space
    gamma functions (overflow-safe for large n), renormalized so they sum
    to exactly 1 (partition of unity)."""
    if x <= 0.0:
        w = np.zeros(n + 1)
        w[0] = 1.0
        return w
    if x >= 1.0:
        w = np.zeros(n + 1)
        w[n] = 1.0
        return w
    k = np.arange(n + 1)
    log_binom = (
        math.lgamma(n + 1)
        - np.array([math.lgamma(i + 1) + math.lgamma(n - i + 1) for i in k])
    )
    log_w = log_binom + k * math.log(x) + (n - k) * math.log1p(-x)
    w = np.exp(log_w - log_w.max())
    return w / w.sum()


def bernstein(n: int, f: Callable[[float], float],
              grid_size: int = DEFAULT_GRID) -> SampledFunction:
    """The n-th Bernstein approximant (B_n f)(x) = sum_k f(k/n) C(n,k)
    x^k (1-x)^(n-k), sampled on a uniform grid of [0, 1].

    Positive and unital: f >= 0 implies B_n f >= 0, and B_n 1 = 1.
    """
    if n < 1:
        raise DomainError(f"Bernstein degree must be >= 1, got {n}")
    nodes = np.array([f(k / n) for k in range(n + 1)], dtype=float)
    if not np.all(np.isfinite(nodes)):
        raise DomainError("function not finite at a Bernstein node")
    grid = np.linspace(0.0, 1.0, grid_size)
    values = np.array([float(_bernstein_weights(n, x) @ nodes) for x in grid])
    return SampledFunction(grid=grid, values=values)


def sup_error(approx: SampledFunction, f: Callable[[float], float]) -> float:
    exact = np.array([f(float(x)) for x in approx.grid])
    return float(np.max(np.abs(approx.values - exact)))


def _monotone_violations(rows: List[Dict], keys: Sequence[str]) -> List[Dict]:
    out = []
    for key in keys:
        for prev, cur in zip(rows, rows[1:]):
            if cur["errors"][key] > prev["errors"][key]:
                out.append({
                    "column": key,
                    "from": prev["parameter"],
                    "to": cur["parameter"],
                    "increase": cur["errors"][key] - prev["errors"][key],
                })
    return out


def korovkin_table(map_family: str,
                   n_list: Sequence[int],
                   tests: Sequence[Tuple[str, Callable[[float], float]]] = KOROVKIN_TESTS,
                   probes: Sequence[Tuple[str, Callable[[float], float]]] = DEFAULT_PROBES,
                   grid_size: int = DEFAULT_GRID,
                   dimension: int = 16,
                   seed: int = 0) -> Dict:
    """Convergence table: per family parameter, the sup-norm (operator-norm
    in the matrix case) error on each test and probe, with monotone-decrease
    violations flagged."""
    if map_family == "bernstein":
        rows = []
        for n in n_list:
            errors = {}
            for label, g in list(tests) + list(probes):
                errors[label] = sup_error(bernstein(int(n), g, grid_size), g)
            rows.append({"parameter": int(n), "errors": errors})
        keys = [label for label, _ in list(tests) + list(probes)]
        return {
            "family": "bernstein",
            "tests": [label for label, _ in tests],
            "probes": [label for label, _ in probes],
            "rows": rows,
            "monotone_violations": _monotone_violations(rows, keys),
        }
    if map_family == "matrix_pinching":
        table = matrix_pinching_family(
            dimension, [int(b) for b in n_list],
            probes=probes, seed=seed,
        )
        return table
    raise DomainError(f"unknown map family {map_family!r}")


def _contiguous_blocks(d: int, b: int) -> List[int]:
    if not (1 <= b <= d):
        raise DomainError(f"block count {b} does not partition dimension {d}")
    base = d // b
    extra = d % b
    return [base + 1] * extra + [base] * (b - extra)


def matrix_pinching_family(d: int, blocks_list: Sequence[int],
                           probes: Sequence[Tuple[str, Callable[[float], float]]] = DEFAULT_PROBES,
                           seed: int = 0,
                           rotation_strength: float = 0.5) -> Dict:
    """Pinching maps on M_d against the diagonal grid operator
    X = diag(0, 1/(d-1), ..., 1).

    Two regimes per block count b:

    * ``pinched``: phi_b = conditional expectation onto b contiguous
      diagonal blocks.  X, X^2 and f(X) are diagonal, so every error is 0.
    * ``rotated``: the pinching conjugated by U_b = exp(i H
      rotation_strength / b) for a seeded Hermitian H.  The conjugated maps
      do not commute with the diagonal algebra, the errors are nontrivial,
      and they decay like 1/b as the partition refines because the rotation
      strength decays with it.

    All maps are UCP and are built and applied through their Choi matrices.
    """
    if d < 2:
        raise DomainError(f"dimension must be >= 2, got {d}")
    grid = np.linspace(0.0, 1.0, d)
    x = np.diag(grid.astype(complex))
    rng = np.random.default_rng([seed, d])
    h = random_hermitian(d, rng)
    h = h / operator_norm(h)

    named_ops: List[Tuple[str, np.ndarray]] = [("X", x), ("X^2", x @ x)]
    for label, f in probes:
        named_ops.append((f"{label}(X)", np.diag(np.array([f(float(t)) for t in grid],
                                                          dtype=complex))))

    rows_pinched: List[Dict] = []
    rows_rotated: List[Dict] = []
    for b in blocks_list:
        sizes = _contiguous_blocks(d, int(b))
        pinch = choi.choi_of_block_pinching(d, sizes)
        errors = {
            label: operator_norm(choi.apply(pinch, op) - op)
            for label, op in named_ops
        }
        rows_pinched.append({"parameter": int(b), "errors": errors})

        theta = rotation_strength / b
        w, u = np.linalg.eigh(theta * h)
        u_b = (u * np.exp(1j * w)) @ u.conj().T
        rotate = choi.choi_of_unitary_conjugation(u_b)
        unrotate = choi.choi_of_unitary_conjugation(u_b.conj().T)
        phi = choi.compose(rotate, choi.compose(pinch, unrotate))
        errors = {
            label: operator_norm(choi.apply(phi, op) - op)
            for label, op in named_ops
        }
        rows_rotated.append({"parameter": int(b), "errors": errors})

    keys = [label for label, _ in named_ops]
    return {
        "family": "matrix_pinching",
        "dimension": d,
        "seed": seed,
        "rotation_strength": rotation_strength,
        "tests": ["X", "X^2"],
        "probes": keys[2:],
        "regimes": {
            "pinched": rows_pinched,
            "rotated": rows_rotated,
        },
        "monotone_violations": _monotone_violations(rows_rotated, keys),
    }
