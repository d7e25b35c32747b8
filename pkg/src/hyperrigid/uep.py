"""Unique-extension-property checker for operator systems in M_n.

Given an operator system S (a self-adjoint span containing the identity)
viewed inside M_n under the identity representation, the checker searches
for a UCP map that fixes S elementwise yet moves some probe element of the
generated algebra.  Finding one ("violated") disproves the unique extension
property for the identity representation; finding none over all restarts is
heuristic evidence in favor ("no-violation-found"), never a certificate.

The search is semidefinite feasibility by Dykstra alternating projections
between the PSD cone of Choi matrices and the affine set of unitality and
generator-fixing constraints, started from randomized perturbations of the
identity channel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import choi
from .errors import DimensionError, DomainError
from .hermitian import (
    as_matrix,
    hermitian_part,
    operator_norm,
    random_hermitian,
)

VIOLATED = "violated"
NO_VIOLATION_FOUND = "no-violation-found"

_SPAN_TOL = 1e-10


def _herm_to_vec(c: np.ndarray) -> np.ndarray:
    """Isometric real coordinates of a Hermitian matrix (Frobenius to l2)."""
    n = c.shape[0]
    iu = np.triu_indices(n, 1)
    return np.concatenate([
        np.real(np.diagonal(c)),
        np.sqrt(2.0) * np.real(c[iu]),
        np.sqrt(2.0) * np.imag(c[iu]),
    ])


def _vec_to_herm(v: np.ndarray, n: int) -> np.ndarray:
    c = np.zeros((n, n), dtype=complex)
    iu = np.triu_indices(n, 1)
    k = n + len(iu[0])
    c[np.diag_indices(n)] = v[:n]
    c[iu] = (v[n:k] + 1j * v[k:]) / np.sqrt(2.0)
    c = c + np.triu(c, 1).conj().T
    return c


@dataclass(frozen=True)
class OperatorSystem:
    """Finite-dimensional operator system: generators in M_n (including the
    identity) plus a derived orthonormal Hermitian basis of span(G u G*)."""

    n: int
    generators: Tuple[np.ndarray, ...]
    hermitian_basis: Tuple[np.ndarray, ...]


def operator_system(generators: Sequence[np.ndarray]) -> OperatorSystem:
    """Build an operator system from a generator list.

    The Hermitian basis spans the self-adjoint real-linear span of the
    generators and their adjoints; the identity must lie in that span.
    """
    mats = [as_matrix(g) for g in generators]
    if not mats:
        raise DomainError("at least one generator required")
    n = mats[0].shape[0]
    for g in mats:
        if g.shape != (n, n):
            raise DimensionError(f"all generators must be {n}x{n}, got {g.shape}")

    raw = []
    for g in mats:
        raw.append(hermitian_part(g))
        raw.append(hermitian_part(-1j * (g - g.conj().T)) / 2)
    stack = np.array([_herm_to_vec(h) for h in raw])
    u, s, vt = np.linalg.svd(stack, full_matrices=False)
    rank = int(np.sum(s > 1e-12 * max(1.0, s[0] if len(s) else 0.0)))
    basis = tuple(_vec_to_herm(vt[k], n) for k in range(rank))

    # The identity must be reachable; project vec(I) onto the span.
    vec_i = _herm_to_vec(np.eye(n, dtype=complex))
    coeffs = vt[:rank] @ vec_i
    residual = np.linalg.norm(vec_i - vt[:rank].T @ coeffs)
    if residual > _SPAN_TOL * np.sqrt(n):
        raise DomainError(
            f"identity is not in the span of the generators (residual {residual:.3e})"
        )
    return OperatorSystem(n, tuple(mats), basis)


def span_residual(system: OperatorSystem, x: np.ndarray) -> float:
    """Frobenius distance from x to the complex span of the Hermitian basis."""
    h = hermitian_part(x)
    k = hermitian_part(-1j * (x - as_matrix(x).conj().T)) / 2
    rows = np.array([_herm_to_vec(b) for b in system.hermitian_basis])
    out = 0.0
    for part in (h, k):
        v = _herm_to_vec(part)
        out += float(np.sum((v - rows.T @ (rows @ v)) ** 2))
    return float(np.sqrt(out))


@dataclass(frozen=True)
class UepParams:
    restarts: int = 16
    eps_schedule: Tuple[float, ...] = (0.05, 0.2, 0.8)
    violation_tol: float = 1e-4
    fix_tol: float = 1e-8
    conv_tol: float = 1e-10
    max_iterations: int = 2000
    # Radius multiplier for the randomized starts, in units of the identity
    # channel's Frobenius norm; large kicks are what let the projections
    # land on far boundary points of the feasible set.
    perturbation_scale: float = 9.0
    seed: int = 0


@dataclass
class RestartDiagnostics:
    restart: int
    eps: float
    iterations: int
    converged: bool
    deviation: float
    fix_residual: float
    unitality_residual: float


@dataclass
class UepReport:
    """Outcome of a unique-extension-property search.

    "violated" carries an independently re-checkable witness channel;
    "no-violation-found" means every restart converged back to a channel
    that moves no probe, which is evidence, not proof, of the property.
    """

    status: str
    deviation: float
    witness: Optional[choi.ChoiMatrix]
    probes: List[np.ndarray]
    restarts: int
    iterations: int
    final_residual: float
    seed: int
    params: UepParams
    restart_details: List[RestartDiagnostics] = field(default_factory=list)
    affine_residual_trace: List[float] = field(default_factory=list)
    interpretation: str = (
        "no-violation-found is heuristic evidence from randomized feasibility "
        "restarts, not a certificate of the unique extension property"
    )


class _AffineProjector:
    """Least-squares projector onto {C Hermitian : ptr_in(C) = I,
    phi_C(g) = g for every Hermitian basis element g}."""

    def __init__(self, system: OperatorSystem):
        n = system.n
        self.n = n
        self.size = n * n
        dim = self.size * self.size  # real dimension of Hermitian Choi space

        targets = [np.eye(n, dtype=complex)] + list(system.hermitian_basis)

        def constraint_vec(c_mat: np.ndarray) -> np.ndarray:
            phi = choi.ChoiMatrix(n, n, c_mat)
            parts = [_herm_to_vec(choi.partial_trace_input(phi))]
            for g in system.hermitian_basis:
                parts.append(_herm_to_vec(hermitian_part(choi.apply(phi, g))))
            return np.concatenate(parts)

        rows = len(targets) * n * n
        m = np.empty((rows, dim))
        basis_vec = np.zeros(dim)
        for alpha in range(dim):
            basis_vec[alpha] = 1.0
            m[:, alpha] = constraint_vec(_vec_to_herm(basis_vec, self.size))
            basis_vec[alpha] = 0.0
        self.matrix = m
        self.rhs = np.concatenate([_herm_to_vec(t) for t in targets])
        self.rhs_scale = 1.0 + float(np.linalg.norm(self.rhs))
        self.pinv = np.linalg.pinv(m, rcond=1e-12)

        # Consistency certificate: the least-squares solution must satisfy
        # the system, else the operator system is malformed.
        least_squares = self.pinv @ self.rhs
        gap = np.linalg.norm(m @ least_squares - self.rhs)
        if gap > 1e-8 * self.rhs_scale:
            raise DomainError(
                f"fixing constraints are inconsistent (residual {gap:.3e}); "
                "malformed operator system"
            )

    def project(self, v: np.ndarray) -> np.ndarray:
        return v - self.pinv @ (self.matrix @ v - self.rhs)

    def residual(self, v: np.ndarray) -> float:
        return float(np.linalg.norm(self.matrix @ v - self.rhs))


# Feasibility thresholds for accepting a polished iterate as a channel.
_ACCEPT_EIG = -1e-11
_ACCEPT_AFFINE = 1e-10


def _clamp_psd(h: np.ndarray) -> np.ndarray:
    ew, eu = np.linalg.eigh(h)
    return (eu * np.maximum(ew, 0.0)) @ eu.conj().T


class _FaceSolver:
    """Feasibility restricted to the face {V W V† : W Hermitian PSD}.

    The constraint sets of interest here have empty interior in the PSD
    cone (implied zero facets), which makes plain alternating projections
    sublinear.  On the correct face the intersection regains a relative
    interior and the same Dykstra iteration converges fast; moreover the
    Frobenius distance splits block-wise, so projecting the compressed
    start V† C0 V inside the face reproduces the global projection of C0.
    """

    def __init__(self, projector: _AffineProjector, v: np.ndarray):
        self.projector = projector
        self.v = v
        r = v.shape[1]
        self.r = r
        embed = np.empty((projector.size * projector.size, r * r))
        unit = np.zeros(r * r)
        for alpha in range(r * r):
            unit[alpha] = 1.0
            embed[:, alpha] = _herm_to_vec(v @ _vec_to_herm(unit, r) @ v.conj().T)
            unit[alpha] = 0.0
        self.m_face = projector.matrix @ embed
        self.pinv_face = np.linalg.pinv(self.m_face, rcond=1e-10)
        least_squares = self.pinv_face @ projector.rhs
        self.consistent = (
            np.linalg.norm(self.m_face @ least_squares - projector.rhs)
            <= 1e-6 * projector.rhs_scale
        )

    def project_start(self, start_mat: np.ndarray,
                      rounds: int = 400) -> Optional[np.ndarray]:
        """Dykstra in W-space from the compressed start; None on failure."""
        if not self.consistent:
            return None
        r = self.r
        w0 = hermitian_part(self.v.conj().T @ start_mat @ self.v)
        x = _herm_to_vec(w0)
        q = np.zeros_like(x)
        w_mat = None
        for _ in range(rounds):
            y = x - self.pinv_face @ (self.m_face @ x - self.projector.rhs)
            w_mat = _vec_to_herm(y, r)
            ew, eu = np.linalg.eigh(w_mat)
            if ew[0] >= _ACCEPT_EIG:
                break
            wv = y + q
            z_mat = _clamp_psd(_vec_to_herm(wv, r))
            z = _herm_to_vec(z_mat)
            q = wv - z
            if np.linalg.norm(z - x) < 1e-13:
                w_mat = _clamp_psd(w_mat)
                break
            x = z
            if np.linalg.norm(x) > 1e3 * self.projector.rhs_scale:
                return None  # runaway along a face null direction
        else:
            return None
        c = hermitian_part(self.v @ w_mat @ self.v.conj().T)
        ok = (
            self.projector.residual(_herm_to_vec(c))
            <= _ACCEPT_AFFINE * self.projector.rhs_scale
            and float(np.linalg.eigvalsh(c)[0]) >= _ACCEPT_EIG
        )
        return c if ok else None


def _face_polish(projector: _AffineProjector, y_mat: np.ndarray,
                 start_mat: np.ndarray, refinements: int = 10
                 ) -> Optional[np.ndarray]:
    """Rank sweep with subspace refinement: for each candidate face rank,
    restrict to the top eigenvectors of the current iterate, project the
    original start inside the face, and sharpen the face with one full
    affine projection per round until the result is feasible everywhere."""
    size = y_mat.shape[0]
    for r in range(1, size + 1):
        cur = y_mat
        solver = None
        for _ in range(refinements):
            eigs, vecs = np.linalg.eigh(cur)
            v = vecs[:, size - r:]
            solver = _FaceSolver(projector, v)
            if not solver.consistent:
                break  # no feasible channel at this rank; grow the face
            c = solver.project_start(start_mat)
            if c is not None:
                return c
            cur = _vec_to_herm(
                projector.project(_herm_to_vec(_clamp_psd(hermitian_part(
                    v @ (v.conj().T @ cur @ v) @ v.conj().T)))), size)
        if solver is not None and not solver.consistent:
            continue
    return None


def _dykstra(projector: _AffineProjector, start: np.ndarray, params: UepParams
             ) -> Tuple[np.ndarray, int, bool, List[float]]:
    """Dykstra alternating projections between the affine constraint set and
    the PSD cone, with a face polish polled on a doubling schedule.

    The returned matrix is feasible (within the acceptance thresholds) when
    ``converged`` is True; otherwise it is the best near-feasible iterate.
    """
    size = projector.size
    start = hermitian_part(start)
    x = _herm_to_vec(start)
    q = np.zeros_like(x)
    trace: List[float] = []
    poll_at = 50
    y_mat = None
    for it in range(params.max_iterations):
        y = projector.project(x)
        y_mat = _vec_to_herm(y, size)
        eigs = np.linalg.eigvalsh(y_mat)
        if eigs[0] >= _ACCEPT_EIG:
            trace.append(projector.residual(_herm_to_vec(y_mat)))
            return y_mat, it + 1, True, trace
        if it + 1 >= poll_at:
            poll_at *= 2
            polished = _face_polish(projector, y_mat, start)
            if polished is not None:
                trace.append(projector.residual(_herm_to_vec(polished)))
                return polished, it + 1, True, trace
        w = y + q
        z_mat = _clamp_psd(_vec_to_herm(w, size))
        z = _herm_to_vec(z_mat)
        q = w - z
        delta = float(np.linalg.norm(z - x))
        x = z
        trace.append(projector.residual(x))
        if delta < params.conv_tol:
            return z_mat, it + 1, True, trace
    return _vec_to_herm(x, size), params.max_iterations, False, trace


def _random_direction(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random Hermitian direction in Choi space, trace-orthogonal to the
    identity channel so restarts do not waste effort on the fixed point."""
    size = n * n
    c_id = choi.choi_of_identity(n).matrix
    d = random_hermitian(size, rng)
    overlap = np.real(np.trace(c_id.conj().T @ d)) / np.real(np.trace(c_id.conj().T @ c_id))
    d = d - overlap * c_id
    return d / np.linalg.norm(d)


def uep_check(system: OperatorSystem, probes: Sequence[np.ndarray],
              params: Optional[UepParams] = None) -> UepReport:
    """Search for a UCP map fixing the system but moving a probe.

    Each restart starts from the identity channel plus a seeded random
    Hermitian perturbation, projects to feasibility by Dykstra, and measures
    the worst probe deviation; the maximum-deviation verified channel is
    reported as witness.
    """
    params = params or UepParams()
    n = system.n
    probe_mats = [as_matrix(p) for p in probes]
    for p in probe_mats:
        if p.shape != (n, n):
            raise DimensionError(f"probe must be {n}x{n}, got {p.shape}")

    projector = _AffineProjector(system)
    c_id = choi.choi_of_identity(n).matrix
    id_scale = np.linalg.norm(c_id)

    best = None  # (deviation, matrix, diagnostics, trace)
    total_iterations = 0
    details: List[RestartDiagnostics] = []
    for r in range(params.restarts):
        rng = np.random.default_rng([params.seed, r])
        eps = params.eps_schedule[r % len(params.eps_schedule)]
        radius = eps * params.perturbation_scale * id_scale
        start = c_id + radius * _random_direction(n, rng)
        c_mat, iterations, converged, trace = _dykstra(projector, start, params)
        total_iterations += iterations

        phi = choi.ChoiMatrix(n, n, hermitian_part(c_mat))
        fix_residual = max(
            operator_norm(choi.apply(phi, g) - g) for g in system.hermitian_basis
        )
        unit_residual = operator_norm(choi.partial_trace_input(phi) - np.eye(n))
        deviation = max(
            (operator_norm(choi.apply(phi, p) - p) for p in probe_mats), default=0.0
        )
        details.append(RestartDiagnostics(
            restart=r, eps=eps, iterations=iterations, converged=converged,
            deviation=deviation, fix_residual=fix_residual,
            unitality_residual=unit_residual,
        ))
        valid = (
            fix_residual <= params.fix_tol
            and unit_residual <= params.fix_tol
            and bool(choi.is_ucp(phi, tol=params.fix_tol))
        )
        if valid and (best is None or deviation > best[0]):
            best = (deviation, phi, details[-1], trace)

    if best is None:
        # No restart produced a verified channel; report the identity map.
        phi = choi.choi_of_identity(n)
        return UepReport(
            status=NO_VIOLATION_FOUND, deviation=0.0, witness=phi,
            probes=probe_mats, restarts=params.restarts,
            iterations=total_iterations, final_residual=float("nan"),
            seed=params.seed, params=params, restart_details=details,
        )

    deviation, phi, diag, trace = best
    status = VIOLATED if deviation > params.violation_tol else NO_VIOLATION_FOUND
    return UepReport(
        status=status, deviation=deviation, witness=phi, probes=probe_mats,
        restarts=params.restarts, iterations=total_iterations,
        final_residual=max(diag.fix_residual, diag.unitality_residual),
        seed=params.seed, params=params, restart_details=details,
        affine_residual_trace=trace,
    )


def convex_split_witness(a: np.ndarray) -> choi.ChoiMatrix:
    """Explicit UCP map violating the unique extension property for
    span{1, A} when the diagonal A has at least three distinct eigenvalues.

    The evaluation at the middle eigenvalue lambda_2 is replaced by the
    convex combination t * (evaluation at lambda_1) + (1-t) * (evaluation at
    lambda_3) with t = (lambda_3 - lambda_2) / (lambda_3 - lambda_1),
    composed with the pinching onto the diagonal; the result fixes 1 and A
    but moves A^2.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if operator_norm(a - np.diag(np.diagonal(a))) > 1e-12:
        raise DomainError("expected a diagonal matrix")
    diag = np.real(np.diagonal(a))
    distinct = np.unique(diag)
    if len(distinct) < 3:
        raise DomainError(
            f"need at least 3 distinct points in the spectrum, got {len(distinct)}"
        )
    lam1, lam2, lam3 = distinct[0], distinct[1], distinct[2]
    t = (lam3 - lam2) / (lam3 - lam1)
    i1 = int(np.flatnonzero(diag == lam1)[0])
    i3 = int(np.flatnonzero(diag == lam3)[0])
    weights = np.eye(n)
    for j in np.flatnonzero(diag == lam2):
        weights[j, j] = 0.0
        weights[j, i1] = t
        weights[j, i3] = 1.0 - t
    return choi.choi_of_diagonal_map(weights)


def block_diag(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x = as_matrix(x)
    y = as_matrix(y)
    out = np.zeros((x.shape[0] + y.shape[0], x.shape[1] + y.shape[1]), dtype=complex)
    out[: x.shape[0], : x.shape[1]] = x
    out[x.shape[0]:, x.shape[1]:] = y
    return out


def direct_sum_system(s1: OperatorSystem, s2: OperatorSystem) -> OperatorSystem:
    """Operator system spanned by the positional block sums g1 (+) g2."""
    if len(s1.generators) != len(s2.generators):
        raise DimensionError(
            "direct sum pairs generators positionally; the systems must have "
            f"equally long generator lists ({len(s1.generators)} vs {len(s2.generators)})"
        )
    return operator_system([
        block_diag(g1, g2) for g1, g2 in zip(s1.generators, s2.generators)
    ])


def direct_sum_check(s1: OperatorSystem, report1: UepReport,
                     s2: OperatorSystem, report2: UepReport,
                     probes: Sequence[np.ndarray],
                     params: Optional[UepParams] = None) -> UepReport:
    """Re-run the UEP search on the block-diagonal sum of two systems that
    individually reported no violation.  A violated outcome here is a
    property-test failure: direct sums of maps with the unique extension
    property keep it."""
    for which, rep in (("first", report1), ("second", report2)):
        if rep.status != NO_VIOLATION_FOUND:
            raise DomainError(
                f"precondition violated: the {which} summand reported {rep.status!r}"
            )
    return uep_check(direct_sum_system(s1, s2), probes, params)
