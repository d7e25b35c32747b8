"""Calculus of unital completely positive (UCP) maps between matrix algebras
via their Choi matrices.

Convention, fixed once and asserted by tests: for a map phi from M_{n_in} to
M_{n_out},

    C = sum_{ij} E_ij (x) phi(E_ij),

an (n_in * n_out) square Hermitian matrix whose (i, j) block of size n_out is
phi(E_ij).  The map is completely positive iff C is PSD, and unital iff the
partial trace of C over the *input* (first) factor is the identity of
M_{n_out}.  Application uses the transpose, not the conjugate transpose:

    phi(X) = ptr_in[(X^T (x) I) C].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DimensionError, DomainError
from .hermitian import as_matrix, hermitian_part, is_hermitian, operator_norm


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi matrix of a linear map M_{n_in} -> M_{n_out}.

    The container validates shape and Hermiticity only; positivity and
    unitality (the UCP contract) are checked by :func:`is_ucp`.
    """

    n_in: int
    n_out: int
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        size = self.n_in * self.n_out
        if m.shape != (size, size):
            raise DimensionError(
                f"Choi matrix must be {size}x{size} for n_in={self.n_in}, "
                f"n_out={self.n_out}, got {m.shape}"
            )
        if not is_hermitian(m, rtol=1e-10):
            raise DomainError("Choi matrix must be Hermitian")
        object.__setattr__(self, "matrix", m)

    def blocks(self) -> np.ndarray:
        """View as the 4-tensor C[i, a, j, b] = <a| phi(E_ij) |b>."""
        return self.matrix.reshape(self.n_in, self.n_out, self.n_in, self.n_out)


def partial_trace_input(phi: ChoiMatrix) -> np.ndarray:
    """Trace out the input factor: sum of the diagonal blocks, i.e. phi(1)."""
    return np.einsum("iaib->ab", phi.blocks())


def apply(phi: ChoiMatrix, x: np.ndarray) -> np.ndarray:
    """Evaluate phi(X) = ptr_in[(X^T (x) I) C]; linear in X and
    Hermiticity-preserving."""
    x = as_matrix(x)
    if x.shape != (phi.n_in, phi.n_in):
        raise DimensionError(
            f"operand must be {phi.n_in}x{phi.n_in}, got {x.shape}"
        )
    return np.einsum("iajb,ij->ab", phi.blocks(), x)


def choi_of_identity(n: int) -> ChoiMatrix:
    """Identity channel on M_n: the rank-one matrix sum_{ij} E_ij (x) E_ij."""
    if n < 1:
        raise DimensionError("dimension must be at least 1")
    vec = np.eye(n, dtype=complex).reshape(n * n)
    return ChoiMatrix(n, n, np.outer(vec, vec.conj()))


def choi_of_pinching(n: int) -> ChoiMatrix:
    """Conditional expectation onto the diagonal subalgebra of M_n
    (zeroes every off-diagonal entry)."""
    return choi_of_block_pinching(n, [1] * n)


def choi_of_block_pinching(n: int, block_sizes: Sequence[int]) -> ChoiMatrix:
    """Conditional expectation onto block-diagonal matrices with the given
    contiguous block sizes: X -> sum_k P_k X P_k."""
    if n < 1:
        raise DimensionError("dimension must be at least 1")
    sizes = [int(s) for s in block_sizes]
    if any(s < 1 for s in sizes) or sum(sizes) != n:
        raise DimensionError(
            f"block sizes {sizes} do not partition dimension {n}"
        )
    labels = np.repeat(np.arange(len(sizes)), sizes)
    same_block = (labels[:, None] == labels[None, :]).astype(complex)
    c = np.zeros((n, n, n, n), dtype=complex)
    idx = np.arange(n)
    # phi(E_ij) = E_ij when i, j share a block, else 0.
    c[idx[:, None], idx[:, None], idx[None, :], idx[None, :]] = same_block
    return ChoiMatrix(n, n, c.reshape(n * n, n * n))


def choi_of_diagonal_map(weights: np.ndarray) -> ChoiMatrix:
    """Pinch to the diagonal, then reweight: X -> diag(W @ diag(X)) for a
    row-stochastic matrix W with nonnegative entries."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DimensionError(f"weight matrix must be square, got shape {w.shape}")
    if np.any(w < 0):
        raise DomainError(f"weights must be nonnegative, min={w.min()!r}")
    row_sums = w.sum(axis=1)
    if np.max(np.abs(row_sums - 1.0)) > 1e-12:
        raise DomainError(
            f"weight rows must sum to 1 within 1e-12, worst={np.max(np.abs(row_sums - 1.0)):.3e}"
        )
    n = w.shape[0]
    c = np.zeros((n, n, n, n), dtype=complex)
    for i in range(n):
        # phi(E_ii) = diag(W e_i) = diag of column i.
        c[i, :, i, :][np.diag_indices(n)] = w[:, i]
    return ChoiMatrix(n, n, c.reshape(n * n, n * n))


def choi_of_unitary_conjugation(u: np.ndarray) -> ChoiMatrix:
    """The automorphism X -> U X U† for a unitary U."""
    u = as_matrix(u)
    n = u.shape[0]
    if u.shape != (n, n):
        raise DimensionError(f"unitary must be square, got {u.shape}")
    if operator_norm(u.conj().T @ u - np.eye(n)) > 1e-10:
        raise DomainError("matrix is not unitary within 1e-10")
    # C = sum_ij E_ij (x) U E_ij U†, with U E_ij U† = col_i(U) col_j(U)†.
    c = np.zeros((n, n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            c[i, :, j, :] = np.outer(u[:, i], u[:, j].conj())
    return ChoiMatrix(n, n, c.reshape(n * n, n * n))


@dataclass(frozen=True)
class UcpDiagnostics:
    ok: bool
    min_eigenvalue: float
    unitality_defect: float
    tol: float

    def __bool__(self) -> bool:
        return self.ok


def is_ucp(phi: ChoiMatrix, tol: float = 1e-10) -> UcpDiagnostics:
    """Check both UCP invariants and report the worst violations:
    PSD (min eigenvalue >= -tol) and unitality (||phi(1) - 1|| <= tol)."""
    eigs = np.linalg.eigvalsh(hermitian_part(phi.matrix))
    min_eig = float(eigs[0])
    defect = operator_norm(partial_trace_input(phi) - np.eye(phi.n_out))
    return UcpDiagnostics(
        ok=(min_eig >= -tol and defect <= tol),
        min_eigenvalue=min_eig,
        unitality_defect=defect,
        tol=tol,
    )


def compose(phi: ChoiMatrix, psi: ChoiMatrix) -> ChoiMatrix:
    """Choi matrix of the composition phi o psi (apply psi first)."""
    if psi.n_out != phi.n_in:
        raise DimensionError(
            f"cannot compose: psi maps into M_{psi.n_out} but phi expects M_{phi.n_in}"
        )
    n = psi.n_in
    size = n * phi.n_out
    c = np.zeros((n, phi.n_out, n, phi.n_out), dtype=complex)
    basis = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            basis[i, j] = 1.0
            c[i, :, j, :] = apply(phi, apply(psi, basis))
            basis[i, j] = 0.0
    return ChoiMatrix(n, phi.n_out, hermitian_part(c.reshape(size, size)))
