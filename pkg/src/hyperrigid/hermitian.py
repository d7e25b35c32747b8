"""Dense complex-matrix kernel: Hermitian eigendecomposition, functional
calculus, operator norms, and projection onto the positive-semidefinite cone.

Every other module builds on these primitives.  All functions are pure and
operate on plain ``numpy`` arrays; Hermitian inputs are validated against an
explicit symmetry tolerance rather than silently symmetrized.
"""

from __future__ import annotations

from typing import Callable, Tuple

import numpy as np

from .errors import ConvergenceError, DomainError, NonHermitianError

# Relative symmetry tolerance: max |A - A†| entry against 1 + max |A| entry.
HERMITIAN_RTOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex ndarray without copying when possible."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DomainError(f"expected a 2-D matrix, got ndim={m.ndim}")
    return m


def hermiticity_defect(a: np.ndarray) -> float:
    """Largest entrywise deviation |a[i,j] - conj(a[j,i])|."""
    a = as_matrix(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def is_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    scale = 1.0 + (float(np.max(np.abs(a))) if a.size else 0.0)
    return hermiticity_defect(a) <= rtol * scale


def assert_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NonHermitianError(f"matrix is not square: shape {a.shape}")
    if not is_hermitian(a, rtol):
        raise NonHermitianError(
            f"symmetry defect {hermiticity_defect(a):.3e} exceeds tolerance "
            f"(rtol={rtol:g})"
        )
    return a


def hermitian_part(a: np.ndarray) -> np.ndarray:
    a = as_matrix(a)
    return (a + a.conj().T) / 2


def eig_hermitian(
    a: np.ndarray, rtol: float = HERMITIAN_RTOL
) -> Tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition A = U diag(w) U† of a Hermitian matrix.

    Returns eigenvalues ``w`` ascending (real) and a unitary ``U`` whose
    columns are eigenvectors.  For reproducibility each eigenvector's phase
    is fixed by making its first non-negligible component real positive.
    """
    a = assert_hermitian(a, rtol)
    try:
        w, u = np.linalg.eigh(hermitian_part(a))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"eigendecomposition did not converge: {exc}")
    u = u.astype(complex, copy=True)
    for j in range(u.shape[1]):
        col = u[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12 * np.max(np.abs(col)))
        pivot = col[nz[0]]
        u[:, j] = col * (np.conj(pivot) / abs(pivot))
    return w, u


def apply_function(
    a: np.ndarray, f: Callable[[float], float], rtol: float = HERMITIAN_RTOL
) -> np.ndarray:
    """Functional calculus f(A) = U f(diag(w)) U† for Hermitian A.

    ``f`` is a real scalar function defined on the spectrum of ``A``; a
    :class:`DomainError` is raised if it fails or returns a non-finite value
    at some eigenvalue.
    """
    w, u = eig_hermitian(a, rtol)
    fw = np.empty(len(w))
    for i, x in enumerate(w):
        try:
            y = f(float(x))
        except DomainError:
            raise
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(f"function undefined at eigenvalue {x!r}: {exc}", x=x)
        if not np.isfinite(y):
            raise DomainError(f"function not finite at eigenvalue {x!r}", x=x)
        fw[i] = y
    return hermitian_part((u * fw) @ u.conj().T)


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value (spectral norm); 0 for empty matrices."""
    m = as_matrix(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def frobenius_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(as_matrix(m)))


def psd_project(h: np.ndarray, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Frobenius-nearest positive-semidefinite matrix: clamp negative
    eigenvalues of a Hermitian input to zero and reconstruct."""
    w, u = eig_hermitian(h, rtol)
    w = np.maximum(w, 0.0)
    return hermitian_part((u * w) @ u.conj().T)


def min_eigenvalue(h: np.ndarray, rtol: float = HERMITIAN_RTOL) -> float:
    h = assert_hermitian(h, rtol)
    return float(np.linalg.eigvalsh(hermitian_part(h))[0])


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return hermitian_part(g) * scale


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian matrix with the
    R-diagonal phase normalization."""
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
