"""Dense complex linear algebra with a single absolute tolerance.

Matrices and vectors are plain numpy arrays. Every comparison is an
absolute, entrywise test against ``tol`` (default ``DEFAULT_TOL``).
"""

from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-9


def as_matrix(M, square: bool = False) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def dagger(M: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(M, -1, -2))


def unitarity_defect(M) -> float:
    """max |(M†M - I)_ij|."""
    M = as_matrix(M, square=True)
    return float(np.abs(dagger(M) @ M - np.eye(M.shape[0])).max(initial=0.0))


def is_unitary(M, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    defect = unitarity_defect(M)
    return defect <= tol, defect


def hs_inner(A, B) -> complex:
    """Hilbert-Schmidt inner product Tr(A†B)."""
    A = as_matrix(A, square=True)
    B = as_matrix(B, square=True)
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B))


def tensor(*factors) -> np.ndarray:
    """Kronecker product; index (i_A, i_B) maps to i_A * dim_B + i_B."""
    out = np.ones((1,) * np.ndim(factors[0]), dtype=complex)
    for f in factors:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def basis_vector(d: int, i: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[i] = 1.0
    return e


def bell_state(d: int) -> np.ndarray:
    """(1/√d) Σ_i |i⟩⊗|i⟩."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    return np.eye(d, dtype=complex).reshape(d * d) / np.sqrt(d)


def projector(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def partial_trace(rho, dims: tuple[int, int], which: str = "second") -> np.ndarray:
    """Trace out the ``"first"`` or ``"second"`` tensor factor of ``rho``."""
    rho = as_matrix(rho, square=True)
    d1, d2 = dims
    if d1 * d2 != rho.shape[0]:
        raise ValueError(f"dimension {rho.shape[0]} does not factor as {d1}x{d2}")
    r = rho.reshape(d1, d2, d1, d2)
    if which == "second":
        return np.einsum("ajbj->ab", r)
    if which == "first":
        return np.einsum("iaib->ab", r)
    raise ValueError("which must be 'first' or 'second'")


def check_density_matrix(rho, tol: float = DEFAULT_TOL) -> np.ndarray:
    rho = as_matrix(rho, square=True)
    if np.abs(rho - dagger(rho)).max() > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError("density matrix does not have unit trace")
    if np.linalg.eigvalsh((rho + dagger(rho)) / 2).min() < -tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def fidelity(psi, rho, tol: float = DEFAULT_TOL) -> float:
    """⟨ψ|ρ|ψ⟩ for a normalised pure state ψ."""
    psi = np.asarray(psi, dtype=complex)
    rho = as_matrix(rho, square=True)
    if psi.shape != (rho.shape[0],):
        raise ValueError(f"dimension mismatch: state {psi.shape}, matrix {rho.shape}")
    value = np.vdot(psi, rho @ psi)
    if abs(value.imag) > tol:
        raise ValueError(f"fidelity has imaginary part {value.imag:.3g}")
    return float(value.real)


def purity(rho) -> float:
    rho = as_matrix(rho, square=True)
    return float(np.real(np.vdot(rho, rho)))


def inverse_sqrt_psd(M: np.ndarray) -> np.ndarray:
    """M^(-1/2) for a Hermitian positive definite matrix."""
    w, V = np.linalg.eigh(M)
    return (V / np.sqrt(w)) @ dagger(V)
