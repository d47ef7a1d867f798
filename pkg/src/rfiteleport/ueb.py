"""Unitary error bases, equivariance checks and commuting-Hadamard constructions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groups import NotAHomomorphism, compose, cyclic_group
from .linalg import DEFAULT_TOL, as_matrix, dagger, unitarity_defect
from .reps import Representation, is_permutation_basis, make_representation


class NotAUnitaryErrorBasis(ValueError):
    pass


class AmbiguousMatch(ValueError):
    """Two basis elements lie within tolerance of the same conjugate."""


class ConstructionError(RuntimeError):
    """A constructed basis failed its certification checks."""


@dataclass(frozen=True)
class UEBReport:
    valid: bool
    unitarity_defect: float
    orthogonality_defect: float
    worst_unitary: int
    worst_pair: tuple[int, int]


@dataclass(frozen=True)
class UnitaryErrorBasis:
    elements: np.ndarray  # (d², d, d)

    @property
    def dimension(self) -> int:
        return self.elements.shape[1]

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.elements[i]


@dataclass(frozen=True)
class GEquivariantUEB:
    base: UnitaryErrorBasis
    rep: Representation = field(repr=False)
    sigma: np.ndarray = field(repr=False)  # (|G|, d²): sigma[g][i] is the label of π(g)U_iπ(g)†
    provenance: dict = field(default_factory=dict)

    @property
    def elements(self) -> np.ndarray:
        return self.base.elements


def _stack(elements) -> np.ndarray:
    if isinstance(elements, UnitaryErrorBasis):
        return elements.elements
    mats = [as_matrix(M, square=True) for M in elements]
    if len({M.shape for M in mats}) != 1:
        raise NotAUnitaryErrorBasis("elements do not share one square shape")
    return np.array(mats)


def verify_ueb(elements, tol: float = DEFAULT_TOL) -> UEBReport:
    """Check unitarity and Tr(U_i†U_j) = d δ_ij for d² matrices.

    The orthogonality defect is scaled by 1/d so both defects compare to tol.
    """
    U = _stack(elements)
    d = U.shape[1]
    if len(U) != d * d:
        raise NotAUnitaryErrorBasis(f"expected {d * d} elements for dimension {d}, got {len(U)}")
    eye = np.eye(d)
    unit = np.abs(dagger(U) @ U - eye).reshape(len(U), -1).max(axis=1)
    flat = U.reshape(len(U), -1)
    gram = np.conj(flat) @ flat.T
    ortho = np.abs(gram - d * np.eye(len(U))) / d
    worst_u = int(np.argmax(unit))
    worst_pair = tuple(int(x) for x in np.unravel_index(np.argmax(ortho), ortho.shape))
    u_def, o_def = float(unit[worst_u]), float(ortho[worst_pair])
    return UEBReport(u_def <= tol and o_def <= tol, u_def, o_def, worst_u, worst_pair)


def _match(images: np.ndarray, U: np.ndarray, tol: float) -> list[int] | None:
    """For each image find the unique basis element within tol, entrywise."""
    dist = np.abs(images[:, None] - U[None, :]).reshape(len(images), len(U), -1).max(axis=2)
    labels = []
    for i, row in enumerate(dist):
        hits = np.flatnonzero(row <= tol)
        if len(hits) == 0:
            return None
        if len(hits) > 1:
            raise AmbiguousMatch(f"conjugate of element {i} matches elements {hits.tolist()}")
        labels.append(int(hits[0]))
    if len(set(labels)) != len(labels):
        return None
    return labels


def verify_equivariance(elements, rep: Representation, tol: float = DEFAULT_TOL) -> np.ndarray | None:
    """The label permutations sigma[g] with π(g)U_iπ(g)† = U_{sigma[g][i]}, or None.

    Matches are found on generators, extended multiplicatively, and then
    re-checked against every group element.
    """
    U = _stack(elements)
    if rep.dimension != U.shape[1]:
        raise ValueError("representation and basis dimensions differ")
    G = rep.group
    gen_perms = []
    for g in G.generator_indices:
        P = rep.matrices[g]
        labels = _match(P[None] @ U @ dagger(P)[None], U, tol)
        if labels is None:
            return None
        gen_perms.append(tuple(labels))
    n = len(U)
    try:
        sigma = G.extend(gen_perms, tuple(range(n)), compose, lambda a, b: a == b)
    except NotAHomomorphism:
        return None
    sigma = np.array(sigma, dtype=np.int64).reshape(G.order, n)
    conj = rep.matrices[:, None] @ U[None] @ dagger(rep.matrices)[:, None]
    if np.abs(conj - U[sigma]).max(initial=0.0) > tol:
        return None
    return sigma


@dataclass(frozen=True)
class TwoParameterUnitary:
    """n×n matrix with a on the diagonal and b everywhere else."""

    n: int
    a: complex
    b: complex

    @property
    def matrix(self) -> np.ndarray:
        M = np.full((self.n, self.n), self.b, dtype=complex)
        np.fill_diagonal(M, self.a)
        return M

    @property
    def phase_overlap(self) -> float:
        """Re(α*β) for a = |a|α, b = |b|β."""
        alpha = self.a / abs(self.a)
        beta = self.b / abs(self.b)
        return float((np.conj(alpha) * beta).real)


def two_parameter_unitary(
    n: int, abs_a: float, phase_a: float = 0.0, sign_choice: int = 1, tol: float = DEFAULT_TOL
) -> TwoParameterUnitary:
    """Solve for b so the (a, b) matrix is unitary.

    |b|² = (1 - |a|²)/(n - 1) and Re(α*β) = (2 - n)/2 · |b|/|a|, which is
    solvable exactly when (n - 2)/n <= |a| <= 1. ``sign_choice`` picks the
    sign of the phase offset between α and β.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if sign_choice not in (1, -1):
        raise ValueError("sign_choice must be +1 or -1")
    lower = (n - 2) / n
    if abs_a <= 0:
        raise ValueError("|a| must be non-zero")
    if not (lower - tol <= abs_a <= 1 + tol):
        raise ValueError(f"|a| = {abs_a} lies outside [{lower}, 1]")
    abs_b = np.sqrt(max(1 - abs_a**2, 0.0) / (n - 1))
    if abs_b <= tol:
        raise ValueError("|a| = 1 forces b = 0, which is excluded")
    overlap = float(np.clip((2 - n) / 2 * abs_b / abs_a, -1.0, 1.0))
    alpha = np.exp(1j * phase_a)
    beta = alpha * np.exp(1j * sign_choice * np.arccos(overlap))
    out = TwoParameterUnitary(n, complex(abs_a * alpha), complex(abs_b * beta))
    defect = unitarity_defect(out.matrix)
    if defect > tol:
        raise ConstructionError(f"assembled matrix is not unitary (defect {defect:.3g})")
    return out


def commutes_with_rep(M, rep: Representation, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    M = as_matrix(M, square=True)
    defect = 0.0
    for P in rep.generator_matrices:
        defect = max(defect, float(np.abs(M @ P - P @ M).max()))
    return defect <= tol, defect


def is_hadamard(M, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Unitary with every entry of modulus 1/√n."""
    M = as_matrix(M, square=True)
    n = M.shape[0]
    defect = max(unitarity_defect(M), float(np.abs(np.abs(M) - 1 / np.sqrt(n)).max()))
    return defect <= tol, defect


def _diag_column(M: np.ndarray, k: int) -> np.ndarray:
    return np.diag(M[:, k])


def _diag_row(M: np.ndarray, k: int) -> np.ndarray:
    return np.diag(M[k, :])


def hadamard_ueb(Hm, tol: float = DEFAULT_TOL) -> tuple[UnitaryErrorBasis, str]:
    """U_ij = n · H diag(H, j)† H† diag(Hᵀ, i), labelled i*n + j.

    With H normalised to entries of modulus 1/√n the prefactor n makes every
    element unitary. diag(M, k) takes the k-th column of M; if that fails the
    UEB check the row reading is tried. Returns the basis and the convention
    that worked.
    """
    H = as_matrix(Hm, square=True)
    ok, defect = is_hadamard(H, tol)
    if not ok:
        raise ValueError(f"input is not a Hadamard matrix (defect {defect:.3g})")
    n = H.shape[0]
    for name, diag in (("column", _diag_column), ("row", _diag_row)):
        elements = np.array([
            n * H @ dagger(diag(H, j)) @ dagger(H) @ diag(H.T, i)
            for i in range(n)
            for j in range(n)
        ])
        if verify_ueb(elements, tol).valid:
            return UnitaryErrorBasis(elements), name
    raise ConstructionError("Hadamard construction did not yield a unitary error basis")


def commuting_hadamard(n: int) -> np.ndarray:
    """A Hadamard matrix commuting with every n×n permutation matrix (n <= 4)."""
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    if n > 4:
        raise ValueError(
            f"no two-parameter Hadamard exists for n = {n}; only n <= 4 is covered"
        )
    return two_parameter_unitary(n, 1 / np.sqrt(n)).matrix


def certify(elements, rep: Representation, provenance: dict, tol: float = DEFAULT_TOL) -> GEquivariantUEB:
    """Wrap a basis as a GEquivariantUEB after checking both properties."""
    U = _stack(elements)
    report = verify_ueb(U, tol)
    if not report.valid:
        raise ConstructionError(f"not a unitary error basis: {report}")
    sigma = verify_equivariance(U, rep, tol)
    if sigma is None:
        raise ConstructionError("basis is not permuted by the representation")
    return GEquivariantUEB(UnitaryErrorBasis(U), rep, sigma, dict(provenance))


def construct_gueb_dim_le4(
    rep: Representation, tol: float = DEFAULT_TOL, hadamard=None
) -> GEquivariantUEB:
    """Equivariant UEB for a representation given by permutation matrices.

    Dimensions up to 4 use the two-parameter Hadamard with |a| = 1/√n.
    Larger dimensions need a caller-supplied Hadamard commuting with rep.
    """
    if is_permutation_basis(rep, tol) is None:
        raise ValueError("representation is not in a permutation basis")
    n = rep.dimension
    if hadamard is None:
        if n > 4:
            raise ValueError(
                f"dimension {n} > 4: the built-in construction only covers n <= 4; "
                "supply a commuting Hadamard matrix"
            )
        H = commuting_hadamard(n)
    else:
        H = as_matrix(hadamard, square=True)
        if H.shape[0] != n:
            raise ValueError("Hadamard matrix has the wrong dimension")
        ok, defect = is_hadamard(H, tol)
        if not ok:
            raise ValueError(f"supplied matrix is not a Hadamard matrix (defect {defect:.3g})")
    ok, defect = commutes_with_rep(H, rep, tol)
    if not ok:
        raise ValueError(f"Hadamard matrix does not commute with the representation (defect {defect:.3g})")
    basis, convention = hadamard_ueb(H, tol)
    return certify(
        basis.elements,
        rep,
        {"method": "hadamard", "diag_convention": convention, "hadamard": H},
        tol,
    )


_R2, _R6 = np.sqrt(2), np.sqrt(6)
Z2_PI_A = np.array([[np.sqrt(3) / 2, 1 / 2], [1 / 2, -np.sqrt(3) / 2]])
Z2_ELEMENTS = np.array([
    np.array([[1, 1], [-1, 1]]) / _R2,
    np.array([[1, -1], [1, 1]]) / _R2,
    np.array([[-_R2 - _R6, -_R2 + _R6], [-_R2 + _R6, _R2 + _R6]]) / 4,
    np.array([[_R2 - _R6, -_R2 - _R6], [-_R2 - _R6, -_R2 + _R6]]) / 4,
], dtype=complex)


def builtin_z2_example(tol: float = DEFAULT_TOL) -> tuple[Representation, GEquivariantUEB]:
    """The qubit example: Z2 acting by a reflection, with its four-element basis."""
    rep = make_representation(cyclic_group(2), [Z2_PI_A], tol)
    return rep, certify(Z2_ELEMENTS, rep, {"method": "builtin-z2"}, tol)


def pauli_basis() -> np.ndarray:
    return np.array([
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ], dtype=complex)
