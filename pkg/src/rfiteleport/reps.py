"""Unitary representations, characters and permutation-character feasibility."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groups import (
    DEFAULT_MAX_ORDER,
    GSet,
    NotAHomomorphism,
    PermGroup,
    Subgroup,
    coset_space,
    disjoint_union,
    fixed_point_count,
    subgroups_up_to_conjugacy,
)
from .linalg import DEFAULT_TOL, as_matrix, dagger, inverse_sqrt_psd, unitarity_defect


class NotARepresentation(ValueError):
    pass


class NoEquivariantBasis(ValueError):
    """The character is not a sum of basic permutation characters."""


class BasisSearchFailed(RuntimeError):
    """The randomised basis search gave up; existence is not ruled out."""


@dataclass(frozen=True)
class Representation:
    group: PermGroup = field(repr=False)
    dimension: int
    matrices: np.ndarray = field(repr=False)  # (|G|, d, d), indexed like group.elements

    def __getitem__(self, g: int) -> np.ndarray:
        return self.matrices[g]

    @property
    def generator_matrices(self) -> list[np.ndarray]:
        return [self.matrices[i] for i in self.group.generator_indices]

    def is_real(self, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.abs(self.matrices.imag).max(initial=0.0) <= tol)


def make_representation(
    G: PermGroup, generator_matrices: Sequence, tol: float = DEFAULT_TOL
) -> Representation:
    """Extend generator matrices to all of G, checking every group relation."""
    mats = [as_matrix(M, square=True) for M in generator_matrices]
    if len(mats) != len(G.generators):
        raise NotARepresentation(
            f"expected {len(G.generators)} generator matrices, got {len(mats)}"
        )
    if len({M.shape for M in mats}) > 1:
        raise NotARepresentation("generator matrices have different dimensions")
    for k, M in enumerate(mats):
        defect = unitarity_defect(M)
        if defect > tol:
            raise NotARepresentation(f"generator matrix {k} is not unitary (defect {defect:.3g})")
    d = mats[0].shape[0] if mats else 1
    try:
        values = G.extend(
            mats,
            np.eye(d, dtype=complex),
            lambda A, B: A @ B,
            lambda A, B: np.abs(A - B).max() <= tol,
        )
    except NotAHomomorphism as exc:
        raise NotARepresentation(f"not a representation of this group: {exc}") from None
    return Representation(G, d, np.array(values).reshape(G.order, d, d))


def trivial_representation(G: PermGroup, dimension: int = 1) -> Representation:
    mats = np.broadcast_to(np.eye(dimension, dtype=complex), (G.order, dimension, dimension))
    return Representation(G, dimension, mats.copy())


def permutation_representation(X: GSet) -> Representation:
    """The free Hilbert space on X, with g sending |x⟩ to |g·x⟩."""
    G, n = X.group, X.size
    mats = np.zeros((G.order, n, n), dtype=complex)
    cols = np.arange(n)
    for g in range(G.order):
        mats[g, X.action[g], cols] = 1.0
    return Representation(G, n, mats)


def direct_sum(r1: Representation, r2: Representation) -> Representation:
    d = r1.dimension + r2.dimension
    mats = np.zeros((r1.group.order, d, d), dtype=complex)
    mats[:, : r1.dimension, : r1.dimension] = r1.matrices
    mats[:, r1.dimension :, r1.dimension :] = r2.matrices
    return Representation(r1.group, d, mats)


def tensor_product(r1: Representation, r2: Representation) -> Representation:
    mats = np.array([np.kron(a, b) for a, b in zip(r1.matrices, r2.matrices)])
    return Representation(r1.group, r1.dimension * r2.dimension, mats)


def change_basis(rep: Representation, B: np.ndarray) -> Representation:
    """The representation g -> B† π(g) B for a unitary B."""
    mats = dagger(B)[None] @ rep.matrices @ B[None]
    return Representation(rep.group, rep.dimension, mats)


@dataclass(frozen=True)
class ClassFunction:
    group: PermGroup = field(repr=False)
    values: np.ndarray  # one value per conjugacy class, in class order

    def __call__(self, g: int) -> complex:
        return complex(self.values[self.group.class_of[g]])

    @property
    def representatives(self) -> list[int]:
        return [cls[0] for cls in self.group.conjugacy_classes()]

    def as_integers(self, tol: float = DEFAULT_TOL) -> tuple[int, ...] | None:
        """Nearest integers if every value is within tol of one, else None."""
        rounded = np.round(self.values.real)
        if np.abs(self.values - rounded).max(initial=0.0) > tol:
            return None
        return tuple(int(x) for x in rounded)


def character(rep: Representation, tol: float = DEFAULT_TOL) -> ClassFunction:
    traces = np.trace(rep.matrices, axis1=1, axis2=2)
    values = []
    for cls in rep.group.conjugacy_classes():
        t = traces[list(cls)]
        if np.abs(t - t[0]).max() > tol:
            raise NotARepresentation("trace is not constant on a conjugacy class")
        values.append(t[0])
    return ClassFunction(rep.group, np.array(values, dtype=complex))


def end_character(rep: Representation, tol: float = DEFAULT_TOL) -> ClassFunction:
    """Character of M -> π(g) M π(g)† on End(H), which is |χ(g)|²."""
    chi = character(rep, tol)
    return ClassFunction(rep.group, np.abs(chi.values).astype(complex) ** 2)


def permutation_character(X: GSet) -> ClassFunction:
    vals = [fixed_point_count(X, cls[0]) for cls in X.group.conjugacy_classes()]
    return ClassFunction(X.group, np.array(vals, dtype=complex))


def basic_permutation_characters(
    G: PermGroup, max_order: int = DEFAULT_MAX_ORDER
) -> list[tuple[Subgroup, ClassFunction]]:
    """Characters of the coset spaces G/H, one per subgroup class, smallest H first."""
    return [
        (H, permutation_character(coset_space(G, H)))
        for H in subgroups_up_to_conjugacy(G, max_order)
    ]


@dataclass(frozen=True)
class FeasibilityCertificate:
    feasible: bool
    coefficients: tuple[int, ...] | None
    bounds: tuple[int, ...]
    nodes: int
    reason: str = ""


def decompose_into_basics(
    target: ClassFunction | Sequence[int],
    basics: Sequence[tuple[Subgroup, ClassFunction] | ClassFunction | Sequence[int]],
    tol: float = DEFAULT_TOL,
) -> FeasibilityCertificate:
    """Search for non-negative integers c with Σ c_i basic_i = target.

    Depth-first over coefficient vectors with c_i <= target(e)/basic_i(e),
    trying small values first, so the first hit is lexicographically least.
    Basic permutation characters are non-negative, so any branch whose
    residual goes negative is cut.
    """
    tgt = _integer_values(target, tol)
    rows = [_integer_values(b[1] if isinstance(b, tuple) else b, tol) for b in basics]
    if any(r is None for r in rows):
        raise ValueError("basic characters must be integer valued")
    if tgt is None:
        return FeasibilityCertificate(False, None, (), 0, "target is not integer valued")
    if min(tgt, default=0) < 0:
        return FeasibilityCertificate(False, None, (), 0, "target has a negative value")

    A = np.array(rows, dtype=np.int64).reshape(len(rows), len(tgt))
    t = np.array(tgt, dtype=np.int64)
    bounds = tuple(int(t[0] // a[0]) if a[0] > 0 else 0 for a in A)
    coeffs = [0] * len(A)
    nodes = 0

    def search(k: int, residual: np.ndarray) -> bool:
        nonlocal nodes
        nodes += 1
        if not residual.any():
            return True
        if k == len(A):
            return False
        for c in range(bounds[k] + 1):
            rest = residual - c * A[k]
            if rest.min() < 0:
                break
            coeffs[k] = c
            if search(k + 1, rest):
                return True
        coeffs[k] = 0
        return False

    if search(0, t):
        cert = tuple(coeffs)
        assert np.array_equal(np.array(cert, dtype=np.int64) @ A, t)
        return FeasibilityCertificate(True, cert, bounds, nodes)
    return FeasibilityCertificate(False, None, bounds, nodes, "no non-negative integer combination")


def _integer_values(f, tol: float) -> tuple[int, ...] | None:
    if isinstance(f, ClassFunction):
        return f.as_integers(tol)
    vals = np.asarray(f, dtype=complex)
    rounded = np.round(vals.real)
    if np.abs(vals - rounded).max(initial=0.0) > tol:
        return None
    return tuple(int(x) for x in rounded)


def is_permutation_basis(rep: Representation, tol: float = DEFAULT_TOL) -> GSet | None:
    """The G-set permuted by rep, if every matrix is a 0/1 permutation matrix."""
    n = rep.dimension
    action = np.empty((rep.group.order, n), dtype=np.int64)
    for g, M in enumerate(rep.matrices):
        rounded = np.round(M.real)
        if np.abs(M - rounded).max(initial=0.0) > tol:
            return None
        if not (np.all((rounded == 0) | (rounded == 1)) and np.all(rounded.sum(axis=0) == 1)
                and np.all(rounded.sum(axis=1) == 1)):
            return None
        action[g] = np.argmax(rounded, axis=0)
    return GSet(rep.group, n, action, "user")


def find_equivariant_onb(
    rep: Representation,
    tol: float = DEFAULT_TOL,
    retries: int = 32,
    seed: int = 7,
    max_order: int = DEFAULT_MAX_ORDER,
) -> tuple[np.ndarray, GSet]:
    """Find a unitary B such that every B†π(g)B is a permutation matrix.

    Raises NoEquivariantBasis when the character rules one out, and
    BasisSearchFailed when the randomised construction runs out of retries.
    """
    X = is_permutation_basis(rep, tol)
    if X is not None:
        return np.eye(rep.dimension, dtype=complex), X

    basics = basic_permutation_characters(rep.group, max_order)
    cert = decompose_into_basics(character(rep, tol), basics, tol)
    if not cert.feasible:
        raise NoEquivariantBasis(cert.reason)
    terms = [H for (H, _), c in zip(basics, cert.coefficients) for _ in range(c)]
    rng = np.random.default_rng(seed)
    real = rep.is_real(tol)
    for _ in range(retries):
        result = _orbit_basis(rep, terms, rng, real, tol)
        if result is not None:
            return result
    raise BasisSearchFailed(f"no equivariant basis found after {retries} attempts")


def _orbit_basis(rep, terms, rng, real, tol):
    G, d = rep.group, rep.dimension
    complement = np.eye(d, dtype=complex)  # orthogonal projector onto what is left
    columns = []
    X = None
    for H in terms:
        fixer = rep.matrices[list(H.members)].mean(axis=0)
        v = rng.standard_normal(d) + (0 if real else 1j * rng.standard_normal(d))
        v = complement @ (fixer @ v)
        norm = np.linalg.norm(v)
        if norm < 1e-6:
            return None
        v /= norm
        cosets = coset_space(G, H)
        reps_ = _coset_representatives(G, H)
        V = np.stack([rep.matrices[x] @ v for x in reps_], axis=1)
        gram = dagger(V) @ V
        if np.linalg.eigvalsh(gram).min() < 1e-6:
            return None
        block = V @ inverse_sqrt_psd(gram)
        columns.append(block)
        complement = complement - block @ dagger(block)
        X = cosets if X is None else disjoint_union(X, cosets)
    B = np.concatenate(columns, axis=1)
    if unitarity_defect(B) > tol:
        return None
    found = is_permutation_basis(change_basis(rep, B), tol)
    if found is None or not np.array_equal(found.action, X.action):
        return None
    return B, X


def _coset_representatives(G: PermGroup, H: Subgroup) -> list[int]:
    """Least member of each left coset, in coset_space order."""
    table = G.multiplication_table
    members = list(H.members)
    seen = np.zeros(G.order, dtype=bool)
    reps = []
    for x in range(G.order):
        if not seen[x]:
            seen[table[x, members]] = True
            reps.append(x)
    return reps
