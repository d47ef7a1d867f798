"""Density-matrix simulation of teleportation under frame misalignment.

Systems are ordered (input, Alice's half, Bob's half). The shared resource
is the Bell state, fixed in the original frame. A party whose frame is
shifted by g performs, in the original frame, the operation conjugated by
π(g); Alice's frame acts on both of her systems as π(g)⊗π(g).

Each procedure is reduced to a set of d×d Kraus operators on the input
system. For an outcome projector |p⟩⟨p| on systems 1-2, the map
ρ ↦ Tr_12[(|p⟩⟨p|⊗1)(ρ⊗|η⟩⟨η|)(|p⟩⟨p|⊗1)] has the single Kraus operator
(⟨p|⊗1)(1⊗|η⟩) = (conj(P) η)ᵀ, where P and η are the vectors reshaped
to d×d.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .linalg import DEFAULT_TOL, bell_state, dagger, fidelity
from .reps import Representation
from .ueb import UnitaryErrorBasis, _stack

Procedure = Literal["speakable", "unspeakable"]


@dataclass(frozen=True)
class FrameConfig:
    g_A: int
    g_B: int


@dataclass(frozen=True)
class ProtocolSpec:
    rep: Representation
    ueb: np.ndarray  # (d², d, d)
    procedure: Procedure = "unspeakable"

    def __post_init__(self) -> None:
        U = _stack(self.ueb)
        if U.shape[1] != self.rep.dimension:
            raise ValueError(
                f"representation has dimension {self.rep.dimension}, basis has {U.shape[1]}"
            )
        if self.procedure not in ("speakable", "unspeakable"):
            raise ValueError(f"unknown procedure {self.procedure!r}")
        object.__setattr__(self, "ueb", U)

    @property
    def dimension(self) -> int:
        return self.rep.dimension


@dataclass(frozen=True)
class FidelityReport:
    group: str
    procedure: str
    grid: np.ndarray  # grid[g_A, g_B] = min fidelity over the sampled inputs
    deviation: np.ndarray  # grid[g_A, g_B] = max |ρ_out - ρ_in| entry
    trials: int
    seed: int
    tolerance: float

    @property
    def global_min(self) -> float:
        return float(self.grid.min())

    @property
    def global_max(self) -> float:
        return float(self.grid.max())

    @property
    def max_deviation(self) -> float:
        return float(self.deviation.max())


def measurement_basis(ueb) -> np.ndarray:
    """Rows are |φ_x⟩ = (1/√d) Σ_i |i⟩⊗U_x|i⟩."""
    U = _stack(ueb)
    d = U.shape[1]
    # component (i, j) of |φ_x⟩ is (U_x)_{ji} / √d
    return np.swapaxes(U, 1, 2).reshape(len(U), d * d) / np.sqrt(d)


def _frame_basis(spec: ProtocolSpec, g: int) -> np.ndarray:
    P = spec.rep.matrices[g]
    return measurement_basis(spec.ueb) @ np.kron(P, P).T


def _corrections(spec: ProtocolSpec, g: int) -> np.ndarray:
    P = spec.rep.matrices[g]
    return P[None] @ np.swapaxes(spec.ueb, 1, 2) @ dagger(P)[None]


def _outcome_maps(basis: np.ndarray, d: int) -> np.ndarray:
    eta = bell_state(d).reshape(d, d)
    return np.swapaxes(np.conj(basis.reshape(len(basis), d, d)) @ eta, 1, 2)


def kraus_operators(spec: ProtocolSpec, frames: FrameConfig) -> np.ndarray:
    """Kraus operators (k, d, d) of the whole protocol acting on the input."""
    d = spec.dimension
    alice = _frame_basis(spec, frames.g_A)
    C = _corrections(spec, frames.g_B)
    if spec.procedure == "speakable":
        return C @ _outcome_maps(alice, d)
    bob = _frame_basis(spec, frames.g_B)
    overlap = np.conj(bob) @ alice.T  # overlap[y, x] = ⟨q_y|p_x⟩
    A = _outcome_maps(alice, d)
    ops = overlap[:, :, None, None] * (C[:, None] @ A[None])
    ops = ops.reshape(-1, d, d)
    keep = np.abs(ops).reshape(len(ops), -1).max(axis=1) > 0
    return ops[keep]


def apply_channel(kraus: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return np.einsum("kab,bc,kdc->ad", kraus, rho, np.conj(kraus))


def _check_input(spec: ProtocolSpec, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (spec.dimension, spec.dimension):
        raise ValueError(f"input has shape {rho.shape}, expected dimension {spec.dimension}")
    return rho


def teleport_speakable(spec: ProtocolSpec, frames: FrameConfig, rho) -> np.ndarray:
    """Alice's outcome label is sent over a frame-blind classical channel."""
    spec = ProtocolSpec(spec.rep, spec.ueb, "speakable")
    return apply_channel(kraus_operators(spec, frames), _check_input(spec, rho))


def teleport_unspeakable(spec: ProtocolSpec, frames: FrameConfig, rho) -> np.ndarray:
    """Alice sends the decohered pair; Bob measures it in his own frame."""
    spec = ProtocolSpec(spec.rep, spec.ueb, "unspeakable")
    return apply_channel(kraus_operators(spec, frames), _check_input(spec, rho))


def teleport(spec: ProtocolSpec, frames: FrameConfig, rho) -> np.ndarray:
    return apply_channel(kraus_operators(spec, frames), _check_input(spec, rho))


def random_pure_state(d: int, seed: int | np.random.Generator) -> np.ndarray:
    """Haar-random pure state from a normalised complex Gaussian vector."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def sample_states(d: int, trials: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.array([random_pure_state(d, rng) for _ in range(trials)])


def sweep(spec: ProtocolSpec, trials: int = 8, seed: int = 7, tol: float = DEFAULT_TOL) -> FidelityReport:
    """Minimum fidelity for every frame pair over the same seeded input states."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    G = spec.rep.group
    states = sample_states(spec.dimension, trials, seed)
    inputs = np.einsum("ti,tj->tij", states, np.conj(states))
    grid = np.empty((G.order, G.order))
    deviation = np.empty((G.order, G.order))
    for g_A in range(G.order):
        for g_B in range(G.order):
            K = kraus_operators(spec, FrameConfig(g_A, g_B))
            outs = np.einsum("kab,tbc,kdc->tad", K, inputs, np.conj(K))
            grid[g_A, g_B] = min(fidelity(psi, out, tol) for psi, out in zip(states, outs))
            deviation[g_A, g_B] = np.abs(outs - inputs).max()
    return FidelityReport(
        group=G.name or "G",
        procedure=spec.procedure,
        grid=grid,
        deviation=deviation,
        trials=trials,
        seed=seed,
        tolerance=tol,
    )
