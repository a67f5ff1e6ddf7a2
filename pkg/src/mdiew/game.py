"""Semi-quantum game correlations and witness scores.

Tensor order is always tau_x (x) rho (x) omega_y, with Alice's effect acting on the
first two factors and Bob's on the last two.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qmath
from .qmath import DimensionError, ValidationError
from .witness import WitnessDecomposition


@dataclass(frozen=True, eq=False)
class GameScenario:
    decomposition: WitnessDecomposition
    tau: tuple[np.ndarray, ...]
    omega: tuple[np.ndarray, ...]
    shared_state: np.ndarray
    alice_effect: np.ndarray
    bob_effect: np.ndarray

    def __post_init__(self):
        d = self.decomposition
        m, n = d.shape
        if len(self.tau) != m or len(self.omega) != n:
            raise DimensionError(f"need {m} tau and {n} omega inputs")
        tau = tuple(qmath.density_matrix(t, f"tau[{i}]") for i, t in enumerate(self.tau))
        omega = tuple(qmath.density_matrix(w, f"omega[{i}]") for i, w in enumerate(self.omega))
        rho = qmath.density_matrix(self.shared_state, "shared_state")
        ea = qmath.povm_element(self.alice_effect, "alice_effect")
        eb = qmath.povm_element(self.bob_effect, "bob_effect")
        da_in, db_in = tau[0].shape[0], omega[0].shape[0]
        if any(t.shape[0] != da_in for t in tau) or any(w.shape[0] != db_in for w in omega):
            raise DimensionError("input states within a family differ in dimension")
        if ea.shape[0] % da_in or eb.shape[0] % db_in:
            raise DimensionError("effect dimensions are not multiples of the input dimensions")
        d_a, d_b = ea.shape[0] // da_in, eb.shape[0] // db_in
        if rho.shape[0] != d_a * d_b:
            raise DimensionError(
                f"shared_state has dimension {rho.shape[0]}, effects imply {d_a}x{d_b}"
            )
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "shared_state", rho)
        object.__setattr__(self, "alice_effect", ea)
        object.__setattr__(self, "bob_effect", eb)

    @property
    def shared_dims(self) -> tuple[int, int]:
        return (
            self.alice_effect.shape[0] // self.tau[0].shape[0],
            self.bob_effect.shape[0] // self.omega[0].shape[0],
        )


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    values: np.ndarray
    score: float


def _alice_conditioned(effect: np.ndarray, state: np.ndarray, d_share: int) -> np.ndarray:
    # Tr_{A'}[A_a (tau (x) I)], an operator on Alice's share.
    d_in = state.shape[0]
    e4 = effect.reshape(d_in, d_share, d_in, d_share)
    return np.einsum("iajb,ji->ab", e4, state)


def _bob_conditioned(effect: np.ndarray, state: np.ndarray, d_share: int) -> np.ndarray:
    # Tr_{B'}[B_b (I (x) omega)], an operator on Bob's share.
    d_in = state.shape[0]
    e4 = effect.reshape(d_share, d_in, d_share, d_in)
    return np.einsum("aibj,ji->ab", e4, state)


def simulate(s: GameScenario) -> CorrelationTable:
    """p(x, y) = Tr(A_a (x) B_b . tau_x (x) rho (x) omega_y) for every input pair."""
    d_a, d_b = s.shared_dims
    alice = [_alice_conditioned(s.alice_effect, t, d_a) for t in s.tau]
    bob = [_bob_conditioned(s.bob_effect, w, d_b) for w in s.omega]
    rho4 = s.shared_state.reshape(d_a, d_b, d_a, d_b)
    values = np.empty(s.decomposition.shape)
    for x, ma in enumerate(alice):
        # Tr[(M_x (x) N_y) rho] for all y at once.
        partial = np.einsum("ab,bjak->jk", ma, rho4)
        for y, nb in enumerate(bob):
            p = np.einsum("jk,kj->", partial, nb)
            if abs(p.imag) > qmath.TOL:
                raise ValidationError(f"p({x},{y}) has imaginary part {p.imag:.3g}")
            values[x, y] = p.real
    score = float(np.sum(s.decomposition.beta * values))
    return CorrelationTable(values, score)


def expectation_vector(effect, states: Sequence[np.ndarray]) -> np.ndarray:
    return np.array([qmath.expectation(effect, s) for s in states])


def product_score(d: WitnessDecomposition, tau, omega, a_effect, b_effect) -> float:
    """sum_{x,y} beta[x,y] <A>_{tau_x} <B>_{omega_y}."""
    if len(tau) != d.shape[0] or len(omega) != d.shape[1]:
        raise DimensionError(f"need {d.shape[0]} tau and {d.shape[1]} omega inputs")
    a = expectation_vector(a_effect, tau)
    b = expectation_vector(b_effect, omega)
    return float(a @ d.beta @ b)


def product_scenario(d: WitnessDecomposition, tau, omega, a_effect, b_effect, sigma=None) -> GameScenario:
    """Embed single-party effects as A (x) I and I (x) B acting on a product shared state."""
    d_a, d_b = d.d_a, d.d_b
    if sigma is None:
        sigma = qmath.kron(qmath.projector(qmath.basis(d_a, 0)), qmath.projector(qmath.basis(d_b, 0)))
    return GameScenario(
        d,
        tuple(tau),
        tuple(omega),
        sigma,
        qmath.kron(a_effect, np.eye(d_a)),
        qmath.kron(np.eye(d_b), b_effect),
    )


def teleport_effects(d_a: int, d_b: int) -> tuple[np.ndarray, np.ndarray]:
    """Projectors onto |Phi+> for Alice (input, share) and Bob (share, input)."""
    return qmath.projector(qmath.max_entangled(d_a)), qmath.projector(qmath.max_entangled(d_b))


def teleport_scenario(d: WitnessDecomposition, rho, tau=None, omega=None) -> GameScenario:
    ea, eb = teleport_effects(d.d_a, d.d_b)
    return GameScenario(
        d,
        d.tau if tau is None else tuple(tau),
        d.omega if omega is None else tuple(omega),
        rho,
        ea,
        eb,
    )


def teleport_score(d: WitnessDecomposition, rho) -> float:
    """Score with maximally-entangled projections; equals Tr(W rho) / (d_A d_B)."""
    rho = qmath.density_matrix(rho, "rho")
    if rho.shape[0] != d.d_a * d.d_b:
        raise DimensionError(f"rho has dimension {rho.shape[0]}, expected {d.d_a * d.d_b}")
    return simulate(teleport_scenario(d, rho)).score
