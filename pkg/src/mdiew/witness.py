"""Witness decompositions, operator reconstruction and the separable floor."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import qmath
from .qmath import DimensionError, ValidationError

FLOOR_RESTARTS = 200
FLOOR_ITERATIONS = 100
WEAK_OPT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class WitnessDecomposition:
    """Coefficients ``beta`` (m x n) with Alice's inputs ``tau`` and Bob's inputs ``omega``.

    With ``pure_inputs`` set every reference input must be a pure state.
    """

    beta: np.ndarray
    tau: tuple[np.ndarray, ...]
    omega: tuple[np.ndarray, ...]
    tau_labels: tuple[str, ...] | None = None
    omega_labels: tuple[str, ...] | None = None
    pure_inputs: bool = True

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float)
        if beta.ndim != 2:
            raise DimensionError(f"beta: expected a 2D array, got shape {beta.shape}")
        if not np.all(np.isfinite(beta)):
            raise ValidationError("beta: non-finite entries")
        if not np.any(beta):
            raise ValidationError("beta: all entries are zero")
        m, n = beta.shape
        if len(self.tau) != m or len(self.omega) != n:
            raise DimensionError(
                f"beta is {m}x{n} but got {len(self.tau)} tau and {len(self.omega)} omega states"
            )
        tau = tuple(qmath.density_matrix(t, f"tau[{i}]") for i, t in enumerate(self.tau))
        omega = tuple(qmath.density_matrix(w, f"omega[{i}]") for i, w in enumerate(self.omega))
        for name, fam in (("tau", tau), ("omega", omega)):
            d0 = fam[0].shape[0]
            for i, s in enumerate(fam):
                if s.shape[0] != d0:
                    raise DimensionError(f"{name}[{i}]: dimension {s.shape[0]} differs from {d0}")
                if self.pure_inputs and not qmath.is_pure(s):
                    raise ValidationError(f"{name}[{i}]: not a pure state")
        for name, labels, size in (("tau_labels", self.tau_labels, m), ("omega_labels", self.omega_labels, n)):
            if labels is not None and len(labels) != size:
                raise DimensionError(f"{name}: {len(labels)} labels for {size} inputs")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "omega", omega)
        if self.tau_labels is not None:
            object.__setattr__(self, "tau_labels", tuple(self.tau_labels))
        if self.omega_labels is not None:
            object.__setattr__(self, "omega_labels", tuple(self.omega_labels))

    @property
    def shape(self) -> tuple[int, int]:
        return self.beta.shape

    @property
    def d_a(self) -> int:
        return self.tau[0].shape[0]

    @property
    def d_b(self) -> int:
        return self.omega[0].shape[0]

    def with_beta(self, beta) -> "WitnessDecomposition":
        return WitnessDecomposition(
            beta, self.tau, self.omega, self.tau_labels, self.omega_labels, self.pure_inputs
        )

    def index_of(self, tau_label: str, omega_label: str) -> tuple[int, int]:
        if self.tau_labels is None or self.omega_labels is None:
            raise KeyError("decomposition carries no labels")
        return self.tau_labels.index(tau_label), self.omega_labels.index(omega_label)


@dataclass(frozen=True)
class ProductMinimum:
    value: float
    psi: np.ndarray
    phi: np.ndarray

    @property
    def state(self) -> np.ndarray:
        return qmath.kron(qmath.projector(self.psi), qmath.projector(self.phi))


@dataclass(frozen=True, eq=False)
class WitnessOperator:
    matrix: np.ndarray
    dims: tuple[int, int]
    lambda_min: float = field(init=False)

    def __post_init__(self):
        m = qmath.hermitian(self.matrix, "witness")
        if m.shape[0] != self.dims[0] * self.dims[1]:
            raise DimensionError(f"witness of size {m.shape[0]} is not {self.dims[0]}x{self.dims[1]}")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "lambda_min", qmath.lambda_min(m))

    @cached_property
    def separable_floor(self) -> float:
        return separable_floor(self)


def reconstruct(d: WitnessDecomposition) -> WitnessOperator:
    """W = sum_{x,y} beta[x,y] tau_x^T (x) omega_y^T."""
    # Contract beta against Bob's inputs first: W = sum_x tau_x^T (x) (sum_y beta[x,y] omega_y^T).
    omega_t = np.stack([s.T for s in d.omega])
    w = np.zeros((d.d_a * d.d_b,) * 2, dtype=complex)
    for x, t in enumerate(d.tau):
        row = np.tensordot(d.beta[x], omega_t, axes=1)
        w += np.kron(t.T, row)
    return WitnessOperator(w, (d.d_a, d.d_b))


def _conditioned(w4: np.ndarray, vec: np.ndarray, side: int) -> np.ndarray:
    # w4 is W reshaped to (dA, dB, dA, dB); contract out one party with |vec>.
    if side == 1:
        return np.einsum("ajbk,j,k->ab", w4, vec.conj(), vec)
    return np.einsum("iajb,i,j->ab", w4, vec.conj(), vec)


def product_minimum(
    w: WitnessOperator,
    restarts: int = FLOOR_RESTARTS,
    iterations: int = FLOOR_ITERATIONS,
    seed: int = 0,
) -> ProductMinimum:
    """Alternating minimization of <psi phi|W|psi phi> over pure product states.

    Each restart draws its starting vector from ``default_rng([seed, restart])`` so the
    result is independent of evaluation order.
    """
    d_a, d_b = w.dims
    if d_a < 1 or d_b < 1:
        raise DimensionError("witness has no bipartition")
    w4 = w.matrix.reshape(d_a, d_b, d_a, d_b)
    best: ProductMinimum | None = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        phi = qmath.random_ket(d_b, rng)
        value = np.inf
        for _ in range(iterations):
            psi = qmath.min_eigvec(_conditioned(w4, phi, 1))
            vals, vecs = np.linalg.eigh(_conditioned(w4, psi, 0))
            phi = vecs[:, 0]
            prev, value = value, float(vals[0])
            if prev - value < 1e-15:
                break
        if best is None or value < best.value:
            best = ProductMinimum(value, psi, phi)
    return best


def separable_floor(
    w: WitnessOperator,
    restarts: int = FLOOR_RESTARTS,
    iterations: int = FLOOR_ITERATIONS,
    seed: int = 0,
) -> float:
    """Upper estimate of min over separable states of Tr(W sigma)."""
    return product_minimum(w, restarts, iterations, seed).value


@dataclass(frozen=True)
class WeakOptimality:
    passed: bool
    separable_floor: float
    lambda_min: float


def verify_weak_optimality(w: WitnessOperator, floor: float | None = None) -> WeakOptimality:
    f = w.separable_floor if floor is None else floor
    ok = abs(f) <= WEAK_OPT_TOL and w.lambda_min < -WEAK_OPT_TOL
    return WeakOptimality(bool(ok), float(f), w.lambda_min)


def product_expectations(d: WitnessDecomposition, psi: Sequence, phi: Sequence) -> tuple[np.ndarray, np.ndarray]:
    """Vectors Tr(tau_x^T |psi><psi|) and Tr(omega_y^T |phi><phi|)."""
    pa, pb = qmath.projector(psi), qmath.projector(phi)
    a = np.array([qmath.expectation(t.T, pa) for t in d.tau])
    b = np.array([qmath.expectation(s.T, pb) for s in d.omega])
    return a, b
