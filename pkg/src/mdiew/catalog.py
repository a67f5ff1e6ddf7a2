"""Built-in scenarios: two Werner-witness decompositions and the XZ witness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import qmath
from .qmath import I2, PAULI, SIGMA_X, SIGMA_Z
from .witness import WitnessDecomposition

NAMES = ("werner_mub", "werner_pauli", "xz_example")

KET0 = qmath.basis(2, 0)
KET1 = qmath.basis(2, 1)
KET_PLUS = qmath.ket([1, 1])
KET_MINUS = qmath.ket([1, -1])
PSI_MINUS = qmath.ket([0, 1, -1, 0])


def werner_witness() -> np.ndarray:
    """I/2 - |Psi-><Psi-|."""
    return np.eye(4) / 2 - qmath.projector(PSI_MINUS)


def werner_state(p: float) -> np.ndarray:
    """p |Psi-><Psi-| + (1 - p) I/4."""
    return p * qmath.projector(PSI_MINUS) + (1 - p) * np.eye(4) / 4


RHO_THIRD = werner_state(1 / 3)


def xz_witness() -> np.ndarray:
    """I - sigma_x (x) sigma_x - sigma_z (x) sigma_z."""
    return np.eye(4) - np.kron(SIGMA_X, SIGMA_X) - np.kron(SIGMA_Z, SIGMA_Z)


def bloch_state(n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return (I2 + n[0] * PAULI[1] + n[1] * PAULI[2] + n[2] * PAULI[3]) / 2


def _bloch_ket(n) -> np.ndarray:
    return np.linalg.eigh(bloch_state(n))[1][:, -1]


def rho_third_components() -> list[tuple[float, np.ndarray, np.ndarray]]:
    """rho_{1/3} as (1/6) sum of |n, -n><n, -n| over the six axis directions."""
    axes = [np.eye(3)[i] * s for i in range(3) for s in (1, -1)]
    return [(1 / 6, _bloch_ket(n), _bloch_ket(-n)) for n in axes]


def werner_mub() -> WitnessDecomposition:
    n = np.ones(3) / np.sqrt(3)
    base = bloch_state(n)
    states = tuple(s @ base @ s for s in PAULI)
    beta = np.full((4, 4), -1 / 8) + np.eye(4) * (5 / 8 + 1 / 8)
    labels = tuple(str(x) for x in range(4))
    return WitnessDecomposition(beta, states, states, labels, labels)


def werner_pauli() -> WitnessDecomposition:
    index = [(x1, x2) for x1 in (0, 1) for x2 in (1, 2, 3)]
    states = tuple((I2 + (-1) ** x1 * PAULI[x2]) / 2 for x1, x2 in index)
    beta = np.array(
        [
            [(x2 == y2) * (3 * (x1 == y1) - 1) / 6 for (y1, y2) in index]
            for (x1, x2) in index
        ],
        dtype=float,
    )
    labels = tuple(f"({x1},{x2})" for x1, x2 in index)
    return WitnessDecomposition(beta, states, states, labels, labels)


XZ_BETA = np.array(
    [
        [0, 2, 0, 0],
        [2, 0, 0, 0],
        [0, 0, -1, 1],
        [0, 0, 1, -1],
    ],
    dtype=float,
)


def xz_example() -> WitnessDecomposition:
    states = tuple(qmath.projector(k) for k in (KET0, KET1, KET_PLUS, KET_MINUS))
    labels = ("0", "1", "+", "-")
    return WitnessDecomposition(XZ_BETA, states, states, labels, labels)


def xz_attack_inputs(p_a: float, p_b: float):
    """Lab inputs that drive the XZ score down to -(p_A + p_B - p_A p_B) with A = B = |-><-|."""
    plus, minus = qmath.projector(KET_PLUS), qmath.projector(KET_MINUS)
    zero, one = qmath.projector(KET0), qmath.projector(KET1)

    def family(p):
        return ((1 - p) * zero + p * plus, (1 - p) * one + p * plus, plus, minus)

    return family(p_a), family(p_b)


def xz_attack_noise():
    """Noise states realizing the attack inputs as (1 - p) target + p noise."""
    plus = qmath.projector(KET_PLUS)
    d = xz_example()
    states = (plus, plus, d.tau[2], d.tau[3])
    return states, states


@dataclass(frozen=True, eq=False)
class NamedScenario:
    name: str
    decomposition: WitnessDecomposition
    operator: np.ndarray
    reference_values: dict[str, tuple[float, str]]
    separable_components: list = field(default_factory=list)
    attack_family: Callable | None = None


def load(name: str) -> NamedScenario:
    if name == "werner_mub":
        return NamedScenario(
            name,
            werner_mub(),
            werner_witness(),
            {
                "lambda_min": (-0.5, "derived"),
                "chi": (-0.5, "derived"),
                "beta_diagonal": (5 / 8, "stated"),
                "beta_off_diagonal": (-1 / 8, "stated"),
                "tr_w_rho_third": (0.0, "stated"),
            },
            rho_third_components(),
        )
    if name == "werner_pauli":
        return NamedScenario(
            name,
            werner_pauli(),
            werner_witness(),
            {
                "lambda_min": (-0.5, "derived"),
                "term_03_03_rho_third": (1 / 18, "stated"),
                "tr_w_rho_third": (0.0, "stated"),
            },
            rho_third_components(),
        )
    if name == "xz_example":
        return NamedScenario(
            name,
            xz_example(),
            xz_witness(),
            {
                "lambda_min": (-1.0, "derived"),
                "chi": (-1.0, "stated"),
                "detection_threshold": (0.25, "derived"),
            },
            [(1.0, KET0, KET0)],
            xz_attack_inputs,
        )
    raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(NAMES)}")


def attack_inputs(name: str, p_a: float, p_b: float):
    scenario = load(name)
    if scenario.attack_family is None:
        raise KeyError(f"scenario {name!r} has no attack family")
    return scenario.attack_family(p_a, p_b)


def term_against(d: WitnessDecomposition, x: int, y: int, rho) -> float:
    """beta[x,y] Tr(tau_x^T (x) omega_y^T rho)."""
    return d.beta[x, y] * qmath.expectation(qmath.kron(d.tau[x].T, d.omega[y].T), rho)
