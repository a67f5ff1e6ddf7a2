"""Imprecise lab inputs and the noise-robust entanglement criterion."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qmath
from .chi import ChiResult
from .game import GameScenario, simulate
from .qmath import DimensionError, ValidationError
from .witness import WitnessDecomposition, WitnessOperator

CERTIFY_MARGIN = 1e-12


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """Lab inputs (1 - p) * target + p * noise for each party.

    ``noise_tau`` / ``noise_omega`` left as ``None`` means the noise states are unknown.
    """

    p_a: float
    p_b: float
    noise_tau: tuple[np.ndarray, ...] | None = None
    noise_omega: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        for name in ("p_a", "p_b"):
            p = getattr(self, name)
            if not (0.0 <= p <= 1.0):
                raise ValidationError(f"{name} = {p} outside [0, 1]")
        for name in ("noise_tau", "noise_omega"):
            fam = getattr(self, name)
            if fam is not None:
                states = tuple(qmath.density_matrix(s, f"{name}[{i}]") for i, s in enumerate(fam))
                object.__setattr__(self, name, states)

    @property
    def mixing(self) -> float:
        """p_A + p_B - p_A p_B."""
        return self.p_a + self.p_b - self.p_a * self.p_b

    @property
    def has_noise_states(self) -> bool:
        return self.noise_tau is not None and self.noise_omega is not None


def _mix(targets: Sequence[np.ndarray], noise: Sequence[np.ndarray], p: float, name: str):
    if len(noise) != len(targets):
        raise DimensionError(f"{name}: {len(noise)} noise states for {len(targets)} inputs")
    out = []
    for i, (t, r) in enumerate(zip(targets, noise)):
        if r.shape != t.shape:
            raise DimensionError(f"{name}[{i}]: shape {r.shape} differs from input {t.shape}")
        out.append((1 - p) * t + p * r)
    return tuple(out)


def apply_noise(d: WitnessDecomposition, nm: NoiseModel):
    if not nm.has_noise_states:
        raise ValidationError("noise model has no explicit noise states")
    return (
        _mix(d.tau, nm.noise_tau, nm.p_a, "noise_tau"),
        _mix(d.omega, nm.noise_omega, nm.p_b, "noise_omega"),
    )


def _chi_value(c) -> float:
    return c.value if isinstance(c, ChiResult) else float(c)


def modified_bound(c: ChiResult | float, nm: NoiseModel) -> float:
    """(p_A + p_B - p_A p_B) * chi."""
    return nm.mixing * _chi_value(c)


def detection_threshold(w: WitnessOperator, c: ChiResult | float, dims: tuple[int, int] | None = None) -> float:
    """lambda_min / (d_A d_B chi); mixing below this leaves an entangled state detectable."""
    d_a, d_b = w.dims if dims is None else dims
    chi = _chi_value(c)
    if chi >= 0:
        raise ValidationError(f"chi = {chi} is not negative")
    if w.lambda_min >= 0:
        raise ValidationError(f"lambda_min = {w.lambda_min} is not negative")
    return w.lambda_min / (d_a * d_b * chi)


@dataclass(frozen=True)
class CriterionReport:
    score: float | None
    bound: float
    verdict: str
    threshold: float
    threshold_met: bool


def evaluate_criterion(
    d: WitnessDecomposition,
    nm: NoiseModel,
    c: ChiResult | float,
    w: WitnessOperator,
    rho=None,
    alice_effect=None,
    bob_effect=None,
) -> CriterionReport:
    """Simulate the noisy game and compare its score with the modified bound.

    Without explicit noise states (or without a state and effects) nothing is simulated;
    the report then carries only the bound and threshold.
    """
    bound = modified_bound(c, nm)
    threshold = detection_threshold(w, c)
    score = None
    verdict = "inconclusive"
    if nm.has_noise_states and rho is not None and alice_effect is not None and bob_effect is not None:
        tau, omega = apply_noise(d, nm)
        score = simulate(GameScenario(d, tau, omega, rho, alice_effect, bob_effect)).score
        if score < bound - CERTIFY_MARGIN:
            verdict = "entangled_certified"
    return CriterionReport(score, bound, verdict, threshold, bool(nm.mixing < threshold))
