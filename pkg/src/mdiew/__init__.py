"""Measurement-device-independent entanglement witnesses: construction, noise-robust bounds, attacks."""

from .chi import ChiResult, achieve_chi, brute_force_chi, compute_chi, corner_optimality_check
from .game import CorrelationTable, GameScenario, product_score, simulate, teleport_scenario, teleport_score
from .noise import CriterionReport, NoiseModel, apply_noise, detection_threshold, evaluate_criterion, modified_bound
from .qmath import DimensionError, ValidationError
from .scenario_io import ScenarioDocument, ScenarioError, parse, serialize
from .sensitivity import (
    AttackCertificate,
    InconsistencyError,
    PreconditionError,
    SensitivityCertificate,
    certify,
    check_condition,
    check_corollary4,
    check_from_separable_state,
    construct_attack,
    lemma2_perturb,
    verify_attack,
)
from .witness import WitnessDecomposition, WitnessOperator, reconstruct, separable_floor, verify_weak_optimality

__version__ = "0.1.0"
