import numpy as np
import pytest

from mdiew import catalog, qmath
from mdiew.chi import compute_chi
from mdiew.game import expectation_vector, product_score, teleport_effects
from mdiew.noise import (
    NoiseModel,
    apply_noise,
    detection_threshold,
    evaluate_criterion,
    modified_bound,
)
from mdiew.qmath import DimensionError, ValidationError
from mdiew.witness import reconstruct

PHI_PLUS = qmath.projector(qmath.max_entangled(2))


def test_endpoints_of_noise_model():
    d = catalog.xz_example()
    noise = [np.eye(2) / 2] * 4
    tau, omega = apply_noise(d, NoiseModel(0, 0, noise, noise))
    for got, want in zip(tau + omega, d.tau + d.omega):
        np.testing.assert_array_equal(got, want)
    tau, _ = apply_noise(d, NoiseModel(1, 1, noise, noise))
    for t in tau:
        np.testing.assert_allclose(t, np.eye(2) / 2)


def test_xz_attack_noise_expectations():
    d = catalog.xz_example()
    nt, no = catalog.xz_attack_noise()
    tau, omega = apply_noise(d, NoiseModel(0.3, 0.5, nt, no))
    minus = qmath.projector(catalog.KET_MINUS)
    np.testing.assert_allclose(expectation_vector(minus, tau), [0.35, 0.35, 0, 1], atol=1e-15)
    np.testing.assert_allclose(expectation_vector(minus, omega), [0.25, 0.25, 0, 1], atol=1e-15)


def test_modified_bound_values():
    assert modified_bound(-1.0, NoiseModel(0, 0)) == 0
    assert modified_bound(-0.7, NoiseModel(1, 1)) == -0.7
    assert modified_bound(-1.0, NoiseModel(0.1, 0.2)) == pytest.approx(-0.28, abs=1e-15)
    assert modified_bound(compute_chi(catalog.XZ_BETA), NoiseModel(0.5, 0.5)) == -0.75


def test_detection_thresholds():
    for d in (catalog.xz_example(), catalog.werner_mub()):
        w = reconstruct(d)
        c = compute_chi(d.beta)
        assert detection_threshold(w, c) == pytest.approx(0.25, abs=1e-12)
        scaled = d.with_beta(3.5 * d.beta)
        assert detection_threshold(reconstruct(scaled), compute_chi(scaled.beta)) == pytest.approx(0.25, abs=1e-12)


def test_threshold_rejects_non_negative_chi():
    w = reconstruct(catalog.xz_example())
    with pytest.raises(ValidationError):
        detection_threshold(w, 0.0)


def test_teleport_certification():
    d = catalog.xz_example()
    nm = NoiseModel(0.1, 0.1, d.tau, d.omega)
    ea, eb = teleport_effects(2, 2)
    rep = evaluate_criterion(d, nm, compute_chi(d.beta), reconstruct(d), PHI_PLUS, ea, eb)
    assert rep.score == pytest.approx(-0.25, abs=1e-12)
    assert rep.bound == pytest.approx(-0.19, abs=1e-15)
    assert rep.verdict == "entangled_certified"
    assert rep.threshold_met


def test_attack_scenario_is_inconclusive():
    d = catalog.xz_example()
    minus = qmath.projector(catalog.KET_MINUS)
    nt, no = catalog.xz_attack_noise()
    c = compute_chi(d.beta)
    for p_a, p_b in [(0.0, 0.0), (0.1, 0.4), (0.5, 0.5), (1.0, 0.3)]:
        nm = NoiseModel(p_a, p_b, nt, no)
        rep = evaluate_criterion(
            d, nm, c, reconstruct(d),
            np.kron(qmath.projector(catalog.KET0), qmath.projector(catalog.KET0)),
            np.kron(minus, np.eye(2)),
            np.kron(np.eye(2), minus),
        )
        assert rep.score == pytest.approx(rep.bound, abs=1e-12)
        assert rep.verdict == "inconclusive"


def test_without_noise_states_nothing_is_simulated():
    d = catalog.xz_example()
    rep = evaluate_criterion(d, NoiseModel(0.1, 0.1), -1.0, reconstruct(d), PHI_PLUS, *teleport_effects(2, 2))
    assert rep.score is None and rep.verdict == "inconclusive"


def test_separable_soundness_sample(scenario, rng):
    d = scenario.decomposition
    c = compute_chi(d.beta)
    for _ in range(100):
        p_a, p_b = rng.uniform(size=2)
        nm = NoiseModel(p_a, p_b, [qmath.random_density(2, rng) for _ in d.tau],
                        [qmath.random_density(2, rng) for _ in d.omega])
        tau, omega = apply_noise(d, nm)
        score = product_score(d, tau, omega, qmath.random_effect(2, rng), qmath.random_effect(2, rng))
        assert score >= modified_bound(c, nm) - 1e-9


def test_noise_model_validation():
    d = catalog.xz_example()
    with pytest.raises(ValidationError, match="p_a"):
        NoiseModel(1.2, 0)
    with pytest.raises(DimensionError):
        apply_noise(d, NoiseModel(0.1, 0.1, d.tau[:2], d.omega))
    with pytest.raises(ValidationError, match=r"noise_tau\[0\]"):
        NoiseModel(0.1, 0.1, [np.eye(2)], None)
