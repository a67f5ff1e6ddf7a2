import numpy as np
import pytest

from mdiew import catalog, qmath
from mdiew.qmath import DimensionError, ValidationError
from mdiew.witness import (
    WitnessDecomposition,
    product_expectations,
    product_minimum,
    reconstruct,
    separable_floor,
    verify_weak_optimality,
)


def naive_reconstruct(d):
    return sum(
        d.beta[x, y] * np.kron(d.tau[x].T, d.omega[y].T)
        for x in range(d.shape[0])
        for y in range(d.shape[1])
    )


def test_reconstruct_matches_reference_operators(scenario):
    w = reconstruct(scenario.decomposition)
    assert np.max(np.abs(w.matrix - scenario.operator)) <= 1e-12
    np.testing.assert_allclose(w.matrix, naive_reconstruct(scenario.decomposition), atol=1e-13)


def test_reconstruct_random_qutrit_qubit(rng):
    tau = [qmath.random_density(3, rng, rank=1) for _ in range(3)]
    omega = [qmath.random_density(2, rng, rank=1) for _ in range(2)]
    d = WitnessDecomposition(rng.normal(size=(3, 2)), tau, omega)
    w = reconstruct(d)
    assert w.dims == (3, 2)
    np.testing.assert_allclose(w.matrix, naive_reconstruct(d), atol=1e-12)


def test_transpose_is_in_computational_basis():
    # A complex input state exposes the transpose: |+i><+i|^T = |-i><-i|.
    plus_i = qmath.projector(qmath.ket([1, 1j]))
    d = WitnessDecomposition(np.array([[1.0]]), [plus_i], [qmath.projector(qmath.basis(2, 0))])
    minus_i = qmath.projector(qmath.ket([1, -1j]))
    np.testing.assert_allclose(
        reconstruct(d).matrix, np.kron(minus_i, qmath.projector(qmath.basis(2, 0))), atol=1e-15
    )


def test_lambda_min_reference_values():
    assert reconstruct(catalog.werner_mub()).lambda_min == pytest.approx(-0.5, abs=1e-8)
    assert reconstruct(catalog.werner_pauli()).lambda_min == pytest.approx(-0.5, abs=1e-8)
    assert reconstruct(catalog.xz_example()).lambda_min == pytest.approx(-1.0, abs=1e-8)


def test_separable_floors_are_zero(scenario):
    w = reconstruct(scenario.decomposition)
    assert abs(w.separable_floor) <= 1e-6
    check = verify_weak_optimality(w)
    assert check.passed


def test_floor_is_an_upper_bound_on_product_expectations(rng):
    w = reconstruct(catalog.xz_example())
    floor = separable_floor(w, seed=1)
    for _ in range(200):
        psi, phi = qmath.random_ket(2, rng), qmath.random_ket(2, rng)
        assert qmath.expectation(w.matrix, qmath.kron(qmath.projector(psi), qmath.projector(phi))) >= floor - 1e-9


def test_product_minimum_returns_its_state():
    w = reconstruct(catalog.werner_mub())
    pm = product_minimum(w, seed=3)
    assert qmath.expectation(w.matrix, pm.state) == pytest.approx(pm.value, abs=1e-12)


def test_positive_operator_is_not_an_entanglement_witness():
    zero = qmath.projector(qmath.basis(2, 0))
    d = WitnessDecomposition(np.array([[1.0]]), [zero], [zero])
    check = verify_weak_optimality(reconstruct(d))
    assert not check.passed


def test_product_expectations_give_score():
    d = catalog.xz_example()
    a, b = product_expectations(d, catalog.KET_MINUS, catalog.KET_MINUS)
    w = reconstruct(d)
    direct = qmath.expectation(w.matrix, np.kron(qmath.projector(catalog.KET_MINUS), qmath.projector(catalog.KET_MINUS)))
    assert a @ d.beta @ b == pytest.approx(direct, abs=1e-12)


def test_decomposition_validation():
    zero = qmath.projector(qmath.basis(2, 0))
    with pytest.raises(DimensionError, match="beta is 2x1"):
        WitnessDecomposition(np.ones((2, 1)), [zero], [zero])
    with pytest.raises(ValidationError, match=r"tau\[0\]: not a pure state"):
        WitnessDecomposition(np.ones((1, 1)), [np.eye(2) / 2], [zero])
    WitnessDecomposition(np.ones((1, 1)), [np.eye(2) / 2], [zero], pure_inputs=False)
    with pytest.raises(ValidationError, match="non-finite"):
        WitnessDecomposition(np.array([[np.nan]]), [zero], [zero])
    with pytest.raises(DimensionError):
        WitnessDecomposition(np.ones((2, 1)), [zero, np.eye(3) / 3], [zero], pure_inputs=False)


def test_labels_lookup():
    d = catalog.werner_pauli()
    assert d.index_of("(0,3)", "(0,3)") == (2, 2)
    with pytest.raises(ValueError):
        d.index_of("(9,9)", "(0,1)")
