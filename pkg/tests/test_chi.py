import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mdiew import catalog
from mdiew.chi import (
    EnumerationLimitError,
    achieve_chi,
    brute_force_chi,
    compute_chi,
    corner_optimality_check,
)
from mdiew.game import simulate


def test_xz_chi_and_argmin():
    c = compute_chi(catalog.XZ_BETA)
    assert c.value == -1.0
    assert (c.argmin_a, c.argmin_b) == ((0, 0, 1, 0), (0, 0, 1, 0))
    assert c.tie_count == sum(
        1
        for a in itertools.product((0, 1), repeat=4)
        for b in itertools.product((0, 1), repeat=4)
        if np.array(a) @ catalog.XZ_BETA @ np.array(b) == -1
    )


def test_werner_mub_chi_against_full_enumeration():
    beta = catalog.werner_mub().beta
    c = compute_chi(beta)
    assert c.value == pytest.approx(-0.5, abs=1e-15)
    assert brute_force_chi(beta) == pytest.approx(c.value, abs=1e-15)
    assert np.array(c.argmin_a) @ beta @ np.array(c.argmin_b) == pytest.approx(-0.5)


def test_nonnegative_matrix_has_zero_chi():
    c = compute_chi(np.ones((3, 2)))
    assert c.value == 0.0
    assert c.argmin_a == (0, 0, 0) and c.argmin_b == (0, 0)


def test_single_negative_entry():
    r = np.zeros((2, 3))
    r[1, 2] = -0.7
    c = compute_chi(r)
    assert c.value == -0.7
    assert c.argmin_a[1] == 1 and c.argmin_b[2] == 1


@settings(max_examples=80, deadline=None)
@given(
    st.integers(1, 5).flatmap(
        lambda m: st.integers(1, 5).flatmap(
            lambda n: arrays(np.float64, (m, n), elements=st.floats(-3, 3, allow_nan=False))
        )
    )
)
def test_matches_brute_force(r):
    c = compute_chi(r)
    assert c.value == pytest.approx(brute_force_chi(r), abs=1e-12)
    assert c.value <= min(0.0, r.min()) + 1e-15
    assert np.array(c.argmin_a) @ r @ np.array(c.argmin_b) == pytest.approx(c.value, abs=1e-12)
    assert c.tie_count >= 1


@settings(max_examples=30, deadline=None)
@given(arrays(np.int64, (3, 3), elements=st.integers(-2, 2)))
def test_integer_ties_counted_exactly(r):
    r = r.astype(float)
    c = compute_chi(r)
    count = sum(
        1
        for a in itertools.product((0, 1), repeat=3)
        for b in itertools.product((0, 1), repeat=3)
        if np.array(a) @ r @ np.array(b) == c.value
    )
    assert c.tie_count == count


def test_transpose_invariance(rng):
    for _ in range(20):
        r = rng.normal(size=(4, 3))
        assert compute_chi(r.T).value == pytest.approx(compute_chi(r).value, abs=1e-12)


def test_enumeration_guard():
    with pytest.raises(EnumerationLimitError):
        compute_chi(np.ones((25, 2)))
    with pytest.raises(ValueError):
        compute_chi(np.array([[np.inf]]))


def test_achieve_chi_scores_exactly(scenario):
    d = scenario.decomposition
    c = compute_chi(d.beta)
    assert abs(simulate(achieve_chi(d, c)).score - c.value) <= 1e-12


def test_corner_check_never_beats_chi(scenario):
    check = corner_optimality_check(scenario.decomposition.beta, samples=20_000, seed=5)
    assert check.passed
    assert check.sample_min >= check.chi - 1e-9
