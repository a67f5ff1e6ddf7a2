"""Sensitivity of witness decompositions to imprecise input states.

A decomposition is sensitive when every imprecision budget eps > 0 admits lab inputs
within overlap 1 - eps of the targets, plus single-party effects, whose product score
is negative. The routines here decide sensitivity from sufficient conditions and build
the explicit attack when one applies.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from . import qmath
from .game import expectation_vector, product_score
from .qmath import DimensionError, ValidationError
from .witness import WitnessDecomposition, product_minimum, reconstruct

COND_TOL = 1e-9
ZERO_BETA = 1e-12
NEGATIVE_EIG = -1e-10
FLOOR_TOL = 1e-8
STRICT = 1e-12
P1_TOL = 1e-12
SHIFT_TOL = 1e-9

VERDICTS = ("sensitive_cor4", "sensitive_cond_i", "sensitive_cond_ii", "unknown")
CASES = ("appendix_b_a", "appendix_b_bi", "appendix_b_bii")


class PreconditionError(ValueError):
    """Inputs violate the preconditions of the perturbation construction."""


class InconsistencyError(RuntimeError):
    """A construction that must succeed in exact arithmetic failed numerically."""


@dataclass(frozen=True, eq=False)
class SensitivityCertificate:
    verdict: str
    a_tilde: np.ndarray | None = None
    b_tilde: np.ndarray | None = None
    witnessing_indices: tuple[int, int] | None = None
    product_component: tuple[np.ndarray, np.ndarray] | None = None
    # Which clause the effects satisfy ("cond_i" / "cond_ii"); also set under cor4.
    condition: str | None = None

    @property
    def sensitive(self) -> bool:
        return self.verdict != "unknown"


def check_corollary4(d: WitnessDecomposition) -> bool:
    """Every coefficient nonzero implies sensitivity."""
    return bool(np.all(np.abs(d.beta) > ZERO_BETA))


def _side_vectors(d: WitnessDecomposition, a_tilde, b_tilde) -> tuple[np.ndarray, np.ndarray]:
    if a_tilde.shape[0] != d.d_a or b_tilde.shape[0] != d.d_b:
        raise DimensionError(
            f"effects of size {a_tilde.shape[0]}, {b_tilde.shape[0]} do not match inputs {d.d_a}, {d.d_b}"
        )
    return expectation_vector(a_tilde, d.tau), expectation_vector(b_tilde, d.omega)


def check_condition(d: WitnessDecomposition, a_tilde, b_tilde) -> SensitivityCertificate:
    """Classify a pair of effects against the two sufficient clauses.

    Clause (i) requires every product <A>_{tau_x} <B>_{omega_y} to vanish. It is only
    accepted when the vanishing side's effect is itself nonzero, since the attack mixes
    that effect (normalized by its trace) into one input.
    """
    a_tilde = qmath.povm_element(a_tilde, "a_tilde")
    b_tilde = qmath.povm_element(b_tilde, "b_tilde")
    alpha, bvec = _side_vectors(d, a_tilde, b_tilde)
    prods = np.outer(alpha, bvec)
    if np.all(np.abs(prods) <= COND_TOL):
        alice_ok = np.all(np.abs(alpha) <= COND_TOL) and np.trace(a_tilde).real > COND_TOL
        bob_ok = np.all(np.abs(bvec) <= COND_TOL) and np.trace(b_tilde).real > COND_TOL
        if alice_ok or bob_ok:
            return SensitivityCertificate("sensitive_cond_i", a_tilde, b_tilde, condition="cond_i")
        return SensitivityCertificate("unknown")
    terms = d.beta * prods
    if abs(terms.sum()) <= COND_TOL:
        hits = np.argwhere(np.abs(terms) > COND_TOL)
        if len(hits):
            i, j = (int(v) for v in hits[0])
            return SensitivityCertificate(
                "sensitive_cond_ii", a_tilde, b_tilde, (i, j), condition="cond_ii"
            )
    return SensitivityCertificate("unknown")


def _pure_vector(s) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    if s.ndim == 1:
        return qmath.ket(s)
    rho = qmath.density_matrix(s)
    if not qmath.is_pure(rho):
        raise ValidationError("product component is not pure")
    return np.linalg.eigh(rho)[1][:, -1]


def _components(components) -> list[tuple[float, np.ndarray, np.ndarray]]:
    out = []
    for i, comp in enumerate(components):
        weight, psi, phi = comp
        if weight < 0:
            raise ValidationError(f"components[{i}]: negative weight {weight}")
        out.append((float(weight), _pure_vector(psi), _pure_vector(phi)))
    total = sum(w for w, _, _ in out)
    if abs(total - 1.0) > qmath.TOL:
        raise ValidationError(f"component weights sum to {total}, not 1")
    return out


def separable_mixture(components) -> np.ndarray:
    return sum(w * qmath.kron(qmath.projector(p), qmath.projector(q)) for w, p, q in _components(components))


def check_from_separable_state(d: WitnessDecomposition, components) -> SensitivityCertificate:
    """Derive effects from product components of a separable state with Tr(W sigma) = 0.

    Components are ``(weight, psi, phi)`` with ``psi``/``phi`` kets or pure density matrices.
    The first component yielding a sensitive classification wins.
    """
    comps = _components(components)
    w = reconstruct(d)
    sigma = sum(wt * qmath.kron(qmath.projector(p), qmath.projector(q)) for wt, p, q in comps)
    val = qmath.expectation(w.matrix, sigma)
    if abs(val) > FLOOR_TOL:
        raise ValidationError(f"Tr(W sigma) = {val:.3g} does not vanish")
    for _, psi, phi in comps:
        cert = check_condition(d, qmath.projector(psi).T, qmath.projector(phi).T)
        if cert.sensitive:
            return replace(cert, product_component=(psi, phi))
    return SensitivityCertificate("unknown")


@dataclass(frozen=True, eq=False)
class PerturbationPlan:
    delta: float
    effect: np.ndarray
    auxiliary: tuple[np.ndarray, ...]
    y0: float
    y: float
    weights: np.ndarray
    states: tuple[np.ndarray, ...]
    target_values: np.ndarray
    direction: np.ndarray

    def shifts(self) -> np.ndarray:
        return expectation_vector(self.effect, self.states) - self.target_values


def _trivial_plan(e_tilde, taus, vals, e) -> PerturbationPlan:
    return PerturbationPlan(
        0.0, e_tilde, tuple(taus), np.inf, 0.0, np.zeros(len(taus)), tuple(taus), vals, e
    )


def lemma2_perturb(
    e_tilde,
    tau_tilde: Sequence,
    k: int,
    e: Sequence[float],
    epsilon: float,
    y: float | None = None,
) -> PerturbationPlan:
    """Shift the expectations <E~>_{tau~_x} by y * e_x using a nearby effect and nearby inputs.

    Inputs ``x < k`` must sit strictly above the smallest eigenvalue of ``e_tilde``;
    inputs ``x >= k`` may only move up (``e_x >= 0``). The result satisfies
    ``<E>_{tau_x} = <E~>_{tau~_x} + y e_x`` with ``Tr(tau_x tau~_x) >= 1 - epsilon``.
    ``y`` defaults to the largest admissible step ``y0``.
    """
    et = qmath.povm_element(e_tilde, "e_tilde")
    taus = [qmath.density_matrix(t, f"tau_tilde[{i}]") for i, t in enumerate(tau_tilde)]
    for i, t in enumerate(taus):
        if t.shape != et.shape:
            raise DimensionError(f"tau_tilde[{i}]: shape {t.shape} differs from effect {et.shape}")
        if not qmath.is_pure(t):
            raise PreconditionError(f"tau_tilde[{i}] is not pure")
    e = np.asarray(e, dtype=float)
    m = len(taus)
    if e.shape != (m,):
        raise DimensionError(f"direction has shape {e.shape}, expected ({m},)")
    if not (0 < epsilon <= 1):
        raise PreconditionError(f"epsilon = {epsilon} outside (0, 1]")
    if not (0 <= k <= m):
        raise PreconditionError(f"k = {k} outside [0, {m}]")

    eig = qmath.eig_hermitian(et)
    lam1, laml = eig.lambda_max, eig.lambda_min
    vals = expectation_vector(et, taus)
    for x in range(k):
        if not vals[x] > laml + STRICT:
            raise PreconditionError(f"index {x}: <E~> = {vals[x]:.6g} not above lambda_min = {laml:.6g}")
        if not lam1 < 1 - STRICT:
            raise PreconditionError(f"index {x}: lambda_max(E~) = {lam1:.6g} is not below 1")
    for x in range(k, m):
        if e[x] < 0:
            raise PreconditionError(f"index {x}: negative direction {e[x]:.6g} at a non-interior input")

    if not np.any(e):
        return _trivial_plan(et, taus, vals, e)
    if not lam1 < 1 - STRICT:
        raise PreconditionError(f"lambda_max(E~) = {lam1:.6g} is not below 1")

    p_top = eig.projectors[0]
    p_bot = eig.projectors[-1]
    top = expectation_vector(p_top, taus)
    hit = top > P1_TOL
    delta = 1 - lam1
    if np.any(hit):
        delta = min(delta, float(np.min(epsilon / 2 * (vals[hit] - laml))))
    if not delta > 0:
        raise PreconditionError("degenerate effect: no room to lift the top eigenspace")

    effect = et + delta * p_top
    top_state = p_top / np.trace(p_top).real
    bot_state = p_bot / np.trace(p_bot).real
    aux, fixed = [], []
    for x in range(m):
        if hit[x]:
            aux.append(bot_state)
            fixed.append(False)
        elif e[x] == 0:
            aux.append(taus[x])
            fixed.append(True)
        else:
            aux.append(top_state if e[x] > 0 else bot_state)
            fixed.append(False)

    aux_vals = expectation_vector(effect, aux)
    new_vals = expectation_vector(effect, taus)
    moving = e != 0
    bounds = []
    for x in range(m):
        if not moving[x]:
            continue
        if hit[x]:
            bounds.append(delta * top[x] / abs(e[x]))
        else:
            bounds.append(epsilon * (aux_vals[x] - vals[x]) / e[x])
    y0 = float(min(bounds))
    if not y0 > 0:
        raise InconsistencyError(f"step bound y0 = {y0} is not positive")
    if y is None:
        y = y0
    elif not (0 < y <= y0 * (1 + 1e-12)):
        raise PreconditionError(f"y = {y} outside (0, y0 = {y0}]")

    weights = np.empty(m)
    for x in range(m):
        if fixed[x]:
            weights[x] = epsilon
        else:
            weights[x] = (y * e[x] - delta * top[x]) / (aux_vals[x] - new_vals[x])
    if np.any(weights < -1e-12) or np.any(weights > epsilon + 1e-12):
        raise InconsistencyError(f"mixing weights {weights} outside [0, {epsilon}]")
    weights = np.clip(weights, 0.0, epsilon)
    states = tuple((1 - p) * t + p * r for p, t, r in zip(weights, taus, aux))
    return PerturbationPlan(float(delta), effect, tuple(aux), y0, float(y), weights, states, vals, e)


def _perturb_side(effect, states, e, epsilon, y=None) -> PerturbationPlan:
    # Put inputs that must move down first so they fall under the strict-interior bound k.
    e = np.asarray(e, dtype=float)
    order = np.argsort(e >= 0, kind="stable")
    k = int(np.sum(e < 0))
    plan = lemma2_perturb(effect, [states[i] for i in order], k, e[order], epsilon, y)
    inv = np.argsort(order)
    return PerturbationPlan(
        plan.delta,
        plan.effect,
        tuple(plan.auxiliary[i] for i in inv),
        plan.y0,
        plan.y,
        plan.weights[inv],
        tuple(plan.states[i] for i in inv),
        plan.target_values[inv],
        plan.direction[inv],
    )


@dataclass(frozen=True, eq=False)
class AttackCertificate:
    epsilon: float
    a_effect: np.ndarray
    b_effect: np.ndarray
    tau: tuple[np.ndarray, ...]
    omega: tuple[np.ndarray, ...]
    achieved_score: float
    min_overlap: float
    construction_case: str
    notes: tuple[str, ...] = ()


def _min_overlap(d: WitnessDecomposition, tau, omega) -> float:
    ov = [qmath.overlap(t, tt) for t, tt in zip(tau, d.tau)]
    ov += [qmath.overlap(w, wt) for w, wt in zip(omega, d.omega)]
    return float(min(ov))


def verify_attack(d: WitnessDecomposition, att: AttackCertificate) -> bool:
    """Recompute the score and overlaps from the certificate's own fields."""
    for i, s in enumerate(att.tau + att.omega):
        qmath.density_matrix(s, f"attack input {i}")
    qmath.povm_element(att.a_effect)
    qmath.povm_element(att.b_effect)
    score = product_score(d, att.tau, att.omega, att.a_effect, att.b_effect)
    return bool(
        abs(score - att.achieved_score) <= SHIFT_TOL
        and score < -1e-12
        and _min_overlap(d, att.tau, att.omega) >= 1 - att.epsilon - qmath.TOL
    )


def _non_positive_row(beta: np.ndarray, states) -> tuple[int, np.ndarray] | None:
    for s in range(beta.shape[0]):
        agg = sum(b * w for b, w in zip(beta[s], states))
        vals, vecs = np.linalg.eigh(agg)
        if vals[0] < NEGATIVE_EIG:
            return s, vecs[:, 0]
    return None


def _vanishing_side_attack(d, a_tilde, b_tilde, alpha, bvec, epsilon):
    tau, omega = list(d.tau), list(d.omega)
    if np.all(np.abs(alpha) <= COND_TOL) and np.trace(a_tilde).real > COND_TOL:
        found = _non_positive_row(d.beta, d.omega)
        if found is None:
            raise InconsistencyError("no row of beta combines Bob's inputs into a non-positive operator")
        s, v = found
        a_eff, b_eff = a_tilde, qmath.projector(v)
        tau[s] = (1 - epsilon) * d.tau[s] + epsilon * a_tilde / np.trace(a_tilde).real
        note = f"alice input {s} mixed with the normalized effect"
    else:
        found = _non_positive_row(d.beta.T, d.tau)
        if found is None:
            raise InconsistencyError("no column of beta combines Alice's inputs into a non-positive operator")
        s, v = found
        a_eff, b_eff = qmath.projector(v), b_tilde
        omega[s] = (1 - epsilon) * d.omega[s] + epsilon * b_tilde / np.trace(b_tilde).real
        note = f"bob input {s} mixed with the normalized effect"
    return a_eff, b_eff, tau, omega, note


def _interior_effect(effect: np.ndarray, states, seed: int = 0) -> tuple[np.ndarray, str]:
    """Effect with 0 < lambda_min < <A>_{tau_x} <= lambda_max < 1 for every input."""
    dim = effect.shape[0]
    mixed = (effect + np.eye(dim) / 2) / 2
    lo = qmath.lambda_min(mixed)
    if np.all(expectation_vector(mixed, states) > lo + 1e-9):
        return mixed, "contracted mixture (E + I/2)/2"
    rng = np.random.default_rng(seed)
    while True:
        v = qmath.random_ket(dim, rng)
        if all(np.real(v.conj() @ s @ v) < 1 - 1e-3 for s in states):
            break
    generic = np.eye(dim) / 4 + (np.eye(dim) - qmath.projector(v)) / 2
    return generic, "generic interior effect I/4 + (I - |v><v|)/2"


def _directions(alpha: np.ndarray, M: np.ndarray, bvec: np.ndarray) -> tuple[np.ndarray, np.ndarray, str]:
    g_b = alpha @ M
    if np.linalg.norm(g_b) > COND_TOL:
        return np.zeros(len(alpha)), -g_b / np.linalg.norm(g_b), "bob direction from alpha^T M"
    g_a = M @ bvec
    if np.linalg.norm(g_a) > COND_TOL:
        return -g_a / np.linalg.norm(g_a), np.zeros(len(bvec)), "alice direction from M beta"
    i, j = np.unravel_index(np.argmax(np.abs(M)), M.shape)
    if abs(M[i, j]) <= COND_TOL:
        raise InconsistencyError("coefficient block is zero; no perturbation direction exists")
    e_a = np.zeros(len(alpha))
    e_b = np.zeros(len(bvec))
    e_a[i] = 1.0
    e_b[j] = -np.sign(M[i, j])
    return e_a, e_b, f"rank-one pairing at block entry ({i}, {j})"


def construct_attack(d: WitnessDecomposition, cert: SensitivityCertificate, epsilon: float) -> AttackCertificate:
    """Explicit inputs within overlap 1 - epsilon and effects with a negative product score."""
    if not cert.sensitive or cert.a_tilde is None or cert.b_tilde is None:
        raise ValueError("certificate carries no witnessing effects")
    if not (0 < epsilon <= 1):
        raise ValueError(f"epsilon = {epsilon} outside (0, 1]")
    a_t, b_t = cert.a_tilde, cert.b_tilde
    alpha, bvec = _side_vectors(d, a_t, b_t)
    notes: list[str] = []

    if np.all(np.abs(np.outer(alpha, bvec)) <= COND_TOL):
        a_eff, b_eff, tau, omega, note = _vanishing_side_attack(d, a_t, b_t, alpha, bvec, epsilon)
        notes.append(note)
        case = "appendix_b_a"
    else:
        case = "appendix_b_bi"
        sides = []
        for name, eff, states in (("alice", a_t, d.tau), ("bob", b_t, d.omega)):
            if qmath.lambda_min(eff) > COND_TOL:
                eff, how = _interior_effect(eff, states)
                notes.append(f"{name} effect replaced by {how}")
                case = "appendix_b_bii"
            if qmath.lambda_max(eff) >= 1 - 1e-9:
                eff = eff / 2
                notes.append(f"{name} effect halved to keep its spectrum below 1")
            sides.append(eff)
        a_side, b_side = sides
        alpha, bvec = _side_vectors(d, a_side, b_side)
        rows = np.nonzero(np.abs(alpha) > COND_TOL)[0]
        cols = np.nonzero(np.abs(bvec) > COND_TOL)[0]
        block = d.beta[np.ix_(rows, cols)]
        ea_k, eb_l, how = _directions(alpha[rows], block, bvec[cols])
        notes.append(how)
        e_a = np.zeros(d.shape[0])
        e_b = np.zeros(d.shape[1])
        e_a[rows] = ea_k
        e_b[cols] = eb_l
        y = min(
            _perturb_side(a_side, d.tau, e_a, epsilon).y0,
            _perturb_side(b_side, d.omega, e_b, epsilon).y0,
        )
        plan_a = _perturb_side(a_side, d.tau, e_a, epsilon, y if np.any(e_a) else None)
        plan_b = _perturb_side(b_side, d.omega, e_b, epsilon, y if np.any(e_b) else None)
        a_eff, b_eff = plan_a.effect, plan_b.effect
        tau, omega = list(plan_a.states), list(plan_b.states)
        notes.append(f"step y = {y:.6g}")

    score = product_score(d, tau, omega, a_eff, b_eff)
    att = AttackCertificate(
        float(epsilon),
        a_eff,
        b_eff,
        tuple(tau),
        tuple(omega),
        score,
        _min_overlap(d, tau, omega),
        case,
        tuple(notes),
    )
    if not verify_attack(d, att):
        raise InconsistencyError(
            f"attack failed verification (score {score:.3g}, min overlap {att.min_overlap:.12g})"
        )
    return att


def zero_product_components(d: WitnessDecomposition, seed: int = 0) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """Product state minimizing Tr(W sigma), as a one-term component list, if it reaches 0."""
    pm = product_minimum(reconstruct(d), seed=seed)
    if abs(pm.value) > FLOOR_TOL:
        return []
    return [(1.0, pm.psi, pm.phi)]


def certify(
    d: WitnessDecomposition,
    components: Iterable | None = None,
    seed: int = 0,
) -> SensitivityCertificate:
    """Best available sensitivity certificate, with witnessing effects when found.

    Order: all-nonzero coefficients, then the supplied separable components, then a
    numerically located product state on which the witness vanishes.
    """
    comps = list(components) if components is not None else None
    if check_corollary4(d):
        for source in (comps, "search"):
            cand = zero_product_components(d, seed) if source == "search" else source
            if not cand:
                continue
            cert = check_from_separable_state(d, cand)
            if cert.sensitive:
                return replace(cert, verdict="sensitive_cor4")
        return SensitivityCertificate("sensitive_cor4")
    if comps:
        cert = check_from_separable_state(d, comps)
        if cert.sensitive:
            return cert
    found = zero_product_components(d, seed)
    if found:
        return check_from_separable_state(d, found)
    return SensitivityCertificate("unknown")
