"""JSON scenario documents (schema version 1).

Complex matrices are row-major lists of rows whose entries are ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import qmath
from .noise import NoiseModel
from .qmath import ValidationError
from .witness import WitnessDecomposition

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """A scenario document is malformed or violates an invariant."""


def _fail(path: str, msg: str):
    raise ScenarioError(f"{path}: {msg}")


def _number(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(path, f"expected a number, got {type(v).__name__}")
    f = float(v)
    if not np.isfinite(f):
        _fail(path, "non-finite value")
    return f


def _complex(v, path: str) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            _fail(path, "complex entries must be [re, im] pairs")
        return complex(_number(v[0], path + "[0]"), _number(v[1], path + "[1]"))
    return complex(_number(v, path), 0.0)


def _vector(v, path: str) -> np.ndarray:
    if not isinstance(v, list) or not v:
        _fail(path, "expected a non-empty list")
    return np.array([_complex(e, f"{path}[{i}]") for i, e in enumerate(v)], dtype=complex)


def _matrix(v, path: str) -> np.ndarray:
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        _fail(path, "expected a non-empty list of rows")
    width = len(v[0])
    rows = []
    for i, row in enumerate(v):
        if len(row) != width:
            _fail(f"{path}[{i}]", f"row has {len(row)} entries, expected {width}")
        rows.append([_complex(e, f"{path}[{i}][{j}]") for j, e in enumerate(row)])
    return np.array(rows, dtype=complex)


def _real_matrix(v, path: str) -> np.ndarray:
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        _fail(path, "expected a non-empty list of rows")
    width = len(v[0])
    out = np.empty((len(v), width))
    for i, row in enumerate(v):
        if len(row) != width:
            _fail(f"{path}[{i}]", f"row has {len(row)} entries, expected {width}")
        for j, e in enumerate(row):
            out[i, j] = _number(e, f"{path}[{i}][{j}]")
    return out


def _state_list(v, path: str) -> list[np.ndarray]:
    if not isinstance(v, list) or not v:
        _fail(path, "expected a non-empty list of matrices")
    out = []
    for i, m in enumerate(v):
        p = f"{path}[{i}]"
        mat = _matrix(m, p)
        try:
            qmath.density_matrix(mat, p)
        except ValidationError as exc:
            raise ScenarioError(str(exc)) from None
        out.append(mat)
    return out


def _enc_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _enc_matrix(m: np.ndarray) -> list:
    return [[_enc_complex(z) for z in row] for row in np.asarray(m, dtype=complex)]


def _enc_vector(v: np.ndarray) -> list:
    return [_enc_complex(z) for z in np.asarray(v, dtype=complex)]


def _same(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and a.dtype == b.dtype and a.tobytes() == b.tobytes()


def _same_list(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))


@dataclass(eq=False)
class ScenarioDocument:
    beta: np.ndarray
    tau: list[np.ndarray]
    omega: list[np.ndarray]
    name: str | None = None
    tau_labels: list[str] | None = None
    omega_labels: list[str] | None = None
    pure_inputs: bool = True
    shared_state: np.ndarray | None = None
    alice_effect: np.ndarray | None = None
    bob_effect: np.ndarray | None = None
    p_a: float | None = None
    p_b: float | None = None
    noise_tau: list[np.ndarray] | None = None
    noise_omega: list[np.ndarray] | None = None
    separable_components: list[tuple[float, np.ndarray, np.ndarray]] | None = None
    schema_version: int = field(default=SCHEMA_VERSION)

    def decomposition(self) -> WitnessDecomposition:
        return WitnessDecomposition(
            self.beta,
            tuple(self.tau),
            tuple(self.omega),
            None if self.tau_labels is None else tuple(self.tau_labels),
            None if self.omega_labels is None else tuple(self.omega_labels),
            self.pure_inputs,
        )

    def noise_model(self) -> NoiseModel | None:
        if self.p_a is None:
            return None
        return NoiseModel(
            self.p_a,
            self.p_b,
            None if self.noise_tau is None else tuple(self.noise_tau),
            None if self.noise_omega is None else tuple(self.noise_omega),
        )

    @property
    def has_game(self) -> bool:
        return self.shared_state is not None and self.alice_effect is not None and self.bob_effect is not None

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScenarioDocument):
            return NotImplemented
        comps_equal = (self.separable_components is None) == (other.separable_components is None)
        if comps_equal and self.separable_components is not None:
            comps_equal = len(self.separable_components) == len(other.separable_components) and all(
                w1 == w2 and _same(p1, p2) and _same(q1, q2)
                for (w1, p1, q1), (w2, p2, q2) in zip(self.separable_components, other.separable_components)
            )
        return (
            self.schema_version == other.schema_version
            and self.name == other.name
            and _same(self.beta, other.beta)
            and _same_list(self.tau, other.tau)
            and _same_list(self.omega, other.omega)
            and self.tau_labels == other.tau_labels
            and self.omega_labels == other.omega_labels
            and self.pure_inputs == other.pure_inputs
            and _same(self.shared_state, other.shared_state)
            and _same(self.alice_effect, other.alice_effect)
            and _same(self.bob_effect, other.bob_effect)
            and self.p_a == other.p_a
            and self.p_b == other.p_b
            and _same_list(self.noise_tau, other.noise_tau)
            and _same_list(self.noise_omega, other.noise_omega)
            and comps_equal
        )


def from_decomposition(d: WitnessDecomposition, name: str | None = None, **extra) -> ScenarioDocument:
    return ScenarioDocument(
        d.beta.copy(),
        [t.copy() for t in d.tau],
        [w.copy() for w in d.omega],
        name=name,
        tau_labels=None if d.tau_labels is None else list(d.tau_labels),
        omega_labels=None if d.omega_labels is None else list(d.omega_labels),
        pure_inputs=d.pure_inputs,
        **extra,
    )


def to_dict(doc: ScenarioDocument) -> dict[str, Any]:
    out: dict[str, Any] = {"schema_version": doc.schema_version}
    if doc.name is not None:
        out["name"] = doc.name
    out["beta"] = [[float(v) for v in row] for row in doc.beta]
    out["tau"] = [_enc_matrix(m) for m in doc.tau]
    out["omega"] = [_enc_matrix(m) for m in doc.omega]
    out["pure_inputs"] = doc.pure_inputs
    if doc.tau_labels is not None or doc.omega_labels is not None:
        out["labels"] = {"tau": doc.tau_labels, "omega": doc.omega_labels}
    if doc.shared_state is not None:
        out["shared_state"] = _enc_matrix(doc.shared_state)
    if doc.alice_effect is not None or doc.bob_effect is not None:
        out["effects"] = {
            "alice": None if doc.alice_effect is None else _enc_matrix(doc.alice_effect),
            "bob": None if doc.bob_effect is None else _enc_matrix(doc.bob_effect),
        }
    if doc.p_a is not None:
        noise: dict[str, Any] = {"p_a": doc.p_a, "p_b": doc.p_b}
        if doc.noise_tau is not None:
            noise["noise_tau"] = [_enc_matrix(m) for m in doc.noise_tau]
        if doc.noise_omega is not None:
            noise["noise_omega"] = [_enc_matrix(m) for m in doc.noise_omega]
        out["noise"] = noise
    if doc.separable_components is not None:
        out["separable_components"] = [
            {"weight": w, "psi": _enc_vector(p), "phi": _enc_vector(q)}
            for w, p, q in doc.separable_components
        ]
    return out


def serialize(doc: ScenarioDocument) -> str:
    return json.dumps(to_dict(doc), indent=1)


def parse_components(v, path: str = "separable_components") -> list[tuple[float, np.ndarray, np.ndarray]]:
    if not isinstance(v, list):
        _fail(path, "expected a list of components")
    out = []
    for i, c in enumerate(v):
        p = f"{path}[{i}]"
        if not isinstance(c, dict):
            _fail(p, "expected an object with weight, psi, phi")
        for key in ("weight", "psi", "phi"):
            if key not in c:
                _fail(p, f"missing {key!r}")
        out.append((_number(c["weight"], p + ".weight"), _vector(c["psi"], p + ".psi"), _vector(c["phi"], p + ".phi")))
    return out


def load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def from_dict(data: Any) -> ScenarioDocument:
    if not isinstance(data, dict):
        _fail("document", "top level must be an object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        _fail("schema_version", f"unsupported version {version!r}, expected {SCHEMA_VERSION}")
    for key in ("beta", "tau", "omega"):
        if key not in data:
            _fail(key, "missing")
    beta = _real_matrix(data["beta"], "beta")
    tau = _state_list(data["tau"], "tau")
    omega = _state_list(data["omega"], "omega")
    if len(tau) != beta.shape[0]:
        _fail("tau", f"{len(tau)} states for {beta.shape[0]} rows of beta")
    if len(omega) != beta.shape[1]:
        _fail("omega", f"{len(omega)} states for {beta.shape[1]} columns of beta")

    doc = ScenarioDocument(beta, tau, omega, name=data.get("name"))
    pure = data.get("pure_inputs", True)
    if not isinstance(pure, bool):
        _fail("pure_inputs", "expected true or false")
    doc.pure_inputs = pure
    labels = data.get("labels")
    if labels is not None:
        if not isinstance(labels, dict):
            _fail("labels", "expected an object with tau and omega lists")
        doc.tau_labels = labels.get("tau")
        doc.omega_labels = labels.get("omega")

    if "shared_state" in data and data["shared_state"] is not None:
        doc.shared_state = _matrix(data["shared_state"], "shared_state")
    effects = data.get("effects")
    if effects == "teleport":
        from .game import teleport_effects

        doc.alice_effect, doc.bob_effect = teleport_effects(tau[0].shape[0], omega[0].shape[0])
    elif effects is not None:
        if not isinstance(effects, dict):
            _fail("effects", "expected an object with alice and bob matrices, or \"teleport\"")
        if effects.get("alice") is not None:
            doc.alice_effect = _matrix(effects["alice"], "effects.alice")
        if effects.get("bob") is not None:
            doc.bob_effect = _matrix(effects["bob"], "effects.bob")

    noise = data.get("noise")
    if noise is not None:
        if not isinstance(noise, dict):
            _fail("noise", "expected an object")
        doc.p_a = _number(noise.get("p_a"), "noise.p_a")
        doc.p_b = _number(noise.get("p_b"), "noise.p_b")
        if noise.get("noise_tau") is not None:
            doc.noise_tau = _state_list(noise["noise_tau"], "noise.noise_tau")
        if noise.get("noise_omega") is not None:
            doc.noise_omega = _state_list(noise["noise_omega"], "noise.noise_omega")
    if data.get("separable_components") is not None:
        doc.separable_components = parse_components(data["separable_components"])

    _validate(doc)
    return doc


def _validate(doc: ScenarioDocument) -> None:
    try:
        d = doc.decomposition()
        if doc.shared_state is not None:
            qmath.density_matrix(doc.shared_state, "shared_state")
        if doc.alice_effect is not None:
            qmath.povm_element(doc.alice_effect, "effects.alice")
        if doc.bob_effect is not None:
            qmath.povm_element(doc.bob_effect, "effects.bob")
        nm = doc.noise_model()
        if nm is not None:
            for name, fam, ref in (("noise.noise_tau", nm.noise_tau, d.tau), ("noise.noise_omega", nm.noise_omega, d.omega)):
                if fam is None:
                    continue
                if len(fam) != len(ref):
                    raise ScenarioError(f"{name}: {len(fam)} states for {len(ref)} inputs")
                for i, s in enumerate(fam):
                    if s.shape != ref[i].shape:
                        raise ScenarioError(f"{name}[{i}]: shape {s.shape} differs from input {ref[i].shape}")
    except ScenarioError:
        raise
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None


def parse(text: str) -> ScenarioDocument:
    return from_dict(load_json(text))
