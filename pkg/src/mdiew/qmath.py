"""Dense complex linear algebra for small Hermitian operators.

Operators are plain ``numpy`` complex arrays. The ``hermitian``, ``density_matrix``
and ``povm_element`` helpers validate an array and return a complex copy; they
are the only gatekeepers, everything downstream assumes validated input.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

# Single tolerance knob for Hermiticity, positivity, trace and purity checks.
TOL = 1e-9
# Eigenvalues closer than this are merged into one spectral projector.
MERGE_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (I2, SIGMA_X, SIGMA_Y, SIGMA_Z)


class ValidationError(ValueError):
    """An operator failed a structural or physical validity check."""


class DimensionError(ValidationError):
    """Operands have incompatible dimensions."""


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise DimensionError(f"{name}: expected a non-empty 2D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name}: non-finite entries")
    return a.copy()


def hermitian(m, name: str = "operator", tol: float = TOL) -> np.ndarray:
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name}: not square, shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T))
    if dev > tol:
        raise ValidationError(f"{name}: not Hermitian (max deviation {dev:.3g})")
    return a


def density_matrix(m, name: str = "state", tol: float = TOL) -> np.ndarray:
    a = hermitian(m, name, tol)
    tr = np.trace(a).real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"{name}: trace {tr:.12g} differs from 1")
    lo = np.linalg.eigvalsh(a)[0]
    if lo < -tol:
        raise ValidationError(f"{name}: negative eigenvalue {lo:.3g}")
    return a


def povm_element(m, name: str = "effect", tol: float = TOL) -> np.ndarray:
    a = hermitian(m, name, tol)
    ev = np.linalg.eigvalsh(a)
    if ev[0] < -tol or ev[-1] > 1 + tol:
        raise ValidationError(
            f"{name}: eigenvalues [{ev[0]:.6g}, {ev[-1]:.6g}] outside [0, 1]"
        )
    return a


def is_pure(rho: np.ndarray, tol: float = TOL) -> bool:
    return bool(np.trace(rho @ rho).real >= 1.0 - tol)


def ket(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValidationError("zero vector cannot be normalized")
    return v / norm


def projector(vec) -> np.ndarray:
    v = ket(vec)
    return np.outer(v, v.conj())


def basis(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def kron(*ops) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def transpose(m: np.ndarray) -> np.ndarray:
    """Transpose in the computational basis (no conjugation)."""
    return np.asarray(m).T.copy()


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues in descending order with their orthogonal projectors."""

    eigenvalues: np.ndarray
    projectors: tuple[np.ndarray, ...]
    multiplicities: tuple[int, ...]

    def reconstruct(self) -> np.ndarray:
        return sum(lam * p for lam, p in zip(self.eigenvalues, self.projectors))

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[-1])


def eig_hermitian(m, merge_tol: float = MERGE_TOL) -> SpectralDecomposition:
    """Spectral decomposition with eigenvalues merged within ``merge_tol``."""
    a = hermitian(m)
    vals, vecs = np.linalg.eigh(a)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]

    groups: list[list[int]] = []
    for i, v in enumerate(vals):
        if groups and abs(vals[groups[-1][0]] - v) <= merge_tol:
            groups[-1].append(i)
        else:
            groups.append([i])

    eigenvalues = np.array([vals[g].mean() for g in groups])
    projectors = tuple(vecs[:, g] @ vecs[:, g].conj().T for g in groups)
    return SpectralDecomposition(eigenvalues, projectors, tuple(len(g) for g in groups))


def lambda_min(m) -> float:
    return float(np.linalg.eigvalsh(hermitian(m))[0])


def lambda_max(m) -> float:
    return float(np.linalg.eigvalsh(hermitian(m))[-1])


def min_eigvec(m: np.ndarray) -> np.ndarray:
    return np.linalg.eigh(m)[1][:, 0]


def expectation(e, rho, tol: float = TOL) -> float:
    """Tr(e rho) for Hermitian ``e`` and ``rho``; the imaginary residue must vanish."""
    e = np.asarray(e, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if e.shape != rho.shape:
        raise DimensionError(f"dimension mismatch: {e.shape} vs {rho.shape}")
    val = np.einsum("ij,ji->", e, rho)
    if abs(val.imag) > tol:
        raise ValidationError(f"expectation has imaginary part {val.imag:.3g}")
    return float(val.real)


def overlap(a, b) -> float:
    """Tr(a b) for two states; equals the fidelity when one of them is pure."""
    return expectation(a, b)


def partial_trace(m: np.ndarray, dims: tuple[int, ...], keep: int) -> np.ndarray:
    """Reduced operator on subsystem ``keep`` of a multipartite operator."""
    n = len(dims)
    t = np.asarray(m).reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for i in range(n):
        if i != keep:
            cols[i] = rows[i]
    subs = "".join(rows) + "".join(cols) + "->" + rows[keep] + cols[keep]
    return np.einsum(subs, t)


def max_entangled(d: int) -> np.ndarray:
    """|Phi+> = sum_i |ii> / sqrt(d)."""
    v = np.zeros(d * d, dtype=complex)
    v[[i * d + i for i in range(d)]] = 1.0
    return v / np.sqrt(d)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    return ket(rng.standard_normal(d) + 1j * rng.standard_normal(d))


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def random_effect(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random POVM element with spectrum drawn uniformly from [0, 1]."""
    u = random_unitary(d, rng)
    return (u * rng.uniform(0, 1, d)) @ u.conj().T
