"""Binary bilinear minimum chi(r) = min_{a, b in {0,1}} a^T r b."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import qmath
from .game import GameScenario, product_scenario
from .witness import WitnessDecomposition

MAX_ROWS = 24
CORNER_TOL = 1e-9
_CHUNK = 1 << 15


class EnumerationLimitError(ValueError):
    pass


@dataclass(frozen=True)
class ChiResult:
    value: float
    argmin_a: tuple[int, ...]
    argmin_b: tuple[int, ...]
    tie_count: int


def _bits(start: int, stop: int, m: int) -> np.ndarray:
    # Row k holds the assignment with a[x] = bit x of k (a[0] is the lowest bit).
    k = np.arange(start, stop, dtype=np.int64)[:, None]
    return ((k >> np.arange(m)) & 1).astype(float)


def _exact_eval(rq: list[list[Fraction]], a: tuple[int, ...]) -> tuple[Fraction, tuple[int, ...], int]:
    n = len(rq[0])
    col = [sum((rq[x][y] for x in range(len(a)) if a[x]), Fraction(0)) for y in range(n)]
    b = tuple(int(c < 0) for c in col)
    value = sum((c for c in col if c < 0), Fraction(0))
    free = sum(1 for c in col if c == 0)
    return value, b, 2**free


def compute_chi(r) -> ChiResult:
    """Exact chi by enumerating Alice's bits; Bob's bits follow greedily.

    For fixed a the objective is linear in b, so b[y] = 1 exactly when the column sum
    (a^T r)[y] is negative. Float sums pick candidates, which are then re-evaluated with
    exact rationals. Ties resolve to the first a in counting order (a[0] least
    significant) and, for that a, to b with zeros wherever the column sum vanishes.
    ``tie_count`` counts every optimal (a, b) pair.
    """
    r = np.asarray(r, dtype=float)
    if r.ndim != 2 or 0 in r.shape:
        raise ValueError(f"expected a non-empty 2D matrix, got shape {r.shape}")
    if not np.all(np.isfinite(r)):
        raise ValueError("matrix has non-finite entries")
    m, n = r.shape
    if m > MAX_ROWS or n > MAX_ROWS:
        raise EnumerationLimitError(f"matrix {m}x{n} exceeds the enumeration guard of {MAX_ROWS}")

    slack = 1e-9 * (1.0 + np.abs(r).sum())
    best = np.inf
    candidates: list[int] = []
    for start in range(0, 1 << m, _CHUNK):
        stop = min(start + _CHUNK, 1 << m)
        cols = _bits(start, stop, m) @ r
        vals = np.minimum(cols, 0.0).sum(axis=1)
        lo = vals.min()
        if lo < best - slack:
            candidates = []
        best = min(best, lo)
        idx = np.nonzero(vals <= best + slack)[0]
        candidates.extend(int(start + i) for i in idx)

    rq = [[Fraction(float(v)) for v in row] for row in r]
    exact_best = None
    winner = None
    ties = 0
    for k in sorted(candidates):
        a = tuple((k >> x) & 1 for x in range(m))
        value, b, count = _exact_eval(rq, a)
        if exact_best is None or value < exact_best:
            exact_best, winner, ties = value, (a, b), count
        elif value == exact_best:
            ties += count
    return ChiResult(float(exact_best), winner[0], winner[1], ties)


def brute_force_chi(r) -> float:
    """Full 2^(m+n) enumeration; independent check for small matrices."""
    r = np.asarray(r, dtype=float)
    m, n = r.shape
    a = _bits(0, 1 << m, m)
    b = _bits(0, 1 << n, n)
    return float(np.min(a @ r @ b.T))


def achieve_chi(d: WitnessDecomposition, c: ChiResult) -> GameScenario:
    """Classical game attaining chi: A = |0><0| and inputs |0> or |1> chosen by the bits."""
    zero_a, one_a = (qmath.projector(qmath.basis(d.d_a, i)) for i in (0, 1))
    zero_b, one_b = (qmath.projector(qmath.basis(d.d_b, i)) for i in (0, 1))
    tau = [zero_a if bit else one_a for bit in c.argmin_a]
    omega = [zero_b if bit else one_b for bit in c.argmin_b]
    return product_scenario(d, tau, omega, zero_a, zero_b)


@dataclass(frozen=True)
class CornerCheck:
    passed: bool
    chi: float
    sample_min: float
    samples: int


def corner_optimality_check(r, samples: int = 100_000, seed: int = 0) -> CornerCheck:
    """Sample continuous a, b in [0, 1] and confirm none beats chi."""
    r = np.asarray(r, dtype=float)
    m, n = r.shape
    chi = compute_chi(r).value
    rng = np.random.default_rng(seed)
    lowest = np.inf
    for start in range(0, samples, 20_000):
        k = min(20_000, samples - start)
        a = rng.uniform(0, 1, (k, m))
        b = rng.uniform(0, 1, (k, n))
        vals = np.einsum("kx,xy,ky->k", a, r, b)
        lowest = min(lowest, float(vals.min()))
    return CornerCheck(bool(lowest >= chi - CORNER_TOL), chi, lowest, samples)
