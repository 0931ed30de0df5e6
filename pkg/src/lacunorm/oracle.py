"""Brute-force checks of the transform identities at finite truncation.

Randomness comes only from ``numpy.random.Generator(numpy.random.PCG64(seed))``,
so a given seed reproduces the same draws bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .norms import SpaceSpec, dual_norm, luxemburg_rows
from .transform import (
    LambdaSystem, MatrixSpec, apply_lambda_bar, associated_dual, cesaro_matrix, diagonal_matrix,
    explicit_matrix, identity_matrix, lambda_prime_matrix, summation_matrix,
)

__all__ = [
    "SamplerConfig", "make_rng", "check_duality", "duality_scale", "check_matrix_identity",
    "sampled_dual_norm", "block_dual_norm", "projector_tail",
    "random_sparse", "random_triangle", "lambda_families", "matrix_families",
    "VerifyRow", "verify_suite", "corrupted_dual",
]

DISTRIBUTIONS = ("gaussian", "rademacher", "sparse")
RESIDUAL_TOL = 1e-10
SAMPLED_SLACK = 1e-8


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    samples: int = 10_000
    support: int = 3
    distribution: str = "sparse"

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 1:
            raise ValueError(f"samples must be a positive integer, got {self.samples}")
        if int(self.support) != self.support or self.support < 1:
            raise ValueError(f"support must be a positive integer, got {self.support}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}; expected one of {DISTRIBUTIONS}")


def _pad(v, n):
    v = np.asarray(v, dtype=float)
    return np.pad(v, (0, n - len(v))) if len(v) < n else v


def duality_scale(a, x) -> float:
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    a_l1 = np.abs(a).sum() if len(a) else 0.0
    x_sup = np.abs(x).max() if len(x) else 0.0
    return 1.0 + a_l1 * x_sup


def check_duality(L: LambdaSystem, a, x, dual: Callable = associated_dual) -> float:
    """|sum a_k x_k - sum abar_k y_k| with y = Lambda-bar x."""
    n = max(len(a), len(x))
    a = _pad(a, n)
    x = _pad(x, n)
    lhs = float(np.dot(a, x))
    abar = dual(L, a)
    y = apply_lambda_bar(L, x)
    rhs = float(np.dot(abar, y))
    return abs(lhs - rhs)


def check_matrix_identity(L: LambdaSystem, A: MatrixSpec, x, N: int, dual: Callable = associated_dual) -> float:
    """max_n |(Ax)_n - (Abar y)_n| / (1 + term scale of row n), n < N.

    The term scale is ``sum_k |a_nk x_k| + sum_k |abar_nk y_k|``, i.e. the
    magnitude the two dot products are accumulated from.
    """
    if A.kind == "direct-associated":
        raise ValueError("rows of a direct-associated matrix are already associated")
    x = np.asarray(x, dtype=float)
    rows = [np.asarray(A.row(n), dtype=float) for n in range(N)]
    width = max(len(x), max(len(r) for r in rows))
    x = _pad(x, width)
    y = apply_lambda_bar(L, x)
    worst = 0.0
    for r in rows:
        r = _pad(r, width)
        rb = dual(L, r)
        ax = np.dot(r, x)
        ay = np.dot(rb, y)
        scale = 1.0 + np.abs(r * x).sum() + np.abs(rb * y).sum()
        worst = max(worst, abs(ax - ay) / scale)
    return float(worst)


def _draw_y(rng: np.random.Generator, cfg: SamplerConfig, count: int, N: int) -> np.ndarray:
    if cfg.distribution == "gaussian":
        return rng.standard_normal((count, N))
    if cfg.distribution == "rademacher":
        return 2.0 * rng.integers(0, 2, size=(count, N)) - 1.0
    Y = np.zeros((count, N))
    sizes = rng.integers(1, cfg.support + 1, size=count)
    pos = rng.integers(0, N, size=(count, cfg.support))
    signs = 2.0 * rng.integers(0, 2, size=(count, cfg.support)) - 1.0
    rows = np.arange(count)
    for j in range(cfg.support):
        m = j < sizes
        Y[rows[m], pos[m, j]] = signs[m, j]
    return Y


def sampled_dual_norm(a, S: SpaceSpec, cfg: SamplerConfig, N: int, R: int,
                      tol: float = 1e-12, chunk: int = 2000):
    """Lower approach to sup_{||x|| = 1} |sum a_k x_k| by random sampling.

    Samples are drawn in transformed coordinates, mapped back through the
    inverse transform, re-transformed independently for the norm, and scaled
    to unit norm.  Returns ``(best, x_star)``.
    """
    a = np.asarray(a, dtype=float)
    if len(a) > N:
        if np.any(a[N:] != 0):
            raise ValueError("a is supported beyond the sampling horizon N")
        a = a[:N]
    a = _pad(a, N)
    if not np.any(a):
        return 0.0, np.zeros(N)
    rng = make_rng(cfg.seed)
    lam = S.lam.values(N)
    d = np.diff(lam, prepend=0.0)
    best, best_x = 0.0, np.zeros(N)
    done = 0
    while done < cfg.samples:
        count = min(chunk, cfg.samples - done)
        Y = _draw_y(rng, cfg, count, N)
        X = np.cumsum(np.diff(Y * lam, prepend=0.0, axis=1) / d, axis=1)
        U = np.cumsum(d * np.diff(X, prepend=0.0, axis=1), axis=1) / lam
        norms = luxemburg_rows(U, S, R, tol)[1]
        ok = norms > 0
        vals = np.zeros(count)
        vals[ok] = np.abs(X[ok] @ a) / norms[ok]
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_x = float(vals[i]), X[i] / norms[i]
        done += count
    return best, best_x


def block_dual_norm(a, S: SpaceSpec, R: int) -> float:
    """Exact dual norm for M = identity, s = 1: sum_r h_r max_{k in J_r} |abar_k|.

    With these parameters the unit ball in transformed coordinates is a
    product of scaled l1 balls, one per block, so the supremum separates.
    """
    if S.M.family != "identity" or not S.s.is_one:
        raise ValueError("block_dual_norm is exact only for M = identity and s = 1")
    abar = np.abs(associated_dual(S.lam, a))
    layout = S.layout(R)
    if np.any(abar[:layout.first]) or np.any(abar[layout.stop:]):
        raise ValueError("abar is supported outside the covered blocks")
    w = layout.window(abar)
    return float((np.maximum.reduceat(w, layout.offsets) * layout.h).sum())


def projector_tail(Q, r: int) -> float:
    """sup over x in Q of sup_{n > r} |x_n|."""
    best = 0.0
    for x in Q:
        x = np.asarray(x, dtype=float)
        if len(x) > r + 1:
            best = max(best, float(np.abs(x[r + 1:]).max()))
    return best


def random_sparse(rng: np.random.Generator, length: int, support: int) -> np.ndarray:
    v = np.zeros(length)
    k = int(rng.integers(1, support + 1))
    pos = rng.choice(length, size=min(k, length), replace=False)
    v[pos] = rng.standard_normal(len(pos))
    return v


def random_triangle(rng: np.random.Generator, N: int) -> MatrixSpec:
    rows = []
    for n in range(N):
        r = rng.standard_normal(n + 1)
        r[n] = 1.0 + abs(r[n])
        rows.append(r)
    return explicit_matrix(rows, "triangle", "random-triangle")


def lambda_families(rng: np.random.Generator, horizon: int) -> dict[str, LambdaSystem]:
    vals = 0.5 + np.cumsum(rng.uniform(0.1, 2.0, size=horizon))
    return {
        "k+1": LambdaSystem.shift(),
        "(k+1)^2": LambdaSystem.power(2),
        "explicit": LambdaSystem.explicit(vals),
    }


def matrix_families(rng: np.random.Generator, N: int) -> dict[str, MatrixSpec]:
    return {
        "identity": identity_matrix(),
        "zero": explicit_matrix([[0.0]], name="zero"),
        "cesaro": cesaro_matrix(),
        "summation": summation_matrix(),
        "diagonal": diagonal_matrix(lambda n: 1.0 / (n + 1)),
        "finite-rank": explicit_matrix([[1.0, -2.0, 0.5], [0.0, 3.0], [1.0, 1.0, 1.0, 1.0]], name="finite-rank"),
        "lambda-prime": lambda_prime_matrix(LambdaSystem.power(2)),
        "random-triangle": random_triangle(rng, N),
    }


def corrupted_dual(L: LambdaSystem, a) -> np.ndarray:
    """Negative control: a-bar with the tail-sum term dropped."""
    a = np.asarray(a, dtype=float)
    lam = L.values(len(a) + 1)
    d = np.diff(lam, prepend=0.0)
    return lam[:len(a)] * a / d[:len(a)]


@dataclass
class VerifyRow:
    check: str
    tag: str
    value: float
    bound: float
    passed: bool
    hard: bool = True
    detail: str = ""

    def to_dict(self) -> dict:
        return {"check": self.check, "tag": self.tag, "value": self.value, "bound": self.bound,
                "passed": self.passed, "hard": self.hard, "detail": self.detail}


def verify_suite(S: SpaceSpec, R: int, sampler: SamplerConfig, *, N: int = 64, triples: int = 1000,
                 matrix_N: int = 256, corrupt: bool = False) -> list[VerifyRow]:
    """Run all oracle checks for one space configuration.

    ``N`` is the sampling horizon for the unit-sphere sampler and must be
    covered by the ``R`` blocks.
    """
    rng = make_rng(sampler.seed)
    dual = corrupted_dual if corrupt else associated_dual
    rows = []

    lams = lambda_families(rng, 4 * matrix_N + 8)
    names = list(lams)
    worst = 0.0
    for i in range(triples):
        L = lams[names[i % len(names)]]
        a = random_sparse(rng, 32, 4)
        x = random_sparse(rng, 32, 4)
        worst = max(worst, check_duality(L, a, x, dual) / duality_scale(a, x))
    rows.append(VerifyRow("duality", "Eq. (9)", worst, RESIDUAL_TOL, worst < RESIDUAL_TOL,
                          detail=f"{triples} sparse triples, residual / (1 + |a|_1 |x|_inf)"))

    mats = matrix_families(rng, matrix_N)
    worst, where = 0.0, ""
    for lname, L in lams.items():
        for mname, A in mats.items():
            x = rng.standard_normal(matrix_N)
            r = check_matrix_identity(L, A, x, matrix_N)
            if r >= worst:
                worst, where = r, f"{mname} x lambda {lname}"
    rows.append(VerifyRow("matrix identity", "Lemma 3.2", worst, RESIDUAL_TOL, worst < RESIDUAL_TOL,
                          detail=f"N = {matrix_N}, worst at {where}"))

    classical = S.M.family == "identity" and S.s.is_one
    for k in (0, 1):
        a = np.zeros(k + 1)
        a[k] = 1.0
        exact = dual_norm(a, S)
        best, _ = sampled_dual_norm(a, S, sampler, N, R)
        rows.append(VerifyRow(f"sampled dual e{k} <= l1", "Eq. (3) / Lemma 3.1", best, exact + SAMPLED_SLACK,
                              best <= exact + SAMPLED_SLACK,
                              detail=f"{sampler.samples} {sampler.distribution} samples"))
        if classical:
            rows.append(VerifyRow(f"sampled dual e{k} >= 0.9 l1", "Eq. (3)", best, 0.9 * exact,
                                  best >= 0.9 * exact, hard=False,
                                  detail=f"exact block dual norm {block_dual_norm(a, S, R):.6g}"))

    A = mats["finite-rank"]
    Ad = A.dense(8, 8)
    support = max(n for n in range(8) if np.any(A.row(n)))
    Q = [Ad @ rng.standard_normal(8) for _ in range(100)]
    tails = [projector_tail(Q, r) for r in range(8)]
    mono = all(t2 <= t1 for t1, t2 in zip(tails, tails[1:]))
    hit = tails[support] == 0.0
    rows.append(VerifyRow("projector tail", "chi(Q) = lim sup ||(I-P_r)x||", tails[support], 0.0,
                          mono and hit, detail=f"tails {['%.3g' % t for t in tails]}"))
    return rows
