"""Modulars and Luxemburg-type norms on the lacunary difference spaces.

The block reduction is a supremum over blocks ``r <= R``.  Every report
carries ``block_reduction = "sup"`` so that this reading is visible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .lacunary import BlockLayout, LacunarySequence
from .orlicz import OrliczFunction
from .transform import LambdaSystem, apply_lambda_bar, associated_dual

__all__ = [
    "Exponents", "SpaceSpec", "NormReport", "TARGETS",
    "modular", "block_modulars", "luxemburg_norm", "luxemburg_direct", "luxemburg_rows",
    "n_theta_norm", "dual_norm",
]

TARGETS = ("c0", "c", "linf")
BLOCK_REDUCTION = "sup"
MAX_ITER = 200
_MAX_BRACKET_STEPS = 2200


class Exponents:
    """The exponent sequence s_k: constant or an explicit finite list."""

    def __init__(self, rule: str = "constant", value: float = 1.0, values: Sequence[float] | None = None):
        self.rule = rule
        if rule == "constant":
            if not value > 0 or not np.isfinite(value):
                raise ValueError(f"s must be positive and finite, got {value}")
            self.value = float(value)
        elif rule == "explicit":
            vals = np.asarray(values, dtype=float)
            if vals.ndim != 1 or len(vals) == 0:
                raise ValueError("explicit s needs a non-empty list")
            if np.any(~(vals > 0)) or np.any(~np.isfinite(vals)):
                raise ValueError("every s_k must be positive and finite")
            self._values = vals
        else:
            raise ValueError(f"unknown s rule {rule!r}")

    @property
    def is_one(self) -> bool:
        return self.rule == "constant" and self.value == 1.0

    def values(self, n: int) -> np.ndarray:
        if self.rule == "constant":
            return np.full(n, self.value)
        if n > len(self._values):
            raise ValueError(f"explicit s has {len(self._values)} terms, {n} needed")
        return self._values[:n].copy()

    def to_dict(self) -> dict:
        if self.rule == "constant":
            return {"rule": "constant", "value": self.value}
        return {"rule": "explicit", "values": self._values.tolist()}


@dataclass(frozen=True)
class SpaceSpec:
    """One of the spaces c0^lambda(M, Delta, s, theta), c^lambda(...), linf^lambda(...)."""

    M: OrliczFunction
    theta: LacunarySequence
    lam: LambdaSystem
    s: Exponents = field(default_factory=Exponents)
    target: str = "c0"
    include_k0: bool = True

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown space target {self.target!r}; expected one of {TARGETS}")

    def layout(self, R: int) -> BlockLayout:
        return BlockLayout(self.theta, R, self.include_k0)


@dataclass
class NormReport:
    value: float
    rho_bracket: tuple[float, float]
    modular_at_value: float
    blocks_used: int
    per_block: list[float]
    iterations: int = 0
    block_reduction: str = BLOCK_REDUCTION

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "rho_bracket": list(self.rho_bracket),
            "modular_at_value": self.modular_at_value,
            "blocks_used": self.blocks_used,
            "per_block": list(self.per_block),
            "iterations": self.iterations,
            "block_reduction": self.block_reduction,
        }


class _Modular:
    """Vectorised modular for a fixed space and block count."""

    def __init__(self, S: SpaceSpec, R: int):
        self.S = S
        self.layout = S.layout(R)
        s = S.s.values(self.layout.stop)[self.layout.first:]
        self.s = None if S.s.is_one else s

    def prepare(self, U) -> np.ndarray:
        return np.abs(self.layout.window(np.atleast_2d(np.asarray(U, dtype=float))))

    def per_block(self, W: np.ndarray, rho: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            vals = self.S.M.eval(W / rho[:, None])
            if self.s is not None:
                vals = vals ** self.s
        return self.layout.block_means(vals)

    def __call__(self, W: np.ndarray, rho: np.ndarray) -> np.ndarray:
        return self.per_block(W, rho).max(axis=1)


def block_modulars(u, S: SpaceSpec, rho: float, R: int) -> np.ndarray:
    """Per-block values (1/h_r) sum_{k in J_r} M(|u_k|/rho)^{s_k}."""
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    mod = _Modular(S, R)
    return mod.per_block(mod.prepare(u), np.array([float(rho)]))[0]


def modular(u, S: SpaceSpec, rho: float, R: int) -> float:
    """Largest block average of M(|u_k|/rho)^{s_k} over blocks 0..R.

    ``u`` is already in transformed coordinates; entries past its end count
    as zero and entries past k_R are outside the truncation.
    """
    return float(block_modulars(u, S, rho, R).max())


def luxemburg_rows(U, S: SpaceSpec, R: int, tol: float = 1e-10, max_iter: int = MAX_ITER):
    """inf{rho : modular(row, rho) <= 1} for every row of ``U``, in one batch.

    Returns ``(lo, hi, iterations)``; ``hi`` is the feasible end and is the
    reported value.  Rows whose truncation is zero get ``lo = hi = 0``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    mod = _Modular(S, R)
    W = mod.prepare(U)
    m = W.shape[0]
    lo = np.zeros(m)
    hi = np.zeros(m)
    live = np.any(W > 0, axis=1)
    if not np.any(live):
        return lo, hi, 0
    Wl = W[live]
    h = np.ones(len(Wl))

    def feasible(rho, idx):
        return mod(Wl[idx], rho[idx]) <= 1.0

    ok = feasible(h, slice(None))
    grow = ~ok
    steps = 0
    while np.any(grow):
        idx = np.flatnonzero(grow)
        h[idx] *= 2.0
        grow[idx] = ~feasible(h, idx)
        steps += 1
        if steps > _MAX_BRACKET_STEPS:
            raise RuntimeError("could not find a feasible rho")
    l = h / 2.0
    shrink = ok.copy()
    l[shrink] = h[shrink] / 2.0
    while np.any(shrink):
        idx = np.flatnonzero(shrink)
        still = feasible(l, idx)
        moved = idx[still]
        h[moved] = l[moved]
        l[moved] = h[moved] / 2.0
        shrink[idx[~still]] = False
        steps += 1
        if steps > _MAX_BRACKET_STEPS:
            raise RuntimeError("modular stays feasible for every rho")

    it = 0
    todo = (h - l) > tol * h
    while np.any(todo) and it < max_iter:
        idx = np.flatnonzero(todo)
        mid = (l + h) / 2.0
        f = feasible(mid, idx)
        h[idx[f]] = mid[idx[f]]
        l[idx[~f]] = mid[idx[~f]]
        todo = (h - l) > tol * h
        it += 1
    lo[live] = l
    hi[live] = h
    return lo, hi, it


def luxemburg_direct(u, S: SpaceSpec, R: int, tol: float = 1e-10) -> NormReport:
    """Luxemburg-type value of a sequence already in transformed coordinates."""
    lo, hi, it = luxemburg_rows(u, S, R, tol)
    value = float(hi[0])
    layout = S.layout(R)
    if value == 0.0:
        per = np.zeros(len(layout.h))
        return NormReport(0.0, (0.0, 0.0), 0.0, R, per.tolist(), it)
    per = block_modulars(u, S, value, R)
    return NormReport(value, (float(lo[0]), value), float(per.max()), R, per.tolist(), it)


def luxemburg_norm(x, S: SpaceSpec, R: int, tol: float = 1e-10) -> NormReport:
    """Norm of ``x`` in the space: transform by Lambda-bar, then bisect on rho."""
    return luxemburg_direct(apply_lambda_bar(S.lam, x), S, R, tol)


def n_theta_norm(x, theta: LacunarySequence, R: int, include_k0: bool = True) -> float:
    """sup_r h_r^{-1} sum_{k in J_r} |x_k| over the blocks up to R."""
    layout = BlockLayout(theta, R, include_k0)
    return float(layout.block_means(np.abs(layout.window(x))).max())


def dual_norm(a, S: SpaceSpec | LambdaSystem) -> float:
    """l1 norm of the transformed functional a-bar."""
    lam = S.lam if isinstance(S, SpaceSpec) else S
    return float(np.abs(associated_dual(lam, a)).sum())
