"""Orlicz functions: the convex gauges inside every modular."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = ["FAMILIES", "OrliczFunction", "ValidationReport", "CheckResult", "validate"]

FAMILIES = ("power", "power-log", "exp-minus-one", "identity", "table")

DEFAULT_T_MAX = 1e8


@dataclass(frozen=True)
class OrliczFunction:
    """An Orlicz function M from a named family.

    ``params`` holds the family parameters: ``p`` for ``power`` and
    ``power-log``; ``knots`` (a sequence of ``(t, M(t))`` pairs starting at
    ``(0, 0)``) for ``table``.  Past the last knot a table is extended
    linearly with its final slope.
    """

    family: str
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown Orlicz family {self.family!r}; expected one of {FAMILIES}")
        if self.family in ("power", "power-log"):
            p = float(self.params.get("p", 1.0))
            if not np.isfinite(p) or p < 1.0:
                raise ValueError(f"{self.family}: exponent p must be >= 1, got {p}")
            object.__setattr__(self, "params", {**self.params, "p": p})
        elif self.family == "table":
            knots = np.asarray(self.params.get("knots", ()), dtype=float)
            if knots.ndim != 2 or knots.shape[1] != 2 or len(knots) < 2:
                raise ValueError("table: knots must be at least two (t, M) pairs")
            if knots[0, 0] != 0.0 or knots[0, 1] != 0.0:
                raise ValueError("table: first knot must be (0, 0)")
            if np.any(np.diff(knots[:, 0]) <= 0):
                raise ValueError("table: knot abscissae must be strictly increasing")
            knots.setflags(write=False)
            object.__setattr__(self, "params", {**self.params, "knots": knots})

    @classmethod
    def power(cls, p: float) -> "OrliczFunction":
        return cls("power", {"p": p})

    @classmethod
    def identity(cls) -> "OrliczFunction":
        return cls("identity")

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        """Evaluate M at ``t`` (scalar or array, all entries >= 0)."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0) or np.any(np.isnan(arr)):
            raise ValueError("Orlicz functions are defined on [0, inf)")
        with np.errstate(over="ignore", invalid="ignore"):
            out = self._raw(arr)
        # 0 * inf style residue must not leak into M(0)
        out = np.where(arr == 0.0, 0.0, out)
        if out.ndim == 0:
            return float(out)
        return out

    def _raw(self, t: np.ndarray) -> np.ndarray:
        fam = self.family
        if fam == "identity":
            return t.copy()
        if fam == "power":
            return t ** self.params["p"]
        if fam == "power-log":
            return t ** self.params["p"] * np.log1p(t)
        if fam == "exp-minus-one":
            return np.expm1(t)
        knots = self.params["knots"]
        ts, ms = knots[:, 0], knots[:, 1]
        slope = (ms[-1] - ms[-2]) / (ts[-1] - ts[-2])
        return np.where(t <= ts[-1], np.interp(t, ts, ms), ms[-1] + slope * (t - ts[-1]))

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"family": self.family}
        for k, v in self.params.items():
            d[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return d


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: tuple[float, ...] | None = None
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate(M: OrliczFunction, grid_size: int = 64, T_max: float = DEFAULT_T_MAX) -> ValidationReport:
    """Check zero, monotonicity, midpoint convexity and growth of ``M``.

    The grid is geometric over ``(0, T_max]`` (lowest point ``T_max * 1e-6``)
    with ``t = 0`` prepended.  Failures are reported, never raised.  The
    ``worst`` field of a failed check holds the most violating pair.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    grid = np.concatenate([[0.0], np.geomspace(T_max * 1e-6, T_max, grid_size)])
    vals = M.eval(grid)
    checks = []

    m0 = M.eval(0.0)
    checks.append(CheckResult("zero", m0 == 0.0, None if m0 == 0.0 else (0.0, m0)))

    drops = vals[:-1] - vals[1:]
    i = int(np.argmax(drops))
    ok = bool(drops[i] <= 0)
    checks.append(CheckResult("monotone", ok, None if ok else (grid[i], grid[i + 1]),
                              f"largest drop {max(drops[i], 0.0):.3g}"))

    i1, i2 = np.triu_indices(len(grid), k=1)
    t1, t2 = grid[i1], grid[i2]
    m1, m2 = vals[i1], vals[i2]
    with np.errstate(invalid="ignore", over="ignore"):
        mid = M.eval((t1 + t2) / 2)
        excess = mid - (m1 + m2) / 2 - 1e-12 * (1 + np.abs(m1) + np.abs(m2))
    excess = np.where(np.isfinite(excess), excess, -np.inf)
    j = int(np.argmax(excess))
    ok = bool(excess[j] <= 0)
    checks.append(CheckResult("convex", ok, None if ok else (t1[j], t2[j]),
                              f"largest midpoint excess {max(excess[j], 0.0):.3g}"))

    top = M.eval(T_max)
    grows = bool(top >= 1.0)
    checks.append(CheckResult("unbounded", grows, None if grows else (T_max, top)))
    return ValidationReport(checks)
