"""The weighted-difference triangle and the associated-coordinate transforms.

Everything here works on finite truncations: sequences are 1-D arrays indexed
from 0, matrices are row-finite and handed around as row generators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "LambdaSystem", "MatrixSpec", "AssociatedMatrix",
    "lambda_bar_entry", "lambda_bar_matrix", "apply_lambda_bar", "inverse_transform",
    "associated_dual", "associated_matrix", "compose", "composed_associated",
    "column_limits", "ColumnLimits",
    "identity_matrix", "zero_matrix", "cesaro_matrix", "summation_matrix",
    "diagonal_matrix", "difference_matrix", "lambda_prime_matrix", "explicit_matrix", "constant_row_matrix",
]


class LambdaSystem:
    """Strictly increasing positive weights lambda_k, with lambda_{-1} = 0.

    Rules: ``power`` gives ``(k+1)**d`` (``d = 1`` is the shift ``k+1``) and
    ``explicit`` takes a finite list, which then bounds the usable horizon.
    """

    def __init__(self, rule: str = "power", *, d: float = 1, values: Sequence[float] | None = None):
        self.rule = rule
        if rule == "power":
            if not d > 0:
                raise ValueError(f"power lambda needs d > 0, got {d}")
            self.d = d
            self._explicit = None
        elif rule == "explicit":
            vals = np.asarray(values, dtype=float)
            if vals.ndim != 1 or len(vals) < 2:
                raise ValueError("explicit lambda needs at least two values")
            if vals[0] <= 0:
                raise ValueError("lambda_0 must be positive")
            bad = np.flatnonzero(np.diff(vals) <= 0)
            if len(bad):
                raise ValueError(f"lambda not strictly increasing at k = {bad[0] + 1}")
            vals.setflags(write=False)
            self._explicit = vals
        else:
            raise ValueError(f"unknown lambda rule {rule!r}")

    @classmethod
    def shift(cls) -> "LambdaSystem":
        return cls("power", d=1)

    @classmethod
    def power(cls, d: float) -> "LambdaSystem":
        return cls("power", d=d)

    @classmethod
    def explicit(cls, values) -> "LambdaSystem":
        return cls("explicit", values=values)

    @property
    def horizon(self) -> int | None:
        return None if self._explicit is None else len(self._explicit)

    def values(self, n: int) -> np.ndarray:
        """lambda_0 .. lambda_{n-1}."""
        if self._explicit is not None:
            if n > len(self._explicit):
                raise ValueError(f"explicit lambda has {len(self._explicit)} terms, {n} needed")
            return np.array(self._explicit[:n])
        return np.arange(1, n + 1, dtype=float) ** self.d

    def diffs(self, n: int) -> np.ndarray:
        """lambda_k - lambda_{k-1} for k = 0..n-1 (first entry is lambda_0)."""
        return np.diff(self.values(n), prepend=0.0)

    def to_dict(self) -> dict:
        if self._explicit is not None:
            return {"rule": "explicit", "values": self._explicit.tolist()}
        return {"rule": "power", "d": self.d}

    def __repr__(self):
        return f"LambdaSystem({self.to_dict()})"


def lambda_bar_entry(L: LambdaSystem, n: int, k: int) -> float:
    if n < 0 or k < 0:
        raise ValueError("indices must be >= 0")
    if k > n:
        return 0.0
    lam = L.values(n + 2)
    d = np.diff(lam, prepend=0.0)
    if k == n:
        return float(d[n] / lam[n])
    return float((d[k] - d[k + 1]) / lam[n])


def lambda_bar_matrix(L: LambdaSystem, N: int) -> np.ndarray:
    """Dense ``N x N`` truncation of the triangle, built entry-wise."""
    lam = L.values(N + 1)
    d = np.diff(lam, prepend=0.0)
    off = d[:N] - d[1:N + 1]
    out = np.tril(np.broadcast_to(off, (N, N)) / lam[:N, None], k=-1)
    out[np.diag_indices(N)] = d[:N] / lam[:N]
    return out


def apply_lambda_bar(L: LambdaSystem, x) -> np.ndarray:
    """y_k = sum_{j<=k} (lambda_j - lambda_{j-1}) (x_j - x_{j-1}) / lambda_k."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n == 0:
        return x.copy()
    lam = L.values(n)
    d = np.diff(lam, prepend=0.0)
    return np.cumsum(d * np.diff(x, prepend=0.0)) / lam


def inverse_transform(L: LambdaSystem, y) -> np.ndarray:
    """Recover x from y = Lambda_bar x."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n == 0:
        return y.copy()
    lam = L.values(n)
    d = np.diff(lam, prepend=0.0)
    return np.cumsum(np.diff(lam * y, prepend=0.0) / d)


def _associate_rows(L: LambdaSystem, rows: np.ndarray) -> np.ndarray:
    # rows: (m, K); tail sums are exact because every row is zero past column K-1
    K = rows.shape[-1]
    lam = L.values(K + 1)
    d = np.diff(lam, prepend=0.0)
    tails = np.cumsum(rows[..., ::-1], axis=-1)[..., ::-1] - rows
    return lam[:K] * (rows / d[:K] + (1.0 / d[:K] - 1.0 / d[1:K + 1]) * tails)


def associated_dual(L: LambdaSystem, a) -> np.ndarray:
    """The transformed functional a-bar of a finitely supported ``a``.

    ``a`` is taken to be zero past its last entry; anything that is not a
    finite 1-D array (e.g. a generator for an infinite tail) is rejected.
    """
    if callable(a) or not hasattr(a, "__len__"):
        raise TypeError("associated_dual needs a finitely supported sequence; "
                        "closed-form infinite tails are not supported")
    a = np.asarray(a, dtype=float)
    if a.ndim != 1:
        raise ValueError("a must be one-dimensional")
    if len(a) == 0:
        return a.copy()
    return _associate_rows(L, a[None, :])[0]


@dataclass(frozen=True)
class MatrixSpec:
    """A row-finite infinite matrix given by ``row(n)``.

    ``row(n)`` returns the finite support of row ``n`` as a 1-D array, so the
    row support bound is ``len(row(n)) - 1``.  ``kind`` is one of
    ``triangle``, ``row-finite`` or ``direct-associated`` (rows are already
    in associated coordinates).
    """

    row: Callable[[int], np.ndarray]
    kind: str = "row-finite"
    name: str = "matrix"
    # optional fast path (N, ncols) -> dense rows; must agree with ``row``
    dense_fn: Callable[[int, int], np.ndarray] | None = None

    def __post_init__(self):
        if self.kind not in ("triangle", "row-finite", "direct-associated"):
            raise ValueError(f"unknown matrix kind {self.kind!r}")

    def row_support(self, n: int) -> int:
        return len(self.row(n)) - 1

    def check_triangle(self, N: int):
        for n in range(N):
            r = np.asarray(self.row(n))
            if len(r) != n + 1 or r[n] == 0:
                raise ValueError(f"{self.name} is not a triangle at row {n}")

    def dense(self, N: int, ncols: int | None = None) -> np.ndarray:
        """Rows ``0..N-1`` as an ``N x ncols`` array (``ncols`` defaults to N)."""
        ncols = N if ncols is None else ncols
        if self.dense_fn is not None:
            return self.dense_fn(N, ncols)
        out = np.zeros((N, ncols))
        for n in range(N):
            r = np.asarray(self.row(n), dtype=float)
            if len(r) > ncols:
                if np.any(r[ncols:] != 0):
                    raise ValueError(f"row {n} of {self.name} is supported beyond column {ncols - 1}")
                r = r[:ncols]
            out[n, :len(r)] = r
        return out


@dataclass(frozen=True)
class AssociatedMatrix:
    row: Callable[[int], np.ndarray]
    source: MatrixSpec | None = None
    lam: LambdaSystem | None = None
    dense_fn: Callable[[int, int], np.ndarray] | None = None

    def dense(self, N: int, ncols: int | None = None) -> np.ndarray:
        return MatrixSpec(self.row, "row-finite", "associated", self.dense_fn).dense(N, ncols)


def associated_matrix(L: LambdaSystem, A: MatrixSpec) -> AssociatedMatrix:
    if A.kind == "direct-associated":
        return AssociatedMatrix(A.row, A, L, dense_fn=A.dense)
    return AssociatedMatrix(lambda n: associated_dual(L, A.row(n)), A, L,
                            dense_fn=lambda N, ncols: associated_dense(L, A, N, ncols))


def associated_dense(L: LambdaSystem, A: MatrixSpec, N: int, ncols: int | None = None) -> np.ndarray:
    """Rows ``0..N-1`` of the associated matrix, computed in one batch."""
    ncols = N if ncols is None else ncols
    dense = A.dense(N, ncols)
    if A.kind == "direct-associated":
        return dense
    # a row supported up to column ncols-1 needs lambda_{ncols}; _associate_rows fetches it
    return _associate_rows(L, dense)


def _combine(T: MatrixSpec, row: Callable[[int], np.ndarray], n: int) -> np.ndarray:
    t = np.asarray(T.row(n), dtype=float)
    parts = [np.asarray(row(m), dtype=float) for m in range(n + 1)]
    width = max((len(p) for p in parts), default=0)
    out = np.zeros(width)
    for m, p in enumerate(parts):
        if t[m] != 0:
            out[:len(p)] += t[m] * p
    return out


def compose(T: MatrixSpec, A: MatrixSpec) -> MatrixSpec:
    """B = TA for a triangle T.  Row n of B is sum_{m<=n} t_nm A_m."""
    if T.kind != "triangle":
        raise ValueError(f"{T.name} is not a triangle")
    kind = "direct-associated" if A.kind == "direct-associated" else "row-finite"
    return MatrixSpec(lambda n: _combine(T, A.row, n), kind, f"{T.name}*{A.name}",
                      dense_fn=lambda N, ncols: T.dense(N) @ A.dense(N, ncols))


def composed_associated(T: MatrixSpec, Abar: AssociatedMatrix) -> AssociatedMatrix:
    if T.kind != "triangle":
        raise ValueError(f"{T.name} is not a triangle")
    return AssociatedMatrix(lambda n: _combine(T, Abar.row, n), Abar.source, Abar.lam,
                            dense_fn=lambda N, ncols: T.dense(N) @ Abar.dense(N, ncols))


@dataclass
class ColumnLimits:
    values: np.ndarray
    converged: np.ndarray
    oscillation: np.ndarray

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


def column_limits(rows, N: int | None = None, window: int = 128, eps: float = 1e-8) -> ColumnLimits:
    """Estimate lim_n of every column of a truncated matrix.

    ``rows`` is either a dense ``(N, K)`` array or an :class:`AssociatedMatrix`
    (then ``N`` is required).  The estimate is the value in the last row; a
    column counts as converged when its oscillation over the last ``window``
    rows is below ``eps``.
    """
    if isinstance(rows, AssociatedMatrix):
        if N is None:
            raise ValueError("N is required for a row generator")
        rows = rows.dense(N)
    rows = np.asarray(rows, dtype=float)
    n_rows = rows.shape[0]
    if not n_rows > window >= 2:
        raise ValueError(f"need N > window >= 2 (N = {n_rows}, window = {window})")
    tail = rows[n_rows - window:]
    osc = tail.max(axis=0) - tail.min(axis=0)
    return ColumnLimits(rows[-1].copy(), osc < eps, osc)


# --- matrix families -------------------------------------------------------

def identity_matrix(kind: str = "triangle") -> MatrixSpec:
    def row(n):
        r = np.zeros(n + 1)
        r[n] = 1.0
        return r
    return MatrixSpec(row, kind, "identity")


def zero_matrix() -> MatrixSpec:
    return MatrixSpec(lambda n: np.zeros(1), "row-finite", "zero")


def cesaro_matrix() -> MatrixSpec:
    return MatrixSpec(lambda n: np.full(n + 1, 1.0 / (n + 1)), "triangle", "cesaro",
                      dense_fn=lambda N, ncols: np.tril(np.ones((N, ncols))) / np.arange(1, N + 1)[:, None])


def summation_matrix() -> MatrixSpec:
    return MatrixSpec(lambda n: np.ones(n + 1), "triangle", "summation",
                      dense_fn=lambda N, ncols: np.tril(np.ones((N, ncols))))


def difference_matrix() -> MatrixSpec:
    """Backward differences: row n is e(n) - e(n-1)."""
    def row(n):
        r = np.zeros(n + 1)
        r[n] = 1.0
        if n:
            r[n - 1] = -1.0
        return r
    return MatrixSpec(row, "triangle", "difference")


def diagonal_matrix(diag: Callable[[int], float], kind: str = "row-finite") -> MatrixSpec:
    def row(n):
        r = np.zeros(n + 1)
        r[n] = diag(n)
        return r
    return MatrixSpec(row, kind, "diagonal")


def lambda_prime_matrix(Lp: LambdaSystem) -> MatrixSpec:
    """The weighted-difference triangle built from a second weight sequence."""
    def row(n):
        lam = Lp.values(n + 2)
        d = np.diff(lam, prepend=0.0)
        r = (d[:n + 1] - d[1:n + 2]) / lam[n]
        r[n] = d[n] / lam[n]
        return r
    return MatrixSpec(row, "triangle", "lambda-prime")


def explicit_matrix(rows: Sequence[Sequence[float]], kind: str = "row-finite", name: str = "explicit") -> MatrixSpec:
    """Rows given as lists; rows past the end of the list are zero."""
    stored = [np.asarray(r, dtype=float) for r in rows]
    if any(r.ndim != 1 or len(r) == 0 for r in stored):
        raise ValueError("explicit rows must be non-empty 1-D lists")

    def row(n):
        return stored[n].copy() if n < len(stored) else np.zeros(1)
    return MatrixSpec(row, kind, name)


def constant_row_matrix(pattern: Sequence[float], kind: str = "direct-associated") -> MatrixSpec:
    """Every row equals ``pattern``."""
    p = np.asarray(pattern, dtype=float)
    return MatrixSpec(lambda n: p.copy(), kind, "constant-row")
