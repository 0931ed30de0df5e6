"""Operator norms, Hausdorff measure of noncompactness estimates, verdicts.

All limits superior are estimated on a finite horizon ``N``: rows
``0..N-1`` are evaluated and the limsup is read off the trailing window
``[N - window, N)``.  Two row scales are always computed side by side:
``orlicz`` (the Luxemburg-type functional of each associated row under the
space's modular) and ``l1`` (the plain l1 norm of the row).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .norms import BLOCK_REDUCTION, SpaceSpec, luxemburg_direct, luxemburg_rows
from .transform import MatrixSpec, associated_dense, column_limits, summation_matrix

__all__ = [
    "TARGETS", "target_kind", "ChiEstimate", "CompactnessVerdict", "OpNormReport",
    "row_functional", "effective_rows", "row_quantities", "op_norm", "chi_estimate", "classify",
]

# target tag -> (limit kind, triangle role)
TARGETS = {
    "c0": ("c0", None),
    "c": ("c", None),
    "linf": ("linf", None),
    "c0_T": ("c0", "user"),
    "c_T": ("c", "user"),
    "linf_T": ("linf", "user"),
    "cs0": ("c0", "summation"),
    "cs": ("c", "summation"),
    "bs": ("linf", "summation"),
    "c0_lprime": ("c0", "lambda-prime"),
    "c_lprime": ("c", "lambda-prime"),
    "linf_lprime": ("linf", "lambda-prime"),
}

_ITEM = {"c0": 0, "c": 1, "linf": 2}
_CHI_TAGS = {
    None: ("Thm 4.2(a)", "Thm 4.2(b)", "Thm 4.2(c)"),
    "user": ("Thm 5.4(1)", "Thm 5.4(2)", "Thm 5.4(3)"),
    "summation": ("Cor 5.9(1)", "Cor 5.9(2)", "Cor 5.9(3)"),
    "lambda-prime": ("Thm 5.4(1) [Lambda' triangle]", "Thm 5.4(2) [Lambda' triangle]",
                     "Thm 5.4(3) [Lambda' triangle]"),
}
_VERDICT_TAGS = {
    None: ("Cor 4.3(a)", "Cor 4.3(b)", "Cor 4.3(c)"),
    "user": _CHI_TAGS["user"],
    "summation": _CHI_TAGS["summation"],
    "lambda-prime": _CHI_TAGS["lambda-prime"],
}
_SOURCE_SHORTCUT = {None: "Thm 5.3", "user": "Thm 5.3", "summation": "Cor 5.8",
                    "lambda-prime": "Particular Case 5.6"}
_NORM_TAGS = {None: "Lemma 3.3", "user": "Thm 5.2", "summation": "Cor 5.7",
              "lambda-prime": "Particular Case 5.5"}

ROW_SCALES = ("orlicz", "l1")
DECAY_RATIO = 0.75
EXTRAPOLATED = "extrapolated per Thm 4.2 statement"


def target_kind(target: str) -> tuple[str, str | None]:
    try:
        return TARGETS[target]
    except KeyError:
        raise ValueError(f"unknown target {target!r}; expected one of {sorted(TARGETS)}") from None


def _resolve_triangle(target: str | None, T: MatrixSpec | None) -> MatrixSpec | None:
    if target is None:
        return T
    _, role = target_kind(target)
    if role is None:
        if T is not None:
            raise ValueError(f"target {target!r} takes no triangle; use {target}_T")
        return None
    if role == "summation":
        if T is None:
            return summation_matrix()
        if T.name != "summation":
            raise ValueError(f"target {target!r} requires the summation triangle, got {T.name!r}")
        return T
    if T is None:
        raise ValueError(f"target {target!r} needs a triangle")
    if role == "lambda-prime" and T.name != "lambda-prime":
        raise ValueError(f"target {target!r} requires the lambda-prime triangle, got {T.name!r}")
    if T.kind != "triangle":
        raise ValueError(f"{T.name} is not a triangle")
    return T


def row_functional(row, S: SpaceSpec, R: int, tol: float = 1e-10) -> float:
    """Luxemburg-type value of one associated row (no Lambda-bar applied)."""
    return luxemburg_direct(row, S, R, tol).value


def effective_rows(A: MatrixSpec, S: SpaceSpec, T: MatrixSpec | None, N: int,
                   ncols: int | None = None) -> np.ndarray:
    """Rows 0..N-1 of the associated matrix, pre-multiplied by ``T`` if given."""
    Abar = associated_dense(S.lam, A, N, ncols)
    if T is None:
        return Abar
    if T.kind != "triangle":
        raise ValueError(f"{T.name} is not a triangle")
    Tn = T.dense(N)
    if np.any(np.triu(Tn, 1) != 0) or np.any(np.diag(Tn) == 0):
        raise ValueError(f"{T.name} is not a triangle")
    return Tn @ Abar


def row_quantities(E: np.ndarray, S: SpaceSpec, R: int, tol: float, scale: str = "orlicz") -> np.ndarray:
    if scale == "orlicz":
        return luxemburg_rows(E, S, R, tol)[1]
    if scale == "l1":
        return np.abs(E).sum(axis=1)
    raise ValueError(f"unknown row scale {scale!r}; expected one of {ROW_SCALES}")


def _windows(N: int, window: int):
    if not N > window >= 2:
        raise ValueError(f"need N > window >= 2 (N = {N}, window = {window})")
    tail = (N - window, N)
    prev = (max(N - 2 * window, 0), N - window)
    return tail, prev


@dataclass
class OpNormReport:
    value: float
    per_n: np.ndarray
    l1_value: float
    l1_per_n: np.ndarray
    diverging: bool
    criterion: str
    row_scale: str = "orlicz"
    block_reduction: str = BLOCK_REDUCTION

    def to_dict(self, series: int | None = None) -> dict:
        sl = slice(None) if series is None else slice(max(len(self.per_n) - series, 0), None)
        idx = np.arange(len(self.per_n))[sl]
        return {
            "value": float(self.value),
            "l1_value": float(self.l1_value),
            "diverging": self.diverging,
            "criterion": self.criterion,
            "row_scale": self.row_scale,
            "block_reduction": self.block_reduction,
            "per_n": [[int(n), float(q)] for n, q in zip(idx, self.per_n[sl])],
            "l1_per_n": [[int(n), float(q)] for n, q in zip(idx, self.l1_per_n[sl])],
        }


def _diverging(q: np.ndarray, window: int, growth: float = 1e-3) -> bool:
    N = len(q)
    if N <= window:
        return False
    tail, prev = _windows(N, window)
    tail_max = q[tail[0]:].max()
    earlier = q[:tail[0]].max()
    prev_max = q[prev[0]:prev[1]].max()
    return bool(tail_max > earlier and tail_max > prev_max * (1 + growth))


def op_norm(A: MatrixSpec, S: SpaceSpec, T: MatrixSpec | None = None, N: int = 2048, R: int | None = None,
            tol: float = 1e-8, *, target: str | None = None, window: int = 128,
            row_scale: str = "orlicz", ncols: int | None = None) -> OpNormReport:
    """sup_n of the row functional over rows 0..N-1, with the l1 companion.

    ``value`` uses ``row_scale``; the other scale is reported alongside.
    ``diverging`` is set when the supremum is still being pushed up inside
    the trailing window.
    """
    if R is None:
        raise ValueError("R (block count) must be given explicitly")
    T = _resolve_triangle(target, T)
    role = target_kind(target)[1] if target is not None else ("user" if T is not None else None)
    E = effective_rows(A, S, T, N, ncols)
    q_orlicz = row_quantities(E, S, R, tol, "orlicz")
    q_l1 = row_quantities(E, S, R, tol, "l1")
    q, other = (q_orlicz, q_l1) if row_scale == "orlicz" else (q_l1, q_orlicz)
    return OpNormReport(float(q.max()), q, float(other.max()), other,
                        _diverging(q, min(window, N - 1)) if N > 2 else False,
                        _NORM_TAGS[role], row_scale)


@dataclass
class ChiEstimate:
    lower: float
    upper: float
    per_n: np.ndarray
    tail_window: tuple[int, int]
    converged: bool
    target: str
    formula: str
    row_scale: str = "orlicz"
    companion: dict = field(default_factory=dict)
    decay_ratio: float | None = None
    alpha: np.ndarray | None = None
    alpha_converged: bool | None = None
    warnings: list[str] = field(default_factory=list)
    block_reduction: str = BLOCK_REDUCTION

    @property
    def decaying(self) -> bool:
        return self.decay_ratio is not None and self.decay_ratio < DECAY_RATIO

    def to_dict(self, series: int | None = None) -> dict:
        sl = slice(None) if series is None else slice(max(len(self.per_n) - series, 0), None)
        idx = np.arange(len(self.per_n))[sl]
        d = {
            "lower": float(self.lower),
            "upper": float(self.upper),
            "tail_window": list(self.tail_window),
            "converged": self.converged,
            "target": self.target,
            "formula": self.formula,
            "row_scale": self.row_scale,
            "companion": self.companion,
            "decay_ratio": self.decay_ratio,
            "warnings": list(self.warnings),
            "block_reduction": self.block_reduction,
            "q_tail": [[int(n), float(q)] for n, q in zip(idx, self.per_n[sl])],
        }
        if self.alpha is not None:
            d["alpha_l1"] = float(np.abs(self.alpha).sum())
            d["alpha_converged"] = self.alpha_converged
        return d


def _bounds(kind: str, L: float) -> tuple[float, float]:
    if kind == "c0":
        return L, L
    if kind == "c":
        return L / 2.0, L
    return 0.0, L


def chi_estimate(A: MatrixSpec, S: SpaceSpec, target: str, T: MatrixSpec | None = None,
                 N: int = 2048, R: int | None = None, window: int = 128, tol: float = 1e-8,
                 *, row_scale: str = "orlicz", ncols: int | None = None) -> ChiEstimate:
    """Estimate ||L_A||_chi for ``A`` from the source space ``S`` into ``target``.

    c0-like targets: lower = upper = tail max of q_n.  c-like targets: the
    column limits are subtracted first and lower = upper / 2.  linf-like
    targets: lower = 0.
    """
    if R is None:
        raise ValueError("R (block count) must be given explicitly")
    kind, role = target_kind(target)
    T = _resolve_triangle(target, T)
    tail, prev = _windows(N, window)
    E = effective_rows(A, S, T, N, ncols)
    notes = []
    if S.target == "c":
        notes.append(f"source c^lambda: {EXTRAPOLATED}")

    alpha = None
    alpha_ok = None
    if kind == "c":
        lim = column_limits(E, window=window, eps=tol)
        alpha = lim.values
        # columns born inside the last two windows cannot show a limit yet
        settled = max(N - 2 * window, 1)
        alpha_ok = bool(np.all(lim.converged[:settled]))
        if not alpha_ok:
            notes.append("column limits not converged over the tail window")
        total = np.abs(alpha).sum()
        if np.abs(alpha[len(alpha) // 2:]).sum() > tol * (1 + total):
            notes.append("partial sums of |alpha| have not stabilised; alpha in l1 unconfirmed")
        E = E - alpha

    q = row_quantities(E, S, R, tol, row_scale)
    other_scale = "l1" if row_scale == "orlicz" else "orlicz"
    q_other = row_quantities(E, S, R, tol, other_scale)

    tail_max = float(q[tail[0]:tail[1]].max())
    prev_max = float(q[prev[0]:prev[1]].max()) if prev[1] > prev[0] else np.nan
    converged = bool(abs(tail_max - prev_max) <= tol * max(1.0, tail_max))
    if alpha_ok is False:
        converged = False

    half = N // 2
    decay = None
    if half - window >= 0 and half > 0:
        half_max = float(q[half - window:half].max())
        if half_max > 0:
            decay = tail_max / half_max

    lower, upper = _bounds(kind, tail_max)
    o_lower, o_upper = _bounds(kind, float(q_other[tail[0]:tail[1]].max()))
    return ChiEstimate(lower, upper, q, tail, converged, target, _CHI_TAGS[role][_ITEM[kind]],
                       row_scale, {"row_scale": other_scale, "lower": o_lower, "upper": o_upper},
                       decay, alpha, alpha_ok, notes)


@dataclass
class CompactnessVerdict:
    verdict: str
    criterion: str
    threshold: float
    evidence: ChiEstimate
    iff: bool
    note: str = ""

    def to_dict(self, series: int | None = None) -> dict:
        return {
            "verdict": self.verdict,
            "criterion": self.criterion,
            "threshold": self.threshold,
            "iff": self.iff,
            "note": self.note,
            "evidence": self.evidence.to_dict(series),
        }


def classify(A: MatrixSpec, S: SpaceSpec, target: str, T: MatrixSpec | None = None,
             N: int = 2048, R: int | None = None, window: int = 128, tol: float = 1e-8,
             threshold: float = 1e-6, *, row_scale: str = "orlicz",
             ncols: int | None = None) -> CompactnessVerdict:
    """Compact / not-compact / inconclusive verdict with its criterion tag.

    A linf^lambda source mapped into a c0- or c-like target is compact
    outright; the estimate is still attached.  Otherwise a converged
    estimate below ``threshold`` means compact, and a converged,
    non-decaying lower bound above it means not compact for the iff
    criteria (c0- and c-like targets).
    """
    est = chi_estimate(A, S, target, T, N, R, window, tol, row_scale=row_scale, ncols=ncols)
    kind, role = target_kind(target)
    iff = kind in ("c0", "c")
    note = "; ".join(est.warnings)

    if S.target == "linf" and kind in ("c0", "c"):
        return CompactnessVerdict("compact", _SOURCE_SHORTCUT[role], threshold, est, False,
                                  note or "compact for every operator from linf^lambda into this target")

    criterion = _VERDICT_TAGS[role][_ITEM[kind]]
    if not est.converged:
        verdict = "inconclusive"
    elif est.upper < threshold:
        verdict = "compact"
    elif iff and est.lower > threshold and not est.decaying:
        verdict = "not-compact"
    else:
        verdict = "inconclusive"
    if verdict == "inconclusive" and est.converged and est.decaying:
        note = "; ".join(filter(None, [note, f"row quantities still decaying (ratio {est.decay_ratio:.3g})"]))
    return CompactnessVerdict(verdict, criterion, threshold, est, iff, note)
