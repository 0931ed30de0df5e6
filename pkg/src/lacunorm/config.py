"""Run configuration: JSON documents, named presets, and object construction.

Two failure classes are kept apart because the CLI maps them to different
exit codes: :class:`ConfigError` for documents that are malformed or miss a
fragment, ``ValueError`` for well-formed values that fail validation.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .lacunary import LacunarySequence
from .noncompactness import ROW_SCALES, TARGETS
from .norms import Exponents, SpaceSpec
from .oracle import SamplerConfig
from .orlicz import OrliczFunction
from .transform import (
    LambdaSystem, MatrixSpec, cesaro_matrix, constant_row_matrix, diagonal_matrix, difference_matrix,
    explicit_matrix,
    identity_matrix, inverse_transform, lambda_prime_matrix, summation_matrix, zero_matrix,
)


class ConfigError(Exception):
    """Malformed document; ``path`` names the offending fragment."""

    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


ANALYSIS_DEFAULTS = {
    "target": "c0",
    "N": 2048,
    "R": None,
    "window": 128,
    "tol": 1e-8,
    "threshold": 1e-6,
    "row_scale": "orlicz",
}
SAMPLER_DEFAULTS = {"samples": 10_000, "support": 3, "distribution": "sparse", "N": 64}
DEFAULT_PRESET = "cesaro-c0"


def _require(doc: dict, key: str, path: str = "") -> Any:
    full = f"{path}.{key}" if path else key
    if not isinstance(doc, dict):
        raise ConfigError(path or "<root>", "expected an object")
    if key not in doc:
        raise ConfigError(full, "missing required fragment")
    return doc[key]


def _typed(value, kind, path):
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(path, f"expected true/false, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
        return value
    if kind is list:
        if not isinstance(value, list):
            raise ConfigError(path, f"expected a list, got {value!r}")
        return value
    raise TypeError(kind)


def _opt(doc: dict, key: str, kind, default, path: str):
    if key not in doc or doc[key] is None:
        return default
    return _typed(doc[key], kind, f"{path}.{key}")


def _numbers(value, path) -> list[float]:
    _typed(value, list, path)
    return [_typed(v, float, f"{path}[{i}]") for i, v in enumerate(value)]


def preset_names() -> list[str]:
    folder = resources.files("lacunorm") / "presets"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> dict:
    path = resources.files("lacunorm") / "presets" / f"{name}.json"
    if not path.is_file():
        raise ConfigError("preset", f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return json.loads(path.read_text(encoding="utf-8"))


def load_document(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    return doc


def build_orlicz(frag: dict) -> OrliczFunction:
    family = _typed(_require(frag, "family", "orlicz"), str, "orlicz.family")
    params = {}
    if "p" in frag:
        params["p"] = _typed(frag["p"], float, "orlicz.p")
    if family == "table":
        knots = _typed(_require(frag, "knots", "orlicz"), list, "orlicz.knots")
        params["knots"] = [_numbers(k, f"orlicz.knots[{i}]") for i, k in enumerate(knots)]
    return OrliczFunction(family, params)


def build_theta(frag: dict) -> LacunarySequence:
    if not isinstance(frag, dict):
        raise ConfigError("theta", "expected an object")
    if "explicit" in frag:
        ks = _typed(frag["explicit"], list, "theta.explicit")
        return LacunarySequence.explicit([_typed(k, int, f"theta.explicit[{i}]") for i, k in enumerate(ks)])
    rule = _typed(_require(frag, "rule", "theta"), str, "theta.rule")
    if rule == "geometric":
        return LacunarySequence.geometric(_opt(frag, "q", float, 2.0, "theta"), _opt(frag, "c", float, 1.0, "theta"))
    if rule == "polynomial":
        return LacunarySequence.polynomial(_opt(frag, "d", int, 2, "theta"))
    raise ValueError(f"unknown theta rule {rule!r}")


def build_lambda(frag: dict, path: str = "lambda") -> LambdaSystem:
    if not isinstance(frag, dict):
        raise ConfigError(path, "expected an object")
    rule = _typed(_require(frag, "rule", path), str, f"{path}.rule")
    if rule == "power":
        return LambdaSystem.power(_opt(frag, "d", float, 1.0, path))
    if rule == "explicit":
        return LambdaSystem.explicit(_numbers(_require(frag, "values", path), f"{path}.values"))
    raise ValueError(f"unknown lambda rule {rule!r}")


def build_exponents(frag: dict | None) -> Exponents:
    if frag is None:
        return Exponents()
    rule = _typed(_require(frag, "rule", "space.s"), str, "space.s.rule")
    if rule == "constant":
        return Exponents("constant", _opt(frag, "value", float, 1.0, "space.s"))
    if rule == "explicit":
        return Exponents("explicit", values=_numbers(_require(frag, "values", "space.s"), "space.s.values"))
    raise ValueError(f"unknown s rule {rule!r}")


def _rows(frag: dict, path: str) -> list[list[float]]:
    rows = _typed(_require(frag, "rows", path), list, f"{path}.rows")
    return [_numbers(r, f"{path}.rows[{i}]") for i, r in enumerate(rows)]


def build_matrix(frag: dict, path: str = "matrix", lam_default: LambdaSystem | None = None) -> MatrixSpec:
    if not isinstance(frag, dict):
        raise ConfigError(path, "expected an object")
    family = _typed(_require(frag, "family", path), str, f"{path}.family")
    assoc = _opt(frag, "associated", bool, False, path)
    kind = "direct-associated" if assoc else None
    if family == "identity":
        return identity_matrix(kind or "triangle")
    if family == "zero":
        return zero_matrix() if not assoc else MatrixSpec(zero_matrix().row, "direct-associated", "zero")
    if family == "cesaro":
        A = cesaro_matrix()
    elif family == "summation":
        A = summation_matrix()
    elif family == "difference":
        A = difference_matrix()
    elif family == "lambda-prime":
        sub = frag.get("lambda")
        Lp = build_lambda(sub, f"{path}.lambda") if sub is not None else lam_default
        if Lp is None:
            raise ConfigError(f"{path}.lambda", "missing required fragment")
        A = lambda_prime_matrix(Lp)
    elif family == "diagonal":
        if "values" in frag:
            vals = _numbers(frag["values"], f"{path}.values")
            A = diagonal_matrix(lambda n: vals[n] if n < len(vals) else 0.0)
        else:
            power = _opt(frag, "power", float, 1.0, path)
            A = diagonal_matrix(lambda n: 1.0 / (n + 1) ** power)
    elif family in ("finite-rank", "explicit"):
        A = explicit_matrix(_rows(frag, path), name=family)
    elif family == "constant-row":
        A = constant_row_matrix(_numbers(_require(frag, "row", path), f"{path}.row"))
        if not assoc:
            A = MatrixSpec(A.row, "row-finite", A.name)
    else:
        raise ValueError(f"unknown matrix family {family!r}")
    if assoc:
        return MatrixSpec(A.row, "direct-associated", A.name, A.dense_fn)
    return A


def build_triangle(frag: dict | None, path: str = "analysis.triangle") -> MatrixSpec | None:
    if frag is None:
        return None
    T = build_matrix(frag, path)
    if T.kind != "triangle":
        if T.name == "explicit":
            T = MatrixSpec(T.row, "triangle", "explicit")
        else:
            raise ValueError(f"triangle family {T.name!r} is not a triangle")
    return T


@dataclass
class RunConfig:
    doc: dict
    space: SpaceSpec
    matrix: MatrixSpec | None
    triangle: MatrixSpec | None
    target: str
    N: int
    R: int
    window: int
    tol: float
    threshold: float
    row_scale: str
    sampler: SamplerConfig
    sampler_N: int
    sampler_R: int
    output: str
    seed: int

    @property
    def series_length(self) -> int:
        return min(self.N, 2 * self.window)


def _default_R(theta: LacunarySequence, N: int, path: str) -> int:
    try:
        return theta.largest_r_within(N)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def resolve(doc: dict, *, overrides: dict | None = None, need_matrix: bool = False,
            need_window: bool = True) -> RunConfig:
    """Validate a document (after CLI overrides) and build the run objects."""
    doc = copy.deepcopy(doc)
    overrides = overrides or {}
    analysis = dict(ANALYSIS_DEFAULTS)
    a_frag = doc.get("analysis", {})
    if not isinstance(a_frag, dict):
        raise ConfigError("analysis", "expected an object")
    for key, kind in (("target", str), ("N", int), ("R", int), ("window", int), ("tol", float),
                      ("threshold", float), ("row_scale", str)):
        analysis[key] = _opt(a_frag, key, kind, analysis[key], "analysis")
    for key in ("N", "R"):
        if overrides.get(key) is not None:
            analysis[key] = overrides[key]
    if analysis["target"] not in TARGETS:
        raise ValueError(f"analysis.target: unknown target {analysis['target']!r}")
    if analysis["row_scale"] not in ROW_SCALES:
        raise ValueError(f"analysis.row_scale: expected one of {ROW_SCALES}")
    if analysis["N"] < 3:
        raise ValueError("analysis.N must be >= 3")
    if need_window and not analysis["N"] > analysis["window"] >= 2:
        raise ValueError("analysis: need N > window >= 2")

    M = build_orlicz(_require(doc, "orlicz"))
    theta = build_theta(_require(doc, "theta"))
    lam = build_lambda(_require(doc, "lambda"))
    space_frag = _require(doc, "space")
    if not isinstance(space_frag, dict):
        raise ConfigError("space", "expected an object")
    include_k0 = _opt(space_frag, "include_k0", bool, True, "space")
    if "include_k0" in a_frag:
        ak0 = _typed(a_frag["include_k0"], bool, "analysis.include_k0")
        if "include_k0" in space_frag and ak0 != include_k0:
            raise ValueError("space.include_k0 and analysis.include_k0 disagree")
        include_k0 = ak0
    space = SpaceSpec(M, theta, lam, build_exponents(space_frag.get("s")),
                      _opt(space_frag, "target", str, "c0", "space"), include_k0)

    N = analysis["N"]
    R = analysis["R"]
    if R is None:
        R = _default_R(theta, N, "analysis.R")
    elif R < 1:
        raise ValueError("analysis.R must be >= 1")
    elif theta.k(R) > N:
        raise ValueError(f"analysis: N = {N} is shorter than k_R = {theta.k(R)} (R = {R})")

    matrix = None
    if "matrix" in doc:
        matrix = build_matrix(doc["matrix"], lam_default=lam)
    elif need_matrix:
        raise ConfigError("matrix", "missing required fragment")
    if "triangle" in doc and "triangle" in a_frag:
        raise ConfigError("triangle", "give the triangle once, under analysis")
    triangle = build_triangle(a_frag.get("triangle", doc.get("triangle")))

    seed = overrides.get("seed")
    if seed is None:
        seed = _opt(doc, "seed", int, 0, "<root>")
    s_frag = doc.get("sampler", {})
    if not isinstance(s_frag, dict):
        raise ConfigError("sampler", "expected an object")
    samples = _opt(s_frag, "samples", int, SAMPLER_DEFAULTS["samples"], "sampler")
    if samples < 1:
        raise ConfigError("sampler.samples", f"must be >= 1, got {samples}")
    sampler = SamplerConfig(seed, samples,
                            _opt(s_frag, "support", int, SAMPLER_DEFAULTS["support"], "sampler"),
                            _opt(s_frag, "distribution", str, SAMPLER_DEFAULTS["distribution"], "sampler"))
    sampler_N = _opt(s_frag, "N", int, SAMPLER_DEFAULTS["N"], "sampler")
    sampler_R = _default_R(theta, sampler_N, "sampler.N")

    output = overrides.get("output") or _opt(doc, "output", str, "text", "<root>")
    if output not in ("text", "json"):
        raise ValueError(f"output must be text or json, got {output!r}")

    doc["analysis"] = {**a_frag, **{k: v for k, v in analysis.items()}, "R": R}
    doc["seed"] = seed
    return RunConfig(doc, space, matrix, triangle, analysis["target"], N, R, analysis["window"],
                     analysis["tol"], analysis["threshold"], analysis["row_scale"], sampler,
                     sampler_N, sampler_R, output, seed)


NAMED_VECTORS = ("zero", "ones", "e0", "e1", "lambda-e1")


def named_vector(name: str, lam: LambdaSystem, N: int) -> np.ndarray:
    """Test vectors for the ``norm`` command; ``lambda-e1`` solves Lambda-bar x = e1."""
    if name == "zero":
        return np.zeros(N)
    if name == "ones":
        return np.ones(N)
    if name in ("e0", "e1"):
        v = np.zeros(N)
        v[int(name[1])] = 1.0
        return v
    if name == "lambda-e1":
        y = np.zeros(N)
        y[1] = 1.0
        return inverse_transform(lam, y)
    raise ValueError(f"unknown vector {name!r}; expected one of {NAMED_VECTORS}")
