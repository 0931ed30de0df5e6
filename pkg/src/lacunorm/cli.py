"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 config parse error,
3 validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from . import __version__
from .config import (
    DEFAULT_PRESET, NAMED_VECTORS, ConfigError, load_document, load_preset, named_vector,
    preset_names, resolve,
)
from .noncompactness import classify, op_norm
from .norms import luxemburg_norm
from .oracle import verify_suite

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_INVALID = 0, 1, 2, 3


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    return _text(doc)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _text(doc: dict) -> str:
    out = [f"# {doc['command']}  (preset: {doc.get('preset') or '-'})"]
    for key in ("report", "estimate", "verdict"):
        if key not in doc:
            continue
        out.append(f"[{key}]")
        for k, v in doc[key].items():
            if k in ("per_n", "l1_per_n", "q_tail", "evidence"):
                continue
            if k == "per_block":
                v = ", ".join(_fmt(b) for b in v)
            out.append(f"  {k}: {_fmt(v)}")
        if "q_tail" in doc[key] and doc[key]["q_tail"]:
            tail = doc[key]["q_tail"]
            out.append(f"  q_n tail: n = {tail[0][0]}..{tail[-1][0]}, last = {_fmt(tail[-1][1])}")
    if "checks" in doc:
        out.append(f"{'check':<28} {'tag':<32} {'value':>14} {'bound':>14}  result")
        for row in doc["checks"]:
            res = "PASS" if row["passed"] else ("FAIL" if row["hard"] else "fail (diagnostic)")
            out.append(f"{row['check']:<28} {row['tag']:<32} {row['value']:>14.6g} {row['bound']:>14.6g}  {res}")
        out.append(f"overall: {'PASS' if doc['passed'] else 'FAIL'}")
    for w in doc.get("warnings", []):
        out.append(f"warning: {w}")
    return "\n".join(out) + "\n"


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", metavar="PATH", help="JSON run configuration")
    src.add_argument("--preset", metavar="NAME", help=f"named preset (default {DEFAULT_PRESET})")
    common.add_argument("--output", choices=("text", "json"), help="report format")
    common.add_argument("--seed", type=int, help="sampler seed")
    common.add_argument("--N", type=int, help="truncation horizon (rows / sequence length)")
    common.add_argument("--R", type=int, help="number of lacunary blocks")

    ap = argparse.ArgumentParser(prog="lacunorm", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="Luxemburg-type norm of a sequence")
    xs = p.add_mutually_exclusive_group()
    xs.add_argument("--x", help="comma-separated sequence x_0,x_1,...")
    xs.add_argument("--vector", choices=NAMED_VECTORS, help="named test vector of length N")
    sub.add_parser("opnorm", parents=[common], help="operator norm, both row scales")
    sub.add_parser("chi", parents=[common], help="measure of noncompactness estimate and verdict")
    sub.add_parser("classify", parents=[common], help="compactness verdict")
    p = sub.add_parser("verify", parents=[common], help="run the oracle checks")
    p.add_argument("--corrupt-dual", action="store_true", help=argparse.SUPPRESS)
    sub.add_parser("presets", help="list the shipped presets")
    return ap


def _load(args) -> tuple[dict, str | None]:
    if args.config:
        return load_document(args.config), None
    name = args.preset or DEFAULT_PRESET
    return load_preset(name), name


def _norm(args, doc):
    overrides = {"N": args.N, "R": args.R, "seed": args.seed, "output": args.output}
    if args.x is not None:
        try:
            x = [float(v) for v in args.x.split(",") if v.strip()]
        except ValueError:
            raise ConfigError("--x", "expected comma-separated numbers") from None
        doc = {**doc, "x": x}
        doc.pop("vector", None)
    elif args.vector is not None:
        doc = {**doc, "vector": args.vector}
        doc.pop("x", None)
    if "x" in doc and args.N is None:
        if not isinstance(doc["x"], list) or not doc["x"]:
            raise ConfigError("x", "expected a non-empty list of numbers")
        overrides["N"] = max(len(doc["x"]), 3)
        if args.R is None:
            overrides["R"] = None
    cfg = resolve(doc, overrides=overrides, need_window=False)
    if "x" in doc:
        try:
            x = np.asarray(doc["x"], dtype=float)
        except (TypeError, ValueError):
            raise ConfigError("x", "expected a list of numbers") from None
    else:
        x = named_vector(doc.get("vector", "lambda-e1"), cfg.space.lam, cfg.N)
    rep = luxemburg_norm(x, cfg.space, cfg.R, tol=min(cfg.tol, 1e-10))
    return cfg, {"report": rep.to_dict()}, EXIT_OK


def _opnorm(args, cfg):
    rep = op_norm(cfg.matrix, cfg.space, cfg.triangle, cfg.N, cfg.R, cfg.tol, target=cfg.target,
                  window=cfg.window, row_scale=cfg.row_scale)
    return {"report": rep.to_dict(series=cfg.series_length)}


def _chi(args, cfg, with_estimate=True):
    ver = classify(cfg.matrix, cfg.space, cfg.target, cfg.triangle, cfg.N, cfg.R, cfg.window, cfg.tol,
                   cfg.threshold, row_scale=cfg.row_scale)
    d = ver.to_dict(series=cfg.series_length)
    evidence = d.pop("evidence")
    if with_estimate:
        return {"estimate": evidence, "verdict": d}
    d["bounds"] = [evidence["lower"], evidence["upper"]]
    d["converged"] = evidence["converged"]
    return {"verdict": d}


def _verify(args, cfg):
    rows = verify_suite(cfg.space, cfg.sampler_R, cfg.sampler, N=cfg.sampler_N,
                        corrupt=getattr(args, "corrupt_dual", False))
    checks = [r.to_dict() for r in rows]
    for c in checks:
        c["value"] = float(c["value"])
        c["bound"] = float(c["bound"])
        c["passed"] = bool(c["passed"])
    passed = all(c["passed"] for c in checks if c["hard"])
    return {"checks": checks, "passed": passed}, (EXIT_OK if passed else EXIT_VERIFY)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "presets":
        for name in preset_names():
            print(f"{name:<20} {load_preset(name).get('description', '')}")
        return EXIT_OK
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            doc, preset = _load(args)
            code = EXIT_OK
            if args.command == "norm":
                cfg, body, code = _norm(args, doc)
            else:
                overrides = {"N": args.N, "R": args.R, "seed": args.seed, "output": args.output}
                cfg = resolve(doc, overrides=overrides, need_matrix=args.command != "verify")
                if args.command == "opnorm":
                    body = _opnorm(args, cfg)
                elif args.command == "chi":
                    body = _chi(args, cfg)
                elif args.command == "classify":
                    body = _chi(args, cfg, with_estimate=False)
                else:
                    body, code = _verify(args, cfg)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except (ValueError, ZeroDivisionError, IndexError) as exc:
            print(f"validation error: {exc}", file=sys.stderr)
            return EXIT_INVALID
    notes = sorted({str(w.message) for w in caught if not issubclass(w.category, DeprecationWarning)})
    doc_out = {"command": args.command, "preset": preset, "config": cfg.doc, **body, "warnings": notes}
    sys.stdout.write(render(doc_out, cfg.output))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
