"""Acceptance criteria, one test per criterion, each reporting a PASS/FAIL line."""

import json
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import make_space
from lacunorm.config import load_preset, preset_names, resolve
from lacunorm.noncompactness import chi_estimate, classify, op_norm
from lacunorm.norms import dual_norm, luxemburg_norm, n_theta_norm
from lacunorm.oracle import (
    check_duality, check_matrix_identity, duality_scale, lambda_families, make_rng,
    matrix_families, random_sparse, sampled_dual_norm,
)
from lacunorm.orlicz import OrliczFunction
from lacunorm.transform import (
    LambdaSystem, apply_lambda_bar, cesaro_matrix, compose, identity_matrix,
    inverse_transform, lambda_bar_matrix, lambda_prime_matrix, summation_matrix,
)

SEED = 20240601


def preset_config(name, **overrides):
    return resolve(load_preset(name), overrides=overrides, need_matrix=True)


def test_1_duality_identity(criterion):
    t0 = time.perf_counter()
    rng = make_rng(SEED)
    lams = list(lambda_families(rng, 256).values())
    worst = 0.0
    for i in range(1000):
        L = lams[i % 3]
        a = random_sparse(rng, 64, 4)
        x = random_sparse(rng, 64, 4)
        worst = max(worst, check_duality(L, a, x) / duality_scale(a, x))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 5
    criterion("1", ok, f"duality, 1000 triples, worst scaled residual {worst:.2e}, {elapsed:.2f} s")
    assert ok


def test_2_matrix_identity(criterion):
    t0 = time.perf_counter()
    rng = make_rng(SEED)
    N = 256
    worst, where = 0.0, ""
    for lname, L in lambda_families(rng, 4 * N).items():
        for mname, A in matrix_families(rng, N).items():
            r = check_matrix_identity(L, A, rng.standard_normal(N), N)
            if r >= worst:
                worst, where = r, f"{mname} / {lname}"
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 10
    criterion("2", ok, f"Ax = Abar y at N = {N}, worst {worst:.2e} ({where}), {elapsed:.2f} s")
    assert ok


def test_3_triangle_structure(criterion):
    N = 200
    M = lambda_bar_matrix(LambdaSystem.shift(), N)
    diag_exact = all(Fraction(M[n, n]) == Fraction(float(Fraction(1, n + 1))) for n in range(N))
    off_zero = not np.any(M - np.diag(np.diag(M)))
    rng = make_rng(SEED)
    worst = 0.0
    for L in lambda_families(rng, N + 1).values():
        lam = L.values(N)
        sums = lambda_bar_matrix(L, N).sum(axis=1)
        worst = max(worst, float(np.max(np.abs(sums - lam[0] / lam) / (lam[0] / lam))))
    ok = diag_exact and off_zero and worst < 1e-12
    criterion("3", ok, f"diagonal 1/(n+1) exact: {diag_exact and off_zero}, "
                       f"row-sum relative error {worst:.2e}")
    assert ok


def test_4_norm_reduction(criterion):
    S = make_space()
    theta = S.theta
    R = 6
    rng = make_rng(SEED)
    worst = 0.0
    for _ in range(200):
        x = rng.standard_normal(64) * rng.uniform(0.01, 100)
        ref = n_theta_norm(apply_lambda_bar(S.lam, x), theta, R)
        got = luxemburg_norm(x, S, R).value
        worst = max(worst, abs(got - ref) / max(ref, 1.0))
    x_e1 = inverse_transform(S.lam, [0.0, 1.0])
    e1_err = abs(luxemburg_norm(x_e1, S, 3).value - 0.5)
    p_err = max(abs(luxemburg_norm(x_e1, make_space(M=OrliczFunction.power(p)), 3).value - 0.5 ** (1 / p))
                for p in (1.5, 2, 3))
    ok = worst < 1e-8 and e1_err < 1e-10 and p_err < 1e-10
    criterion("4", ok, f"reduction error {worst:.2e}, e1 error {e1_err:.2e}, power-p error {p_err:.2e}")
    assert ok


def test_5_norm_axioms(criterion):
    families = [OrliczFunction.identity(), OrliczFunction.power(2), OrliczFunction("exp-minus-one")]
    rng = make_rng(SEED)
    R = 5
    hom, tri_excess = 0.0, -np.inf
    for i in range(500):
        S = make_space(M=families[i % 3], lam=LambdaSystem.power(1 + i % 2))
        x = rng.standard_normal(32)
        y = rng.standard_normal(32) * rng.uniform(0.1, 10)
        c = rng.uniform(-20, 20)
        nx = luxemburg_norm(x, S, R).value
        ny = luxemburg_norm(y, S, R).value
        ncx = luxemburg_norm(c * x, S, R).value
        hom = max(hom, abs(ncx - abs(c) * nx) / max(abs(c) * nx, 1e-300))
        nxy = luxemburg_norm(x + y, S, R).value
        tri_excess = max(tri_excess, (nxy - nx - ny) / (nx + ny))
    # each norm is bisected to relative 1e-10, so the triangle inequality holds up to that
    ok = hom < 1e-8 and tri_excess <= 1e-9
    criterion("5", ok, f"homogeneity error {hom:.2e}, worst relative triangle excess {tri_excess:.2e}")
    assert ok


def _dual_rows():
    rows = []
    for name in preset_names():
        cfg = preset_config(name)
        for k in (0, 1):
            a = np.zeros(k + 1)
            a[k] = 1.0
            best, _ = sampled_dual_norm(a, cfg.space, cfg.sampler, cfg.sampler_N, cfg.sampler_R)
            classical = cfg.space.M.family == "identity" and cfg.space.s.is_one
            rows.append((name, k, best, dual_norm(a, cfg.space), classical))
    return rows


@pytest.fixture(scope="module")
def dual_rows():
    t0 = time.perf_counter()
    rows = _dual_rows()
    return rows, time.perf_counter() - t0


def test_6_sampled_dual_upper_bound(criterion, dual_rows):
    rows, elapsed = dual_rows
    bad = [(n, k, b, d) for n, k, b, d, _ in rows if b > d + 1e-8]
    ok = not bad and elapsed < 30
    detail = "; ".join(f"{n} e{k}: sampled {b:.6g} > {d:.6g}" for n, k, b, d in bad[:3])
    criterion("6 (hard upper bound)", ok,
              f"{len(rows)} preset/functional pairs, {len(bad)} violations, {elapsed:.1f} s"
              + (f" [{detail}]" if detail else ""))
    assert ok, detail


def test_6_sampled_dual_lower_diagnostic(criterion, dual_rows):
    rows, _ = dual_rows
    checked = [(n, k, b, d) for n, k, b, d, c in rows if c]
    low = [(n, k, b, d) for n, k, b, d in checked if b < 0.9 * d]
    ok = bool(checked) and not low
    criterion("6 (0.9 diagnostic)", ok, f"{len(checked)} identity-Orlicz pairs, {len(low)} below 0.9")
    assert ok


def _estimate(name, **overrides):
    cfg = preset_config(name, **overrides)
    return cfg, classify(cfg.matrix, cfg.space, cfg.target, cfg.triangle, cfg.N, cfg.R, cfg.window,
                         cfg.tol, cfg.threshold, row_scale=cfg.row_scale)


def test_7_chi_estimators(criterion):
    checks = {}
    _, v = _estimate("finite-rank")
    checks["finite-rank [0,0] compact"] = (v.evidence.lower, v.evidence.upper) == (0, 0) and v.verdict == "compact"
    _, v = _estimate("constant-row")
    checks["constant-row c0 [0.5,0.5] not-compact"] = (
        abs(v.evidence.lower - 0.5) < 1e-10 and abs(v.evidence.upper - 0.5) < 1e-10
        and v.verdict == "not-compact")
    cfg, v = _estimate("identity-assoc")
    checks["identity N=2^10 upper <= 2^-8"] = cfg.N == 1024 and v.evidence.upper <= 2.0 ** -8
    _, v = _estimate("constant-row-c")
    checks["constant-row c [0,0]"] = (v.evidence.lower, v.evidence.upper) == (0, 0)
    ordered = True
    for name in preset_names():
        cfg, v = _estimate(name)
        e = v.evidence
        ordered &= e.lower <= e.upper
        if cfg.target in ("c", "c_T", "cs", "c_lprime"):
            ordered &= 2 * e.lower == e.upper
    checks["lower <= upper, 2 lower = upper on c"] = ordered
    ok = all(checks.values())
    criterion("7", ok, ", ".join(f"{k}: {'ok' if v else 'NO'}" for k, v in checks.items()))
    assert ok, checks


def test_8_triangle_reduction(criterion):
    S = make_space()
    N, R, window = 256, 8, 32
    rng = make_rng(SEED)
    triangles = [identity_matrix(), summation_matrix(), cesaro_matrix(), lambda_prime_matrix(LambdaSystem.power(2))]
    sources = matrix_families(rng, N)
    worst = 0.0
    for T in triangles:
        for A in (sources["finite-rank"], sources["diagonal"], sources["cesaro"]):
            for tgt, plain in (("c0_T", "c0"), ("c_T", "c"), ("linf_T", "linf")):
                target = tgt
                if T.name == "lambda-prime":
                    target = tgt.replace("_T", "_lprime")
                with_T = chi_estimate(A, S, target, T, N, R, window)
                pre = chi_estimate(compose(T, A), S, plain, None, N, R, window)
                worst = max(worst, abs(with_T.lower - pre.lower), abs(with_T.upper - pre.upper),
                            float(np.max(np.abs(with_T.per_n - pre.per_n))))
    tags = {}
    cfg, v = _estimate("summation-bs")
    tags["bs chi"] = v.evidence.formula == "Cor 5.9(3)" and v.criterion == "Cor 5.9(3)"
    rep = op_norm(cfg.matrix, cfg.space, cfg.triangle, cfg.N, cfg.R, target=cfg.target, window=cfg.window)
    tags["bs norm"] = rep.criterion == "Cor 5.7"
    _, v = _estimate("summation-cs0")
    tags["cs0 chi"] = v.criterion == "Cor 5.9(1)"
    linf = make_space(target="linf")
    tags["linf source into cs0"] = classify(cfg.matrix, linf, "cs0", None, 256, 8, 32).criterion == "Cor 5.8"
    ok = worst < 1e-10 and all(tags.values())
    criterion("8", ok, f"worst deviation from precomposition {worst:.2e}; tags "
                       + ", ".join(f"{k}: {'ok' if v else 'NO'}" for k, v in tags.items()))
    assert ok, tags


def test_9_determinism(criterion):
    def cli(*argv):
        res = subprocess.run([sys.executable, "-m", "lacunorm", *argv, "--output", "json", "--seed", str(SEED)],
                             capture_output=True, check=False)
        return res.stdout

    same = {}
    for argv in (("verify",), ("chi", "--preset", "cesaro-c0"), ("chi", "--preset", "summation-bs")):
        a, b = cli(*argv), cli(*argv)
        json.loads(a)
        same[" ".join(argv)] = a == b and len(a) > 0
    ok = all(same.values())
    criterion("9", ok, ", ".join(f"{k}: {'identical' if v else 'DIFFERENT'}" for k, v in same.items()))
    assert ok
