"""Acceptance suite: one PASS/FAIL line per criterion at the required tolerances.

Run directly (``python tests/test_acceptance.py``) or through pytest, which
also lists the lines in an "acceptance criteria" summary section.
"""
import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from oracles import brute_force_class_b
from randombeta.field import make_field
from randombeta.measures import (build_lebesgue_chain, build_measure, cylinder_measure, entropy_pressure,
                                 novelty_check)
from randombeta.partition import is_class_B
from randombeta.pipeline import GOLDEN, QUARTIC, build_pipeline, golden, quartic
from randombeta.sft import full_two_shift
from randombeta.simulate import SimConfig, empirical_stats, frequency_sigmas, orbit_check, sample_chain
from randombeta.thermo import PotentialSpec, depth_for_tolerance, eigen_residual, potential_truncated, \
    power_lambda, residual_bound
from test_partition import CLASS_B_FIELDS

F = Fraction
LOG2 = math.log(2)
ALPHAS = (1.5, 2.0, 4.0)


def record(num, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def theta_cases(n_digits, seed):
    rng = np.random.default_rng(seed)
    cases = [("zero", (0.0,) * n_digits), ("i*log2", tuple(i * LOG2 for i in range(n_digits)))]
    for r in range(2):
        cases.append((f"random{r}", tuple(rng.uniform(-1, 1, n_digits).tolist())))
    return cases


@pytest.fixture(scope="module")
def eigen_runs(gold, quart):
    """power_lambda and eigen_residual for every (field, theta, alpha) case."""
    runs = []
    for name, pipe, seed in (("golden", gold, 1), ("quartic", quart, 2)):
        for tname, theta in theta_cases(pipe.sft.n_digits, seed):
            for alpha in ALPHAS:
                spec = PotentialSpec(theta, alpha)
                n = depth_for_tolerance(spec, 1e-8)
                t0 = time.perf_counter()
                lam = power_lambda(pipe.sft, spec, n).lambda_est
                elapsed = time.perf_counter() - t0
                checks = [(m, eigen_residual(pipe.sft, spec, m), residual_bound(spec, m))
                          for m in sorted({3, 6, min(n, 12), n})]
                runs.append(dict(case=f"{name}/{tname}/alpha={alpha}", spec=spec, depth=n, lam=lam,
                                 elapsed=elapsed, checks=checks))
    return runs


def test_c01_closed_form_eigenvalue(eigen_runs):
    errs = [abs(r["lam"] - r["spec"].lam) for r in eigen_runs]
    slow = max(r["elapsed"] for r in eigen_runs)
    ok = max(errs) <= 1e-6 and slow < 30
    assert record(1, "closed-form eigenvalue", ok,
                  f"{len(eigen_runs)} cases, max |lambda - sum e^theta| = {max(errs):.2e} (tol 1e-6), "
                  f"depths {min(r['depth'] for r in eigen_runs)}..{max(r['depth'] for r in eigen_runs)}, "
                  f"slowest {slow:.3f}s (limit 30s)")


def test_c02_eigen_residual_bound(eigen_runs):
    triples = [(r["case"], m, res, bound) for r in eigen_runs for m, res, bound in r["checks"]]
    bad = [t for t in triples if not t[2] <= t[3]]
    worst = max(res / bound if bound else (0.0 if res == 0 else math.inf) for _, _, res, bound in triples)
    assert record(2, "eigen-residual bound", not bad,
                  f"{len(triples)} (theta, alpha, n) triples, max residual/bound = {worst:.3f}, violations {len(bad)}")


def _fixture_variation(n, deep=40):
    """Brute-force sup-oscillation of the fixture potential over n-cylinders."""
    sft = full_two_shift()
    spec = PotentialSpec((-2.0, 2.0), 2.0)
    worst = 0.0
    for head in itertools.product([0, 1], repeat=n):
        hi = potential_truncated(sft, spec, list(head) + [1] * (deep - n))[0]
        lo = potential_truncated(sft, spec, list(head) + [0] * (deep - n))[0]
        worst = max(worst, hi - lo)
    return worst


def test_c03_fixture():
    spec = PotentialSpec((-2.0, 2.0), 2.0)
    lam = power_lambda(full_two_shift(), spec, 45).lambda_est
    lam_err = abs(lam - (math.e**2 + math.e**-2))
    var = {n: _fixture_variation(n) for n in range(1, 7)}
    var_err = max(abs(v - 2.0 ** (-n + 1)) for n, v in var.items())
    ratio = {n: var[n] / 2.0 ** (-n + 1) for n in var}
    ok = lam_err <= 1e-10 and var_err <= 1e-9
    assert record(3, "two-shift fixture", ok,
                  f"|lambda - (e^2+e^-2)| = {lam_err:.1e} (tol 1e-10); var_n / 2^(-n+1) = "
                  f"{', '.join(f'{ratio[n]:.6f}' for n in sorted(ratio))} for n = 1..6 (required 1)")


def test_c04_pressure_identity(gold, quart):
    rng = np.random.default_rng(4)
    worst = 0.0
    for pipe in (gold, quart):
        for _ in range(100):
            theta = rng.uniform(-3, 3, pipe.sft.n_digits)
            worst = max(worst, abs(entropy_pressure(build_measure(pipe.sft, theta))["pressure_check"]))
    assert record(4, "pressure identity", worst <= 1e-12,
                  f"200 random theta, max |h + sum w theta - log sum e^theta| = {worst:.1e} (tol 1e-12)")


def test_c05_max_entropy(gold, quart):
    errs = []
    for pipe in (gold, quart):
        h = entropy_pressure(build_measure(pipe.sft, [0.0] * pipe.sft.n_digits))["entropy"]
        errs.append(abs(h - math.log(math.ceil(pipe.ctx.beta_float))))
    assert record(5, "maximal-entropy specialization", max(errs) <= 1e-12,
                  f"|h - log ceil(beta)| golden {errs[0]:.1e}, quartic {errs[1]:.1e} (tol 1e-12)")


def _g_relation_failures(rep, depth, rel_tol=None):
    sft, w = rep.sft, (rep.exact["w"] if rel_tol is None else rep.weights)
    bad = total = 0
    worst = 0.0
    for n in range(2, depth + 1):
        for word in sft.words(n):
            word = word.tolist()
            lhs = cylinder_measure(rep, word)
            rhs = w[sft.digit_label[(word[0], word[1])]] * cylinder_measure(rep, word[1:])
            total += 1
            if rel_tol is None:
                bad += lhs != rhs
            else:
                err = abs(lhs - rhs) / abs(rhs)
                worst = max(worst, err)
                bad += err > rel_tol
    return bad, total, worst


def test_c06_g_relation(gold, quart):
    exact = [build_measure(gold.sft, weights=[F(1, 3), F(2, 3)]),
             build_measure(quart.sft, weights=[F(k, 10) for k in range(1, 5)])]
    b1, t1, _ = _g_relation_failures(exact[0], 8)
    b2, t2, _ = _g_relation_failures(exact[1], 8)
    fl = build_measure(gold.sft, [0.3, -1.1])
    b3, t3, worst = _g_relation_failures(fl, 8, rel_tol=1e-14)
    ok = b1 == b2 == b3 == 0
    assert record(6, "g-measure relation", ok,
                  f"exact: golden {t1 - b1}/{t1}, quartic {t2 - b2}/{t2} words equal; "
                  f"float golden {t3 - b3}/{t3} within 1e-14 (max rel {worst:.1e})")


def test_c07_incoming_digit_bijection():
    sfts = [build_pipeline(mp, iv, 100_000).sft for mp, iv in CLASS_B_FIELDS] + [full_two_shift()]
    bad = 0
    for sft in sfts:
        for j in range(sft.n_states):
            incoming = sorted(sft.digits[i, j] for i in sft.predecessors(j))
            bad += incoming != list(range(sft.n_digits))
    assert record(7, "incoming digit bijection", bad == 0,
                  f"{len(sfts)} SFTs, {bad} states with a wrong incoming digit multiset")


def test_c08_class_b_certification():
    out = {}
    for name, (minpoly, interval) in (("golden", GOLDEN), ("quartic", QUARTIC)):
        res = is_class_B(make_field(minpoly, interval), 10_000)
        oracle, pts = brute_force_class_b(minpoly, [F(x) for x in interval])
        agree = res.verdict == oracle and sorted(float(x) for x in res.orbit.points) == pytest.approx(pts, abs=1e-12)
        out[name] = (res.verdict, len(res.orbit.points), agree)
    ok = out["golden"][0] == "yes" and out["golden"][1] == 4 and out["quartic"][0] == "yes" \
        and out["golden"][2] and out["quartic"][2]
    assert record(8, "class-B certification", ok,
                  f"golden {out['golden'][0]} |F|={out['golden'][1]}, quartic {out['quartic'][0]} "
                  f"|F|={out['quartic'][1]} (budget 1e4); oracle agreement {out['golden'][2]}/{out['quartic'][2]}")


def test_c09_lebesgue_chain(gold, quart):
    rows_exact = True
    worst = 0.0
    for pipe in (gold, quart):
        for p in (F(1, 4), F(1, 2), F(3, 4)):
            chain = build_lebesgue_chain(pipe.partition, pipe.sft, p)
            for row in chain.P_exact:
                rows_exact &= sum(row, pipe.ctx.zero) == pipe.ctx.one
            worst = max(worst, *chain.switch_identity_residuals)
    assert record(9, "Lebesgue chain", rows_exact and worst <= 1e-12,
                  f"rows sum to 1 exactly: {rows_exact}; max switch-identity residual {worst:.1e} (tol 1e-12)")


def test_c10_novelty(gold):
    ps = (F(1, 4), F(1, 2), F(3, 4))
    chains = [build_lebesgue_chain(gold.partition, gold.sft, p) for p in ps]
    uniform = build_measure(gold.sft, [0.0, 0.0])
    first = all(novelty_check(uniform, c).distinct for c in chains)
    rng = np.random.default_rng(10)
    tested = failing = 0
    for _ in range(50):
        rep = build_measure(gold.sft, rng.uniform(-3, 3, 2))
        for c in chains:
            res = novelty_check(rep, c)
            if not res.scalar_condition:
                tested += 1
                failing += not res.distinct
    assert record(10, "novelty", first and failing == 0,
                  f"theta=(0,0) distinct for p in 1/4,1/2,3/4: {first}; "
                  f"{tested - failing}/{tested} scalar-failing cases distinct")


def test_c11_conjugacy(gold, quart):
    parts = []
    total = 0
    for name, pipe, theta in (("golden", gold, [0.0, LOG2]), ("quartic", quart, [0.0, 0.3, -0.2, 0.5])):
        rep = build_measure(pipe.sft, theta)
        path = sample_chain(rep, SimConfig(11, 100_000 + 12))
        res = orbit_check(pipe.partition, pipe.sft, path, 12)
        total += res.violations
        parts.append(f"{name} {res.windows} windows ({res.distinct_windows} distinct) {res.violations} violations")
    assert record(11, "conjugacy", total == 0, "; ".join(parts) + " at depth 12")


def test_c12_statistics(gold):
    N = 10**6
    t0 = time.perf_counter()
    rep = build_measure(gold.sft, [0.0, LOG2])
    path = sample_chain(rep, SimConfig(12, N))
    rpt = empirical_stats(path, gold.sft, rep, k_max=20)
    sig = frequency_sigmas(rep, gold.sft, N)
    elapsed = time.perf_counter() - t0
    switch_mass = float(rep.m[list(gold.sft.switch_states)].sum())
    z_switch = abs(rpt.switch_visit_rate - switch_mass) / sig["switch"]
    z_digit = max(abs(f - w) / s for f, w, s in zip(rpt.digit_freq, rep.weights, sig["digit"]))
    rho = rpt.correlation[20]
    ok = rpt.switch_visit_rate > 0 and z_switch <= 3 and z_digit <= 3 and abs(rho) <= 0.05 and elapsed < 60
    assert record(12, "statistics", ok,
                  f"N=1e6: switch rate {rpt.switch_visit_rate:.5f} vs {switch_mass:.5f} ({z_switch:.2f} sigma), "
                  f"digits max {z_digit:.2f} sigma, |rho(20)| = {abs(rho):.1e}, {elapsed:.1f}s (limit 60s)")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
