"""Acceptance gate: every criterion runs at its stated tolerance and prints
one pass/fail line.  Run with `pytest tests/test_acceptance.py -v -s`.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest
import scipy.stats

from oracles import primitive_vectors
from saddlelab import (
    apply_matrix,
    builtin_surface,
    enumerate_up_to_length,
    first_n,
)
from saddlelab.cli import main as cli_main
from saddlelab.experiments import (
    growth_fit,
    multiset_contains,
    sector_scan,
    symdiff_experiment,
    weyl_experiment,
)
from saddlelab.lengths import (
    KIND_NO_ZERO,
    length_derivatives,
    linearize,
    pair_zero,
)
from saddlelab.params import ExperimentParameters
from saddlelab.sl2 import HaarSampler, cartan_t_inverse_cdf, diag_flow
from saddlelab.surface import BUILTIN_NAMES


def _report(tag: str, passed: bool, detail: str = "") -> None:
    state = "PASS" if passed else "FAIL"
    print(f"\nACCEPTANCE {tag}: {state}" + (f" ({detail})" if detail else ""))
    assert passed, f"{tag} failed: {detail}"


def test_c01_torus_oracle_equivalence(torus):
    start = time.time()
    spec = enumerate_up_to_length(torus, 40.0)
    oracle = primitive_vectors(40.0)
    got = sorted(map(tuple, np.round(spec.holonomies).astype(int)))
    want = sorted(map(tuple, oracle.astype(int)))
    multiset_ok = got == want and np.allclose(
        spec.holonomies, np.round(spec.holonomies), atol=1e-12
    )
    counts_ok = all(
        int(np.searchsorted(spec.lengths, r, side="right"))
        == len(primitive_vectors(float(r)))
        for r in range(1, 41)
    )
    elapsed = time.time() - start
    _report(
        "C1 torus-oracle",
        multiset_ok and counts_ok and elapsed < 10.0,
        f"{len(spec)} connections, {elapsed:.1f}s",
    )


def test_c02_quadratic_growth(torus, octagon, l_surface):
    start = time.time()
    t_spec = enumerate_up_to_length(torus, 100.0)
    torus_ratio = len(t_spec) / 100.0**2
    torus_ok = abs(torus_ratio - 6.0 / math.pi) / (6.0 / math.pi) < 0.02
    spreads = {}
    for surf in (octagon, l_surface):
        spec = enumerate_up_to_length(surf, 200.0)
        ratios = [
            int(np.searchsorted(spec.lengths, r, side="right")) / r**2
            for r in (50.0, 100.0, 200.0)
        ]
        spreads[surf.name] = (max(ratios) - min(ratios)) / min(ratios)
    spread_ok = all(v < 0.15 for v in spreads.values())
    elapsed = time.time() - start
    _report(
        "C2 quadratic-growth",
        torus_ok and spread_ok and elapsed < 300.0,
        f"torus ratio {torus_ratio:.4f} vs {6 / math.pi:.4f}; spreads "
        + ", ".join(f"{k}={v:.3f}" for k, v in spreads.items())
        + f"; {elapsed:.0f}s",
    )


def test_c03_flow_length_calculus():
    start = time.time()
    rng = np.random.default_rng(20260103)

    deriv_failures = 0
    for _ in range(10_000):
        v = rng.uniform(0.1, 1000.0, size=2)
        t = rng.uniform(-3.0, 3.0)
        h = 1e-5
        fp, fpp = length_derivatives(v, t)
        f = lambda x: math.hypot(math.exp(x) * v[0], math.exp(-x) * v[1])
        fd1 = (f(t + h) - f(t - h)) / (2 * h)
        fd2 = (length_derivatives(v, t + h)[0] - length_derivatives(v, t - h)[0]) / (2 * h)
        if abs(fp - fd1) > 1e-6 * max(1.0, abs(fd1)):
            deriv_failures += 1
        if abs(fpp - fd2) > 1e-6 * max(1.0, abs(fd2)):
            deriv_failures += 1

    grid = np.linspace(-10.0, 10.0, 10_000)
    e2, em2 = np.exp(2 * grid), np.exp(-2 * grid)
    tri_failures = 0
    for _ in range(10_000):
        v = rng.uniform(0.1, 10.0, size=2)
        w = rng.uniform(0.1, 10.0, size=2)
        if np.all(v == w):
            continue
        sep = pair_zero(v, w)
        vals = np.sqrt(e2 * v[0] ** 2 + em2 * v[1] ** 2) - np.sqrt(
            e2 * w[0] ** 2 + em2 * w[1] ** 2
        )
        signs = np.sign(vals)
        signs = signs[signs != 0]
        changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
        if sep.kind == KIND_NO_ZERO:
            if changes != 0:
                tri_failures += 1
        else:
            if changes != 1:
                tri_failures += 1
                continue
            diffs = np.diff(vals)
            scale = np.abs(vals).max()
            has_up = np.any(diffs > 1e-12 * scale)
            has_down = np.any(diffs < -1e-12 * scale)
            if has_up and has_down:
                tri_failures += 1

    elapsed = time.time() - start
    _report(
        "C3 flow-length-calculus",
        deriv_failures == 0 and tri_failures == 0 and elapsed < 30.0,
        f"derivative failures {deriv_failures}, trichotomy failures {tri_failures}, "
        f"{elapsed:.0f}s",
    )


def test_c04_linearization_bound():
    rng = np.random.default_rng(20260104)
    failures = 0
    worst_ratio = 0.0
    for _ in range(100_000):
        u = rng.normal(scale=rng.uniform(0.1, 100.0), size=2)
        norm = math.hypot(*u)
        if norm < 1e-12:
            continue
        s = rng.uniform(0.0, 0.2)
        approx, bound = linearize(u, s)
        err = abs(approx - math.hypot(math.exp(s) * u[0], math.exp(-s) * u[1]))
        if err > bound:
            failures += 1
        if s > 0:
            worst_ratio = max(worst_ratio, err / (s * s * norm))
    _report(
        "C4 linearization-bound",
        failures == 0,
        f"zero failures in 1e5 draws; worst empirical constant {worst_ratio:.3f} of 42",
    )


def test_c05_prefix_sandwich():
    start = time.time()
    failures = 0
    checked = 0
    for si, name in enumerate(BUILTIN_NAMES):
        surface = builtin_surface(name)
        sampler = HaarSampler(T=1.0, seed=2026 + si)
        for i in range(100):
            rng = np.random.default_rng(np.random.SeedSequence((2026, si, i)))
            s = rng.uniform(0.0, 1.0)
            n = int(rng.integers(10, 301))
            g = sampler.sample(i)
            base = apply_matrix(surface, g)
            nth_len = float(first_n(base, n).lengths[-1])
            big = enumerate_up_to_length(base, math.exp(2 * s) * nth_len * (1 + 1e-12))
            flow = diag_flow(s)
            moved = apply_matrix(base, flow)
            prefix = first_n(moved, n)
            big_mapped = big.holonomies @ flow.matrix.T
            small_mapped = (
                big.holonomies[big.lengths <= math.exp(-2 * s) * nth_len] @ flow.matrix.T
            )
            if not multiset_contains(prefix.holonomies, big_mapped):
                failures += 1
            if not multiset_contains(small_mapped, prefix.holonomies):
                failures += 1
            checked += 1
    elapsed = time.time() - start
    _report(
        "C5 prefix-sandwich",
        failures == 0 and elapsed < 300.0,
        f"{checked} instances across {len(BUILTIN_NAMES)} surfaces, "
        f"{failures} failures, {elapsed:.0f}s",
    )


def test_c06_nth_length_bracket(fitted_constants):
    start = time.time()
    failures = 0
    for name in BUILTIN_NAMES:
        surface = builtin_surface(name)
        fit = fitted_constants(surface)
        for t in np.linspace(0.0, 1.0, 50):
            flowed = apply_matrix(surface, diag_flow(float(t)))
            lengths = first_n(flowed, 1024).lengths
            for n in (16, 64, 256, 1024):
                nth = float(lengths[n - 1])
                lo = math.sqrt(n) / (fit.c2_hat * math.log(n))
                hi = math.sqrt(n) / fit.c1_hat
                if not (lo <= nth <= hi):
                    failures += 1
    elapsed = time.time() - start
    _report(
        "C6 nth-length-bracket",
        failures == 0,
        f"4 surfaces x 50 flow times x 4 prefix sizes, {failures} failures, {elapsed:.0f}s",
    )


def test_c07_sector_constant_stability(torus, octagon):
    start = time.time()
    details = []
    ok = True
    for surf in (torus, octagon):
        report = sector_scan(surf, 200.0, [0.05], 64, scan_levels=2)
        r100, r200 = report.max_ratio[0]
        ok = ok and math.isfinite(r200) and r200 > 0
        rel = abs(r200 - r100) / r100
        ok = ok and rel < 0.20
        details.append(f"{surf.name}: c4={report.c4_emp:.4f}, drift {rel:.3f}")
    elapsed = time.time() - start
    _report("C7 sector-constant", ok, "; ".join(details) + f"; {elapsed:.0f}s")


def test_c08_weyl_decay_trend(octagon):
    start = time.time()
    wins = 0
    for seed in range(1, 11):
        params = ExperimentParameters(N=5000, samples=10, seed=seed)
        report = weyl_experiment(
            octagon, params, p_values=(1, 2), n_grid=(500, 5000), workers=2
        )
        weyl_drops = all(
            report.mean_abs_weyl[q][1] < report.mean_abs_weyl[q][0] for q in range(2)
        )
        dstar_drops = report.mean_dstar[1] < report.mean_dstar[0]
        if weyl_drops and dstar_drops:
            wins += 1
    elapsed = time.time() - start
    _report(
        "C8 weyl-decay-trend",
        wins >= 8 and elapsed < 1200.0,
        f"{wins}/10 seeds show decay for p in (1, 2) and D*, {elapsed:.0f}s",
    )


def test_c09_shell_instability_trend(torus):
    start = time.time()
    params = ExperimentParameters(seed=2026)
    report = symdiff_experiment(
        torus, 0.0, params, n_values=(100, 200, 400), t_points=200, st_samples=4, workers=2
    )
    fractions = [report.bad_fraction[n] for n in (100, 200, 400)]
    monotone = all(a >= b for a, b in zip(fractions, fractions[1:]))
    elapsed = time.time() - start
    _report(
        "C9 shell-instability-trend",
        monotone and report.sandwich_failures == 0,
        f"bad-t fractions {fractions}, sandwich failures {report.sandwich_failures}, "
        f"{elapsed:.0f}s",
    )


def test_c10_haar_sampler_distribution():
    sampler = HaarSampler(T=1.0, seed=20260110)
    n = 100_000
    coords = [sampler.coords(i) for i in range(n)]
    ts = np.sort([c.t for c in coords])
    cdf = (np.cosh(2 * ts) - 1.0) / (np.cosh(2.0) - 1.0)
    i = np.arange(1, n + 1)
    ks = max(np.abs(i / n - cdf).max(), np.abs(cdf - (i - 1) / n).max())

    pvals = []
    for values in ([c.theta for c in coords], [c.psi for c in coords]):
        hist, _ = np.histogram(values, bins=64, range=(0.0, 2 * math.pi))
        chi2 = float(((hist - n / 64) ** 2 / (n / 64)).sum())
        pvals.append(float(scipy.stats.chi2.sf(chi2, df=63)))

    ok = ks < 0.01 and all(p > 0.001 for p in pvals)
    _report(
        "C10 haar-sampler",
        ok,
        f"KS {ks:.4f} < 0.01; angle chi2 p-values {pvals[0]:.3f}, {pvals[1]:.3f}",
    )


def test_c11_cli_determinism(tmp_path):
    def run(label, workers):
        out = tmp_path / label
        code = cli_main(
            [
                "weyl",
                "--surface",
                "square-torus",
                "--first-n",
                "200",
                "--samples",
                "3",
                "--seed",
                "13",
                "--workers",
                workers,
                "--output",
                str(out),
            ]
        )
        assert code == 0
        return out

    a = run("w1", "1")
    b = run("w2", "2")
    tsv_same = (a / "series.tsv").read_bytes() == (b / "series.tsv").read_bytes()
    png_same = (a / "figure.png").read_bytes() == (b / "figure.png").read_bytes()
    docs = []
    for out in (a, b):
        doc = json.loads((out / "report.json").read_text())
        doc["provenance"]["timestamp"] = None
        docs.append(doc)
    _report(
        "C11 determinism",
        tsv_same and png_same and docs[0] == docs[1],
        "workers 1 vs 2 byte-identical (timestamp excluded)",
    )
