"""The ten acceptance criteria at their stated tolerances and runtime targets.

Each test prints one ``criterion k PASS|FAIL ...`` line; the lines are also
collected into an ``acceptance criteria`` section of the pytest summary.
"""

import math
import time
import warnings

import numpy as np
import pytest
from scipy import integrate, stats

from urnctrw.ctrw import default_start
from urnctrw.errors import TruncationWarning
from urnctrw.harness import Study, default_config, run_study
from urnctrw.harness.studies import eval_grid
from urnctrw.mittag_leffler import mittag_leffler
from urnctrw.pearson import DEFAULT_CHAIN_PARAMS, ChainParams, DiffusionKind, derive_params, stationary_law
from urnctrw.spectral import SpectralDensity, caputo_derivative, eigen_system

OU, CIR, JAC = DiffusionKind.OU, DiffusionKind.CIR, DiffusionKind.JACOBI
KINDS = (OU, JAC, CIR)
CRITERION_PARAMS = {
    OU: ChainParams(2.0, 1.0, 0.0),
    JAC: ChainParams(1.0, 1.0, 1.0),
    CIR: ChainParams(1.0, 2.0, 4.0, d=0.5),
}


def _verdict(report, k, name, ok, detail, elapsed, target):
    in_time = elapsed < target
    status = "PASS" if ok and in_time else "FAIL"
    report(f"criterion {k} {status} {name}: {detail}; {elapsed:.1f} s (target < {target:g} s)")
    assert ok, detail
    assert in_time, f"runtime {elapsed:.1f} s exceeds {target:g} s"


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_default_parameters_match_criteria():
    assert {k: DEFAULT_CHAIN_PARAMS[k] for k in KINDS} == CRITERION_PARAMS


def test_criterion_01_generator_convergence(report):
    cfg = default_config(Study.GENERATOR_CONVERGENCE)
    assert cfg.n_list == (2**8, 2**10, 2**12, 2**14)
    assert set(cfg.kinds) == set(KINDS) and cfg.gate("reference_n", None) == 2**10
    table, dt = _timed(lambda: run_study(cfg))
    ratios = [r.value for r in table.rows if r.statistic == "final_ratio"]
    decays = [r for r in table.rows if r.statistic == "decay_ratio"]
    detail = (f"{len(decays)} decay steps all < 1: {all(r.passed for r in decays)}, "
              f"worst error(2^14)/error(2^10) = {max(ratios):.3f} (< 0.5)")
    _verdict(report, 1, "generator convergence", table.passed, detail, dt, 60)


def test_criterion_02_bernoulli_laplace_stationarity(report):
    cfg = default_config(Study.STATIONARITY)
    assert cfg.n_list == (20,) and cfg.option("steps", None) == 10**6
    table, dt = _timed(lambda: run_study(cfg))
    (p,) = [r.value for r in table.rows if r.statistic == "p_value"]
    _verdict(report, 2, "Bernoulli-Laplace stationarity", p >= 0.01,
             f"chi-square p = {p:.3f} (>= 0.01)", dt, 10)


def test_criterion_03_mittag_leffler(report):
    def run():
        e_half = abs(mittag_leffler(0.5, -1.0) - math.e * math.erfc(1.0))
        e_one = max(abs(mittag_leffler(1.0, -z) - math.exp(-z)) for z in (0.1, 1.0, 10.0))
        return e_half, e_one
    (e_half, e_one), dt = _timed(run)
    _verdict(report, 3, "Mittag-Leffler accuracy", e_half < 1e-10 and e_one < 1e-12,
             f"|E_1/2(-1) - e erfc(1)| = {e_half:.1e} (< 1e-10), "
             f"max |E_1(-z) - exp(-z)| = {e_one:.1e} (< 1e-12)", dt, 1)


def test_criterion_04_eigen_structure(report):
    def run():
        out = {}
        for kind in KINDS:
            es = eigen_system(kind, derive_params(kind, CRITERION_PARAMS[kind]), 50)
            out[kind] = (es.gram_error, float(es.generator_residual(eval_grid(kind), 10).max()))
        return out
    res, dt = _timed(run)
    ok = all(g < 1e-8 and r < 1e-6 for g, r in res.values())
    detail = ", ".join(f"{k.value}: gram {g:.1e} residual {r:.1e}" for k, (g, r) in res.items())
    _verdict(report, 4, "spectral eigen-structure (N=50, n<=10)", ok, detail, dt, 30)


def test_criterion_05_classical_reduction(report):
    params = derive_params(OU, CRITERION_PARAMS[OU])
    xs = eval_grid(OU)

    def run():
        es = eigen_system(OU, params, 200)
        worst = 0.0
        for t in (0.1, 0.5, 2.0):
            for y in (-1.0, 0.0, 0.5):
                decay = math.exp(-params.drift_rate * t)
                kernel = stats.norm(params.mean + (y - params.mean) * decay,
                                    params.vol_scale * math.sqrt(1 - decay * decay))
                got = SpectralDensity(es, 1.0, y, t).density(xs, clip=False)
                worst = max(worst, float(np.abs(got - kernel.pdf(xs)).max()))
        return worst
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        worst, dt = _timed(run)
    _verdict(report, 5, "classical reduction (OU, beta=1, N=200)", worst < 1e-6,
             f"sup error {worst:.1e} over t in {{0.1, 0.5, 2}} (< 1e-6)", dt, 5)


def test_criterion_06_normalization(report):
    def run():
        worst = 0.0
        for kind in KINDS:
            cp = CRITERION_PARAMS[kind]
            params = derive_params(kind, cp)
            es = eigen_system(kind, params, 50)
            law = stationary_law(kind, params)
            y = default_start(kind, cp)
            lo = law.ppf(1e-14) if kind is OU else 0.0
            hi = 1.0 if kind is JAC else law.ppf(1 - 1e-14)
            for beta in (0.5, 0.7):
                for t in (0.5, 1.0):
                    sd = SpectralDensity(es, beta, y, t)
                    total = integrate.quad(lambda x: sd.density(x), lo, hi, points=[y],
                                           limit=500, epsabs=1e-12)[0]
                    worst = max(worst, abs(total - 1.0))
        return worst
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        worst, dt = _timed(run)
    _verdict(report, 6, "density normalization", worst <= 1e-4,
             f"max |integral - 1| = {worst:.1e} (<= 1e-4)", dt, 10)


def test_criterion_07_caputo_eigen_relation(report):
    def run():
        worst = 0.0
        for beta in (0.4, 0.6, 0.8):
            for lam in (1.0, 3.0):
                f = lambda s, b=beta, l=lam: mittag_leffler(b, -l * np.asarray(s) ** b)
                got = caputo_derivative(f, beta, 1.0)
                worst = max(worst, abs(got / (-lam * f(1.0)) - 1.0))
        return worst
    worst, dt = _timed(run)
    _verdict(report, 7, "Caputo eigen-relation", worst < 1e-3,
             f"max relative error {worst:.1e} (< 1e-3)", dt, 10)


def test_criterion_08_subordinator_laplace(report):
    cfg = default_config(Study.SUBORDINATOR_LAPLACE)
    assert cfg.betas == (0.3, 0.5, 0.7, 0.9) and cfg.paths == 10**5
    table, dt = _timed(lambda: run_study(cfg))
    worst = max(r.value for r in table.rows)
    _verdict(report, 8, "subordinator Laplace transform", table.passed,
             f"max |z| = {worst:.2f} over {len(table.rows)} (beta, s) pairs (<= 3)", dt, 30)


def test_criterion_09_inverse_subordinator_mean(report):
    cfg = default_config(Study.INVERSE_SUBORDINATOR)
    assert cfg.betas == (0.5, 0.7) and cfg.paths == 10**5 and cfg.times == (1.0,)
    table, dt = _timed(lambda: run_study(cfg))
    worst = max(r.value for r in table.rows if r.statistic == "z_score")
    _verdict(report, 9, "inverse subordinator mean", table.passed,
             f"max |z| = {worst:.2f} (<= 3)", dt, 60)


@pytest.mark.parametrize("kind", KINDS, ids=lambda k: k.value)
@pytest.mark.parametrize("beta", [0.7, 0.9])
def test_criterion_10_ctrw_marginal(report, kind, beta):
    cfg = default_config(Study.CTRW_MARGINAL)
    assert cfg.n_list == (2000,) and cfg.paths == 5000 and cfg.times == (1.0,)
    assert cfg.workers == 1
    cfg = cfg.replace(kinds=(kind,), betas=(beta,))
    table, dt = _timed(lambda: run_study(cfg))
    (ks,) = [r.value for r in table.rows]
    _verdict(report, 10, f"CTRW marginal ({kind.value}, beta={beta})", ks < 0.05,
             f"KS = {ks:.4f} (< 0.05)", dt, 300)
