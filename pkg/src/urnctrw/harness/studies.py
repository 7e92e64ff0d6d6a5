"""The six acceptance studies.

Each study maps an :class:`ExperimentConfig` to a :class:`ResultTable` whose
rows carry their own tolerance and verdict.
"""

from __future__ import annotations

import csv
import io
import math
import warnings

import numpy as np
from scipy import integrate, stats

from ..bumps import bump_suite
from ..chains import RescaledChainView, bl_stationary, discrete_generator_apply
from ..ctrw import CtrwSpec, default_start, empirical_cdf, run_ensemble
from ..errors import ConfigError, TruncationWarning
from ..heavy_tails import WaitingTimeModel, sample_inverse_subordinator, sample_positive_stable
from ..mittag_leffler import mittag_leffler
from ..pearson import DiffusionKind, derive_params, generator_apply, stationary_law
from ..rng import stream
from ..spectral import SpectralDensity, caputo_derivative, eigen_system
from .config import ExperimentConfig, Study
from .results import ResultTable
from .stats import chi_square_test, ks_statistic

__all__ = ["STUDIES", "run_study", "EVAL_GRIDS"]

#: Sup-norm evaluation grids; the bump supports lie inside them.
EVAL_GRIDS = {
    DiffusionKind.OU: (-4.0, 4.0, 0.05),
    DiffusionKind.JACOBI: (0.01, 0.99, 0.01),
    DiffusionKind.CIR: (0.01, 10.0, 0.05),
}


def eval_grid(kind) -> np.ndarray:
    lo, hi, step = EVAL_GRIDS[DiffusionKind.parse(kind)]
    return lo + step * np.arange(int(round((hi - lo) / step)) + 1)


def _table(config: ExperimentConfig) -> ResultTable:
    return ResultTable(config.study.value, config.seed, config.config_hash())


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _integration_range(kind, params):
    """Whole state space, with the OU and CIR tails cut where ``m`` is below 1e-14 mass."""
    law = stationary_law(kind, params)
    if kind is DiffusionKind.OU:
        return law.ppf(1e-14), law.ppf(1.0 - 1e-14)
    if kind is DiffusionKind.CIR:
        return 0.0, law.ppf(1.0 - 1e-14)
    return 0.0, 1.0


def _fmt_num(x) -> str:
    return f"{x:g}"


# ---------------------------------------------------------------------------


def study_generator_convergence(config: ExperimentConfig) -> ResultTable:
    """Sup-grid error of the discrete generators against the diffusion generator.

    For every kind and test function the errors must strictly decrease along
    ``n_list`` and the final error must be below ``final_ratio`` times the
    error at ``reference_n`` (default: the largest listed size at most 1/16
    of the final one). Identically zero errors pass.
    """
    if len(config.n_list) < 3:
        raise ConfigError("generator_convergence needs at least three sizes", key="n_list")
    names = tuple(config.option("functions", ["psi", "x_psi", "x2_psi"]))
    ratio_gate = float(config.gate("final_ratio", 0.5))
    n_last = config.n_list[-1]
    small = [n for n in config.n_list if 16 * n <= n_last]
    ref_n = int(config.gate("reference_n", small[-1] if small else config.n_list[0]))
    if ref_n not in config.n_list or ref_n == n_last:
        raise ConfigError("reference_n must be an earlier entry of n_list", key="gates.reference_n")
    table = _table(config)
    data_rows = []
    for kind in config.kinds:
        cp = config.chain_params(kind)
        params = derive_params(kind, cp)
        grid = eval_grid(kind)
        try:
            suite = bump_suite(kind, names)
        except KeyError as exc:
            raise ConfigError(f"unknown test function {exc.args[0]!r}", key="options.functions") from None
        for fname, f in suite.items():
            exact = np.asarray(generator_apply(kind, params, f, grid, df=f.d1, d2f=f.d2))
            errs = []
            for n in config.n_list:
                approx = discrete_generator_apply(kind, cp, n, f, grid)
                err = float(np.abs(approx - exact).max())
                errs.append(err)
                data_rows.append((kind.value, fname, n, err))
                table.add(f"{kind.value}/{fname}/n={n}", "sup_error", err, "reported", True)
            for (n0, e0), (n1, e1) in zip(zip(config.n_list, errs), zip(config.n_list[1:], errs[1:])):
                ok = e1 < e0 or (e0 == 0.0 and e1 == 0.0)
                table.add(f"{kind.value}/{fname}/n={n0}->{n1}", "decay_ratio",
                          e1 / e0 if e0 > 0 else 0.0, "< 1", ok)
            e_ref = errs[config.n_list.index(ref_n)]
            r = errs[-1] / e_ref if e_ref > 0 else 0.0
            ok = (e_ref == 0.0 and errs[-1] == 0.0) or r < ratio_gate
            table.add(f"{kind.value}/{fname}/n={n_last}:n={ref_n}", "final_ratio", r,
                      f"< {_fmt_num(ratio_gate)}", ok)
    table.data["sup_errors.csv"] = _csv(["kind", "function", "n", "sup_error"], data_rows)
    return table


def study_stationarity(config: ExperimentConfig) -> ResultTable:
    """Long-run occupation of the Bernoulli-Laplace chain against its hypergeometric law.

    The chain is thinned by ``thin`` steps (default ``5 n``, many relaxation
    times) so that the retained states are effectively independent and the
    chi-square test is valid.
    """
    alpha = float(config.gate("alpha", 0.01))
    steps = int(config.option("steps", 1_000_000))
    cp = config.chain_params(DiffusionKind.OU)
    table = _table(config)
    for j, n in enumerate(config.n_list):
        thin = int(config.option("thin", 5 * n))
        view = RescaledChainView(DiffusionKind.OU, n, cp)
        rng = stream(config.seed, j)
        states = np.empty(steps + 1, dtype=np.int64)
        view.walk(n // 2, rng.random(steps), states)
        kept = states[thin::thin]
        counts = np.bincount(kept, minlength=n + 1)
        stat, p, dof = chi_square_test(counts, bl_stationary(n))
        table.add(f"bl/n={n}/steps={steps}/thin={thin}", "chi2", stat, f"dof={dof}", True)
        table.add(f"bl/n={n}/steps={steps}/thin={thin}", "p_value", p,
                  f">= {_fmt_num(alpha)}", p >= alpha)
        table.data[f"occupation_n{n}.csv"] = _csv(
            ["state", "count", "probability"],
            [(i, int(c), float(q)) for i, (c, q) in enumerate(zip(counts, bl_stationary(n)))])
    return table


def study_subordinator_laplace(config: ExperimentConfig) -> ResultTable:
    """Empirical Laplace transform of ``D_1`` against ``exp(-s^beta)``."""
    s_values = [float(s) for s in config.option("s_values", [0.5, 1.0, 2.0])]
    z_gate = float(config.gate("z", 3.0))
    table = _table(config)
    for j, beta in enumerate(config.betas):
        d1 = sample_positive_stable(beta, config.paths, stream(config.seed, j))
        for s in s_values:
            e = np.exp(-s * d1)
            se = e.std(ddof=1) / math.sqrt(e.size)
            target = math.exp(-s ** beta)
            z = abs(e.mean() - target) / se
            table.add(f"beta={_fmt_num(beta)}/s={_fmt_num(s)}/samples={config.paths}", "z_score",
                      z, f"<= {_fmt_num(z_gate)}", z <= z_gate)
    return table


def study_inverse_subordinator(config: ExperimentConfig) -> ResultTable:
    """Mean of the grid-inverted ``E_t`` against ``t^beta / Gamma(1+beta)``."""
    h = float(config.option("grid_step", 1e-3))
    z_gate = float(config.gate("z", 3.0))
    table = _table(config)
    for j, beta in enumerate(config.betas):
        for k, t in enumerate(config.times):
            e = sample_inverse_subordinator(beta, t, h, config.paths, stream(config.seed, j, k))
            se = e.std(ddof=1) / math.sqrt(e.size)
            target = t ** beta / math.gamma(1.0 + beta)
            z = abs(e.mean() - target) / se if se > 0 else math.inf
            label = f"beta={_fmt_num(beta)}/t={_fmt_num(t)}/paths={config.paths}"
            table.add(label, "mean", float(e.mean()), f"target {target!r}", True)
            table.add(label, "z_score", z, f"<= {_fmt_num(z_gate)}", z <= z_gate)
    return table


def study_ctrw_marginal(config: ExperimentConfig) -> ResultTable:
    """KS distance between CTRW ensembles and the spectral fPD marginal CDF.

    The spectral CDF is started from the walk's actual lattice start.
    ``beta = 1`` uses unit waiting times and the classical diffusion.
    """
    ks_gate = float(config.gate("ks", 0.05))
    order = int(config.option("spectral_order", 100))
    law = str(config.option("waiting_law", "stable"))
    x0s = config.option("x0", {})
    table = _table(config)
    for kind in config.kinds:
        cp = config.chain_params(kind)
        params = derive_params(kind, cp)
        eigen = eigen_system(kind, params, order)
        x0 = x0s.get(kind.value) if isinstance(x0s, dict) else None
        for beta in config.betas:
            waiting = WaitingTimeModel(beta, law="deterministic" if beta == 1 else law)
            for n in config.n_list:
                spec = CtrwSpec(kind, cp, n, beta, waiting, x0)
                for t in config.times:
                    res = run_ensemble(spec, t, config.paths, config.seed, config.workers)
                    tag = f"{kind.value}_b{_fmt_num(beta)}_n{n}_t{_fmt_num(t)}"
                    label = f"{kind.value}/beta={_fmt_num(beta)}/n={n}/t={_fmt_num(t)}"
                    if t == 0:
                        # point mass at the start; an exact match by convention
                        ks = 0.0 if np.all(res.samples == spec.start) else 1.0
                    else:
                        sd = SpectralDensity(eigen, beta, spec.start, t)
                        with warnings.catch_warnings():
                            warnings.simplefilter("ignore", TruncationWarning)
                            ks = ks_statistic(empirical_cdf(res), sd.cdf)
                            lo, hi = np.quantile(res.samples, [0.0005, 0.9995])
                            xs = np.linspace(lo, hi, 401)
                            table.data[f"cdf_{tag}.csv"] = sd.curve_csv(xs, "cdf")
                    table.add(label, "ks", ks, f"< {_fmt_num(ks_gate)}", ks < ks_gate)
                    table.data[f"ecdf_{tag}.csv"] = empirical_cdf(res).to_csv()
    return table


def study_density_consistency(config: ExperimentConfig) -> ResultTable:
    """Mittag-Leffler accuracy, eigen-structure, classical reduction,
    normalization and the Caputo eigen-relation."""
    table = _table(config)
    order = int(config.option("order", 50))
    check_degree = int(config.option("check_degree", 10))

    v = mittag_leffler(0.5, -1.0)
    ref = math.e * math.erfc(1.0)
    table.add("ml/beta=0.5/z=1", "abs_error", abs(v - ref), "< 1e-10", abs(v - ref) < 1e-10)
    for z in (0.1, 1.0, 10.0):
        err = abs(mittag_leffler(1.0, -z) - math.exp(-z))
        table.add(f"ml/beta=1/z={_fmt_num(z)}", "abs_error", err, "< 1e-12", err < 1e-12)

    for kind in config.kinds:
        params = derive_params(kind, config.chain_params(kind))
        es = eigen_system(kind, params, order)
        table.add(f"eigen/{kind.value}/N={order}", "gram_error", es.gram_error, "< 1e-08",
                  es.gram_error < 1e-8)
        res = float(es.generator_residual(eval_grid(kind), check_degree).max())
        table.add(f"eigen/{kind.value}/N={order}/n<={check_degree}", "eigen_residual", res,
                  "< 1e-06", res < 1e-6)

    # classical reduction: OU at beta = 1 against the Gaussian kernel
    if DiffusionKind.OU in config.kinds:
        params = derive_params(DiffusionKind.OU, config.chain_params(DiffusionKind.OU))
        c_order = int(config.option("classical_order", 200))
        es = eigen_system(DiffusionKind.OU, params, c_order)
        xs = eval_grid(DiffusionKind.OU)
        for t in config.option("classical_times", [0.1, 0.5, 2.0]):
            for y in config.option("classical_starts", [-1.0, 0.0, 0.5]):
                sd = SpectralDensity(es, 1.0, y, t)
                decay = math.exp(-params.drift_rate * t)
                mean = params.mean + (y - params.mean) * decay
                var = params.vol_scale ** 2 * (1.0 - decay * decay)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", TruncationWarning)
                    got = sd.density(xs, clip=False)
                err = float(np.abs(got - stats.norm(mean, math.sqrt(var)).pdf(xs)).max())
                table.add(f"classical/ou/N={c_order}/t={_fmt_num(t)}/y={_fmt_num(y)}",
                          "sup_error", err, "< 1e-06", err < 1e-6)

    # normalization of the fractional density
    norm_tol = float(config.gate("normalization", 1e-4))
    for kind in config.kinds:
        cp = config.chain_params(kind)
        params = derive_params(kind, cp)
        es = eigen_system(kind, params, order)
        y = default_start(kind, cp)
        lo, hi = _integration_range(kind, params)
        for beta in config.betas:
            if beta == 1.0:
                continue
            for t in config.times:
                sd = SpectralDensity(es, beta, y, t)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", TruncationWarning)
                    total = integrate.quad(lambda x: sd.density(x), lo, hi, points=[y],
                                           limit=500, epsabs=1e-12)[0]
                table.add(f"normalization/{kind.value}/beta={_fmt_num(beta)}/t={_fmt_num(t)}",
                          "integral_minus_one", total - 1.0, f"|.| <= {_fmt_num(norm_tol)}",
                          abs(total - 1.0) <= norm_tol)

    cap_tol = float(config.gate("caputo", 1e-3))
    n_steps = int(config.option("caputo_steps", 2000))
    for beta in config.option("caputo_betas", [0.4, 0.6, 0.8]):
        for lam in config.option("caputo_lambdas", [1.0, 3.0]):
            f = lambda s, b=beta, l=lam: mittag_leffler(b, -l * np.asarray(s) ** b)
            got = caputo_derivative(f, beta, 1.0, n_steps)
            want = -lam * float(f(1.0))
            rel = abs(got / want - 1.0)
            table.add(f"caputo/beta={_fmt_num(beta)}/lambda={_fmt_num(lam)}/t=1", "rel_error",
                      rel, f"< {_fmt_num(cap_tol)}", rel < cap_tol)
    return table


STUDIES = {
    Study.GENERATOR_CONVERGENCE: study_generator_convergence,
    Study.STATIONARITY: study_stationarity,
    Study.SUBORDINATOR_LAPLACE: study_subordinator_laplace,
    Study.INVERSE_SUBORDINATOR: study_inverse_subordinator,
    Study.CTRW_MARGINAL: study_ctrw_marginal,
    Study.DENSITY_CONSISTENCY: study_density_consistency,
}


def run_study(config: ExperimentConfig) -> ResultTable:
    return STUDIES[config.study](config)
