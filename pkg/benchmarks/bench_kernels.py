"""Compare the compiled and pure-Python chain walkers.

    python benchmarks/bench_kernels.py [--steps 200000] [--repeat 3]

Both backends consume the same uniforms, so the final states must agree
exactly; the script checks this before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from urnctrw import kernels
from urnctrw.chains import RescaledChainView, _bl_tables, _wf_tables
from urnctrw.pearson import DEFAULT_CHAIN_PARAMS, DiffusionKind


def _cases(n):
    ou = RescaledChainView(DiffusionKind.OU, n, DEFAULT_CHAIN_PARAMS[DiffusionKind.OU])
    jac = RescaledChainView(DiffusionKind.JACOBI, n, DEFAULT_CHAIN_PARAMS[DiffusionKind.JACOBI])
    cir = RescaledChainView(DiffusionKind.CIR, n, DEFAULT_CHAIN_PARAMS[DiffusionKind.CIR])
    cum_up, cum_stay = _bl_tables(n)
    yield "bernoulli-laplace", ou.embed(0.5), lambda be, s, u: be.bl_walk(s, u, cum_up, cum_stay)
    for name, view in (("wright-fisher/jacobi", jac), ("wright-fisher/cir", cir)):
        cp = view.cp
        tabs = _wf_tables(n, float(cp.a), float(cp.b), view.exponent, 0.0)
        yield name, view.embed(0.7 if view.kind is DiffusionKind.JACOBI else 2.7), \
            (lambda be, s, u, tabs=tabs: be.wf_walk(s, n, u, *tabs))


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if kernels.compiled_backend is None:
        print("compiled backend unavailable; only the Python fallback can be timed")
    u = np.random.default_rng(0).random(args.steps)
    print(f"n={args.n} steps={args.steps} (best of {args.repeat})")
    print(f"{'chain':<22}{'python [s]':>12}{'compiled [s]':>14}{'speedup':>10}")
    for name, start, walk in _cases(args.n):
        py = kernels.python_backend
        t_py = _best(lambda: walk(py, start, u), args.repeat)
        if kernels.compiled_backend is None:
            print(f"{name:<22}{t_py:>12.4f}{'-':>14}{'-':>10}")
            continue
        cy = kernels.compiled_backend
        if walk(py, start, u) != walk(cy, start, u):
            raise SystemExit(f"{name}: backends disagree")
        t_cy = _best(lambda: walk(cy, start, u), args.repeat)
        print(f"{name:<22}{t_py:>12.4f}{t_cy:>14.5f}{t_py / t_cy:>9.0f}x")


if __name__ == "__main__":
    main()
