"""Correlated continuous-time random walks driven by urn chains.

Particle jumps happen at the renewal epochs of i.i.d. heavy-tailed waiting
times, and jump ``r`` moves the urn chain. With ``N(t)`` the renewal count,
the rescaled walk at time ``t`` is the chain after

    floor(theta N / 2)              (OU)
    floor(theta N)                  (Jacobi)
    floor(theta n^(d-1) N / a)      (CIR)

steps, where ``N = N(n^(1/beta) t)``. As ``n`` grows this converges to the
Pearson diffusion time-changed by an inverse stable subordinator.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .chains import ChainParams, ChainWalker, RescaledChainView
from .errors import EmptyResultError, EnsembleError, InvalidParameterError
from .heavy_tails import (
    WaitingLaw,
    WaitingTimeModel,
    renewal_count,
    sample_renewal_until,
)
from .pearson import DiffusionKind, derive_params, stationary_law
from .rng import path_rng

__all__ = [
    "CtrwSpec",
    "EnsembleResult",
    "ECDF",
    "default_start",
    "ctrw_value",
    "run_ensemble",
    "empirical_cdf",
]


def default_start(kind, cp: ChainParams) -> float:
    """Stationary mean plus one stationary standard deviation.

    Far enough from equilibrium that the time-changed marginal differs
    visibly from the stationary law at ``t = 1``.
    """
    law = stationary_law(kind, derive_params(kind, cp))
    return float(law.mean() + law.std())


@dataclass(frozen=True)
class CtrwSpec:
    """Urn chain of size ``n`` jumping at the epochs of ``waiting``.

    ``x0`` is the requested start; the walk starts at its lattice embedding
    :attr:`start`. ``None`` selects :func:`default_start`.
    """

    kind: DiffusionKind
    cp: ChainParams
    n: int
    beta: float
    waiting: WaitingTimeModel | None = None
    x0: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", DiffusionKind.parse(self.kind))
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParameterError("n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))
        if self.waiting is None:
            law = WaitingLaw.DETERMINISTIC if self.beta == 1 else WaitingLaw.PARETO
            object.__setattr__(self, "waiting", WaitingTimeModel(self.beta, law=law))
        if self.waiting.beta != self.beta:
            raise InvalidParameterError("waiting-time index differs from beta")
        if self.x0 is None:
            object.__setattr__(self, "x0", default_start(self.kind, self.cp))
        # fail early on bad chain parameters or an unembeddable start
        self.view.embed(self.x0)

    @property
    def view(self) -> RescaledChainView:
        return RescaledChainView(self.kind, self.n, self.cp)

    @property
    def start_state(self) -> int:
        return self.view.embed(self.x0)

    @property
    def start(self) -> float:
        """Rescaled initial state actually used by the walk."""
        return self.view.rescale(self.start_state)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "theta": self.cp.theta,
            "a": self.cp.a,
            "b": self.cp.b,
            "d": self.cp.d,
            "n": self.n,
            "beta": self.beta,
            "waiting_law": self.waiting.law.value,
            "waiting_scale": self.waiting.scale,
            "x0": self.x0,
            "start": self.start,
        }


def ctrw_value(spec: CtrwSpec, t: float, rng: np.random.Generator) -> float:
    """Rescaled walk at time ``t`` for one independent path.

    Waiting times are drawn first, up to the horizon ``n^(1/beta) t``; the
    chain then takes exactly the step count implied by ``N(n^(1/beta) t)``.
    """
    if not t >= 0:
        raise InvalidParameterError("t must be nonnegative")
    view = spec.view
    walker = ChainWalker(view, spec.start_state, rng)
    if t == 0:
        return view.rescale(walker.state)
    horizon = spec.n ** (1.0 / spec.beta) * t
    sample = sample_renewal_until(spec.waiting, horizon, rng)
    jumps = renewal_count(sample, horizon)
    walker.advance(view.ctrw_step_count(jumps))
    return view.rescale(walker.state)


@dataclass
class EnsembleResult:
    """Marginal samples at ``time``, ordered by path index."""

    time: float
    samples: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)

    @property
    def paths(self) -> int:
        return int(self.samples.size)

    def to_csv(self, fh=None):
        """Columns ``path_index, value``."""
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["path_index", "value"])
        for i, v in enumerate(self.samples.tolist()):
            w.writerow([i, repr(v)])
        return buf.getvalue() if fh is None else None

    def to_json(self) -> str:
        return json.dumps({"time": self.time, "paths": self.paths, **self.meta},
                          indent=2, sort_keys=True)


def _run_chunk(spec: CtrwSpec, t: float, master_seed: int, indices):
    values = np.empty(len(indices))
    failures = {}
    for k, i in enumerate(indices):
        try:
            values[k] = ctrw_value(spec, t, path_rng(master_seed, i))
        except Exception as exc:  # collected and re-raised with path indices
            values[k] = math.nan
            failures[int(i)] = f"{type(exc).__name__}: {exc}"
    return values, failures


def run_ensemble(spec: CtrwSpec, t: float, paths: int, master_seed: int,
                 workers: int | None = 1) -> EnsembleResult:
    """Independent :func:`ctrw_value` draws for paths ``0 .. paths-1``.

    Path ``i`` uses the stream derived from ``(master_seed, i)``, so the
    result does not depend on ``workers``. ``workers=None`` uses all CPUs.

    Raises
    ------
    EnsembleError
        If any path fails; ``failures`` maps path index to the error text.
    """
    paths = int(paths)
    if paths < 1:
        raise InvalidParameterError("paths must be at least 1")
    if workers is None:
        workers = os.cpu_count() or 1
    workers = max(1, min(int(workers), paths))
    idx = np.arange(paths)
    if workers == 1:
        samples, failures = _run_chunk(spec, t, master_seed, idx)
    else:
        chunks = np.array_split(idx, workers * 4)
        samples = np.empty(paths)
        failures = {}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [(c, pool.submit(_run_chunk, spec, t, master_seed, c)) for c in chunks]
            for c, fut in futs:
                vals, fails = fut.result()
                samples[c] = vals
                failures.update(fails)
    if failures:
        first = min(failures)
        raise EnsembleError(
            f"{len(failures)} of {paths} paths failed; path {first}: {failures[first]}",
            failures=failures,
        )
    meta = {
        "paths": paths,
        "seed": int(master_seed),
        "spec": spec.as_dict(),
        "backend": kernels.BACKEND,
    }
    return EnsembleResult(float(t), samples, meta)


class ECDF:
    """Right-continuous empirical distribution function."""

    def __init__(self, samples):
        s = np.sort(np.asarray(samples, dtype=float).ravel())
        if s.size == 0:
            raise EmptyResultError("empirical CDF of an empty sample")
        self.sorted = s

    @property
    def size(self) -> int:
        return int(self.sorted.size)

    def __call__(self, x):
        r = np.searchsorted(self.sorted, x, side="right") / self.size
        return float(r) if np.ndim(x) == 0 else r

    def to_csv(self, fh=None):
        """Columns ``x, ecdf`` at the distinct sample values."""
        xs, counts = np.unique(self.sorted, return_counts=True)
        cum = np.cumsum(counts) / self.size
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "ecdf"])
        for a, c in zip(xs.tolist(), cum.tolist()):
            w.writerow([repr(a), repr(c)])
        return buf.getvalue() if fh is None else None


def empirical_cdf(result) -> ECDF:
    """ECDF of an :class:`EnsembleResult` or of a plain sample."""
    samples = result.samples if isinstance(result, EnsembleResult) else result
    return ECDF(samples)
