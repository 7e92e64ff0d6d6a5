"""Bernoulli-Laplace and Wright-Fisher urn chains and their rescalings.

The OU limit is built on the Bernoulli-Laplace chain ``Z`` (white balls in urn
A), rescaled as ``H = (2Z - n - b sqrt(n)) / (a sqrt(n))`` and run at ``theta n / 2``
steps per unit time. The Jacobi and CIR limits are built on the Wright-Fisher
chain ``G`` with mutation probabilities ``a/n^d`` and ``b/n`` (``d = 1`` for
Jacobi), rescaled as ``H = G / n^d`` and run at ``theta n`` (Jacobi) or
``theta n^d / a`` (CIR) steps per unit time.

Stepping is delegated to :mod:`urnctrw.kernels`; every step consumes exactly
one uniform variate.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import stats

from . import kernels
from .errors import EmbeddingError, InvalidParameterError, PathExhaustedError
from .pearson import ChainParams, DiffusionKind

__all__ = [
    "BernoulliLaplaceChain",
    "WrightFisherChain",
    "RescaledChainView",
    "ChainPath",
    "ChainWalker",
    "bl_transition_probs",
    "bl_stationary",
    "bl_step",
    "wf_success_prob",
    "wf_step",
    "initial_state",
    "time_changed_value",
    "discrete_generator_apply",
    "simulate_path",
]


# ---------------------------------------------------------------------------
# Bernoulli-Laplace


@dataclass
class BernoulliLaplaceChain:
    n: int
    state: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError("n must be a positive integer")
        if not 0 <= self.state <= self.n:
            raise InvalidParameterError(f"state {self.state} outside 0..{self.n}")


def bl_transition_probs(n: int, i: int) -> tuple[float, float, float]:
    """Return ``(p_up, p_stay, p_down)`` from state ``i``."""
    if not 0 <= i <= n:
        raise InvalidParameterError(f"state {i} outside 0..{n}")
    x = i / n
    return (1.0 - x) * (1.0 - x), 2.0 * x * (1.0 - x), x * x


def bl_stationary(n: int) -> np.ndarray:
    """Stationary law ``C(n,i) C(n,n-i) / C(2n,n)``, hypergeometric in ``i``."""
    return stats.hypergeom(2 * n, n, n).pmf(np.arange(n + 1))


@lru_cache(maxsize=64)
def _bl_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.arange(n + 1) / n
    up = (1.0 - x) * (1.0 - x)
    stay = 2.0 * x * (1.0 - x)
    cum_up = up
    cum_stay = up + stay
    cum_up.setflags(write=False)
    cum_stay.setflags(write=False)
    return cum_up, cum_stay


def bl_step(n: int, i: int, rng: np.random.Generator) -> int:
    if not 0 <= i <= n:
        raise InvalidParameterError(f"state {i} outside 0..{n}")
    cum_up, cum_stay = _bl_tables(int(n))
    return int(kernels.bl_walk(int(i), rng.random(1), cum_up, cum_stay))


# ---------------------------------------------------------------------------
# Wright-Fisher


@dataclass
class WrightFisherChain:
    """Wright-Fisher chain with mutation rates ``a/n^d`` and ``b/n``.

    ``exponent_d = 1`` is the Jacobi regime, ``0 < d < 1`` the CIR regime.
    """

    n: int
    state: int
    mutation_a: float
    mutation_b: float
    exponent_d: float = 1.0
    selection_s: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError("n must be a positive integer")
        if not 0 <= self.state <= self.n:
            raise InvalidParameterError(f"state {self.state} outside 0..{self.n}")
        if not (0 < self.exponent_d <= 1):
            raise InvalidParameterError("exponent_d must lie in (0, 1]")
        if not (0 <= self.selection_s <= 1):
            raise InvalidParameterError("selection_s must lie in [0, 1]")
        if not (self.mutation_a > 0 and self.mutation_b > 0):
            raise InvalidParameterError("mutation constants must be positive")
        if not (0 <= self.alpha <= 1 and 0 <= self.beta <= 1):
            raise InvalidParameterError(
                f"mutation probabilities alpha={self.alpha:.4g}, beta={self.beta:.4g} "
                f"outside [0, 1]; n={self.n} is too small"
            )

    @property
    def alpha(self) -> float:
        return self.mutation_a / self.n ** self.exponent_d

    @property
    def beta(self) -> float:
        return self.mutation_b / self.n


def _wf_prob_general(i, n, alpha, beta, s):
    mut_A = i * (1.0 - alpha) + (n - i) * beta
    mut_a = i * alpha + (n - i) * (1.0 - beta)
    return (1.0 + s) * mut_A / ((1.0 + s) * mut_A + mut_a)


def _wf_prob_specialized(i, n, alpha, beta):
    x = i / n
    return x * (1.0 - alpha) + (1.0 - x) * beta


def wf_success_prob(chain: WrightFisherChain, i=None, general: bool = False):
    """Probability ``p_i`` that a trial produces an A-type.

    With ``selection_s == 0`` and ``general=False`` the mutation-only form
    ``(i/n)(1 - alpha) + (1 - i/n) beta`` is used; otherwise the full
    mutation-selection formula. ``i`` defaults to the chain state and may be an
    array.
    """
    i = chain.state if i is None else i
    ii = np.asarray(i, dtype=float)
    if np.any((ii < 0) | (ii > chain.n)):
        raise InvalidParameterError(f"state outside 0..{chain.n}")
    if general or chain.selection_s != 0:
        p = _wf_prob_general(ii, chain.n, chain.alpha, chain.beta, chain.selection_s)
    else:
        p = _wf_prob_specialized(ii, chain.n, chain.alpha, chain.beta)
    if np.any((p < 0) | (p > 1)):
        raise InvalidParameterError(
            f"success probability outside [0, 1] for n={chain.n}; n too small"
        )
    return float(p) if np.ndim(p) == 0 else p


def _mode_pmf(n: int, p: np.ndarray):
    p = np.asarray(p, dtype=float)
    mode = np.clip(np.floor((n + 1) * p), 0, n).astype(np.int64)
    pmode = stats.binom.pmf(mode, n, p)
    return mode, np.asarray(pmode, dtype=float)


@lru_cache(maxsize=64)
def _wf_tables(n: int, a: float, b: float, d: float, s: float):
    chain = WrightFisherChain(n, 0, a, b, d, s)
    prob = np.asarray(wf_success_prob(chain, np.arange(n + 1)), dtype=float)
    mode, pmode = _mode_pmf(n, prob)
    for arr in (prob, mode, pmode):
        arr.setflags(write=False)
    return prob, mode, pmode


def wf_step(chain: WrightFisherChain, rng: np.random.Generator) -> int:
    """Draw the next state ``~ Binomial(n, p_i)`` and store it on the chain."""
    p = wf_success_prob(chain)
    mode, pmode = _mode_pmf(chain.n, p)
    chain.state = int(kernels.binomial_from_mode(
        chain.n, p, int(mode), float(pmode), float(rng.random())))
    return chain.state


# ---------------------------------------------------------------------------
# Rescaling and time change


@dataclass(frozen=True)
class RescaledChainView:
    """Map between integer urn states and real diffusion states."""

    kind: DiffusionKind
    n: int
    cp: ChainParams

    def __post_init__(self):
        object.__setattr__(self, "kind", DiffusionKind.parse(self.kind))
        self.cp.validate(self.kind)
        if self.n < 1:
            raise InvalidParameterError("n must be a positive integer")
        if self.kind is not DiffusionKind.OU:
            # raises when the mutation probabilities are not probabilities
            WrightFisherChain(self.n, 0, self.cp.a, self.cp.b, self.exponent)

    @property
    def exponent(self) -> float:
        if self.kind is DiffusionKind.CIR:
            return float(self.cp.d)
        return 1.0

    @property
    def pitch(self) -> float:
        """Spacing of the rescaled lattice."""
        if self.kind is DiffusionKind.OU:
            return 2.0 / (abs(self.cp.a) * math.sqrt(self.n))
        return 1.0 / self.n ** self.exponent

    @property
    def steps_per_time(self) -> float:
        th = self.cp.theta
        if self.kind is DiffusionKind.OU:
            return th * self.n / 2.0
        if self.kind is DiffusionKind.JACOBI:
            return th * self.n
        return th / self.cp.a * self.n ** self.cp.d

    def rescale(self, i):
        i = np.asarray(i, dtype=float)
        if self.kind is DiffusionKind.OU:
            rn = math.sqrt(self.n)
            out = (2.0 * i - self.n - self.cp.b * rn) / (self.cp.a * rn)
        else:
            out = i / self.n ** self.exponent
        return float(out) if out.ndim == 0 else out

    def embed(self, x):
        """Floor embedding of a diffusion state into ``{0, ..., n}``."""
        x = np.asarray(x, dtype=float)
        if self.kind is DiffusionKind.OU:
            rn = math.sqrt(self.n)
            raw = np.floor(0.5 * (self.n + (self.cp.a * x + self.cp.b) * rn))
        else:
            raw = np.floor(self.n ** self.exponent * x)
        bad = ~np.isfinite(raw) | (raw < 0) | (raw > self.n)
        if np.any(bad):
            k = int(np.flatnonzero(np.ravel(bad))[0])
            state, x_bad = float(np.ravel(raw)[k]), float(np.ravel(x)[k])
            raise EmbeddingError(
                f"embedded state {state:g} outside 0..{self.n}; "
                f"n is too small for x0={x_bad!r}",
                state=state, n=self.n,
            )
        out = raw.astype(np.int64)
        return int(out) if out.ndim == 0 else out

    def step_index(self, t: float) -> int:
        if t < 0:
            raise InvalidParameterError("time must be nonnegative")
        th = self.cp.theta
        if self.kind is DiffusionKind.OU:
            return math.floor(th * self.n * t / 2.0)
        if self.kind is DiffusionKind.JACOBI:
            return math.floor(th * self.n * t)
        return math.floor(th * self.n ** self.cp.d * t / self.cp.a)

    def ctrw_step_count(self, jumps: int) -> int:
        """Chain steps taken after ``jumps`` renewals, ``floor(c_n * jumps / n)``.

        Written in the form that avoids dividing by ``n`` first, so integer
        products are not perturbed by rounding.
        """
        th = self.cp.theta
        if self.kind is DiffusionKind.OU:
            return math.floor(th * jumps / 2.0)
        if self.kind is DiffusionKind.JACOBI:
            return math.floor(th * jumps)
        return math.floor(th * self.n ** (self.cp.d - 1.0) * jumps / self.cp.a)

    # stepping tables -------------------------------------------------------

    def walk(self, state: int, uniforms: np.ndarray, out: np.ndarray | None = None) -> int:
        uniforms = np.ascontiguousarray(uniforms, dtype=float)
        if self.kind is DiffusionKind.OU:
            cum_up, cum_stay = _bl_tables(self.n)
            return int(kernels.bl_walk(int(state), uniforms, cum_up, cum_stay, out))
        prob, mode, pmode = _wf_tables(self.n, float(self.cp.a), float(self.cp.b),
                                       self.exponent, 0.0)
        return int(kernels.wf_walk(int(state), self.n, uniforms, prob, mode, pmode, out))


def initial_state(kind, cp: ChainParams, n: int, x0: float) -> int:
    return RescaledChainView(kind, n, cp).embed(x0)


@dataclass
class ChainPath:
    states: np.ndarray
    rescaled: np.ndarray
    steps: int = field(init=False)

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=np.int64)
        self.rescaled = np.asarray(self.rescaled, dtype=float)
        if self.states.shape != self.rescaled.shape:
            raise ValueError("states and rescaled must have equal length")
        self.steps = len(self.states) - 1

    def to_csv(self, fh=None) -> str | None:
        """Write columns ``step, raw_state, rescaled_state``."""
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "raw_state", "rescaled_state"])
        for k, (s, r) in enumerate(zip(self.states.tolist(), self.rescaled.tolist())):
            w.writerow([k, s, repr(r)])
        return buf.getvalue() if fh is None else None


class ChainWalker:
    """A chain that can be advanced lazily, optionally recording its path."""

    def __init__(self, view: RescaledChainView, state: int, rng: np.random.Generator,
                 record: bool = False):
        self.view = view
        self.state = int(state)
        self.rng = rng
        self.steps_taken = 0
        self._record = record
        self._chunks = [np.array([self.state], dtype=np.int64)] if record else None

    def advance(self, steps: int) -> int:
        if steps < 0:
            raise InvalidParameterError("steps must be nonnegative")
        if steps == 0:
            return self.state
        u = self.rng.random(steps)
        if self._record:
            out = np.empty(steps + 1, dtype=np.int64)
            self.state = self.view.walk(self.state, u, out)
            self._chunks.append(out[1:])
        else:
            self.state = self.view.walk(self.state, u)
        self.steps_taken += steps
        return self.state

    def advance_to(self, total_steps: int) -> int:
        return self.advance(max(0, total_steps - self.steps_taken))

    def path(self) -> ChainPath:
        if not self._record:
            raise ValueError("walker was created with record=False")
        states = np.concatenate(self._chunks)
        return ChainPath(states, self.view.rescale(states))


def simulate_path(kind, cp: ChainParams, n: int, x0: float, steps: int,
                  rng: np.random.Generator) -> ChainPath:
    view = RescaledChainView(kind, n, cp)
    walker = ChainWalker(view, view.embed(x0), rng, record=True)
    walker.advance(steps)
    return walker.path()


def time_changed_value(kind, cp: ChainParams, n: int, path: ChainPath, t: float) -> float:
    """Value of the deterministically time-changed chain, ``H[floor(c_n t)]``."""
    view = RescaledChainView(kind, n, cp)
    k = view.step_index(t)
    if k > path.steps:
        raise PathExhaustedError(
            f"time {t} needs {k} steps but the path has {path.steps}",
            required_length=k + 1,
        )
    return float(path.rescaled[k])


def discrete_generator_apply(kind, cp: ChainParams, n: int, f: Callable, x):
    """Discrete generator ``A_n f`` at the embedded point of ``x``.

    ``A_n = c_n (T_n - I)`` with ``c_n`` the steps-per-time constant. For the
    Wright-Fisher chains the one-step expectation is an exact binomial sum
    over all ``n + 1`` target states.
    """
    view = RescaledChainView(kind, n, cp)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    idx = np.atleast_1d(view.embed(xs))
    c = view.steps_per_time
    if view.kind is DiffusionKind.OU:
        xi = idx / n
        p_up = (1.0 - xi) * (1.0 - xi)
        p_dn = xi * xi
        f0 = np.asarray(f(view.rescale(idx)), dtype=float)
        fu = np.asarray(f(view.rescale(idx + 1)), dtype=float)
        fd = np.asarray(f(view.rescale(idx - 1)), dtype=float)
        out = c * (p_up * (fu - f0) + p_dn * (fd - f0))
    else:
        prob, _, _ = _wf_tables(n, float(cp.a), float(cp.b), view.exponent, 0.0)
        fj = np.asarray(f(view.rescale(np.arange(n + 1))), dtype=float)
        uniq, inv = np.unique(idx, return_inverse=True)
        pmf = stats.binom.pmf(np.arange(n + 1)[None, :], n, prob[uniq][:, None])
        vals = np.einsum("kj,kj->k", pmf, fj[None, :] - fj[uniq][:, None])
        out = c * vals[inv]
    return float(out[0]) if np.ndim(x) == 0 else out
