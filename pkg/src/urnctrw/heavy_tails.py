"""Waiting times, stable subordinators and renewal counts.

The standard beta-stable subordinator has ``E exp(-s D_t) = exp(-t s^beta)``.
Positive stable variates use Kanter's representation

    S = (A(U) / W) ** ((1 - beta) / beta),
    A(u) = (sin(beta pi u)^beta sin((1-beta) pi u)^(1-beta) / sin(pi u)) ** (1/(1-beta)),

with ``U`` uniform on (0, 1) and ``W`` standard exponential.

Pareto waiting times ``P(G > t) = (t/t0)^-beta`` use
``t0 = Gamma(1-beta)^(-1/beta)`` so that ``n^(-1/beta) (G_1 + ... + G_n)``
converges to ``D_1`` of the *standard* subordinator.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import HorizonExceededError, InvalidParameterError, PathTooShortError

__all__ = [
    "WaitingLaw",
    "WaitingTimeModel",
    "SubordinatorPath",
    "RenewalSample",
    "check_beta",
    "sample_positive_stable",
    "sample_stable_subordinator_increment",
    "simulate_subordinator",
    "inverse_subordinator",
    "sample_inverse_subordinator",
    "sample_waiting_times",
    "sample_renewal_until",
    "renewal_count",
]


def check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise InvalidParameterError(f"stability index must lie in (0, 1), got {beta}")
    return beta


def sample_positive_stable(beta: float, size, rng: np.random.Generator) -> np.ndarray:
    """Standard positive stable variates, ``E exp(-s S) = exp(-s^beta)``."""
    beta = check_beta(beta)
    u = 1.0 - rng.random(size)  # (0, 1]
    w = rng.standard_exponential(size)
    pu = np.pi * u
    log_a = (beta * np.log(np.sin(beta * pu))
             + (1.0 - beta) * np.log(np.sin((1.0 - beta) * pu))
             - np.log(np.sin(pu))) / (1.0 - beta)
    return np.exp((1.0 - beta) / beta * (log_a - np.log(w)))


def sample_stable_subordinator_increment(beta: float, dt: float, rng: np.random.Generator,
                                         size=None):
    """Increment ``D(t + dt) - D(t)``, equal in law to ``dt^(1/beta) S``."""
    if not dt > 0:
        raise InvalidParameterError("dt must be positive")
    s = sample_positive_stable(beta, size, rng) * dt ** (1.0 / beta)
    return float(s) if size is None else s


@dataclass
class SubordinatorPath:
    """Subordinator sampled on the grid ``0, h, 2h, ...``; ``values[0] == 0``."""

    grid_step: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    def to_csv(self, fh=None):
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["grid_time", "value"])
        for k, v in enumerate(self.values.tolist()):
            w.writerow([repr(k * self.grid_step), repr(v)])
        return buf.getvalue() if fh is None else None


def simulate_subordinator(beta: float, h: float, until: float, rng: np.random.Generator,
                          block: int | None = None) -> SubordinatorPath:
    """Grid path of ``D`` extended in blocks until it exceeds ``until``."""
    beta = check_beta(beta)
    if not h > 0:
        raise InvalidParameterError("grid step must be positive")
    if block is None:
        # E[E_t] = t^beta / Gamma(1+beta); a block of twice that usually suffices
        expected = max(until, 0.0) ** beta / math.gamma(1.0 + beta) / h
        block = int(min(max(64, 2.0 * expected), 1 << 20))
    chunks = [np.zeros(1)]
    last = 0.0
    while last <= until:
        inc = sample_stable_subordinator_increment(beta, h, rng, size=block)
        c = last + np.cumsum(inc)
        chunks.append(c)
        last = float(c[-1])
    return SubordinatorPath(h, np.concatenate(chunks))


def inverse_subordinator(path: SubordinatorPath, t: float) -> float:
    """First grid time at which the path exceeds ``t``.

    The true first-passage time lies in ``[x - h, x]`` for the returned ``x``.
    """
    k = int(np.searchsorted(path.values, t, side="right"))
    if k >= len(path.values):
        raise PathTooShortError(
            f"path ends at {path.values[-1]!r} <= t={t!r}",
            deficit=float(t - path.values[-1]),
        )
    return k * path.grid_step


def sample_inverse_subordinator(beta: float, t: float, h: float, size: int,
                                rng: np.random.Generator, block: int = 512) -> np.ndarray:
    """Grid inverse ``E_t`` for ``size`` independent subordinator paths at once.

    Equivalent to :func:`inverse_subordinator` applied to ``size`` paths from
    :func:`simulate_subordinator`, but grown column block by column block.
    """
    beta = check_beta(beta)
    if not h > 0:
        raise InvalidParameterError("grid step must be positive")
    if t < 0:
        raise InvalidParameterError("t must be nonnegative")
    size = int(size)
    out = np.empty(size)
    for lo in range(0, size, _ROW_CHUNK):
        out[lo:lo + _ROW_CHUNK] = _inverse_rows(beta, t, h, min(_ROW_CHUNK, size - lo),
                                                rng, block)
    return out


_ROW_CHUNK = 8192


def _inverse_rows(beta, t, h, size, rng, block):
    out = np.empty(size)
    active = np.arange(size)
    level = np.zeros(size)
    done_steps = 0
    while active.size:
        inc = sample_stable_subordinator_increment(beta, h, rng, size=(active.size, block))
        path = level[:, None] + np.cumsum(inc, axis=1)
        over = path > t
        hit = over.any(axis=1)
        first = over.argmax(axis=1)
        out[active[hit]] = (done_steps + first[hit] + 1) * h
        level = path[~hit, -1]
        active = active[~hit]
        done_steps += block
    return out


class WaitingLaw(str, enum.Enum):
    PARETO = "pareto"
    POSITIVE_STABLE = "stable"
    DETERMINISTIC = "deterministic"


@dataclass(frozen=True)
class WaitingTimeModel:
    """I.i.d. waiting times in the domain of attraction of a beta-stable law.

    ``DETERMINISTIC`` gives unit waits and requires ``beta == 1``; it reduces
    the renewal count to ``floor(t)``.
    """

    beta: float
    scale: float = 1.0
    law: WaitingLaw = WaitingLaw.PARETO

    def __post_init__(self):
        object.__setattr__(self, "law", WaitingLaw(self.law))
        if not self.scale > 0:
            raise InvalidParameterError("scale must be positive")
        if self.law is WaitingLaw.DETERMINISTIC:
            if self.beta != 1:
                raise InvalidParameterError("deterministic waits require beta == 1")
        else:
            check_beta(self.beta)

    @property
    def pareto_t0(self) -> float:
        return self.scale * math.gamma(1.0 - self.beta) ** (-1.0 / self.beta)

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        if self.law is WaitingLaw.DETERMINISTIC:
            return np.full(size, self.scale)
        if self.law is WaitingLaw.PARETO:
            u = 1.0 - rng.random(size)
            return self.pareto_t0 * u ** (-1.0 / self.beta)
        return self.scale * sample_positive_stable(self.beta, size, rng)


@dataclass
class RenewalSample:
    """Partial sums ``T_0 = 0, T_1, ...`` of waiting times.

    Counts are exact for ``t <= horizon``, the last partial sum.
    """

    partial_sums: np.ndarray

    def __post_init__(self):
        self.partial_sums = np.asarray(self.partial_sums, dtype=float)

    @property
    def horizon(self) -> float:
        return float(self.partial_sums[-1])

    def to_csv(self, fh=None):
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "partial_sum"])
        for k, v in enumerate(self.partial_sums.tolist()):
            w.writerow([k, repr(v)])
        return buf.getvalue() if fh is None else None


def sample_waiting_times(model: WaitingTimeModel, count: int,
                         rng: np.random.Generator) -> RenewalSample:
    if count < 1:
        raise InvalidParameterError("count must be at least 1")
    g = model.sample(count, rng)
    return RenewalSample(np.concatenate(([0.0], np.cumsum(g))))


def sample_renewal_until(model: WaitingTimeModel, horizon: float, rng: np.random.Generator,
                         block: int | None = None) -> RenewalSample:
    """Draw waiting times in blocks until the partial sums pass ``horizon``."""
    if block is None:
        block = 256
    chunks = [np.zeros(1)]
    last = 0.0
    while last <= horizon:
        c = last + np.cumsum(model.sample(block, rng))
        chunks.append(c)
        last = float(c[-1])
        block *= 2
    return RenewalSample(np.concatenate(chunks))


def renewal_count(sample: RenewalSample, t: float) -> int:
    """``N_t = max{r >= 0 : T_r <= t}``."""
    if t > sample.horizon:
        raise HorizonExceededError(f"t={t!r} beyond sampled horizon {sample.horizon!r}")
    if t < 0:
        raise InvalidParameterError("t must be nonnegative")
    return int(np.searchsorted(sample.partial_sums, t, side="right")) - 1
