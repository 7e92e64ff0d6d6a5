"""Non-heavy-tailed Pearson diffusions: OU, CIR and Jacobi.

Each family is written with linear drift ``-rate * (x - mean)`` and a squared
diffusion coefficient that is constant (OU), linear (CIR) or quadratic with a
negative leading term (Jacobi). The chain parameters ``(theta, a, b, d)`` of the
urn schemes in :mod:`urnctrw.chains` map onto the diffusion parameters through
:func:`derive_params`.

All functions accept scalars or numpy arrays for the state argument.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .errors import DomainError, InvalidParameterError

__all__ = [
    "DiffusionKind",
    "ChainParams",
    "DiffusionParams",
    "StateSpace",
    "DEFAULT_CHAIN_PARAMS",
    "state_space",
    "derive_params",
    "drift",
    "diffusion_sq",
    "generator_apply",
    "stationary_density",
    "stationary_cdf",
    "stationary_law",
]


class DiffusionKind(str, enum.Enum):
    OU = "ou"
    CIR = "cir"
    JACOBI = "jacobi"

    @classmethod
    def parse(cls, value: "str | DiffusionKind") -> "DiffusionKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InvalidParameterError(
                f"unknown diffusion kind {value!r}; expected one of "
                f"{[k.value for k in cls]}"
            ) from None


@dataclass(frozen=True)
class ChainParams:
    """Raw urn-chain parameters.

    ``theta`` scales time. For OU, ``a != 0`` and ``b`` is any real; for the
    Wright-Fisher chains ``a, b > 0`` are mutation constants, and ``d`` in
    (0, 1) is the CIR mutation exponent.
    """

    theta: float
    a: float
    b: float
    d: float | None = None

    def validate(self, kind: DiffusionKind) -> "ChainParams":
        kind = DiffusionKind.parse(kind)
        if not (self.theta > 0 and math.isfinite(self.theta)):
            raise InvalidParameterError(f"theta must be positive, got {self.theta}")
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidParameterError("a and b must be finite")
        if kind is DiffusionKind.OU:
            if self.a == 0:
                raise InvalidParameterError("OU chain requires a != 0")
        else:
            if not (self.a > 0 and self.b > 0):
                raise InvalidParameterError(
                    f"{kind.value} chain requires a > 0 and b > 0, "
                    f"got a={self.a}, b={self.b}"
                )
        if kind is DiffusionKind.CIR:
            if self.d is None or not (0 < self.d < 1):
                raise InvalidParameterError(f"CIR chain requires 0 < d < 1, got d={self.d}")
        return self


#: Parameter sets used by the acceptance studies.
DEFAULT_CHAIN_PARAMS = {
    DiffusionKind.OU: ChainParams(theta=2.0, a=1.0, b=0.0),
    DiffusionKind.JACOBI: ChainParams(theta=1.0, a=1.0, b=1.0),
    DiffusionKind.CIR: ChainParams(theta=1.0, a=2.0, b=4.0, d=0.5),
}


@dataclass(frozen=True)
class DiffusionParams:
    """Parameters of the limiting diffusion.

    drift_rate
        tau (OU), gamma (Jacobi) or theta (CIR).
    mean
        Stationary mean mu.
    vol_scale
        sigma (OU), delta (Jacobi) or 1/a (CIR).
    """

    drift_rate: float
    mean: float
    vol_scale: float


@dataclass(frozen=True)
class StateSpace:
    lower: float
    upper: float

    def contains(self, x, strict: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if strict:
            return (x > self.lower) & (x < self.upper)
        return (x >= self.lower) & (x <= self.upper)


_SPACES = {
    DiffusionKind.OU: StateSpace(-math.inf, math.inf),
    DiffusionKind.CIR: StateSpace(0.0, math.inf),
    DiffusionKind.JACOBI: StateSpace(0.0, 1.0),
}


def state_space(kind) -> StateSpace:
    return _SPACES[DiffusionKind.parse(kind)]


def derive_params(kind, cp: ChainParams) -> DiffusionParams:
    """Map chain parameters to the parameters of the limiting diffusion.

    OU: ``tau = theta``, ``mu = -b/a``, ``sigma = 1/(a*sqrt(2))``.
    Jacobi: ``gamma = theta*(a+b)``, ``mu = b/(a+b)``, ``delta = 1/(2(a+b))``.
    CIR: ``theta``, ``mu = b/a``, ``vol_scale = 1/a``.
    """
    kind = DiffusionKind.parse(kind)
    cp.validate(kind)
    if kind is DiffusionKind.OU:
        return DiffusionParams(cp.theta, -cp.b / cp.a, 1.0 / (cp.a * math.sqrt(2.0)))
    if kind is DiffusionKind.JACOBI:
        s = cp.a + cp.b
        return DiffusionParams(cp.theta * s, cp.b / s, 1.0 / (2.0 * s))
    return DiffusionParams(cp.theta, cp.b / cp.a, 1.0 / cp.a)


def _check_params(kind: DiffusionKind, params: DiffusionParams) -> None:
    if not params.drift_rate > 0:
        raise InvalidParameterError("drift_rate must be positive")
    if kind is DiffusionKind.OU and params.vol_scale == 0:
        raise InvalidParameterError("OU requires sigma != 0")
    if kind is DiffusionKind.JACOBI and not (0 < params.mean < 1 and params.vol_scale > 0):
        raise InvalidParameterError("Jacobi requires 0 < mu < 1 and delta > 0")
    if kind is DiffusionKind.CIR and not (params.mean > 0 and params.vol_scale > 0):
        raise InvalidParameterError("CIR requires mu > 0 and 1/a > 0")


def _as_state(kind: DiffusionKind, x, strict: bool = False):
    arr = np.asarray(x, dtype=float)
    if not np.all(state_space(kind).contains(arr, strict=strict)):
        raise DomainError(f"state outside the {kind.value} state space: {x!r}")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def drift(kind, params: DiffusionParams, x):
    kind = DiffusionKind.parse(kind)
    _check_params(kind, params)
    x = _as_state(kind, x)
    return _out(-params.drift_rate * (x - params.mean))


def diffusion_sq(kind, params: DiffusionParams, x):
    """Squared diffusion coefficient sigma^2(x)."""
    kind = DiffusionKind.parse(kind)
    _check_params(kind, params)
    x = _as_state(kind, x)
    r, v = params.drift_rate, params.vol_scale
    if kind is DiffusionKind.OU:
        out = np.full_like(x, 2.0 * r * v * v)
    elif kind is DiffusionKind.JACOBI:
        out = 2.0 * r * v * x * (1.0 - x)
    else:
        out = r * v * x
    return _out(out)


def _fd_step(x):
    return np.maximum(1e-5, 1e-5 * np.abs(x))


def generator_apply(
    kind,
    params: DiffusionParams,
    f: Callable,
    x,
    df: Callable | None = None,
    d2f: Callable | None = None,
):
    """Apply the infinitesimal generator ``mu(x) f' + sigma^2(x) f'' / 2``.

    Derivatives come from ``df``/``d2f`` when supplied, otherwise from centered
    differences with step ``max(1e-5, 1e-5*|x|)``.
    """
    kind = DiffusionKind.parse(kind)
    x = _as_state(kind, x)
    if df is None or d2f is None:
        h = _fd_step(x)
        fp, f0, fm = (np.asarray(f(x + h), float), np.asarray(f(x), float),
                      np.asarray(f(x - h), float))
        d1 = np.asarray(df(x), float) if df is not None else (fp - fm) / (2.0 * h)
        d2 = np.asarray(d2f(x), float) if d2f is not None else (fp - 2.0 * f0 + fm) / (h * h)
    else:
        d1 = np.asarray(df(x), float)
        d2 = np.asarray(d2f(x), float)
    mu = np.asarray(drift(kind, params, x))
    s2 = np.asarray(diffusion_sq(kind, params, x))
    return _out(mu * d1 + 0.5 * s2 * d2)


def stationary_law(kind, params: DiffusionParams):
    """Frozen scipy distribution of the stationary law.

    Normal(mu, sigma^2) for OU, Gamma(shape 2 mu a, rate 2a) for CIR and
    Beta(mu/delta, (1-mu)/delta) for Jacobi. In chain parameters these are
    Gamma(2b, rate 2a) and Beta(2b, 2a).
    """
    kind = DiffusionKind.parse(kind)
    _check_params(kind, params)
    if kind is DiffusionKind.OU:
        return stats.norm(loc=params.mean, scale=abs(params.vol_scale))
    if kind is DiffusionKind.CIR:
        rate = 2.0 / params.vol_scale
        return stats.gamma(a=params.mean * rate, scale=1.0 / rate)
    delta = params.vol_scale
    return stats.beta(params.mean / delta, (1.0 - params.mean) / delta)


def stationary_density(kind, params: DiffusionParams, x):
    kind = DiffusionKind.parse(kind)
    x = _as_state(kind, x, strict=True)
    return _out(stationary_law(kind, params).pdf(x))


def stationary_cdf(kind, params: DiffusionParams, x):
    kind = DiffusionKind.parse(kind)
    x = _as_state(kind, x)
    return _out(stationary_law(kind, params).cdf(x))
