"""One-parameter Mittag-Leffler function on the negative half-line.

``E_beta(-z) = sum_j (-z)^j / Gamma(1 + beta j)`` for ``0 < beta <= 1`` and
``z >= 0``. Small arguments use the power series with compensated summation.
Elsewhere the series cancels catastrophically and the real integral

    E_beta(-z) = sin(beta pi) / (beta pi)
                 * int_0^inf z exp(-v^(1/beta)) / (v^2 + 2 v z cos(beta pi) + z^2) dv

is evaluated by adaptive quadrature.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .errors import UnsupportedArgumentError

__all__ = ["mittag_leffler", "MAX_Z"]

#: Largest ``z`` for which ``E_beta(-z)`` has been validated.
MAX_Z = 1.0e6

# series is used while its largest term stays below this, keeping ~13 digits
_SERIES_MAX_TERM = 1.0e3


def _largest_log_term(beta: float, z: float) -> float:
    # log of the largest series term is ~ z^(1/beta) by Stirling
    return z ** (1.0 / beta) if z > 0 else 0.0


def _series(beta: float, z: float) -> float:
    terms = [1.0]
    lz = math.log(z) if z > 0 else -math.inf
    j = 1
    while j < 5000:
        mag = math.exp(j * lz - math.lgamma(1.0 + beta * j)) if z > 0 else 0.0
        terms.append(-mag if j % 2 else mag)
        if mag < 1e-18 and j * beta > 1.0 + math.log(z + 1.0):
            break
        j += 1
    return math.fsum(terms)


def _integral(beta: float, z: float) -> float:
    c = math.cos(beta * math.pi)
    upper = 690.0 ** beta  # exp(-v^(1/beta)) underflows beyond
    zz = z * z

    def f(v):
        return z * math.exp(-v ** (1.0 / beta)) / (v * v + 2.0 * v * z * c + zz)

    points = None
    if c < 0 and 0 < -z * c < upper:
        points = [-z * c]
    val, _ = integrate.quad(f, 0.0, upper, points=points, epsabs=0.0,
                            epsrel=1e-12, limit=500)
    return math.sin(beta * math.pi) / (beta * math.pi) * val


def _scalar(beta: float, x: float) -> float:
    z = -x
    if z < 0 or not math.isfinite(z):
        raise UnsupportedArgumentError(
            f"mittag_leffler expects a nonpositive finite argument, got {x!r}")
    if z > MAX_Z:
        raise UnsupportedArgumentError(f"|argument| {z!r} beyond validated range {MAX_Z}")
    if z == 0.0:
        return 1.0
    if beta == 1.0:
        return math.exp(-z)
    if _largest_log_term(beta, z) <= math.log(_SERIES_MAX_TERM):
        return _series(beta, z)
    return _integral(beta, z)


def mittag_leffler(beta: float, minus_z):
    """Evaluate ``E_beta`` at a nonpositive argument ``minus_z = -z``.

    Accepts a scalar or an array; absolute accuracy is about 1e-12.
    """
    beta = float(beta)
    if not 0.0 < beta <= 1.0:
        raise UnsupportedArgumentError(f"beta must lie in (0, 1], got {beta}")
    if np.ndim(minus_z) == 0:
        return _scalar(beta, float(minus_z))
    arr = np.asarray(minus_z, dtype=float)
    if beta == 1.0:
        if np.any(arr > 0) or np.any(-arr > MAX_Z) or not np.all(np.isfinite(arr)):
            raise UnsupportedArgumentError("argument outside [-MAX_Z, 0]")
        return np.exp(arr)
    uniq, inv = np.unique(arr.ravel(), return_inverse=True)
    vals = np.array([_scalar(beta, float(v)) for v in uniq])
    return vals[inv].reshape(arr.shape)
