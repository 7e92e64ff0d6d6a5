"""Spectral transition densities of fractional Pearson diffusions.

The generator of each non-heavy-tailed Pearson diffusion has a purely discrete
spectrum with polynomial eigenfunctions ``Q_n`` orthonormal under the
stationary density ``m``. Time-changing by an inverse beta-stable subordinator
replaces ``exp(-lambda t)`` by ``E_beta(-lambda t^beta)``, so

    p_beta(x, t; y) = m(x) * sum_n E_beta(-lambda_n t^beta) Q_n(y) Q_n(x).

Polynomials are generated from the monic three-term recurrence of the
stationary law (normal, gamma or beta) rather than stored as monomial
coefficients, which are hopelessly ill-conditioned at degree 50.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .errors import (
    DomainError,
    InsufficientSamplingError,
    InvalidParameterError,
    NumericalDegeneracyError,
    TruncationWarning,
)
from .mittag_leffler import mittag_leffler
from .pearson import (
    DiffusionKind,
    DiffusionParams,
    diffusion_sq,
    drift,
    stationary_law,
    state_space,
)

__all__ = [
    "EigenSystem",
    "SpectralDensity",
    "eigen_system",
    "candidate_eigenvalues",
    "fpd_density",
    "fpd_cdf",
    "caputo_derivative",
    "GRAM_TOLERANCE",
]

#: Largest allowed ``max |G - I|`` for the Gram matrix of ``Q_0..Q_N``.
GRAM_TOLERANCE = 1e-8

# relative size of the last retained term that triggers a truncation warning
_TRUNCATION_RATIO = 1e-8


def _recurrence(kind: DiffusionKind, params: DiffusionParams, N: int):
    """Monic recurrence ``p_{n+1} = (x - a_n) p_n - b_n p_{n-1}`` for the stationary law.

    Returns ``a[0..N]`` and ``b[0..N+1]`` with ``b[0] = 1`` (total mass).
    """
    n = np.arange(N + 2, dtype=float)
    if kind is DiffusionKind.OU:
        a = np.full(N + 1, params.mean)
        b = n * params.vol_scale ** 2
    elif kind is DiffusionKind.CIR:
        k = 2.0 * params.mean / params.vol_scale
        r = 2.0 / params.vol_scale
        a = (2.0 * n[:N + 1] + k) / r
        b = n * (n + k - 1.0) / (r * r)
    else:
        # Beta(p, q) on [0, 1] is Jacobi(alpha=q-1, beta=p-1) on [-1, 1] moved by x = (1+t)/2
        p = params.mean / params.vol_scale
        q = (1.0 - params.mean) / params.vol_scale
        al, be = q - 1.0, p - 1.0
        s = al + be
        m = n[:N + 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            aj = (be * be - al * al) / ((2 * m + s) * (2 * m + s + 2))
            bj = (4 * n * (n + al) * (n + be) * (n + s)
                  / ((2 * n + s) ** 2 * (2 * n + s + 1) * (2 * n + s - 1)))
        aj[0] = (be - al) / (s + 2.0)
        if N + 2 > 1:
            bj[1] = 4.0 * (1 + al) * (1 + be) / ((2 + s) ** 2 * (3 + s))
        a = (1.0 + aj) / 2.0
        b = bj / 4.0
    b = np.array(b, dtype=float)
    b[0] = 1.0
    return np.asarray(a, dtype=float), b


def _evaluate(a, sb, x, N: int, derivs: int = 0):
    """Orthonormal ``Q_0..Q_N`` (and derivatives) at ``x``; shape ``(N+1, len(x))``."""
    x = np.asarray(x, dtype=float)
    q = np.zeros((N + 1,) + x.shape)
    d1 = np.zeros_like(q) if derivs >= 1 else None
    d2 = np.zeros_like(q) if derivs >= 2 else None
    q[0] = 1.0
    for k in range(N):
        xa = x - a[k]
        prev = q[k - 1] if k else 0.0
        q[k + 1] = (xa * q[k] - sb[k] * prev) / sb[k + 1]
        if d1 is not None:
            p1 = d1[k - 1] if k else 0.0
            d1[k + 1] = (q[k] + xa * d1[k] - sb[k] * p1) / sb[k + 1]
        if d2 is not None:
            p2 = d2[k - 1] if k else 0.0
            d2[k + 1] = (2.0 * d1[k] + xa * d2[k] - sb[k] * p2) / sb[k + 1]
    return q, d1, d2


def _gauss_nodes(kind: DiffusionKind, params: DiffusionParams, M: int):
    """Gauss nodes and normalized weights matched to the stationary density."""
    if kind is DiffusionKind.OU:
        z, w = special.roots_hermitenorm(M)
        x = params.mean + abs(params.vol_scale) * z
    elif kind is DiffusionKind.CIR:
        k = 2.0 * params.mean / params.vol_scale
        r = 2.0 / params.vol_scale
        u, w = special.roots_genlaguerre(M, k - 1.0)
        x = u / r
    else:
        p = params.mean / params.vol_scale
        q = (1.0 - params.mean) / params.vol_scale
        t, w = special.roots_jacobi(M, q - 1.0, p - 1.0)
        x = (1.0 + t) / 2.0
    return x, w / w.sum()


def candidate_eigenvalues(kind, params: DiffusionParams, N: int) -> np.ndarray:
    """Closed-form ``lambda_n``: ``n tau`` (OU), ``n theta`` (CIR), ``gamma n (1 + delta (n-1))`` (Jacobi)."""
    kind = DiffusionKind.parse(kind)
    n = np.arange(N + 1, dtype=float)
    if kind is DiffusionKind.JACOBI:
        return params.drift_rate * n * (1.0 + params.vol_scale * (n - 1.0))
    return params.drift_rate * n


@dataclass(frozen=True)
class EigenSystem:
    """Eigenpairs ``(lambda_n, Q_n)``, ``n = 0..N``, of a Pearson generator.

    ``Q_n`` are stored through their recurrence coefficients ``rec_a`` and
    ``rec_b``; ``eigenvalues`` are Rayleigh quotients ``-<A Q_n, Q_n>_m``.
    """

    kind: DiffusionKind
    params: DiffusionParams
    order: int
    eigenvalues: np.ndarray
    candidates: np.ndarray
    rec_a: np.ndarray
    rec_b: np.ndarray
    gram_error: float
    nodes: int
    _sqrt_b: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_sqrt_b", np.sqrt(self.rec_b))
        for arr in (self.eigenvalues, self.candidates, self.rec_a, self.rec_b, self._sqrt_b):
            arr.setflags(write=False)

    def polynomials(self, x, derivs: int = 0):
        """Values of ``Q_0..Q_N`` at ``x`` as rows; with ``derivs`` also ``Q'`` and ``Q''``."""
        q, d1, d2 = _evaluate(self.rec_a, self._sqrt_b, x, self.order, derivs)
        if derivs == 0:
            return q
        return (q, d1) if derivs == 1 else (q, d1, d2)

    def generator_residual(self, x, max_order: int | None = None) -> np.ndarray:
        """``max_x |A Q_n(x) + lambda_n Q_n(x)| / (1 + lambda_n)`` for each ``n``."""
        top = self.order if max_order is None else min(max_order, self.order)
        x = np.asarray(x, dtype=float)
        q, d1, d2 = self.polynomials(x, derivs=2)
        mu = np.asarray(drift(self.kind, self.params, x))
        s2 = np.asarray(diffusion_sq(self.kind, self.params, x))
        aq = mu * d1 + 0.5 * s2 * d2
        lam = self.eigenvalues[:, None]
        res = np.abs(aq + lam * q).max(axis=1) / (1.0 + np.abs(self.eigenvalues))
        return res[: top + 1]

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind.value,
                "params": {
                    "drift_rate": self.params.drift_rate,
                    "mean": self.params.mean,
                    "vol_scale": self.params.vol_scale,
                },
                "order": self.order,
                "eigenvalues": self.eigenvalues.tolist(),
                "candidate_eigenvalues": self.candidates.tolist(),
                "recurrence_a": self.rec_a.tolist(),
                "recurrence_b": self.rec_b.tolist(),
                "gram_error": self.gram_error,
                "quadrature_nodes": self.nodes,
            },
            indent=2,
        )


def eigen_system(kind, params: DiffusionParams, N: int = 50,
                 nodes: int | None = None) -> EigenSystem:
    """Build and verify the orthonormal eigensystem up to degree ``N``.

    Orthonormality is checked by Gauss quadrature matched to ``m`` with
    ``max(200, N + 2)`` nodes unless ``nodes`` is given. Eigenvalues are the
    Rayleigh quotients, which are exact for polynomials of this degree.

    Raises
    ------
    NumericalDegeneracyError
        If the Gram matrix deviates from the identity by more than
        ``GRAM_TOLERANCE``.
    """
    kind = DiffusionKind.parse(kind)
    stationary_law(kind, params)  # validates params
    N = int(N)
    if N < 0:
        raise InvalidParameterError("truncation order must be nonnegative")
    M = max(200, N + 2) if nodes is None else int(nodes)
    if M < N + 1:
        raise InvalidParameterError("need more quadrature nodes than the truncation order")
    a, b = _recurrence(kind, params, N)
    if not np.all(b[1:] > 0) or not np.all(np.isfinite(b)):
        raise NumericalDegeneracyError("recurrence coefficients are not positive")
    xs, w = _gauss_nodes(kind, params, M)
    q, d1, d2 = _evaluate(a, np.sqrt(b), xs, N, derivs=2)
    sw = np.sqrt(w)
    u = q * sw
    gram = u @ u.T
    gram_error = float(np.abs(gram - np.eye(N + 1)).max())
    if not gram_error <= GRAM_TOLERANCE:
        raise NumericalDegeneracyError(
            f"Gram matrix deviates from identity by {gram_error:.3g} at N={N}")
    mu = np.asarray(drift(kind, params, xs))
    s2 = np.asarray(diffusion_sq(kind, params, xs))
    aq = (mu * d1 + 0.5 * s2 * d2) * sw
    lam = -np.einsum("ij,ij->i", aq, u)
    lam[0] = 0.0
    return EigenSystem(kind, params, N, lam, candidate_eigenvalues(kind, params, N),
                       a, b, gram_error, M)


@dataclass
class SpectralDensity:
    """Truncated spectral transition density started from ``y`` at time ``t``.

    ``beta = 1`` gives the classical diffusion. Time factors
    ``E_beta(-lambda_n t^beta)`` and ``Q_n(y)`` are computed once.
    """

    eigen: EigenSystem
    beta: float
    y: float
    t: float

    def __post_init__(self):
        self.beta = float(self.beta)
        if not 0.0 < self.beta <= 1.0:
            raise InvalidParameterError(f"beta must lie in (0, 1], got {self.beta}")
        if not self.t > 0:
            raise InvalidParameterError("t must be positive")
        if not state_space(self.eigen.kind).contains(self.y, strict=True):
            raise DomainError(f"starting point {self.y!r} is not interior")
        z = -self.eigen.eigenvalues * self.t ** self.beta
        self.time_factors = np.asarray(mittag_leffler(self.beta, z), dtype=float)
        self.qy = self.eigen.polynomials(np.array([float(self.y)]))[:, 0]
        self.coefficients = self.time_factors * self.qy
        # frozen scipy laws are expensive to build; quadrature calls density per point
        self._law = stationary_law(self.eigen.kind, self.eigen.params)
        self._space = state_space(self.eigen.kind)

    @property
    def kind(self) -> DiffusionKind:
        return self.eigen.kind

    def _warn_if_truncated(self, terms: np.ndarray, total: np.ndarray) -> None:
        if self.eigen.order == 0:
            return
        last = np.abs(terms).max()
        if last > _TRUNCATION_RATIO * max(np.abs(total).max(), 1e-300):
            warnings.warn(
                f"order {self.eigen.order} truncation: last term {last:.3g} is not "
                f"negligible (t={self.t}, beta={self.beta})",
                TruncationWarning,
                stacklevel=3,
            )

    def density(self, x, clip: bool = True):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        if not np.all(self._space.contains(x_arr, strict=True)):
            raise DomainError("density is evaluated at interior points only")
        q = self.eigen.polynomials(x_arr)
        series = self.coefficients @ q
        self._warn_if_truncated(self.coefficients[-1] * q[-1], series)
        m = self._law.pdf(x_arr)
        out = m * series
        if clip:
            out = np.maximum(out, 0.0)
        return float(out[0]) if np.ndim(x) == 0 else out

    def cdf(self, x):
        """CDF from the closed-form antiderivative of each eigenmode.

        Since ``(sigma^2 m Q_n' / 2)' = -lambda_n m Q_n``, the integral of
        ``m Q_n`` up to ``x`` is ``-sigma^2(x) m(x) Q_n'(x) / (2 lambda_n)``.
        """
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        space = self._space
        out = np.empty_like(x_arr)
        lo = x_arr <= space.lower
        hi = x_arr >= space.upper
        inner = ~(lo | hi)
        out[lo], out[hi] = 0.0, 1.0
        if np.any(inner):
            xi = x_arr[inner]
            law = self._law
            _, d1 = self.eigen.polynomials(xi, derivs=1)
            lam = self.eigen.eigenvalues
            c = np.zeros_like(self.coefficients)
            c[1:] = self.coefficients[1:] / lam[1:]
            series = c @ d1
            self._warn_if_truncated(c[-1] * d1[-1], series)
            s2 = np.asarray(diffusion_sq(self.kind, self.eigen.params, xi))
            vals = law.cdf(xi) - 0.5 * s2 * law.pdf(xi) * series
            out[inner] = np.clip(vals, 0.0, 1.0)
        return float(out[0]) if np.ndim(x) == 0 else out

    def mean(self) -> float:
        """``E[X]``; only ``Q_0`` and ``Q_1`` contribute."""
        if self.eigen.order == 0:
            return self.eigen.params.mean
        # x = a_0 + sqrt(b_1) Q_1(x)
        return float(self.eigen.rec_a[0] + math.sqrt(self.eigen.rec_b[1]) * self.coefficients[1])

    def curve_csv(self, xs, what: str = "density", fh=None):
        xs = np.asarray(xs, dtype=float)
        vals = self.density(xs) if what == "density" else self.cdf(xs)
        buf = io.StringIO() if fh is None else fh
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", what])
        for a, v in zip(xs.tolist(), np.atleast_1d(vals).tolist()):
            w.writerow([repr(a), repr(v)])
        return buf.getvalue() if fh is None else None


def fpd_density(sd: SpectralDensity, x):
    """Transition density at ``x``; negative truncation ripples are clipped to 0."""
    return sd.density(x)


def fpd_cdf(sd: SpectralDensity, x):
    """Transition CDF at ``x``, clipped to ``[0, 1]``."""
    return sd.cdf(x)


def caputo_derivative(f, beta: float, t: float, n_steps: int = 2000,
                      grading: float = 1.0, times=None) -> float:
    """Caputo derivative of order ``beta`` at ``t``.

    ``f`` is either a callable, sampled on ``s_k = t (k/n)^grading``, or an
    array of samples on ``times`` (default: uniform on ``[0, t]``). The sampled
    function is interpolated linearly and the convolution with
    ``(t-s)^(-beta) / Gamma(1-beta)`` is integrated exactly on each piece,
    which equals the regularized form with ``f(0) t^(-beta) / Gamma(1-beta)``
    subtracted. ``beta = 1`` returns the one-sided derivative at ``t``.

    Raises
    ------
    InsufficientSamplingError
        If fewer than 8 intervals are available.
    """
    beta = float(beta)
    if not 0.0 < beta <= 1.0:
        raise InvalidParameterError(f"beta must lie in (0, 1], got {beta}")
    if not t > 0:
        raise InvalidParameterError("t must be positive")
    if callable(f):
        if n_steps < 8:
            raise InsufficientSamplingError(f"need at least 8 intervals, got {n_steps}")
        s = t * (np.arange(n_steps + 1) / n_steps) ** grading
        fv = np.asarray(f(s), dtype=float)
    else:
        fv = np.asarray(f, dtype=float)
        if fv.ndim != 1 or fv.size < 9:
            raise InsufficientSamplingError(f"need at least 9 samples, got {fv.size}")
        s = np.linspace(0.0, t, fv.size) if times is None else np.asarray(times, dtype=float)
        if s.shape != fv.shape or s[0] != 0.0 or not math.isclose(s[-1], t) \
                or np.any(np.diff(s) <= 0):
            raise InsufficientSamplingError("sample times must increase from 0 to t")
    if beta == 1.0:
        return float(np.gradient(fv, s, edge_order=2)[-1])
    slope = np.diff(fv) / np.diff(s)
    w = (t - s[:-1]) ** (1.0 - beta) - np.maximum(t - s[1:], 0.0) ** (1.0 - beta)
    return float(slope @ w / math.gamma(2.0 - beta))
