"""Compactly supported C^3 test functions for generator-convergence checks.

``psi(x) = (1 - u^2)^4`` with ``u = (x - c)/w`` on ``|u| <= 1`` and zero
outside. The suite is ``x^k psi`` for ``k = 0, 1, 2`` plus the constant 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pearson import DiffusionKind

__all__ = ["Bump", "SUITE", "DEFAULT_BUMPS", "bump_suite"]

SUITE = {"psi": 0, "x_psi": 1, "x2_psi": 2}


@dataclass(frozen=True)
class Bump:
    """``x^power * psi((x - center)/width)``; ``power=None`` is the constant 1."""

    center: float
    width: float
    power: int | None = 0

    def _parts(self, x):
        x = np.asarray(x, dtype=float)
        u = (x - self.center) / self.width
        inside = np.abs(u) <= 1.0
        v = np.where(inside, 1.0 - u * u, 0.0)
        p0 = v ** 4
        p1 = -8.0 * u * v ** 3 / self.width
        p2 = -8.0 * v ** 2 * (1.0 - 7.0 * u * u) / self.width ** 2
        return x, p0, p1, p2

    def __call__(self, x):
        if self.power is None:
            return np.ones_like(np.asarray(x, dtype=float))
        x, p0, _, _ = self._parts(x)
        return x ** self.power * p0

    def d1(self, x):
        if self.power is None:
            return np.zeros_like(np.asarray(x, dtype=float))
        x, p0, p1, _ = self._parts(x)
        k = self.power
        lead = k * x ** (k - 1) * p0 if k else 0.0
        return lead + x ** k * p1

    def d2(self, x):
        if self.power is None:
            return np.zeros_like(np.asarray(x, dtype=float))
        x, p0, p1, p2 = self._parts(x)
        k = self.power
        out = x ** k * p2
        if k >= 1:
            out = out + 2.0 * k * x ** (k - 1) * p1
        if k >= 2:
            out = out + k * (k - 1) * x ** (k - 2) * p0
        return out


#: (center, width) per diffusion; supports sit inside the evaluation grids.
DEFAULT_BUMPS = {
    DiffusionKind.OU: (0.5, 2.0),
    DiffusionKind.JACOBI: (0.5, 0.35),
    DiffusionKind.CIR: (2.0, 1.5),
}


def bump_suite(kind, names=("psi", "x_psi", "x2_psi"), center=None, width=None) -> dict:
    """Named test functions for ``kind``; ``"const"`` gives the constant 1."""
    kind = DiffusionKind.parse(kind)
    c0, w0 = DEFAULT_BUMPS[kind]
    c = c0 if center is None else float(center)
    w = w0 if width is None else float(width)
    out = {}
    for name in names:
        if name == "const":
            out[name] = Bump(c, w, None)
        elif name in SUITE:
            out[name] = Bump(c, w, SUITE[name])
        else:
            raise KeyError(name)
    return out
