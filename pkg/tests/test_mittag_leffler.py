import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from urnctrw.errors import UnsupportedArgumentError
from urnctrw.mittag_leffler import MAX_Z, mittag_leffler


def _mp_series(beta, z):
    """Direct series summed in extended precision until terms are negligible."""
    # terms peak near exp(z^(1/beta)); carry enough digits to absorb the cancellation
    with mpmath.workdps(30 + int(0.45 * z ** (1 / beta))):
        b, zz = mpmath.mpf(beta), mpmath.mpf(z)
        total, j = mpmath.mpf(0), 0
        while True:
            term = (-zz) ** j / mpmath.gamma(1 + b * j)
            total += term
            if j * b > 2 * z ** (1 / beta) + 10 and abs(term) < mpmath.mpf(10) ** -30:
                return float(total)
            j += 1


def _mp_integral(beta, z):
    """Extended-precision quadrature of the real inversion integral."""
    with mpmath.workdps(30):
        b, zz = mpmath.mpf(beta), mpmath.mpf(z)
        c = mpmath.cos(b * mpmath.pi)
        f = lambda v: zz * mpmath.exp(-v ** (1 / b)) / (v * v + 2 * v * zz * c + zz * zz)
        return float(mpmath.sin(b * mpmath.pi) / (b * mpmath.pi)
                     * mpmath.quad(f, [0, zz / 2, zz, 2 * zz, mpmath.inf]))


CASES = [(b, z) for b in (0.2, 0.4, 0.6, 0.8, 0.95) for z in (0.05, 0.7, 2.5, 6.0, 15.0, 80.0)]


def test_identity_at_zero():
    for beta in (0.1, 0.5, 0.99, 1.0):
        assert mittag_leffler(beta, 0.0) == 1.0


def test_exponential_case():
    for z in (0.1, 1.0, 10.0):
        assert abs(mittag_leffler(1.0, -z) - math.exp(-z)) < 1e-12
    assert mittag_leffler(1.0, -1.0) == pytest.approx(0.3678794412, abs=1e-10)


def test_half_is_scaled_erfc():
    assert abs(mittag_leffler(0.5, -1.0) - math.e * math.erfc(1.0)) < 1e-10
    assert mittag_leffler(0.5, -1.0) == pytest.approx(0.4275835761, abs=1e-10)
    z = np.array([0.01, 0.3, 2.0, 7.5, 30.0, 100.0])
    assert np.max(np.abs(mittag_leffler(0.5, -z) - special.erfcx(z))) < 1e-10


@pytest.mark.parametrize("beta,z", [c for c in CASES if c[1] ** (1 / c[0]) <= 300])
def test_against_extended_precision_series(beta, z):
    assert abs(mittag_leffler(beta, -z) - _mp_series(beta, z)) < 1e-10


@pytest.mark.parametrize("beta,z", [c for c in CASES if c[1] ** (1 / c[0]) > 3])
def test_against_extended_precision_integral(beta, z):
    assert abs(mittag_leffler(beta, -z) - _mp_integral(beta, z)) < 1e-10


@pytest.mark.parametrize("beta", [0.3, 0.7])
def test_against_mpmath_large_z(beta):
    # E_beta(-z) ~ z^-1 / Gamma(1 - beta) for large z
    z = 1e5
    assert mittag_leffler(beta, -z) == pytest.approx(1 / (z * math.gamma(1 - beta)), rel=1e-4)


@settings(max_examples=60, deadline=None)
@given(beta=st.floats(0.05, 1.0), z1=st.floats(0, 100), dz=st.floats(1e-3, 50))
def test_monotone_and_bounded(beta, z1, dz):
    a, b = mittag_leffler(beta, -z1), mittag_leffler(beta, -(z1 + dz))
    assert 0 < b < a <= 1


def test_array_input_preserves_shape():
    z = -np.array([[0.0, 1.0], [1.0, 5.0]])
    out = mittag_leffler(0.6, z)
    assert out.shape == (2, 2)
    assert out[0, 1] == out[1, 0] == mittag_leffler(0.6, -1.0)


@pytest.mark.parametrize("beta,arg", [(0.5, 1.0), (0.5, -2 * MAX_Z), (0.0, -1.0),
                                      (1.2, -1.0), (0.5, float("nan")), (1.0, [0.5])])
def test_unsupported_arguments(beta, arg):
    with pytest.raises(UnsupportedArgumentError):
        mittag_leffler(beta, arg)
