import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from urnctrw.errors import DomainError, InvalidParameterError
from urnctrw.pearson import (
    DEFAULT_CHAIN_PARAMS,
    ChainParams,
    DiffusionKind,
    DiffusionParams,
    derive_params,
    diffusion_sq,
    drift,
    generator_apply,
    state_space,
    stationary_cdf,
    stationary_density,
    stationary_law,
)

OU, CIR, JAC = DiffusionKind.OU, DiffusionKind.CIR, DiffusionKind.JACOBI


def test_parse_kind():
    assert DiffusionKind.parse("OU") is OU
    assert DiffusionKind.parse(JAC) is JAC
    with pytest.raises(InvalidParameterError):
        DiffusionKind.parse("heston")


def test_ou_parameter_map():
    p = derive_params(OU, ChainParams(2.0, 1.0, 0.0))
    assert p.drift_rate == 2.0
    assert p.mean == 0.0
    assert p.vol_scale == pytest.approx(1 / math.sqrt(2))
    # shifted chain: mu = -b/a
    assert derive_params(OU, ChainParams(1.0, 2.0, 3.0)).mean == -1.5


def test_jacobi_parameter_map():
    p = derive_params(JAC, ChainParams(1.0, 1.0, 3.0))
    assert p.drift_rate == 4.0
    assert p.mean == 0.75
    assert p.vol_scale == 1 / 8


def test_cir_parameter_map():
    p = derive_params(CIR, ChainParams(1.0, 2.0, 4.0, d=0.5))
    assert (p.drift_rate, p.mean, p.vol_scale) == (1.0, 2.0, 0.5)


@pytest.mark.parametrize(
    "kind,cp",
    [
        (OU, ChainParams(1.0, 0.0, 1.0)),
        (OU, ChainParams(-1.0, 1.0, 0.0)),
        (JAC, ChainParams(1.0, 0.0, 1.0)),
        (CIR, ChainParams(1.0, 1.0, 1.0)),
        (CIR, ChainParams(1.0, 1.0, 1.0, d=1.0)),
    ],
)
def test_invalid_chain_params(kind, cp):
    with pytest.raises(InvalidParameterError):
        derive_params(kind, cp)


def test_state_spaces():
    assert state_space(OU).lower == -math.inf
    assert state_space(CIR).contains(0.0)
    assert not state_space(CIR).contains(0.0, strict=True)
    assert state_space(JAC).upper == 1.0


def test_coefficients_at_points():
    p = derive_params(JAC, DEFAULT_CHAIN_PARAMS[JAC])
    # Jacobi (theta=1, a=b=1): drift -(a+b) y + b, diffusion 2 gamma delta y(1-y) = y(1-y)
    assert drift(JAC, p, 0.25) == pytest.approx(-2 * 0.25 + 1)
    assert diffusion_sq(JAC, p, 0.25) == pytest.approx(0.25 * 0.75)
    q = derive_params(CIR, DEFAULT_CHAIN_PARAMS[CIR])
    assert drift(CIR, q, 3.0) == pytest.approx(-1.0)
    assert diffusion_sq(CIR, q, 3.0) == pytest.approx(1.5)
    r = derive_params(OU, DEFAULT_CHAIN_PARAMS[OU])
    assert diffusion_sq(OU, r, 7.0) == pytest.approx(2.0)


def test_domain_errors():
    p = derive_params(JAC, DEFAULT_CHAIN_PARAMS[JAC])
    with pytest.raises(DomainError):
        drift(JAC, p, 1.5)
    with pytest.raises(DomainError):
        stationary_density(JAC, p, 0.0)
    q = derive_params(CIR, DEFAULT_CHAIN_PARAMS[CIR])
    with pytest.raises(DomainError):
        diffusion_sq(CIR, q, -0.1)


def test_stationary_laws_in_chain_terms():
    # Gamma(2b, rate 2a) and Beta(2b, 2a)
    law = stationary_law(CIR, derive_params(CIR, ChainParams(1.0, 2.0, 4.0, d=0.5)))
    assert law.mean() == pytest.approx(2.0)
    assert law.var() == pytest.approx(8 / 16)
    law = stationary_law(JAC, derive_params(JAC, ChainParams(1.0, 1.0, 3.0)))
    assert law.mean() == pytest.approx(3 / 4)
    assert law.var() == pytest.approx(6 * 2 / (8 * 8 * 9))


@pytest.mark.parametrize("kind", [OU, CIR, JAC])
def test_generator_annihilates_constants(kind):
    p = derive_params(kind, DEFAULT_CHAIN_PARAMS[kind])
    x = np.linspace(0.1, 0.9, 9)
    assert np.all(generator_apply(kind, p, lambda z: np.ones_like(z), x) == 0)


@pytest.mark.parametrize("kind", [OU, CIR, JAC])
def test_generator_on_identity_is_drift(kind):
    p = derive_params(kind, DEFAULT_CHAIN_PARAMS[kind])
    x = np.linspace(0.1, 0.9, 9)
    got = generator_apply(kind, p, lambda z: z, x)
    # centred second differences with h = 1e-5 carry ~eps/h^2 roundoff
    assert np.allclose(got, drift(kind, p, x), atol=1e-6)
    exact = generator_apply(kind, p, lambda z: z, x, df=np.ones_like, d2f=np.zeros_like)
    assert np.allclose(exact, drift(kind, p, x), rtol=0, atol=1e-15)


@pytest.mark.parametrize("kind", [OU, CIR, JAC])
def test_stationary_density_is_invariant(kind):
    """Adjoint check: integral of m * A f vanishes for smooth bounded f."""
    p = derive_params(kind, DEFAULT_CHAIN_PARAMS[kind])
    law = stationary_law(kind, p)
    f, df, d2f = np.sin, np.cos, lambda z: -np.sin(z)
    lo, hi = law.ppf(1e-12), law.ppf(1 - 1e-12)
    val = integrate.quad(
        lambda z: law.pdf(z) * generator_apply(kind, p, f, z, df=df, d2f=d2f), lo, hi)[0]
    assert abs(val) < 1e-8


def test_stationary_cdf_boundaries():
    p = derive_params(JAC, DEFAULT_CHAIN_PARAMS[JAC])
    assert stationary_cdf(JAC, p, 0.0) == 0.0
    assert stationary_cdf(JAC, p, 1.0) == 1.0
    assert stationary_cdf(JAC, p, 0.5) == pytest.approx(0.5)


@settings(max_examples=50, deadline=None)
@given(
    theta=st.floats(0.1, 5), a=st.floats(0.1, 5), b=st.floats(0.1, 5),
    x=st.floats(0.001, 0.999),
)
def test_jacobi_diffusion_nonnegative_and_vanishes_at_boundary(theta, a, b, x):
    p = derive_params(JAC, ChainParams(theta, a, b))
    assert diffusion_sq(JAC, p, x) >= 0
    assert diffusion_sq(JAC, p, 0.0) == 0.0
    assert diffusion_sq(JAC, p, 1.0) == 0.0
    # drift points inward at the boundaries
    assert drift(JAC, p, 0.0) > 0 > drift(JAC, p, 1.0)


@settings(max_examples=50, deadline=None)
@given(theta=st.floats(0.1, 5), a=st.floats(0.1, 5), b=st.floats(0.1, 5))
def test_stationary_mean_is_drift_root(theta, a, b):
    for kind in (JAC, CIR):
        cp = ChainParams(theta, a, b, d=0.5 if kind is CIR else None)
        p = derive_params(kind, cp)
        assert drift(kind, p, stationary_law(kind, p).mean()) == pytest.approx(0, abs=1e-9)


def test_diffusion_params_direct():
    p = DiffusionParams(1.0, 0.5, 0.25)
    assert stationary_law(JAC, p).mean() == pytest.approx(0.5)
    with pytest.raises(InvalidParameterError):
        stationary_law(JAC, DiffusionParams(1.0, 1.5, 0.25))
