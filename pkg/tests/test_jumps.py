import math

import pytest

import oracles
from affine_sv.errors import NonConvergentIntegral, ParameterError
from affine_sv.jumps import (
    INF,
    AnalyticCgf,
    CompoundPoisson,
    DoubleExponentialMarks,
    ExponentialMarks,
    GaussianMarks,
    PointMark,
)


def _exp_density(rate, sign):
    return lambda x: rate * math.exp(-rate * sign * x) if sign * x >= 0 else 0.0


@pytest.mark.parametrize("u", [-5.0, -1.0, 0.3, 2.0, 7.5])
def test_exponential_down_jumps_match_quadrature(u):
    jm = CompoundPoisson(0.7, ExponentialMarks(10.0, -1))
    ref = oracles.compound_poisson_kappa(0.7, _exp_density(10.0, -1), -12.0, 0.0, u, compensate=False)
    assert jm.kappa(u) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_exponential_domain_edge():
    jm = CompoundPoisson(0.1, ExponentialMarks(10.0, -1))
    assert jm.kappa_minus == -10.0 and jm.kappa_plus == INF
    assert jm.kappa(-10.0) == INF
    assert math.isfinite(jm.kappa(-9.999))


@pytest.mark.parametrize("u", [-20.0, -3.0, 0.5, 4.0])
def test_gaussian_matches_quadrature(u):
    jm = CompoundPoisson(2.0, GaussianMarks(-0.05, 0.1))
    dens = lambda x: math.exp(-0.5 * ((x + 0.05) / 0.1) ** 2) / (0.1 * math.sqrt(2 * math.pi))
    ref = oracles.compound_poisson_kappa(2.0, dens, -3.0, 3.0, u, compensate=False)
    assert jm.kappa(u) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("u", [-3.0, 0.5, 4.0])
def test_double_exponential_matches_quadrature(u):
    marks = DoubleExponentialMarks(0.3, 12.0, 8.0)
    jm = CompoundPoisson(1.5, marks)
    dens = lambda x: 0.3 * 12.0 * math.exp(-12.0 * x) if x >= 0 else 0.7 * 8.0 * math.exp(8.0 * x)
    ref = oracles.compound_poisson_kappa(1.5, dens, -12.0, 0.0, u, compensate=False) + \
        oracles.compound_poisson_kappa(1.5, dens, 0.0, 12.0, u, compensate=False)
    assert jm.kappa(u) == pytest.approx(ref, rel=1e-8)
    assert (jm.kappa_minus, jm.kappa_plus) == (-8.0, 12.0)


def test_compensated_vanishes_at_zero_and_one():
    jm = CompoundPoisson(2.0, GaussianMarks(-0.05, 0.1))
    assert jm.compensated(0.0) == 0.0
    assert abs(jm.compensated(1.0)) < 1e-15


def test_point_mark():
    jm = CompoundPoisson(0.5, PointMark(x=-0.2))
    assert jm.kappa(3.0) == pytest.approx(0.5 * (math.exp(-0.6) - 1.0))


def test_invalid_parameters():
    with pytest.raises(ParameterError):
        ExponentialMarks(-1.0)
    with pytest.raises(ParameterError):
        ExponentialMarks(1.0, sign=0)
    with pytest.raises(ParameterError):
        CompoundPoisson(-0.1, ExponentialMarks(1.0))
    with pytest.raises(ParameterError):
        AnalyticCgf(lambda u: u, kappa_minus=1.0)


def test_analytic_cgf_domain_and_nan():
    jm = AnalyticCgf(lambda u: 0.5 * u * u, kappa_minus=-3.0, kappa_plus=4.0)
    assert jm.kappa(2.0) == 2.0
    assert jm.kappa(4.0) == INF and jm.kappa(-3.5) == INF
    bad = AnalyticCgf(lambda u: float("nan"))
    with pytest.raises(NonConvergentIntegral):
        bad.kappa(1.0)
    with pytest.raises(TypeError):
        jm.to_json()
