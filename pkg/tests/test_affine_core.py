import math

import pytest

from affine_sv import affine_core as ac
from affine_sv import models
from affine_sv.errors import ContractViolation, DomainError
from affine_sv.jumps import INF, CompoundPoisson, ExponentialMarks, PointMark

HP = models.FIG_HESTON


def heston_params(c=0.0, gamma=0.0):
    p = HP
    return ac.AdmissibleParameterSet(
        alpha=((1.0, p.rho * p.zeta), (p.rho * p.zeta, p.zeta**2)),
        b=(0.0, p.lam * p.theta),
        beta=(-0.5, -p.lam),
        c=c,
        gamma=gamma,
    )


def test_validation_passes_for_heston_embedding():
    rep = ac.validate_admissibility(heston_params())
    assert rep.passed, rep.lines()
    assert all(line.startswith("PASS") for line in rep.lines())


@pytest.mark.parametrize("kwargs, failing", [
    (dict(c=-0.1), "c >= 0"),
    (dict(gamma=-1.0), "gamma >= 0"),
    (dict(b=(0.0, -0.1)), "b in D (b2 >= 0)"),
    (dict(a=((1.0, 0.0), (0.0, 0.5))), "a12 = a21 = a22 = 0"),
    (dict(alpha=((1.0, 2.0), (2.0, 1.0))), "alpha positive semi-definite"),
])
def test_validation_names_each_failed_condition(kwargs, failing):
    rep = ac.validate_admissibility(ac.AdmissibleParameterSet(**kwargs))
    assert failing in rep.failures()


@pytest.mark.parametrize("name", list(models.PRESETS))
@pytest.mark.parametrize("u, w", [(-3.0, -2.0), (0.5, 0.3), (2.0, -0.7), (1.0, 0.0), (-0.4, 1.2)])
def test_parameter_embedding_reproduces_model_generators(name, u, w):
    g = models.preset(name)
    pg = ac.generator_from_parameters(g.parameters())
    for a, b in ((g.F(u, w), pg.F(u, w)), (g.R(u, w), pg.R(u, w))):
        if math.isinf(a):
            assert math.isinf(b)
        else:
            assert b == pytest.approx(a, rel=1e-9, abs=1e-11)


def test_heston_generator_values():
    g = models.preset("heston")
    # R(u, w) = (u^2 - u)/2 + zeta^2 w^2 / 2 - lam w + rho zeta u w, evaluated by hand at (2, 0.5)
    expected = 1.0 + 0.5 * HP.zeta**2 * 0.25 - HP.lam * 0.5 + HP.rho * HP.zeta
    assert ac.eval_R(g, 2.0, 0.5) == pytest.approx(expected, rel=1e-15)
    assert ac.eval_F(g, 2.0, 0.5) == pytest.approx(HP.lam * HP.theta * 0.5, rel=1e-15)
    assert ac.chi(g, 2.0) == pytest.approx(HP.rho * HP.zeta * 2.0 - HP.lam, rel=1e-15)


def test_numeric_chi_matches_analytic():
    g = models.preset("bates")
    cg = ac.CallableGenerator(g.F, g.R)
    for u in (-4.0, 0.0, 0.5, 1.0, 6.0):
        assert cg.chi(u) == pytest.approx(g.chi(u), rel=1e-7, abs=1e-9)


def test_domain_boundaries_numeric_and_analytic():
    g = models.preset("bns")
    cg = ac.CallableGenerator(g.F, g.R)
    for u in (-5.0, 0.0, 2.0):
        assert ac.domain_boundary_F(cg, u) == pytest.approx(g.f_plus(u), rel=1e-9)
        assert ac.domain_boundary_R(cg, u) == INF
        assert ac.domain_boundary_R(g, u) == INF


def test_y_jumps_limit_R_domain():
    mu = CompoundPoisson(1.0, ExponentialMarks(4.0, -1))
    p = ac.AdmissibleParameterSet(alpha=((1.0, 0.0), (0.0, 0.0)), beta=(-0.5, -1.0), mu=mu)
    g = ac.generator_from_parameters(p)
    assert math.isfinite(g.R(0.5, 0.0))
    # exponential marks on the price coordinate only: domain in w unrestricted
    assert ac.domain_boundary_R(g, 0.5) == INF
    p2 = ac.AdmissibleParameterSet(alpha=((1.0, 0.0), (0.0, 0.0)), beta=(-0.5, -1.0),
                                   mu=CompoundPoisson(1.0, PointMark(y=0.5)))
    g2 = ac.generator_from_parameters(p2)
    assert math.isfinite(g2.R(0.0, 3.0))


def test_nan_is_a_contract_violation():
    g = ac.CallableGenerator(lambda u, w: float("nan"), lambda u, w: 0.0)
    with pytest.raises(ContractViolation):
        ac.eval_F(g, 0.0, 0.0)


def test_chi_undefined_when_R_infinite():
    g = ac.CallableGenerator(lambda u, w: 0.0, lambda u, w: INF if u > 2 else -w)
    with pytest.raises(DomainError):
        ac.chi(g, 3.0)


@pytest.mark.parametrize("name", list(models.PRESETS))
def test_normalization_and_sign_of_R(name):
    g = models.preset(name)
    assert abs(g.R(0.0, 0.0)) <= 1e-12 and abs(g.F(0.0, 0.0)) <= 1e-12
    assert abs(g.R(1.0, 0.0)) <= 1e-12 and abs(g.F(1.0, 0.0)) <= 1e-12
    for u in (-2.0, -0.3, 1.4, 5.0):
        assert g.R(u, 0.0) + g.F(u, 0.0) > 0 or g.R(u, 0.0) > 0
    for u in (0.1, 0.5, 0.9):
        assert g.R(u, 0.0) <= 0 and g.F(u, 0.0) + g.R(u, 0.0) < 0
