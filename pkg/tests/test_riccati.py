import math
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.integrate import quad

import oracles
from affine_sv import kernels, models, riccati
from affine_sv.affine_core import CallableGenerator
from affine_sv.errors import DomainError, SignChangeError
from affine_sv.jumps import INF

HP = models.FIG_HESTON
ARGS = (HP.lam, HP.theta, HP.zeta, HP.rho)


@pytest.mark.parametrize("t", [0.25, 1.0, 5.0])
@pytest.mark.parametrize("u", [-1.0, 0.5, 2.0, complex(0.5, 7.0), complex(-2.0, 25.0), complex(3.0, -4.0)])
def test_heston_against_classical_solution(heston, t, u):
    psi, phi = riccati.psi_phi(heston, t, u, 0.0)
    psi_o, phi_o = oracles.heston_psi_phi_mp(*ARGS, t, u)
    assert abs(psi - psi_o) < 1e-8 and abs(phi - phi_o) < 1e-8


def test_mp_oracle_agrees_with_taylor_integrator():
    a = oracles.heston_psi_phi_mp(*ARGS, 1.0, 2.0)
    b = oracles.heston_psi_phi_taylor(*ARGS, 1.0, 2.0)
    assert a == pytest.approx(b, rel=1e-14)


def test_generic_stepper_matches_oracle(heston):
    g = CallableGenerator(heston.F, heston.R)
    for u in (-1.0, 0.5, 2.0):
        sol = riccati.solve_riccati(g, u, 0.0, 5.0, t_grid=[0.0, 1.0, 5.0])
        assert sol.backend == "python"
        for t, psi, phi in zip(sol.times[1:], sol.psi[1:], sol.phi[1:]):
            ref = oracles.heston_psi_phi_mp(*ARGS, t, u)
            assert abs(psi - ref[0]) < 1e-8 and abs(phi - ref[1]) < 1e-8


def test_bns_linear_psi_closed_form():
    g = models.preset("bns")
    p = models.DEFAULT_BNS
    u, t = 2.5, 3.0
    psi_exact = lambda s: (u * u - u) / (2 * p.lam) * (1 - math.exp(-p.lam * s))
    phi_exact, _ = quad(lambda s: g.F(u, psi_exact(s)), 0.0, t, epsabs=1e-14, epsrel=1e-13)
    psi, phi = riccati.psi_phi(g, t, u, 0.0)
    assert psi == pytest.approx(psi_exact(t), rel=1e-9)
    assert phi == pytest.approx(phi_exact, rel=1e-8)


@pytest.mark.skipif("cython" not in kernels.backends(), reason="compiled kernel not built")
def test_compiled_and_python_kernels_agree(heston):
    mods = kernels.backends()
    t_out = np.linspace(0.0, 3.0, 7)
    for u in (-1.0, 0.5, 2.0, -7.5):
        args = (*heston.quadratic_coefficients(u), 0.0, t_out, 1e-10, 1e-10, 0.5, 1e10, INF)
        a, b = mods["cython"].quad_solve_real(*args), mods["python"].quad_solve_real(*args)
        assert a[2:4] == b[2:4]
        np.testing.assert_allclose(a[0][:a[2]], b[0][:b[2]], rtol=1e-13, atol=1e-14)
        np.testing.assert_allclose(a[1][:a[2]], b[1][:b[2]], rtol=1e-13, atol=1e-14)
    z = complex(0.5, 10.0)
    args = (*heston.quadratic_coefficients(z), 0j, t_out, 1e-10, 1e-10, 0.5, 1e10)
    a, b = mods["cython"].quad_solve_complex(*args), mods["python"].quad_solve_complex(*args)
    np.testing.assert_allclose(a[0], b[0], rtol=1e-13, atol=1e-14)


def test_pure_python_fallback_selected_by_environment():
    env = dict(os.environ, AFFINE_SV_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import affine_sv.kernels as k; print(k.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


def test_blowup_time_matches_closed_form_and_ode_oracle(heston):
    u = -7.5
    sol = riccati.solve_riccati(heston, u, 0.0, 2.0)
    assert sol.status == riccati.BLEW_UP
    closed = models.heston_closed_Tstar(HP, u)
    assert sol.t_event == pytest.approx(closed, rel=1e-8)
    assert closed == pytest.approx(oracles.ode_blowup_time(heston.R, u), rel=1e-5)
    assert riccati.cgf(heston, 2.0, u, 0.0) == INF
    assert math.isfinite(riccati.cgf(heston, 0.5 * closed, u, 0.0))


def test_solution_grid_invariants(heston):
    sol = riccati.solve_riccati(heston, 2.0, 0.0, 4.0, n_out=9)
    assert sol.completed and sol.times[0] == 0.0 and sol.psi[0] == 0.0 and sol.phi[0] == 0.0
    assert np.all(np.diff(sol.times) > 0)
    # R(2, psi) stays positive below the stable root, so psi increases
    assert np.all(np.diff(sol.psi) > 0)
    assert len(sol.grid) == 9


def test_csv_round_trip(heston):
    sol = riccati.solve_riccati(heston, 0.5, 0.0, 1.0, n_out=5)
    lines = sol.to_csv().splitlines()
    assert lines[0] == "t,psi,phi" and lines[-1] == "# status=completed"
    t, psi, phi = map(float, lines[3].split(","))
    assert (t, psi, phi) == (sol.times[2], sol.psi[2], sol.phi[2])
    blown = riccati.solve_riccati(heston, -7.5, 0.0, 2.0, n_out=5)
    assert blown.to_csv().splitlines()[-1].startswith("# status=blew_up t=0.88")


@pytest.mark.parametrize("t, s", [(0.3, 0.7), (1.0, 2.5), (4.0, 1.0)])
@pytest.mark.parametrize("u", [-1.0, 0.5, 3.0])
def test_flow_property(any_model, u, t, s):
    dphi, dpsi = riccati.check_flow_property(any_model, u, 0.0, t, s)
    assert dphi < 1e-8 and dpsi < 1e-8


def test_domain_error_on_infinite_R():
    g = CallableGenerator(lambda u, w: 0.0, lambda u, w: INF if w > 1 else -w)
    with pytest.raises(DomainError):
        riccati.solve_riccati(g, 0.5, 2.0, 1.0)


def test_bad_time_grid(heston):
    with pytest.raises(ValueError):
        riccati.solve_riccati(heston, 0.5, 0.0, 1.0, t_grid=[0.1, 1.0])


def test_solver_config_validation():
    with pytest.raises(ValueError):
        riccati.SolverConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        riccati.SolverConfig(max_step=-1.0)


def test_implicit_time_and_sign_change(heston):
    u = 20.0
    assert riccati.implicit_time_of_level(heston, u, 0.0, INF) == pytest.approx(models.heston_closed_Tstar(HP, u),
                                                                                rel=1e-10)
    with pytest.raises(SignChangeError):
        riccati.implicit_time_of_level(heston, 2.0, 0.0, 10.0)
