import math

import numpy as np
import pytest

from cknflow import (CylinderGrid, DomainError, Field, RadialGrid, Soliton,
                     cylinder_quotient, el_residual_cylinder, el_residual_weighted,
                     eval_radial, eval_soliton, from_lambda_p, grad_weighted_sq,
                     normalized_radial, pressure_functional, radial_constant,
                     sob_alpha_factor, weighted_quotient)


def _soliton_field(dp, nz=4000, z_factor=30.0, z0=0.0):
    grid = CylinderGrid(dp.d, z_factor / math.sqrt(dp.lam), nz, None)
    vals = eval_soliton(Soliton(lam=dp.lam, p=dp.p, z0=z0), grid.z)[:, None]
    return grid, Field(grid, vals)


def _profile_field(dp, ns=4000, s_min=1e-4, s_max=1e4):
    grid = RadialGrid(dp.n, dp.alpha, dp.d, s_min, s_max, ns, None)
    prof = normalized_radial(dp)
    return grid, Field(grid, eval_radial(prof, grid.s)[:, None])


def test_cylinder_quotient_matches_radial_constant():
    dp = from_lambda_p(3, 0.7, 3.6)
    _, phi = _soliton_field(dp, nz=2000)
    rep = cylinder_quotient(phi, dp.lam, dp.p)
    assert rep.quotient == pytest.approx(radial_constant(dp), rel=1e-6)
    assert rep.quotient == pytest.approx(rep.numerator / rep.denominator, rel=1e-15)


def test_cylinder_quotient_translation_invariance():
    dp = from_lambda_p(3, 0.5, 4.0)
    _, phi0 = _soliton_field(dp, nz=3000)
    _, phi1 = _soliton_field(dp, nz=3000, z0=0.8)
    q0 = cylinder_quotient(phi0, dp.lam, dp.p).quotient
    q1 = cylinder_quotient(phi1, dp.lam, dp.p).quotient
    assert q1 == pytest.approx(q0, rel=1e-10)


def test_cylinder_quotient_scale_invariance():
    dp = from_lambda_p(2, 0.2, 5.0)
    grid, phi = _soliton_field(dp, nz=1500)
    q = cylinder_quotient(phi, dp.lam, dp.p).quotient
    scaled = Field(grid, 17.3 * phi.values)
    assert cylinder_quotient(scaled, dp.lam, dp.p).quotient == pytest.approx(q, rel=1e-12)


def test_cylinder_quotient_rejects_zero_field():
    dp = from_lambda_p(3, 0.5, 4.0)
    grid = CylinderGrid(3, 10.0, 100, None)
    with pytest.raises(DomainError):
        cylinder_quotient(Field(grid, np.zeros(grid.field_shape)), dp.lam, dp.p)


def test_weighted_quotient_consistent_with_cylinder():
    # u(s) = s^{(a-a_c)/alpha} phi(log(s)/alpha) carries the quotient over with
    # the exact factor alpha^{1-2/p}
    dp = from_lambda_p(3, 0.8, 3.4)
    grid, u = _profile_field(dp, ns=4000)
    qw = weighted_quotient(u, dp).quotient
    qc = radial_constant(dp)
    assert qw == pytest.approx(sob_alpha_factor(dp) * qc, rel=1e-8)


def test_weighted_quotient_dilation_drift_vanishes():
    # the continuum quotient is dilation invariant; compare u(s) and u(c s)
    dp = from_lambda_p(3, 0.9, 3.2)
    prof = normalized_radial(dp)
    vals = []
    for c in (1.0, 1.7):
        grid = RadialGrid(dp.n, dp.alpha, dp.d, 1e-4, 1e4, 6000, None)
        u = Field(grid, eval_radial(prof, c * grid.s)[:, None])
        vals.append(weighted_quotient(u, dp).quotient)
    assert vals[1] == pytest.approx(vals[0], rel=1e-6)


def test_weighted_quotient_scalar_invariance():
    dp = from_lambda_p(3, 0.6, 3.8)
    grid, u = _profile_field(dp, ns=2000)
    q = weighted_quotient(u, dp).quotient
    q2 = weighted_quotient(Field(grid, 3.7 * u.values), dp).quotient
    assert q2 == pytest.approx(q, rel=1e-12)


def test_pressure_functional_matches_weighted_numerator():
    # (n-2)^2/4 * J(u^p) equals int |D u|^2 dmu pointwise-exactly
    rng = np.random.default_rng(0)
    for k in range(12):
        dp = from_lambda_p(3, rng.uniform(0.3, 1.5), rng.uniform(3.1, 4.5))
        grid = RadialGrid(dp.n, dp.alpha, dp.d, 1e-3, 60.0, 2000, None)
        bump = np.zeros(grid.ns)
        for c, x0, w0 in zip(rng.uniform(0.05, 0.3, 3), rng.uniform(-1.0, 1.5, 3),
                             rng.uniform(0.4, 1.0, 3)):
            bump += c * np.exp(-((grid.x - x0) / w0) ** 2)
        u = Field(grid, ((1.0 + bump) * (1.0 + grid.s ** 2) ** (-(dp.n - 2.0) / 2.0))[:, None])
        J = pressure_functional(Field(grid, u.values ** dp.p), dp)
        num = float(np.sum(grid.weights * grad_weighted_sq(u, dp.alpha).values))
        assert 0.25 * (dp.n - 2.0) ** 2 * J == pytest.approx(num, rel=1e-8)


def test_pressure_functional_on_el_profile_recovers_quotient():
    dp = from_lambda_p(3, 0.8, 3.4)
    grid, u = _profile_field(dp, ns=4000)
    v = Field(grid, u.values ** dp.p)
    J = pressure_functional(v, dp)
    mass_term = grid.integrate_values(v.values) ** (2.0 / dp.p)
    lhs = 0.25 * (dp.n - 2.0) ** 2 * J / mass_term
    assert lhs == pytest.approx(weighted_quotient(u, dp).quotient, rel=1e-8)


def test_pressure_of_pure_power():
    # v = c s^{-n} has pressure c^{-1/n} s and |D pressure|^2 = alpha^2 c^{-2/n}
    dp = from_lambda_p(3, 0.5, 4.0)
    grid = RadialGrid(dp.n, dp.alpha, dp.d, 0.5, 2.0, 500, None)
    c = 2.3
    v = c * grid.s ** (-dp.n)
    pres = v ** (-1.0 / dp.n)
    assert pres == pytest.approx(c ** (-1.0 / dp.n) * grid.s, rel=1e-14)
    dp2 = grad_weighted_sq(Field(grid, pres[:, None]), dp.alpha).values
    inner = dp2[grid.interior_mask(3)]
    expected = dp.alpha ** 2 * c ** (-2.0 / dp.n)
    assert inner == pytest.approx(np.full_like(inner, expected), rel=1e-8)


def test_el_residual_cylinder_on_soliton():
    dp = from_lambda_p(3, 2.0 / 3.0, 4.0)
    _, phi = _soliton_field(dp, nz=8000)
    assert el_residual_cylinder(phi, dp.lam, dp.p) < 1e-8


def test_el_residual_cylinder_constant_field_algebra():
    # constants are not admissible profiles, but the residual reduces to
    # |Lambda c - c^{p-1}|, zero iff c = Lambda^{1/(p-2)}
    dp = from_lambda_p(3, 0.5, 4.0)
    grid = CylinderGrid(3, 5.0, 200, None)
    c = dp.lam ** (1.0 / (dp.p - 2.0))
    assert el_residual_cylinder(grid.constant_field(c), dp.lam, dp.p) < 1e-11
    assert el_residual_cylinder(grid.constant_field(2.0 * c), dp.lam, dp.p) > 1e-2


def test_el_residual_random_positive_field():
    dp = from_lambda_p(3, 0.5, 4.0)
    grid = CylinderGrid(3, 5.0, 300, None)
    rng = np.random.default_rng(4)
    f = Field(grid, np.exp(-grid.z ** 2)[:, None] * (1 + 0.1) + 0.01)
    assert el_residual_cylinder(f, dp.lam, dp.p) > 1e-4


def test_el_residual_weighted_on_normalized_profile():
    dp = from_lambda_p(3, 0.8, 3.4)
    _, u = _profile_field(dp, ns=6000, s_min=1e-4, s_max=1e4)
    assert el_residual_weighted(u, dp) < 1e-8


def test_el_residual_weighted_matches_cylinder_through_transform():
    # the Emden-Fowler + dilation chain preserves Euler-Lagrange residuals up
    # to the alpha^2 s^{-2}-weighted bookkeeping; check both vanish on the
    # matched pair (soliton, normalized profile)
    dp = from_lambda_p(3, 0.9, 3.5)
    _, phi = _soliton_field(dp, nz=8000)
    _, u = _profile_field(dp, ns=8000)
    assert el_residual_cylinder(phi, dp.lam, dp.p) < 1e-7
    assert el_residual_weighted(u, dp) < 1e-7
