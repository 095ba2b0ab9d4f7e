import math

import numpy as np
import pytest

from cknflow import (CylinderGrid, DomainError, Field, RadialGrid, SphereGrid,
                     covariant_hessian, d_z, d_zz, grad_sphere_sq, integrate,
                     laplace_sphere, load_field, op_L, save_field, sphere_volume)
from cknflow.kernels import _d1_numpy, _d2_numpy, d1_axis0, d2_axis0


# ---------------- stencils ----------------

def test_stencils_exact_on_low_degree():
    z = np.linspace(-1, 1, 41)
    h = z[1] - z[0]
    assert d1_axis0(np.ones_like(z), h) == pytest.approx(np.zeros_like(z), abs=1e-13)
    assert d2_axis0(z ** 2, h) == pytest.approx(2 * np.ones_like(z), abs=1e-10)
    # one-sided rows are 4th order too: exact on cubics
    assert d1_axis0(z ** 3, h) == pytest.approx(3 * z ** 2, abs=1e-10)
    assert d2_axis0(z ** 3, h) == pytest.approx(6 * z, abs=1e-9)


def test_stencil_convergence_order():
    errs1, errs2 = [], []
    for nz in (100, 200, 400):
        z = np.linspace(-1, 1, nz)
        h = z[1] - z[0]
        f = np.sin(3.0 * z)
        errs1.append(np.abs(d1_axis0(f, h) - 3.0 * np.cos(3.0 * z)).max())
        errs2.append(np.abs(d2_axis0(f, h) + 9.0 * np.sin(3.0 * z)).max())
    order1 = math.log2(errs1[0] / errs1[1])
    order2 = math.log2(errs2[1] / errs2[2])
    assert order1 >= 3.5
    assert order2 >= 3.5


def test_numpy_and_numba_paths_agree():
    rng = np.random.default_rng(1)
    f = rng.normal(size=(64, 5))
    h = 0.01
    assert d1_axis0(f, h) == pytest.approx(_d1_numpy(f, h), rel=1e-13, abs=1e-13)
    assert d2_axis0(f, h) == pytest.approx(_d2_numpy(f, h), rel=1e-13, abs=1e-10)


def test_stencil_rejects_tiny_grid():
    with pytest.raises(DomainError):
        d1_axis0(np.ones(5), 0.1)


# ---------------- sphere quadrature and calculus ----------------

def test_sphere_quadrature_total_weight():
    s2 = SphereGrid(3, nmu=16, nphi=32)
    assert s2.volume() == pytest.approx(4.0 * math.pi, rel=1e-14)
    s1 = SphereGrid(2, ntheta=32)
    assert s1.volume() == pytest.approx(2.0 * math.pi, rel=1e-14)


def test_sphere_quadrature_exact_on_harmonic_products():
    s2 = SphereGrid(3, nmu=12, nphi=24)
    rng = np.random.default_rng(5)
    for _ in range(30):
        l1 = int(rng.integers(0, s2.design_degree + 1))
        l2 = int(rng.integers(0, s2.design_degree + 1))
        m1 = int(rng.integers(0, min(l1, s2.mmax) + 1)) if l1 else 0
        m2 = int(rng.integers(0, min(l2, s2.mmax) + 1)) if l2 else 0
        y1 = s2.harmonic(l1, m1)
        y2 = s2.harmonic(l2, m2)
        got = s2.integrate(y1 * y2)
        # orthogonality: nonzero only for matching degree and order
        if (l1, m1) == (l2, m2):
            expected = 2.0 * math.pi if m1 == 0 else math.pi
            assert got == pytest.approx(expected, rel=1e-12)
        else:
            assert abs(got) < 1e-12


def test_sphere_integrate_first_harmonic_vanishes():
    s2 = SphereGrid(3, nmu=10, nphi=16)
    mu_grid = np.broadcast_to(s2.mu[:, None], s2.shape)
    assert abs(s2.integrate(mu_grid)) < 1e-14


def test_laplacian_eigenvalues_two_sphere():
    s2 = SphereGrid(3, nmu=16, nphi=32)
    for l in range(0, 5):
        for m in (0, min(l, 2)):
            y = s2.harmonic(l, m, phase=0.3)
            lap = s2.laplacian(y)
            assert lap == pytest.approx(-l * (l + 1.0) * y, abs=1e-10 * max(1.0, np.abs(y).max()))


def test_laplacian_eigenvalues_circle():
    s1 = SphereGrid(2, ntheta=32)
    for l in range(0, 5):
        y = np.cos(l * s1.theta + 0.2)
        assert s1.laplacian(y) == pytest.approx(-l * l * y, abs=1e-11)


def test_grad_sq_first_harmonic():
    s2 = SphereGrid(3, nmu=16, nphi=32)
    th = np.broadcast_to(s2.theta[:, None], s2.shape)
    got = s2.grad_sq(np.cos(th))
    assert got == pytest.approx(np.sin(th) ** 2, abs=1e-10)


def test_covariant_hessian_first_harmonic():
    # Hess(cos) = -cos * g with g = diag(1, sin^2)
    s2 = SphereGrid(3, nmu=16, nphi=32)
    th = np.broadcast_to(s2.theta[:, None], s2.shape)
    f = np.cos(th)
    H_tt, H_tp, H_pp = s2.covariant_hessian(f)
    assert H_tt == pytest.approx(-f, abs=1e-10)
    assert np.abs(H_tp).max() < 1e-10
    assert H_pp == pytest.approx(-f * np.sin(th) ** 2, abs=1e-10)
    # trace recovers the Laplacian
    rng = np.random.default_rng(2)
    g = s2.random_band_limited(6, rng)
    H = s2.covariant_hessian(g)
    trace = H[0] + H[2] / np.sin(th) ** 2
    assert trace == pytest.approx(s2.laplacian(g), abs=1e-9)
    # constants have vanishing Hessian
    H = s2.covariant_hessian(np.ones(s2.shape))
    assert max(np.abs(h).max() for h in H) < 1e-12


# ---------------- product grids ----------------

def test_cylinder_total_weight():
    for d, sphere in [(2, SphereGrid(2, ntheta=24)), (3, SphereGrid(3, nmu=10, nphi=20)),
                      (5, None)]:
        grid = CylinderGrid(d, 12.0, 150, sphere)
        total = grid.weights.sum()
        assert total == pytest.approx(2.0 * 12.0 * sphere_volume(d), rel=1e-12)


def test_dz_operators_on_cylinder():
    grid = CylinderGrid(3, 5.0, 200, None)
    f = Field(grid, np.broadcast_to(grid.z[:, None] ** 2, grid.field_shape).copy())
    assert d_zz(f).values == pytest.approx(2 * np.ones(grid.field_shape), abs=1e-9)
    const = grid.constant_field(3.0)
    assert np.abs(d_z(const).values).max() < 1e-12


def test_radial_weights_integrate_power():
    # int_1^2 s^{1-n} s^{n-1} ds = 1 for any n
    grid = RadialGrid(4.3, 0.8, 3, 1.0, 2.0, 2000, None)
    f = Field(grid, (grid.s ** (1.0 - grid.n))[:, None] / sphere_volume(3))
    assert integrate(f) == pytest.approx(1.0, abs=1e-10)


def test_op_L_on_quadratic():
    sphere = SphereGrid(3, nmu=8, nphi=8)
    grid = RadialGrid(4.0, 0.7, 3, 0.1, 10.0, 400, sphere)
    u = Field(grid, np.broadcast_to((grid.s ** 2)[:, None], grid.field_shape).copy())
    got = op_L(u).values
    expected = 2.0 * grid.n * grid.alpha ** 2
    inner = got[grid.interior_mask(3)]
    assert inner == pytest.approx(np.full_like(inner, expected), rel=1e-8)
    const = grid.constant_field(2.0)
    assert np.abs(op_L(const).values[grid.interior_mask(3)]).max() < 1e-10


def test_op_L_self_adjoint_on_compact_fields():
    grid = RadialGrid(3.7, 0.9, 3, 0.05, 20.0, 1500, None)
    x = grid.x
    u = Field(grid, np.exp(-((x - 0.3) / 0.5) ** 2)[:, None])
    w = Field(grid, np.exp(-((x + 0.4) / 0.6) ** 2)[:, None])
    lhs = integrate(Field(grid, op_L(u).values * w.values))
    rhs = integrate(Field(grid, op_L(w).values * u.values))
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_laplace_sphere_self_adjoint_band_limited():
    sphere = SphereGrid(3, nmu=14, nphi=28)
    grid = RadialGrid(4.0, 1.0, 3, 0.5, 2.0, 50, sphere)
    rng = np.random.default_rng(8)
    fv = np.outer(np.exp(-grid.x ** 2), sphere.random_band_limited(5, rng).ravel())
    gv = np.outer(np.cos(grid.x), sphere.random_band_limited(5, rng).ravel())
    f, g = Field(grid, fv), Field(grid, gv)
    lhs = integrate(Field(grid, laplace_sphere(f).values * g.values))
    rhs = integrate(Field(grid, laplace_sphere(g).values * f.values))
    assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-11)


def test_grad_sphere_sq_on_product_grid():
    sphere = SphereGrid(3, nmu=12, nphi=24)
    grid = CylinderGrid(3, 4.0, 60, sphere)
    th = np.broadcast_to(sphere.theta[:, None], sphere.shape).ravel()
    f = Field(grid, np.outer(np.ones(grid.nz), np.cos(th)))
    got = grad_sphere_sq(f).values
    assert got == pytest.approx(np.outer(np.ones(grid.nz), np.sin(th) ** 2), abs=1e-10)


def test_covariant_hessian_needs_two_sphere():
    grid = CylinderGrid(2, 4.0, 60, SphereGrid(2, ntheta=16))
    f = grid.constant_field(1.0)
    with pytest.raises(DomainError):
        covariant_hessian(f)


# ---------------- snapshots ----------------

def test_snapshot_round_trip_cylinder(tmp_path):
    sphere = SphereGrid(3, nmu=6, nphi=8)
    grid = CylinderGrid(3, 7.5, 40, sphere)
    rng = np.random.default_rng(11)
    fld = Field(grid, rng.uniform(0.5, 2.0, grid.field_shape))
    path = tmp_path / "snap.txt"
    save_field(path, fld)
    back = load_field(path)
    assert back.grid.describe() == grid.describe()
    assert back.values == pytest.approx(fld.values, rel=1e-16)
    first = path.read_text().splitlines()[0]
    assert first.startswith("# d=3 Nz=40 Z=7.5 sphere=")


def test_snapshot_round_trip_radial(tmp_path):
    grid = RadialGrid(4.2, 0.6, 3, 1e-3, 50.0, 64, None)
    fld = Field(grid, np.linspace(1.0, 2.0, 64)[:, None])
    path = tmp_path / "snap_radial.txt"
    save_field(path, fld)
    back = load_field(path)
    assert back.grid.describe() == grid.describe()
    assert back.values == pytest.approx(fld.values, rel=1e-16)
