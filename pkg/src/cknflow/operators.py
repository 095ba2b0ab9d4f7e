"""Differential operators on grid fields.

All line derivatives are the 4th-order stencils from kernels; sphere calculus
is spectral.  Radial-grid derivatives are taken in log(s):

    u_s  = u_x / s,   u_ss = (u_xx - u_x) / s^2,
    L u  = alpha^2 (u_ss + (n-1) u_s / s) + Delta_omega u / s^2
         = e^{-2x} [ alpha^2 (u_xx + (n-2) u_x) + Delta_omega u ].
"""

import numpy as np

from . import kernels
from .errors import DomainError
from .grids import CylinderGrid, Field, RadialGrid


def _line_step(grid):
    if isinstance(grid, CylinderGrid):
        return grid.hz
    if isinstance(grid, RadialGrid):
        return grid.hx
    raise DomainError("expected a cylinder or radial grid")


def d_z(f: Field) -> Field:
    """First derivative along the line coordinate (z, or x = log s)."""
    return Field(f.grid, kernels.d1_axis0(f.values, _line_step(f.grid)), positive=False)


def d_zz(f: Field) -> Field:
    """Second derivative along the line coordinate."""
    return Field(f.grid, kernels.d2_axis0(f.values, _line_step(f.grid)), positive=False)


def _sphere_apply(grid, values, method, *args):
    if grid.sphere is None:
        return np.zeros_like(values)
    shaped = grid.to_sphere_shape(values)
    out = getattr(grid.sphere, method)(shaped, *args)
    return grid.from_sphere_shape(out)


def laplace_sphere(f: Field) -> Field:
    """Laplace-Beltrami operator applied on every line slice."""
    return Field(f.grid, _sphere_apply(f.grid, f.values, "laplacian"), positive=False)


def grad_sphere_sq(f: Field) -> Field:
    """|grad_omega f|^2 on every line slice."""
    return Field(f.grid, _sphere_apply(f.grid, f.values, "grad_sq"), positive=False)


def covariant_hessian(f: Field):
    """Covariant Hessian components of a two-sphere field.

    Accepts a bare two-sphere array wrapped in a SphereGrid via identities,
    or a product-grid Field; returns (H_tt, H_tp, H_pp) arrays in sphere shape.
    """
    grid = f.grid
    if getattr(grid, "sphere", None) is None or grid.sphere.d != 3:
        raise DomainError("covariant Hessian needs a two-sphere factor (d = 3)")
    shaped = grid.to_sphere_shape(f.values)
    return grid.sphere.covariant_hessian(shaped)


def radial_s_derivatives(f: Field):
    """(u_s, u_ss) on a radial grid, from log-coordinate stencils."""
    grid = f.grid
    if not isinstance(grid, RadialGrid):
        raise DomainError("s-derivatives are defined on radial grids")
    h = grid.hx
    ux = kernels.d1_axis0(f.values, h)
    uxx = kernels.d2_axis0(f.values, h)
    s = grid.s[:, None]
    return ux / s, (uxx - ux) / (s * s)


def op_L(u: Field, alpha=None, n=None) -> Field:
    """Weighted Laplacian L u = alpha^2 (u_ss + (n-1) u_s/s) + Delta_omega u / s^2.

    This is the generator of the quadratic form int |D u|^2 dmu, i.e.
    -L = D* . D for the measure dmu = s^{n-1} ds domega.
    """
    grid = u.grid
    if not isinstance(grid, RadialGrid):
        raise DomainError("op_L is defined on radial grids")
    alpha = grid.alpha if alpha is None else alpha
    n = grid.n if n is None else n
    h = grid.hx
    ux = kernels.d1_axis0(u.values, h)
    uxx = kernels.d2_axis0(u.values, h)
    e2 = np.exp(-2.0 * grid.x)[:, None]
    out = alpha * alpha * e2 * (uxx + (n - 2.0) * ux)
    if grid.sphere is not None:
        out = out + e2 * _sphere_apply(grid, u.values, "laplacian")
    return Field(grid, out, positive=False)


def grad_weighted_sq(u: Field, alpha=None) -> Field:
    """|D u|^2 = alpha^2 u_s^2 + |grad_omega u|^2 / s^2 on a radial grid."""
    grid = u.grid
    if not isinstance(grid, RadialGrid):
        raise DomainError("weighted gradient is defined on radial grids")
    alpha = grid.alpha if alpha is None else alpha
    us, _ = radial_s_derivatives(u)
    out = alpha * alpha * us * us
    if grid.sphere is not None:
        out = out + _sphere_apply(grid, u.values, "grad_sq") / (grid.s[:, None] ** 2)
    return Field(grid, out, positive=False)


def grad_weighted_dot(u: Field, w: Field, alpha=None):
    """D u . D w (values array) on a radial grid."""
    grid = u.grid
    alpha = grid.alpha if alpha is None else alpha
    us, _ = radial_s_derivatives(u)
    ws, _ = radial_s_derivatives(w)
    out = alpha * alpha * us * ws
    if grid.sphere is not None:
        sph = grid.sphere
        a = grid.to_sphere_shape(u.values)
        b = grid.to_sphere_shape(w.values)
        out = out + grid.from_sphere_shape(sph.grad_dot(a, b)) / (grid.s[:, None] ** 2)
    return out


def cylinder_operator(phi: Field, lam) -> Field:
    """L_cyl phi = -phi_zz - Delta_omega phi + Lambda phi on the cylinder."""
    grid = phi.grid
    if not isinstance(grid, CylinderGrid):
        raise DomainError("cylinder operator needs a cylinder grid")
    out = -kernels.d2_axis0(phi.values, grid.hz) - _sphere_apply(grid, phi.values, "laplacian") \
        + lam * phi.values
    return Field(grid, out, positive=False)


def integrate(f: Field) -> float:
    """Quadrature sum with the grid's weights."""
    return f.grid.integrate_values(f.values)
