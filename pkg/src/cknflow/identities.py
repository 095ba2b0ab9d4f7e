"""Numerical verification of the pointwise and integral identities.

Four checks:

  * lemma_first_residual: the pointwise decomposition of the dissipation
    integrand on the half line x two-sphere (radial variable read as s
    throughout; the identity closes numerically with that reading);
  * lemma_second_check: the integral rewriting of the sphere bracket as three
    signed terms, all non-negative when alpha <= alpha_fs;
  * bochner_residual: the Bochner-Lichnerowicz-Weitzenboeck formula on the
    two-sphere, 0.5 Lap|grad f|^2 = |Hess f|^2 + grad f . grad Lap f
    + (d-2) |grad f|^2 (the gradient cross term is part of the formula; the
    l = 1 closed form only balances with it present);
  * sobolev_hessian_decomposition: equality of the two flat-space dissipation
    integrals, with the trace-free Hessian square vanishing exactly on
    quadratic-plus-affine pressures.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError
from .grids import BoxGrid, Field, RadialGrid
from .operators import op_L, radial_s_derivatives
from .sphere import SphereGrid


@dataclass
class IdentityReport:
    lhs: float
    rhs: float
    residual: float
    term_breakdown: list

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "residual": self.residual,
                "term_breakdown": [{"name": k, "value": v} for k, v in self.term_breakdown]}


# ---------------- lemma one: pointwise split on the product grid ----------------


def _sphere_batch(grid, values, method):
    shaped = grid.to_sphere_shape(values)
    return grid.from_sphere_shape(getattr(grid.sphere, method)(shaped))


def _sphere_grad_components(grid, values):
    sph = grid.sphere
    shaped = grid.to_sphere_shape(values)
    _, f_th, f_ph, *_ = sph.derivs(shaped)
    return grid.from_sphere_shape(f_th), grid.from_sphere_shape(f_ph)


def _sphere_metric_sq(grid, x_th, x_ph):
    sin2 = np.broadcast_to(grid.sphere.sin_theta[:, None] ** 2, grid.sphere.shape).ravel()
    return x_th ** 2 + x_ph ** 2 / sin2[None, :]


def lemma_first_residual(pres: Field, dp=None, s_window=(0.5, 2.0), n=None, alpha=None) -> IdentityReport:
    """Pointwise identity for the dissipation integrand; sup over sample points.

    lhs = 0.5 L|Dp|^2 - Dp . D(Lp) - (Lp)^2 / n
    rhs = alpha^4 (n-1)/n [p_ss - p_s/s - Lap_w p/(alpha^2 (n-1) s^2)]^2
        + (2 alpha^2/s^2) |grad_w p_s - grad_w p / s|^2
        + s^{-4} [sphere bracket].
    """
    grid = pres.grid
    if not isinstance(grid, RadialGrid) or grid.sphere is None or grid.sphere.d != 3:
        raise DomainError("the pointwise identity runs on a radial x two-sphere grid")
    n = (dp.n if dp is not None else grid.n) if n is None else n
    alpha = (dp.alpha if dp is not None else grid.alpha) if alpha is None else alpha
    if not np.all(pres.values > 0):
        raise DomainError("pressure must be positive")
    s = grid.s[:, None]
    p = pres.values

    p_s, p_ss = radial_s_derivatives(pres)
    lap_w = _sphere_batch(grid, p, "laplacian")
    gsq_w = _sphere_batch(grid, p, "grad_sq")
    p_th, p_ph = _sphere_grad_components(grid, p)

    Lp = op_L(pres, alpha, n).values
    Dp2 = alpha ** 2 * p_s ** 2 + gsq_w / s ** 2
    LDp2 = op_L(Field(grid, Dp2), alpha, n).values

    Lp_s, _ = radial_s_derivatives(Field(grid, Lp))
    Lp_th, Lp_ph = _sphere_grad_components(grid, Lp)
    sin2 = np.broadcast_to(grid.sphere.sin_theta[:, None] ** 2, grid.sphere.shape).ravel()[None, :]
    DpDLp = alpha ** 2 * p_s * Lp_s + (p_th * Lp_th + p_ph * Lp_ph / sin2) / s ** 2

    lhs = 0.5 * LDp2 - DpDLp - Lp ** 2 / n

    t_radial = alpha ** 4 * (n - 1.0) / n * (p_ss - p_s / s - lap_w / (alpha ** 2 * (n - 1.0) * s ** 2)) ** 2
    ps_th, ps_ph = _sphere_grad_components(grid, p_s)
    mixed = (ps_th - p_th / s) ** 2 + (ps_ph - p_ph / s) ** 2 / sin2
    t_mixed = 2.0 * alpha ** 2 / s ** 2 * mixed

    lap_gsq = _sphere_batch(grid, gsq_w, "laplacian")
    lapp_th, lapp_ph = _sphere_grad_components(grid, lap_w)
    grad_dot = p_th * lapp_th + p_ph * lapp_ph / sin2
    bracket = 0.5 * lap_gsq - grad_dot - lap_w ** 2 / (n - 1.0) - (n - 2.0) * alpha ** 2 * gsq_w
    t_sphere = bracket / s ** 4

    rhs = t_radial + t_mixed + t_sphere
    mask = (grid.s >= s_window[0]) & (grid.s <= s_window[1])
    mask[:3] = False
    mask[-3:] = False
    if not np.any(mask):
        raise DomainError("sample window contains no interior grid points")
    res = np.abs(lhs - rhs)[mask]
    return IdentityReport(
        lhs=float(np.abs(lhs[mask]).max()),
        rhs=float(np.abs(rhs[mask]).max()),
        residual=float(res.max()),
        term_breakdown=[("radial_square", float(np.abs(t_radial[mask]).max())),
                        ("mixed_gradient_square", float(np.abs(t_mixed[mask]).max())),
                        ("sphere_bracket", float(np.abs(t_sphere[mask]).max()))],
    )


# ---------------- lemma two: integral split on the sphere ----------------


def lemma_second_check(pres: Field, n, alpha) -> IdentityReport:
    """Sphere-integral identity with the three-term right side.

    Works on the two-sphere (pres is a positive sphere field, n > 3).  For
    alpha <= alpha_fs = sqrt((d-1)/(n-1)) every breakdown term is >= 0.
    """
    sph = pres.grid
    if not isinstance(sph, SphereGrid) or sph.d != 3:
        raise DomainError("the integral identity is verified on the two-sphere (d = 3)")
    if not n > 3:
        raise DomainError("the identity needs n > d = 3")
    if not np.all(pres.values > 0):
        raise DomainError("pressure must be positive")
    d = 3
    p = pres.values
    w = p ** (1.0 - n)

    _, p_th, p_ph, *_ = sph.derivs(p)
    sin = sph.sin_theta[:, None]
    gsq = p_th ** 2 + (p_ph / sin) ** 2
    lap = sph.laplacian(p)
    _, l_th, l_ph, *_ = sph.derivs(lap)
    grad_dot = p_th * l_th + p_ph * l_ph / sin ** 2

    afs2 = (d - 1.0) / (n - 1.0)
    lhs_integrand = 0.5 * sph.laplacian(gsq) - grad_dot - lap ** 2 / (n - 1.0) \
        - (n - 2.0) * alpha ** 2 * gsq
    lhs = sph.integrate(lhs_integrand * w)

    H_tt, H_tp, H_pp = sph.covariant_hessian(p)
    L_tt = H_tt - lap / (d - 1.0)
    L_tp = H_tp
    L_pp = H_pp - lap * sin ** 2 / (d - 1.0)
    M_tt = p_th * p_th / p - gsq / ((d - 1.0) * p)
    M_tp = p_th * p_ph / p
    M_pp = p_ph * p_ph / p - gsq * sin ** 2 / ((d - 1.0) * p)
    c2 = 3.0 * (n - 1.0) * (n - d) / (2.0 * (n - 2.0) * (d + 1.0))
    nrm2 = sph.tensor_norm_sq(L_tt - c2 * M_tt, L_tp - c2 * M_tp, L_pp - c2 * M_pp)

    c1 = (n - 2.0) * (d - 1.0) / ((n - 1.0) * (d - 2.0))
    c3 = (n - d) / (2.0 * (d + 1.0)) * ((n + 3.0) / 2.0
                                        + 3.0 * (n - 1.0) * (n + 1.0) * (d - 2.0) / (2.0 * (n - 2.0) * (d + 1.0)))
    c4 = (n - 2.0) * (afs2 - alpha ** 2)
    T1 = c1 * sph.integrate(nrm2 * w)
    T2 = c3 * sph.integrate(gsq ** 2 / p ** 2 * w)
    T3 = c4 * sph.integrate(gsq * w)
    rhs = T1 + T2 + T3
    return IdentityReport(lhs=lhs, rhs=rhs, residual=abs(lhs - rhs),
                          term_breakdown=[("trace_free_hessian_sq", T1),
                                          ("gradient_quartic", T2),
                                          ("alpha_margin", T3)])


# ---------------- Bochner formula on the two-sphere ----------------


def bochner_residual(f: Field, d=3) -> IdentityReport:
    """Pointwise Bochner formula residual, sup over the grid."""
    sph = f.grid
    if d != 3 or not isinstance(sph, SphereGrid) or sph.d != 3:
        raise DomainError("the Bochner check runs on the two-sphere (d = 3)")
    vals = f.values
    _, f_th, f_ph, *_ = sph.derivs(vals)
    sin = sph.sin_theta[:, None]
    gsq = f_th ** 2 + (f_ph / sin) ** 2
    lap = sph.laplacian(vals)
    _, l_th, l_ph, *_ = sph.derivs(lap)
    grad_dot = f_th * l_th + f_ph * l_ph / sin ** 2
    H = sph.covariant_hessian(vals)
    hess_sq = sph.tensor_norm_sq(*H)
    ricci = (d - 2.0) * gsq
    lhs = 0.5 * sph.laplacian(gsq)
    rhs = hess_sq + grad_dot + ricci
    res = np.abs(lhs - rhs)
    return IdentityReport(lhs=float(np.abs(lhs).max()), rhs=float(np.abs(rhs).max()),
                          residual=float(res.max()),
                          term_breakdown=[("hessian_sq", float(np.abs(hess_sq).max())),
                                          ("grad_dot_grad_lap", float(np.abs(grad_dot).max())),
                                          ("ricci_term", float(np.abs(ricci).max()))])


# ---------------- flat-space Hessian decomposition ----------------


def box_gradient(box: BoxGrid, vals):
    return [kernels.d_axis(vals, box.h, ax, 1) for ax in range(box.d)]


def box_hessian(box: BoxGrid, vals):
    H = {}
    grads = box_gradient(box, vals)
    for i in range(box.d):
        for j in range(i, box.d):
            if i == j:
                H[i, j] = kernels.d_axis(vals, box.h, i, 2)
            else:
                H[i, j] = kernels.d_axis(grads[i], box.h, j, 1)
    return H


def sobolev_hessian_decomposition(pres: Field, d=None) -> IdentityReport:
    """Equality of the two flat-space dissipation integrals.

    lhs = int [ 0.5 Lap|grad p|^2 - grad p . grad Lap p - (Lap p)^2/d ] p^{1-d}
    rhs = int Tr[Hess p - (Lap p / d) Id]^2 p^{1-d}
    on pressures equal to a quadratic outside a compact region (both
    integrands then vanish identically outside it).
    """
    box = pres.grid
    if not isinstance(box, BoxGrid):
        raise DomainError("the flat decomposition check runs on a box grid")
    d = box.d if d is None else d
    if d != box.d:
        raise DomainError("dimension argument disagrees with the grid")
    p = pres.values
    if not np.all(p > 0):
        raise DomainError("pressure must be positive")
    w = p ** (1.0 - d)

    grads = box_gradient(box, p)
    gsq = sum(g ** 2 for g in grads)
    H = box_hessian(box, p)
    lap = sum(H[i, i] for i in range(d))
    lap_grads = box_gradient(box, lap)
    grad_dot = sum(g * lg for g, lg in zip(grads, lap_grads))
    lap_gsq = sum(kernels.d_axis(gsq, box.h, ax, 2) for ax in range(d))

    lhs_integrand = 0.5 * lap_gsq - grad_dot - lap ** 2 / d
    tf_sq = np.zeros_like(p)
    for i in range(d):
        for j in range(i, d):
            t = H[i, j] - (lap / d if i == j else 0.0)
            tf_sq = tf_sq + (1.0 if i == j else 2.0) * t ** 2

    lhs = box.integrate_values(lhs_integrand * w)
    rhs = box.integrate_values(tf_sq * w)
    return IdentityReport(lhs=lhs, rhs=rhs, residual=abs(lhs - rhs),
                          term_breakdown=[("trace_free_hessian_sq_integral", rhs),
                                          ("trace_free_sup", float(np.abs(tf_sq).max()))])


# ---------------- random test fields for the verification suites ----------------


def random_product_pressure(grid: RadialGrid, rng, degree=6):
    """Positive smooth pressure on the product grid: offset + radial + harmonics."""
    s = grid.s[:, None]
    base = 2.0 + 0.5 * rng.uniform(0.2, 1.0) * s ** 2
    vals = np.broadcast_to(base, grid.field_shape).copy()
    for _ in range(3):
        y = grid.sphere.random_band_limited(degree, rng, terms=4, amplitude=1.0).ravel()
        s0 = rng.uniform(0.6, 1.8)
        w0 = rng.uniform(0.4, 1.0)
        radial = np.exp(-((grid.s - s0) / w0) ** 2)
        vals += 0.15 * rng.uniform(0.3, 1.0) * radial[:, None] * y[None, :]
    return Field(grid, vals)


def random_sphere_pressure(sph: SphereGrid, rng, degree=6, offset=1.5, amplitude=0.3):
    f = sph.random_band_limited(degree, rng, terms=6, amplitude=amplitude)
    return Field(sph, offset + f)


def random_box_pressure(box: BoxGrid, rng, cubic=0.1):
    """Quadratic plus affine plus a compactly-supported (Gaussian) cubic bump."""
    xs = box.meshgrid()
    r2 = sum(x ** 2 for x in xs)
    affine = sum(rng.uniform(-0.3, 0.3) * x for x in xs)
    p = 1.0 + 0.5 * r2 + affine + cubic * xs[0] ** 3 * np.exp(-r2)
    return Field(box, p)
