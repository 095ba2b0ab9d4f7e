"""Quotients, the pressure functional, and Euler-Lagrange residuals."""

from dataclasses import dataclass

import numpy as np

from . import kernels, operators
from .errors import DomainError
from .grids import CylinderGrid, Field, RadialGrid
from .params import DerivedParams


@dataclass(frozen=True)
class QuotientReport:
    numerator: float
    denominator: float
    quotient: float
    l2sq: float
    lpsq: float

    def to_dict(self):
        return {"numerator": self.numerator, "denominator": self.denominator,
                "quotient": self.quotient, "l2sq": self.l2sq, "lpsq": self.lpsq}


def _check_nonzero(f):
    if not np.any(f.values != 0.0):
        raise DomainError("quotients are undefined on the zero field")
    if np.any(f.values < 0.0):
        raise DomainError("quotients expect a non-negative field")


def lp_norm_sq(f: Field, p) -> float:
    """||f||_p^2 with the grid quadrature; non-integer p via positive powers."""
    total = f.grid.integrate_values(np.abs(f.values) ** p)
    return total ** (2.0 / p)


def cylinder_quotient(phi: Field, lam, p) -> QuotientReport:
    """(||phi_z||^2 + ||grad_omega phi||^2 + Lambda ||phi||^2) / ||phi||_p^2."""
    if not isinstance(phi.grid, CylinderGrid):
        raise DomainError("cylinder quotient needs a cylinder grid")
    _check_nonzero(phi)
    w = phi.grid.weights
    lphi = operators.cylinder_operator(phi, lam)
    num = float(np.sum(w * phi.values * lphi.values))
    l2 = float(np.sum(w * phi.values ** 2))
    den = lp_norm_sq(phi, p)
    return QuotientReport(numerator=num, denominator=den, quotient=num / den,
                          l2sq=l2, lpsq=den)


def weighted_quotient(u: Field, dp: DerivedParams) -> QuotientReport:
    """int |D u|^2 dmu / (int u^p dmu)^{2/p} on the weighted half line.

    The bookkeeping factor alpha^{1-2/p} linking this quotient to the cylinder
    constant is reported separately by sob_alpha_factor.
    """
    grid = u.grid
    if not isinstance(grid, RadialGrid):
        raise DomainError("weighted quotient needs a radial grid")
    _check_nonzero(u)
    tail = np.abs(u.values[-1]).max()
    peak = np.abs(u.values).max()
    if tail > 1e-4 * peak:
        raise DomainError("field does not decay at the outer boundary; the weighted "
                          "integrals would be dominated by the truncation")
    num = float(np.sum(grid.weights * operators.grad_weighted_sq(u, dp.alpha).values))
    l2 = float(np.sum(grid.weights * u.values ** 2))
    den = lp_norm_sq(u, dp.p)
    return QuotientReport(numerator=num, denominator=den, quotient=num / den,
                          l2sq=l2, lpsq=den)


def sob_alpha_factor(dp: DerivedParams) -> float:
    """alpha^{1-2/p}, the constant multiplying the best constant in the weighted form."""
    return dp.alpha ** (1.0 - 2.0 / dp.p)


def pressure_functional(v: Field, dp: DerivedParams) -> float:
    """J = int v |D pressure|^2 dmu with pressure = v^{-1/n}."""
    grid = v.grid
    if not isinstance(grid, RadialGrid):
        raise DomainError("pressure functional needs a radial grid")
    if not np.all(v.values > 0.0):
        raise DomainError("pressure variable needs strictly positive v")
    pres = Field(grid, v.values ** (-1.0 / dp.n))
    dp2 = operators.grad_weighted_sq(pres, dp.alpha)
    return float(np.sum(grid.weights * v.values * dp2.values))


def el_residual_cylinder(phi: Field, lam, p, layers=3) -> float:
    """Interior sup of |-phi_zz - Delta_omega phi + Lambda phi - phi^{p-1}|."""
    if not np.all(phi.values > 0.0):
        raise DomainError("residual expects a positive field")
    lphi = operators.cylinder_operator(phi, lam)
    res = lphi.values - phi.values ** (p - 1.0)
    return float(np.abs(res[phi.grid.interior_mask(layers)]).max())


def el_residual_weighted(u: Field, dp: DerivedParams, layers=3) -> float:
    """Interior sup of |L u + u^{p-1}| (sign convention -L u = u^{p-1})."""
    if not np.all(u.values > 0.0):
        raise DomainError("residual expects a positive field")
    lu = operators.op_L(u, dp.alpha, dp.n)
    res = lu.values + u.values ** (dp.p - 1.0)
    return float(np.abs(res[u.grid.interior_mask(layers)]).max())
