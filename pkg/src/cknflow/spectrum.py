"""Second-variation spectra around the line optimizer and stability thresholds.

The second variation of the cylinder functional at the even optimizer block
diagonalizes over spherical harmonics.  The block at angular mode l is the 1D
operator

    H_l = -d^2/dz^2 + Lambda + l(l+d-2) - (p-1) phi(z)^{p-2}

on the line, discretized with the 4th-order stencil and zero values outside
the truncated interval |z| <= Z (the eigenfunctions decay exponentially).
Mode l = 0 is excluded from stability classification: its negative direction
is removed by the norm constraint, and its zero eigenvalue is the translation
mode with eigenfunction proportional to phi'.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvals_banded, solve_banded

from .errors import DomainError, NumericsError
from .params import two_star
from .profiles import Soliton, eval_soliton

DEFAULT_NZ = 4000


@dataclass(frozen=True)
class ModeOperator:
    lam: float
    p: float
    d: int
    ell: int
    nz: int = DEFAULT_NZ
    z_factor: float = 30.0  # Z = z_factor / sqrt(Lambda)

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError("mode operator needs Lambda > 0")
        if not (2.0 < self.p < two_star(self.d)) and not (self.d >= 3 and self.p == two_star(self.d)):
            raise DomainError(f"need 2 < p < 2*, got p = {self.p} at d = {self.d}")
        if self.ell < 0:
            raise DomainError("angular mode must be >= 0")

    @property
    def z_max(self):
        return self.z_factor / math.sqrt(self.lam)

    @property
    def shift(self):
        return self.ell * (self.ell + self.d - 2)

    def grid(self):
        z = np.linspace(-self.z_max, self.z_max, self.nz + 2)[1:-1]
        return z, z[1] - z[0]

    def potential(self, z):
        phi = eval_soliton(Soliton(lam=self.lam, p=self.p), z)
        return self.lam + self.shift - (self.p - 1.0) * phi ** (self.p - 2.0)


@dataclass
class SpectrumResult:
    ell: int
    lowest_eigenvalue: float
    eigenfunction_z: np.ndarray
    eigenfunction: np.ndarray
    threshold_lambda: float = None

    def to_dict(self, with_eigenfunction=False):
        out = {"ell": self.ell, "lowest_eigenvalue": self.lowest_eigenvalue}
        if self.threshold_lambda is not None:
            out["threshold_lambda"] = self.threshold_lambda
        if with_eigenfunction:
            out["eigenfunction"] = self.eigenfunction.tolist()
        return out


def _banded_matrix(op: ModeOperator):
    z, h = op.grid()
    V = op.potential(z)
    ab = np.zeros((3, op.nz))
    ab[2] = 30.0 / (12.0 * h * h) + V
    ab[1, 1:] = -16.0 / (12.0 * h * h)
    ab[0, 2:] = 1.0 / (12.0 * h * h)
    return ab, z, h


def _eigenvalues(op: ModeOperator, k):
    ab, z, h = _banded_matrix(op)
    try:
        w = eigvals_banded(ab, lower=False, select="i", select_range=(0, k - 1))
    except Exception as exc:  # pragma: no cover - LAPACK failure path
        raise NumericsError(f"banded eigensolver failed: {exc}") from exc
    return w, ab, z, h


def _inverse_iteration(ab, w0, h, seed=0):
    """Eigenvector by shifted inverse iteration on the banded matrix."""
    nz = ab.shape[1]
    band = np.zeros((5, nz))
    band[0] = ab[0]
    band[1] = ab[1]
    band[2] = ab[2] - (w0 - 1e-10 * max(1.0, abs(w0)))
    band[3, :-1] = ab[1, 1:]
    band[4, :-2] = ab[0, 2:]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(nz)
    for _ in range(4):
        x = solve_banded((2, 2), band, x)
        x /= np.linalg.norm(x)
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    return x / math.sqrt(h)  # L2(dz) normalization


def lowest_eigenvalue(op: ModeOperator) -> SpectrumResult:
    """Lowest eigenvalue (and eigenfunction) of the mode operator.

    Raises if the eigenfunction has not decayed at the truncation boundary,
    which signals that Z was too small for this Lambda.
    """
    w, ab, z, h = _eigenvalues(op, 1)
    vec = _inverse_iteration(ab, w[0], h)
    edge = max(abs(vec[0]), abs(vec[-1]))
    if edge > 1e-6 * np.abs(vec).max():
        raise NumericsError("eigenfunction does not decay at the boundary; increase Z")
    return SpectrumResult(ell=op.ell, lowest_eigenvalue=float(w[0]),
                          eigenfunction_z=z, eigenfunction=vec)


def eigenvalues_near_zero(op: ModeOperator, k=2):
    """Lowest k eigenvalues, for zero-mode inspection."""
    w, ab, z, h = _eigenvalues(op, k)
    vecs = [_inverse_iteration(ab, wi, h, seed=i) for i, wi in enumerate(w)]
    return w, z, vecs


def lowest_eigenvalue_exact(d, p, lam, ell):
    """Closed-form lowest eigenvalue l(l+d-2) - Lambda (p^2-4)/4.

    The ground state of the l = 0 block is phi^{p/2} with eigenvalue
    -Lambda (p^2-4)/4 (direct substitution using phi'' = Lambda phi - phi^{p-1}
    and the first integral phi'^2 = Lambda phi^2 - (2/p) phi^p); the l block
    shifts it by l(l+d-2).
    """
    return ell * (ell + d - 2) - lam * (p * p - 4.0) / 4.0


def threshold_lambda(d, p, ell=1, nz=2000, tol=1e-6, lam_lo=1e-3, lam_hi=1.0) -> float:
    """Bisect the sign of the lowest mode-l eigenvalue in Lambda.

    The eigenvalue is strictly decreasing in Lambda, so the sign change is a
    single point; for l = 1 it reproduces 4(d-1)/(p^2-4).
    """
    if not (2.0 < p < two_star(d)):
        raise DomainError(f"need 2 < p < 2*, got p = {p} at d = {d}")

    def lowest(lam):
        op = ModeOperator(lam=lam, p=p, d=d, ell=ell, nz=nz)
        return _eigenvalues(op, 1)[0][0]

    lo = lam_lo
    if lowest(lo) <= 0:
        raise NumericsError("no sign change: eigenvalue already negative at the lower bracket")
    hi = lam_hi
    grow = 0
    while lowest(hi) > 0:
        hi *= 2.0
        grow += 1
        if grow > 40:
            raise NumericsError("no sign change found while growing the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if lowest(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sphere_bifurcation(d, p, solver_tol=1e-12):
    """Threshold mass for rigidity of the constant solution on the d-sphere.

    Linearizing -Delta u + lam u = u^{p-1} around u = lam^{1/(p-2)} gives
    -Delta w - (p-2) lam w on nonconstant modes; the first nonconstant mode of
    -Delta on S^d has eigenvalue d, so positivity is lost at (p-2) lam = d.
    Returns (analytic, from_eigenvalue_condition); the second value solves the
    mode condition by bracketed root finding and must agree with the first.
    """
    if d < 2:
        raise DomainError("sphere dimension must be >= 2")
    if not p > 2:
        raise DomainError("need p > 2")
    analytic = d / (p - 2.0)
    ell1_eig = 1.0 * (1.0 + d - 1.0)  # l(l+d-1) on S^d at l = 1

    def margin(lam):
        return ell1_eig - (p - 2.0) * lam

    from scipy.optimize import brentq
    numeric = brentq(margin, 1e-12, 1e12, xtol=solver_tol)
    return analytic, numeric
