"""Closed-form profiles and the changes of variables connecting them.

RadialProfile   u(s) = (A + B s^2)^{-(n-2)/2}, the radial extremal shape.
Soliton         phi(z), the even exponentially-decaying optimizer on the line.
SelfSimilar     v(t; s), the exact space-time solution of the fast-diffusion flow.

normalized_radial pins (A, B) so that -L u = u^{p-1} holds exactly: plugging
u = (A + B s^2)^{-(n-2)/2} into L gives
    -L u = alpha^2 n (n-2) A B (A + B s^2)^{-(n+2)/2},
so the profile solves the equation iff alpha^2 n (n-2) A B = 1.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NumericsError
from .grids import sphere_volume
from .params import DerivedParams


@dataclass(frozen=True)
class RadialProfile:
    A: float
    B: float
    alpha: float
    n: float

    def __post_init__(self):
        if not (self.A > 0 and self.B > 0):
            raise DomainError("profile constants A, B must be positive")
        if not self.n > 2:
            raise DomainError("profile needs n > 2")


@dataclass(frozen=True)
class Soliton:
    lam: float
    p: float
    z0: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError("soliton needs Lambda > 0")
        if not self.p > 2:
            raise DomainError("soliton needs p > 2")


@dataclass(frozen=True)
class SelfSimilar:
    c_star: float
    n: float
    alpha: float

    def __post_init__(self):
        if not self.c_star > 0:
            raise DomainError("self-similar profile needs c_star > 0")


def eval_radial(profile: RadialProfile, s):
    """u(s) = (A + B s^2)^{-(n-2)/2}."""
    s = np.asarray(s, float)
    return (profile.A + profile.B * s * s) ** (-(profile.n - 2.0) / 2.0)


def eval_radial_w(profile: RadialProfile, r):
    """Same profile in the original radial variable: w(r) = u(r^alpha)."""
    r = np.asarray(r, float)
    return eval_radial(profile, r ** profile.alpha)


def normalized_radial(dp: DerivedParams) -> RadialProfile:
    """The exact solution of -L u = u^{p-1} with A = B."""
    n, alpha = dp.n, dp.alpha
    c = 1.0 / (alpha * math.sqrt(n * (n - 2.0)))
    return RadialProfile(A=c, B=c, alpha=alpha, n=n)


def eval_soliton(sol: Soliton, z):
    """phi(z) = (p Lambda / 2)^{1/(p-2)} sech^{2/(p-2)}((p-2) sqrt(Lambda) (z-z0) / 2).

    Written with exp(-|x|) so large |z| underflows gracefully instead of
    overflowing cosh.
    """
    z = np.asarray(z, float)
    p, lam = sol.p, sol.lam
    beta = 0.5 * (p - 2.0) * math.sqrt(lam)
    amp = (p * lam / 2.0) ** (1.0 / (p - 2.0))
    x = np.abs(beta * (z - sol.z0))
    sech = 2.0 * np.exp(-x) / (1.0 + np.exp(-2.0 * x))
    return amp * sech ** (2.0 / (p - 2.0))


def eval_soliton_deriv(sol: Soliton, z):
    """phi'(z) = -(2/(p-2)) beta tanh(beta (z-z0)) phi(z)."""
    z = np.asarray(z, float)
    p, lam = sol.p, sol.lam
    beta = 0.5 * (p - 2.0) * math.sqrt(lam)
    return -(2.0 / (p - 2.0)) * beta * np.tanh(beta * (z - sol.z0)) * eval_soliton(sol, z)


def eval_self_similar(ss: SelfSimilar, t, s):
    """v(t; s) = t^{-n} (c_star + s^2 / (2 (n-1) alpha^2 t^2))^{-n}, omega independent."""
    if not t > 0:
        raise DomainError(f"self-similar profile needs t > 0, got {t}")
    s = np.asarray(s, float)
    n, alpha = ss.n, ss.alpha
    return t ** (-n) * (ss.c_star + s * s / (2.0 * (n - 1.0) * alpha * alpha * t * t)) ** (-n)


def eval_self_similar_dt(ss: SelfSimilar, t, s):
    """Exact time derivative of the self-similar solution."""
    if not t > 0:
        raise DomainError(f"self-similar profile needs t > 0, got {t}")
    s = np.asarray(s, float)
    n, alpha = ss.n, ss.alpha
    beta = 1.0 / (2.0 * (n - 1.0) * alpha * alpha)
    G = ss.c_star * t + beta * s * s / t
    return -n * G ** (-n - 1.0) * (ss.c_star - beta * s * s / (t * t))


def self_similar_from_profile(dp: DerivedParams) -> SelfSimilar:
    """The self-similar state whose t = 1 slice is the normalized radial profile^p."""
    n = dp.n
    c_star = 2.0 * (n - 1.0) / (n * (n - 2.0))
    return SelfSimilar(c_star=c_star, n=n, alpha=dp.alpha)


# ---------------- changes of variables ----------------


def emden_fowler(r, w_values, a, a_c):
    """(r, w) -> (z, phi) with z = log r and phi = r^{a_c - a} w.

    w may be shaped (nr,) or (nr, nomega); broadcasting is along the first axis.
    """
    r = np.asarray(r, float)
    if np.any(r <= 0):
        raise DomainError("radii must be positive")
    w = np.asarray(w_values, float)
    fac = r ** (a_c - a)
    phi = w * (fac[:, None] if w.ndim == 2 else fac)
    return np.log(r), phi


def emden_fowler_inverse(z, phi_values, a, a_c):
    """(z, phi) -> (r, w) with r = e^z and w = r^{a - a_c} phi."""
    z = np.asarray(z, float)
    phi = np.asarray(phi_values, float)
    r = np.exp(z)
    fac = r ** (a - a_c)
    w = phi * (fac[:, None] if phi.ndim == 2 else fac)
    return r, w


def dilation_change(r, w_values, alpha):
    """(r, w) -> (s, u) with s = r^alpha and u(s, .) = w(s^{1/alpha}, .).

    Values are untouched; only the radial coordinate is relabeled.
    """
    if not alpha > 0:
        raise DomainError("dilation exponent must be positive")
    r = np.asarray(r, float)
    if np.any(r <= 0):
        raise DomainError("radii must be positive")
    return r ** alpha, np.asarray(w_values, float).copy()


def dilation_change_inverse(s, u_values, alpha):
    if not alpha > 0:
        raise DomainError("dilation exponent must be positive")
    s = np.asarray(s, float)
    if np.any(s <= 0):
        raise DomainError("radii must be positive")
    return s ** (1.0 / alpha), np.asarray(u_values, float).copy()


# ---------------- the radial constant ----------------


def _soliton_line_integrals(lam, p, z0=0.0):
    sol = Soliton(lam=lam, p=p, z0=z0)
    Z = 30.0 / math.sqrt(lam)
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=400)
    i2p, e1 = quad(lambda z: float(eval_soliton_deriv(sol, z)) ** 2, -Z + z0, Z + z0, **opts)
    i2, e2 = quad(lambda z: float(eval_soliton(sol, z)) ** 2, -Z + z0, Z + z0, **opts)
    ip, e3 = quad(lambda z: float(eval_soliton(sol, z)) ** p, -Z + z0, Z + z0, **opts)
    if max(e1, e2, e3) > 1e-9 * max(i2p, i2, ip):
        raise NumericsError("adaptive quadrature on the soliton integrals did not converge")
    return i2p, i2, ip


def radial_constant(dp: DerivedParams, z0=0.0) -> float:
    """Value of the cylinder quotient at the explicit even optimizer.

    (||phi'||_2^2 + Lambda ||phi||_2^2) Vol(S^{d-1}) / (||phi||_p^2 Vol^{2/p}),
    computed with adaptive quadrature on |z| <= 30/sqrt(Lambda), where the
    profile's tail is below 1e-13.  Inside the symmetric region (and on the
    stability curve) this equals the best constant of the inequality.
    """
    lam, p = dp.lam, dp.p
    if not lam > 0:
        raise DomainError("radial constant needs Lambda > 0 (a != a_c)")
    i2p, i2, ip = _soliton_line_integrals(lam, p, z0)
    vol = sphere_volume(dp.d)
    return (i2p + lam * i2) * vol / (ip ** (2.0 / p) * vol ** (2.0 / p))
