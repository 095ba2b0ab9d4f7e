"""Parameter space of the weighted interpolation inequality.

The inequality family is indexed by an integer dimension d >= 2 and two real
weight exponents (a, b) with a < a_c = (d-2)/2 and a <= b <= a+1 (strictly
a < b when d = 2).  Everything downstream is driven by the derived quantities

    p      = 2d / (d - 2 + 2(b-a))          exponent of the right-hand norm
    n      = 2p / (p-2) = d / (1 - (b-a))   effective dimension (real, > 2)
    Lambda = (a - a_c)^2                    cylinder mass parameter
    alpha  = (1 + a - b)(a_c - a) / (a_c - a + b)   dilation exponent

and by the stability curve b_fs(a) with its equivalent descriptions
alpha_fs = sqrt((d-1)/(n-1)) and lambda_fs = 4(d-1)/(p^2-4).  Below the curve
(b < b_fs(a), equivalently alpha > alpha_fs, equivalently Lambda > lambda_fs)
the radial optimizers are unstable and rotational symmetry breaks.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError

# relative half-width of the band classified as OnCurve; the curve itself has
# measure zero, so classification near it must be reproducible rather than exact
CURVE_RTOL = 1e-12


class Region(str, Enum):
    SYMMETRIC = "Symmetric"
    BREAKING = "Breaking"
    ON_CURVE = "OnCurve"


@dataclass(frozen=True)
class CknParams:
    d: int
    a: float
    b: float


@dataclass(frozen=True)
class DerivedParams:
    d: int
    a: float
    b: float
    a_c: float
    p: float
    lam: float
    alpha: float
    n: float
    alpha_fs: float
    lambda_fs: float
    b_fs_at_a: float
    region: Region

    def to_dict(self):
        out = {
            "d": self.d, "a": self.a, "b": self.b, "a_c": self.a_c,
            "p": self.p, "lambda": self.lam, "alpha": self.alpha, "n": self.n,
            "alpha_fs": self.alpha_fs, "lambda_fs": self.lambda_fs,
            "b_fs_at_a": self.b_fs_at_a, "region": self.region.value,
        }
        return out


def a_critical(d):
    return (d - 2) / 2.0


def two_star(d):
    """Critical exponent: 2d/(d-2) for d >= 3, +inf for d = 2."""
    if d >= 3:
        return 2.0 * d / (d - 2.0)
    return math.inf


def _validate(params: CknParams):
    d, a, b = params.d, params.a, params.b
    if int(d) != d or d < 2:
        raise DomainError(f"dimension d must be an integer >= 2, got {d!r}")
    d = int(d)
    a_c = a_critical(d)
    if not a < a_c:
        raise DomainError(f"need a < a_c = {a_c}, got a = {a}")
    delta = b - a
    # b = a+1 gives p = 2 where every derived quantity degenerates, so the
    # admissible interval for derived quantities is half open
    if d >= 3:
        if not (0.0 <= delta < 1.0):
            raise DomainError(f"need a <= b < a+1 for d >= 3, got b-a = {delta}")
    else:
        if not (0.0 < delta < 1.0):
            raise DomainError(f"need a < b < a+1 for d = 2, got b-a = {delta}")


def b_fs(d, a):
    """Height of the stability curve above the given a.

    b_fs(a) = d(a_c - a) / (2 sqrt((a_c - a)^2 + d - 1)) + a - a_c.
    """
    if d < 2:
        raise DomainError(f"dimension d must be >= 2, got {d}")
    a_c = a_critical(d)
    t = a_c - a
    if not t > 0:
        raise DomainError(f"need a < a_c = {a_c}, got a = {a}")
    return d * t / (2.0 * math.sqrt(t * t + d - 1.0)) + a - a_c


def lambda_fs(d, p):
    """Stability threshold in Lambda: 4(d-1)/(p^2-4) for 2 < p < 2*."""
    if d < 2:
        raise DomainError(f"dimension d must be >= 2, got {d}")
    if not (2.0 < p < two_star(d)) and not (d >= 3 and p == two_star(d)):
        raise DomainError(f"need 2 < p < 2* = {two_star(d)}, got p = {p}")
    return 4.0 * (d - 1.0) / (p * p - 4.0)


def derive(params: CknParams) -> DerivedParams:
    """Populate every derived quantity and classify the region.

    The region compares b against b_fs(a) inside a relative band of width
    CURVE_RTOL; points in the band report OnCurve.
    """
    _validate(params)
    d, a, b = params.d, params.a, params.b
    a_c = a_critical(d)
    delta = b - a
    p = 2.0 * d / (d - 2.0 + 2.0 * delta)
    n = 2.0 * p / (p - 2.0)
    lam = (a - a_c) ** 2
    alpha = (1.0 + a - b) * (a_c - a) / (a_c - a + b)
    if not alpha > 0:
        raise DomainError(f"derived alpha must be positive, got {alpha} (a={a}, b={b})")
    alpha_fs_ = math.sqrt((d - 1.0) / (n - 1.0))
    lam_fs = 4.0 * (d - 1.0) / (p * p - 4.0)
    bcurve = b_fs(d, a)
    gap = b - bcurve
    band = CURVE_RTOL * max(1.0, abs(b), abs(bcurve))
    if abs(gap) <= band:
        region = Region.ON_CURVE
    elif gap > 0:
        region = Region.SYMMETRIC
    else:
        region = Region.BREAKING
    return DerivedParams(d=d, a=a, b=b, a_c=a_c, p=p, lam=lam, alpha=alpha, n=n,
                         alpha_fs=alpha_fs_, lambda_fs=lam_fs, b_fs_at_a=bcurve,
                         region=region)


def to_ab(d, alpha, n):
    """Invert (alpha, n) back to weight exponents (a, b).

    Closed form: with delta = b - a = 1 - d/n the denominator of alpha
    simplifies to a_c + delta, independent of a, so

        a_c - a = alpha * (n/d) * (a_c + delta).
    """
    if d < 2:
        raise DomainError(f"dimension d must be >= 2, got {d}")
    if not n > 2:
        raise DomainError(f"need n > 2, got n = {n}")
    if not alpha > 0:
        raise DomainError(f"need alpha > 0, got {alpha}")
    a_c = a_critical(d)
    delta = 1.0 - d / n
    if d >= 3 and delta < 0:
        raise DomainError(f"n = {n} < d = {d} lands outside the admissible strip (b < a)")
    if d == 2 and delta <= 0:
        raise DomainError(f"d = 2 requires n > 2 strictly, got n = {n}")
    t = alpha * (n / d) * (a_c + delta)
    a = a_c - t
    b = a + delta
    dp = derive(CknParams(d=d, a=a, b=b))  # validates admissibility
    return dp.a, dp.b


def from_lambda_p(d, lam, p):
    """Parameters (a, b) with the given cylinder mass Lambda and exponent p."""
    if not lam > 0:
        raise DomainError(f"need Lambda > 0, got {lam}")
    if not (2.0 < p <= two_star(d)) or (d == 2 and not p < math.inf):
        raise DomainError(f"need 2 < p <= 2*, got p = {p}")
    a_c = a_critical(d)
    a = a_c - math.sqrt(lam)
    delta = (2.0 * d / p - (d - 2.0)) / 2.0
    b = a + delta
    return derive(CknParams(d=d, a=a, b=b))
