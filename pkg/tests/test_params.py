import math

import numpy as np
import pytest

from cknflow import CknParams, DomainError, Region, b_fs, derive, from_lambda_p, lambda_fs, to_ab


def test_derive_sobolev_point():
    # a = b = 0 forces p = 2d/(d-2), alpha = 1, n = d exactly
    dp = derive(CknParams(3, 0.0, 0.0))
    assert dp.p == 6.0
    assert dp.alpha == 1.0
    assert dp.n == 3.0
    assert dp.a_c == 0.5
    assert dp.lam == 0.25


def test_derive_on_curve_point():
    # hand evaluation: a_c - a = 1 so Lambda = 1; b = sqrt(3)/2 - 1 puts
    # b - a = (sqrt(3)-1)/2, hence p = 6/sqrt(3) = 2 sqrt(3) and
    # lambda_fs = 8/(12-4) ... = 8/8 = 1 = Lambda: the point sits on the curve
    b = math.sqrt(3.0) / 2.0 - 1.0
    dp = derive(CknParams(3, -0.5, b))
    assert dp.p == pytest.approx(2.0 * math.sqrt(3.0), rel=1e-15)
    assert dp.lam == pytest.approx(1.0, rel=1e-15)
    assert dp.lambda_fs == pytest.approx(1.0, rel=1e-14)
    assert dp.region == Region.ON_CURVE


def test_derive_equal_weights_away_from_zero():
    # b = a gives p = 2d/(d-2) and n = d for every a, but alpha = (a_c-a)/a_c
    dp = derive(CknParams(4, -1.0, -1.0))
    assert dp.p == 4.0
    assert dp.n == 4.0
    assert dp.alpha == pytest.approx(2.0, rel=1e-15)
    assert dp.region == Region.BREAKING


def test_derive_domain_errors():
    with pytest.raises(DomainError):
        derive(CknParams(3, 0.5, 0.6))  # a = a_c
    with pytest.raises(DomainError):
        derive(CknParams(3, 0.0, 1.0))  # b = a+1 degenerates to p = 2
    with pytest.raises(DomainError):
        derive(CknParams(3, 0.0, -0.1))  # b < a
    with pytest.raises(DomainError):
        derive(CknParams(1, -1.0, -0.5))
    with pytest.raises(DomainError):
        derive(CknParams(2, -1.0, -1.0))  # d = 2 needs b > a strictly


def test_b_fs_values():
    # 4*1/(2*sqrt(1+3)) - 1 = 0
    assert b_fs(4, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert b_fs(3, -0.5) == pytest.approx(math.sqrt(3.0) / 2.0 - 1.0, rel=1e-15)
    # a -> a_c from below: b_fs -> 0
    assert abs(b_fs(3, 0.5 - 1e-9)) < 1e-9 * 10
    with pytest.raises(DomainError):
        b_fs(3, 0.5)


def test_lambda_fs_values():
    assert lambda_fs(3, 4.0) == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert lambda_fs(4, 3.0) == pytest.approx(2.4, rel=1e-15)
    assert lambda_fs(2, 4.0) == pytest.approx(1.0 / 3.0, rel=1e-15)
    with pytest.raises(DomainError):
        lambda_fs(3, 2.0)
    with pytest.raises(DomainError):
        lambda_fs(3, 7.0)  # above 2* = 6


def test_to_ab_examples():
    assert to_ab(3, 1.0, 3.0) == pytest.approx((0.0, 0.0), abs=1e-15)
    assert to_ab(4, 1.0, 4.0) == pytest.approx((0.0, 0.0), abs=1e-15)
    a, b = to_ab(3, 2.0, 3.0)
    dp = derive(CknParams(3, a, b))
    assert dp.alpha == pytest.approx(2.0, rel=1e-12)
    assert dp.n == pytest.approx(3.0, rel=1e-12)


def test_to_ab_round_trip_random():
    rng = np.random.default_rng(42)
    for _ in range(300):
        d = int(rng.integers(2, 7))
        n = d / (1.0 - rng.uniform(0.02, 0.95)) if d >= 3 else 2.0 + rng.uniform(0.1, 30.0)
        if d >= 3:
            n = max(n, d + 1e-6)
        alpha = rng.uniform(0.05, 5.0)
        a, b = to_ab(d, alpha, n)
        dp = derive(CknParams(d, a, b))
        assert dp.alpha == pytest.approx(alpha, rel=1e-12)
        assert dp.n == pytest.approx(n, rel=1e-12)


def test_to_ab_rejects_inadmissible():
    with pytest.raises(DomainError):
        to_ab(4, 1.0, 3.0)  # n < d means b < a
    with pytest.raises(DomainError):
        to_ab(3, -1.0, 4.0)


def _sample_admissible(rng, d):
    a_c = (d - 2) / 2.0
    a = -rng.uniform(0.01, 4.0)
    lo = 0.0 if d >= 3 else 1e-6
    delta = rng.uniform(lo, 0.999)
    if d >= 3 and delta == 0.0:
        delta = 0.0
    return a, a + delta


def test_region_equivalence_sampled():
    # sign(b - b_fs) == sign(lambda_fs - Lambda) == sign(alpha_fs - alpha)
    rng = np.random.default_rng(7)
    for d in range(2, 7):
        for _ in range(400):
            a, b = _sample_admissible(rng, d)
            dp = derive(CknParams(d, a, b))
            s1 = dp.b - dp.b_fs_at_a
            s2 = dp.lambda_fs - dp.lam
            s3 = dp.alpha_fs - dp.alpha
            scale1 = max(1.0, abs(dp.b))
            scale2 = max(1.0, dp.lam)
            scale3 = max(1.0, dp.alpha)
            if abs(s1) < 1e-12 * scale1 or abs(s2) < 1e-12 * scale2 or abs(s3) < 1e-12 * scale3:
                continue  # inside the tie band
            assert np.sign(s1) == np.sign(s2) == np.sign(s3), (d, a, b)


def test_region_matches_curve_side():
    rng = np.random.default_rng(3)
    for _ in range(200):
        d = int(rng.integers(2, 7))
        a = -rng.uniform(0.05, 3.0)
        bc = b_fs(d, a)
        above = derive(CknParams(d, a, bc + 1e-3))
        assert above.region == Region.SYMMETRIC
        lo = a if d >= 3 else a + 1e-9
        below_b = max(bc - 1e-3, lo + (bc - lo) * 0.5)
        below = derive(CknParams(d, a, below_b))
        assert below.region == Region.BREAKING
        exact = derive(CknParams(d, a, bc))
        assert exact.region == Region.ON_CURVE


def test_b_fs_monotone_for_negative_a():
    # strict monotonicity holds left of a = 0 (it fails close to a_c, where the
    # curve is not meaningful for the symmetry question)
    for d in range(2, 7):
        a = np.linspace(-8.0, -1e-6, 800)
        vals = np.array([b_fs(d, float(x)) for x in a])
        assert np.all(np.diff(vals) > 0), d


def test_from_lambda_p():
    dp = from_lambda_p(3, 1.0, 4.0)
    assert dp.lam == pytest.approx(1.0, rel=1e-14)
    assert dp.p == pytest.approx(4.0, rel=1e-14)
    assert dp.a == pytest.approx(-0.5, rel=1e-14)
