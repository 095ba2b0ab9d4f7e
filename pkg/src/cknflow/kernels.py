"""Finite-difference stencil kernels.

Fourth-order centered stencils in the interior, one-sided fourth-order rows
at the ends.  These sit in the inner loop of the quotient minimizer and the
flow integrator, so they carry numba @njit implementations with a pure-numpy
fallback.  Selection: environment variable CKNFLOW_NUMBA=0 (or numba being
unavailable) picks the numpy path.  benchmarks/bench_kernels.py compares both.
"""

import os

import numpy as np

from .errors import DomainError

# one-sided rows (order 4); the interior stencils are the classic 5-point ones
_D1_INT = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2_INT = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_D1_B0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_D1_B1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0
_D2_B0 = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0
_D2_B1 = np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]) / 12.0


def _d1_numpy(f, h):
    out = np.empty_like(f)
    out[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    out[0] = _D1_B0 @ f[:5] / h
    out[1] = _D1_B1 @ f[:5] / h
    out[-1] = -(_D1_B0 @ f[-5:][::-1]) / h
    out[-2] = -(_D1_B1 @ f[-5:][::-1]) / h
    return out


def _d2_numpy(f, h):
    out = np.empty_like(f)
    out[2:-2] = (-f[:-4] + 16.0 * f[1:-3] - 30.0 * f[2:-2] + 16.0 * f[3:-1] - f[4:]) / (12.0 * h * h)
    out[0] = _D2_B0 @ f[:6] / (h * h)
    out[1] = _D2_B1 @ f[:6] / (h * h)
    out[-1] = _D2_B0 @ f[-6:][::-1] / (h * h)
    out[-2] = _D2_B1 @ f[-6:][::-1] / (h * h)
    return out


def _build_numba():
    from numba import njit

    @njit(cache=True, fastmath=False)
    def d1_nb(f, h):
        n = f.shape[0]
        m = f.shape[1]
        out = np.empty_like(f)
        inv = 1.0 / (12.0 * h)
        for i in range(2, n - 2):
            for j in range(m):
                out[i, j] = (f[i - 2, j] - 8.0 * f[i - 1, j] + 8.0 * f[i + 1, j] - f[i + 2, j]) * inv
        for j in range(m):
            out[0, j] = (-25.0 * f[0, j] + 48.0 * f[1, j] - 36.0 * f[2, j] + 16.0 * f[3, j] - 3.0 * f[4, j]) * inv
            out[1, j] = (-3.0 * f[0, j] - 10.0 * f[1, j] + 18.0 * f[2, j] - 6.0 * f[3, j] + f[4, j]) * inv
            out[n - 1, j] = (25.0 * f[n - 1, j] - 48.0 * f[n - 2, j] + 36.0 * f[n - 3, j] - 16.0 * f[n - 4, j] + 3.0 * f[n - 5, j]) * inv
            out[n - 2, j] = (3.0 * f[n - 1, j] + 10.0 * f[n - 2, j] - 18.0 * f[n - 3, j] + 6.0 * f[n - 4, j] - f[n - 5, j]) * inv
        return out

    @njit(cache=True, fastmath=False)
    def d2_nb(f, h):
        n = f.shape[0]
        m = f.shape[1]
        out = np.empty_like(f)
        inv = 1.0 / (12.0 * h * h)
        for i in range(2, n - 2):
            for j in range(m):
                out[i, j] = (-f[i - 2, j] + 16.0 * f[i - 1, j] - 30.0 * f[i, j] + 16.0 * f[i + 1, j] - f[i + 2, j]) * inv
        for j in range(m):
            out[0, j] = (45.0 * f[0, j] - 154.0 * f[1, j] + 214.0 * f[2, j] - 156.0 * f[3, j] + 61.0 * f[4, j] - 10.0 * f[5, j]) * inv
            out[1, j] = (10.0 * f[0, j] - 15.0 * f[1, j] - 4.0 * f[2, j] + 14.0 * f[3, j] - 6.0 * f[4, j] + f[5, j]) * inv
            out[n - 1, j] = (45.0 * f[n - 1, j] - 154.0 * f[n - 2, j] + 214.0 * f[n - 3, j] - 156.0 * f[n - 4, j] + 61.0 * f[n - 5, j] - 10.0 * f[n - 6, j]) * inv
            out[n - 2, j] = (10.0 * f[n - 1, j] - 15.0 * f[n - 2, j] - 4.0 * f[n - 3, j] + 14.0 * f[n - 4, j] - 6.0 * f[n - 5, j] + f[n - 6, j]) * inv
        return out

    return d1_nb, d2_nb


def _want_numba():
    flag = os.environ.get("CKNFLOW_NUMBA", "").strip().lower()
    if flag in ("0", "false", "off", "no"):
        return False
    return True


_NUMBA_IMPL = None
if _want_numba():
    try:
        _NUMBA_IMPL = _build_numba()
    except ImportError:
        _NUMBA_IMPL = None

BACKEND = "numba" if _NUMBA_IMPL is not None else "numpy"


def backend_name():
    return BACKEND


def _check(f, need):
    if f.shape[0] < need:
        raise DomainError(f"grid too small: need at least {need} nodes along the derivative axis")


def d1_axis0(f, h):
    """4th-order first derivative along axis 0 of a 1D or 2D array."""
    f = np.asarray(f, dtype=float)
    _check(f, 7)
    squeeze = f.ndim == 1
    if squeeze:
        f = f[:, None]
    if _NUMBA_IMPL is not None:
        out = _NUMBA_IMPL[0](np.ascontiguousarray(f), float(h))
    else:
        out = _d1_numpy(f, float(h))
    return out[:, 0] if squeeze else out


def d2_axis0(f, h):
    """4th-order second derivative along axis 0 of a 1D or 2D array."""
    f = np.asarray(f, dtype=float)
    _check(f, 7)
    squeeze = f.ndim == 1
    if squeeze:
        f = f[:, None]
    if _NUMBA_IMPL is not None:
        out = _NUMBA_IMPL[1](np.ascontiguousarray(f), float(h))
    else:
        out = _d2_numpy(f, float(h))
    return out[:, 0] if squeeze else out


def d_axis(f, h, axis, order):
    """Apply d1/d2 along an arbitrary axis of an nd array."""
    f = np.asarray(f, dtype=float)
    moved = np.moveaxis(f, axis, 0)
    shape = moved.shape
    flat = np.ascontiguousarray(moved.reshape(shape[0], -1))
    out = d1_axis0(flat, h) if order == 1 else d2_axis0(flat, h)
    return np.moveaxis(out.reshape(shape), 0, axis)
