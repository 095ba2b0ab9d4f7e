"""Sphere grids and spectral calculus on S^{d-1} for d = 2, 3.

d = 2: the circle, uniform angles, FFT differentiation.
d = 3: Gauss-Legendre nodes in cos(theta) crossed with uniform azimuth.
Scalar calculus goes through a spherical-harmonic analysis/synthesis pair per
azimuthal mode; second theta derivatives come from the Legendre ODE

    P'' = -cot(theta) P' - (l(l+1) - m^2/sin^2(theta)) P,

so every derivative is exact on band-limited fields.  Gauss-Legendre nodes
never touch the poles, which keeps the coordinate Hessian finite without any
regularization.
"""

import numpy as np

from .errors import DomainError


def legendre_table(lmax, mu):
    """Normalized associated Legendre values P[l, m, node].

    Normalization: int_{-1}^{1} P_lm(mu)^2 dmu = 1 (no Condon-Shortley sign).
    Standard stable recurrences: sectoral seed, then upward in l.
    """
    mu = np.asarray(mu, float)
    s = np.sqrt(1.0 - mu * mu)
    P = np.zeros((lmax + 1, lmax + 1, mu.size))
    P[0, 0] = np.sqrt(0.5)
    for m in range(1, lmax + 1):
        P[m, m] = np.sqrt((2.0 * m + 1) / (2.0 * m)) * s * P[m - 1, m - 1]
    for m in range(0, lmax + 1):
        if m + 1 <= lmax:
            P[m + 1, m] = np.sqrt(2.0 * m + 3.0) * mu * P[m, m]
        for l in range(m + 2, lmax + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((2.0 * l + 1) * ((l - 1.0) ** 2 - m * m)) / ((2.0 * l - 3) * (l * l - m * m)))
            P[l, m] = a * mu * P[l - 1, m] - b * P[l - 2, m]
    return P


def legendre_dtheta(lmax, mu, P):
    """d/dtheta of the normalized table, from the mu-derivative recurrence."""
    s = np.sqrt(1.0 - mu * mu)
    dP = np.zeros_like(P)
    for m in range(0, lmax + 1):
        for l in range(m, lmax + 1):
            if l > m:
                e = np.sqrt((l * l - m * m) * (2.0 * l + 1) / (2.0 * l - 1))
                low = e * P[l - 1, m]
            else:
                low = 0.0
            dP[l, m] = -(low - l * mu * P[l, m]) / s
    return dP


class SphereGrid:
    """Quadrature nodes and spectral calculus on S^{d-1}, d in {2, 3}."""

    def __init__(self, d, nmu=None, nphi=None, ntheta=None):
        if d == 2:
            if ntheta is None:
                ntheta = 64
            if ntheta < 8:
                raise DomainError("circle grid needs at least 8 angles")
            self.d = 2
            self.ntheta = int(ntheta)
            self.theta = 2.0 * np.pi * np.arange(self.ntheta) / self.ntheta
            self.weights = np.full(self.ntheta, 2.0 * np.pi / self.ntheta)
            self.nnodes = self.ntheta
            self.shape = (self.ntheta,)
            self.design_degree = self.ntheta // 2 - 1
        elif d == 3:
            if nmu is None:
                nmu = 16
            if nphi is None:
                nphi = 2 * nmu
            if nmu < 4 or nphi < 4:
                raise DomainError("two-sphere grid needs nmu >= 4 and nphi >= 4")
            self.d = 3
            self.nmu, self.nphi = int(nmu), int(nphi)
            mu, wmu = np.polynomial.legendre.leggauss(self.nmu)
            self.mu, self.wmu = mu, wmu
            self.theta = np.arccos(mu)
            self.sin_theta = np.sqrt(1.0 - mu * mu)
            self.cot_theta = mu / self.sin_theta
            self.phi = 2.0 * np.pi * np.arange(self.nphi) / self.nphi
            self.weights = np.outer(wmu, np.full(self.nphi, 2.0 * np.pi / self.nphi))
            self.nnodes = self.nmu * self.nphi
            self.shape = (self.nmu, self.nphi)
            self.lmax = self.nmu - 1
            self.mmax = min(self.lmax, self.nphi // 2)
            self.design_degree = min(self.lmax, (self.nphi - 1) // 2)
            P = legendre_table(self.lmax, mu)
            dP = legendre_dtheta(self.lmax, mu, P)
            # per-m basis matrices, node x degree
            self._V = [np.ascontiguousarray(P[m:, m].T) for m in range(self.mmax + 1)]
            self._dV = [np.ascontiguousarray(dP[m:, m].T) for m in range(self.mmax + 1)]
            self._ls = [np.arange(m, self.lmax + 1.0) for m in range(self.mmax + 1)]
        else:
            raise DomainError(f"pointwise sphere calculus is implemented for d in {{2, 3}}, got d = {d}")

    # ---------------- quadrature ----------------

    @property
    def field_shape(self):
        return self.shape

    def integrate(self, f):
        return float(np.sum(self.weights * np.asarray(f)))

    integrate_values = integrate

    def volume(self):
        return float(np.sum(self.weights))

    # ---------------- d = 3 spectral transforms ----------------

    def _analysis(self, f):
        """rfft in phi then Legendre projection; returns list of (..., nl) arrays."""
        fh = np.fft.rfft(f, axis=-1)
        coeffs = []
        for m in range(self.mmax + 1):
            coeffs.append(np.einsum("...i,il->...l", fh[..., m] * self.wmu, self._V[m]))
        return coeffs, fh.shape[-1]

    def _synthesis(self, coeffs, nfreq, table=None, lfactor=None, mfactor=None,
                   extra_node=None):
        table = self._V if table is None else table
        out = np.zeros(coeffs[0].shape[:-1] + (self.nmu, nfreq), dtype=complex)
        for m in range(self.mmax + 1):
            a = coeffs[m]
            if lfactor is not None:
                a = a * lfactor(self._ls[m], m)
            vals = np.einsum("...l,il->...i", a, table[m])
            if extra_node is not None:
                vals = vals * extra_node(m)
            if mfactor is not None:
                vals = vals * mfactor(m)
            out[..., m] = vals
        return np.fft.irfft(out, n=self.nphi, axis=-1)

    def _calc(self, f, kind):
        if self.d == 2:
            fh = np.fft.rfft(f, axis=-1)
            k = np.arange(fh.shape[-1])
            if kind == "lap":
                fh = fh * (-(k * k))
            elif kind == "dtheta":
                fh = fh * (1j * k)
                if self.ntheta % 2 == 0:
                    fh[..., -1] = 0.0
            return np.fft.irfft(fh, n=self.ntheta, axis=-1)
        coeffs, nfreq = self._analysis(f)
        if kind == "lap":
            return self._synthesis(coeffs, nfreq, lfactor=lambda ls, m: -ls * (ls + 1.0))
        if kind == "dtheta":
            return self._synthesis(coeffs, nfreq, table=self._dV)
        raise ValueError(kind)

    def laplacian(self, f):
        """Laplace-Beltrami operator; eigenvalues -l(l+d-2) on harmonics."""
        return self._calc(np.asarray(f, float), "lap")

    def d_theta(self, f):
        return self._calc(np.asarray(f, float), "dtheta")

    def d_phi(self, f):
        if self.d != 3:
            raise DomainError("d_phi needs the two-sphere grid")
        fh = np.fft.rfft(np.asarray(f, float), axis=-1)
        m = np.arange(fh.shape[-1])
        fh = fh * (1j * m)
        if self.nphi % 2 == 0:
            fh[..., -1] = 0.0
        return np.fft.irfft(fh, n=self.nphi, axis=-1)

    def derivs(self, f):
        """All first/second coordinate derivatives from a single analysis.

        Returns (f_proj, f_th, f_ph, f_thth, f_thph, f_phph); f_proj is the
        band-limited projection of f onto the basis actually differentiated.
        """
        f = np.asarray(f, float)
        if self.d == 2:
            f_th = self._calc(f, "dtheta")
            f_thth = self._calc(f, "lap")
            z = np.zeros_like(f)
            return f, f_th, z, f_thth, z, z
        coeffs, nfreq = self._analysis(f)
        f_proj = self._synthesis(coeffs, nfreq)
        f_th = self._synthesis(coeffs, nfreq, table=self._dV)
        # per-mode second theta derivative via the Legendre ODE
        out = np.zeros(coeffs[0].shape[:-1] + (self.nmu, nfreq), dtype=complex)
        s2 = self.sin_theta ** 2
        for m in range(self.mmax + 1):
            a = coeffs[m]
            A = np.einsum("...l,il->...i", a, self._dV[m])
            B = np.einsum("...l,il->...i", a, self._V[m])
            lam = self._ls[m] * (self._ls[m] + 1.0)
            C = np.einsum("...l,il->...i", a * lam, self._V[m])
            out[..., m] = -self.cot_theta * A - C + (m * m) / s2 * B
        f_thth = np.fft.irfft(out, n=self.nphi, axis=-1)
        f_ph = self.d_phi(f_proj)
        f_thph = self.d_phi(f_th)
        f_phph = self.d_phi(f_ph)
        return f_proj, f_th, f_ph, f_thth, f_thph, f_phph

    def grad_sq(self, f):
        """|grad_omega f|^2 in sphere coordinates."""
        if self.d == 2:
            return self._calc(np.asarray(f, float), "dtheta") ** 2
        _, f_th, f_ph, *_ = self.derivs(f)
        return f_th ** 2 + (f_ph / self.sin_theta[:, None]) ** 2

    def grad_dot(self, f, g):
        """grad_omega f . grad_omega g (metric inner product)."""
        if self.d == 2:
            return self._calc(np.asarray(f, float), "dtheta") * self._calc(np.asarray(g, float), "dtheta")
        _, f_th, f_ph, *_ = self.derivs(f)
        _, g_th, g_ph, *_ = self.derivs(g)
        return f_th * g_th + f_ph * g_ph / self.sin_theta[:, None] ** 2

    def covariant_hessian(self, f):
        """Covariant Hessian components (H_tt, H_tp, H_pp) on the two-sphere.

        Metric diag(1, sin^2 theta); the only nonzero Christoffel symbols are
        Gamma^t_pp = -sin cos and Gamma^p_tp = cot.
        """
        if self.d != 3:
            raise DomainError("covariant Hessian is only available on the two-sphere")
        _, f_th, f_ph, f_thth, f_thph, f_phph = self.derivs(f)
        s = self.sin_theta[:, None]
        cot = self.cot_theta[:, None]
        H_tt = f_thth
        H_tp = f_thph - cot * f_ph
        H_pp = f_phph + (self.mu * self.sin_theta)[:, None] * f_th
        return H_tt, H_tp, H_pp

    def tensor_norm_sq(self, T_tt, T_tp, T_pp):
        """|T|^2 = g^{ik} g^{jl} T_ij T_kl for a symmetric 2-tensor."""
        s2 = self.sin_theta[:, None] ** 2
        return T_tt ** 2 + 2.0 * T_tp ** 2 / s2 + T_pp ** 2 / s2 ** 2

    def metric(self):
        """Components (g_tt, g_pp) of the round metric at the nodes."""
        if self.d != 3:
            raise DomainError("metric components are exposed for the two-sphere only")
        return np.ones(self.nmu), self.sin_theta ** 2

    # ---------------- field helpers ----------------

    def harmonic(self, l, m=0, phase=0.0):
        """Real spherical harmonic Y_l^m (unit L2(dmu) x cosine azimuth)."""
        if self.d == 2:
            if l == 0:
                return np.ones(self.ntheta)
            return np.cos(l * self.theta + phase)
        if l > self.lmax or m > min(l, self.mmax):
            raise DomainError(f"harmonic degree ({l},{m}) above grid resolution")
        P = legendre_table(self.lmax, self.mu)
        base = P[l, m][:, None]
        return base * np.cos(m * self.phi[None, :] + phase)

    def random_band_limited(self, degree, rng, terms=6, amplitude=1.0):
        """Random combination of harmonics up to the given degree, sup <= amplitude."""
        degree = min(degree, self.design_degree)
        if self.d == 2:
            f = np.zeros(self.ntheta)
            for _ in range(terms):
                l = int(rng.integers(0, degree + 1))
                f += rng.normal() * np.cos(l * self.theta + rng.uniform(0, 2 * np.pi))
        else:
            f = np.zeros((self.nmu, self.nphi))
            for _ in range(terms):
                l = int(rng.integers(0, degree + 1))
                m = int(rng.integers(0, min(l, self.mmax) + 1)) if l > 0 else 0
                f += rng.normal() * self.harmonic(l, m, rng.uniform(0, 2 * np.pi))
        sup = np.abs(f).max()
        return amplitude * f / max(sup, 1e-300)
