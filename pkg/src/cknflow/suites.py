"""Seeded verification suites shared by the CLI and the test battery."""

import math

import numpy as np

from .errors import DomainError
from .flow import djdt_identity
from .grids import BoxGrid, Field, RadialGrid
from .identities import (IdentityReport, bochner_residual, lemma_first_residual,
                         lemma_second_check, random_box_pressure,
                         random_product_pressure, random_sphere_pressure,
                         sobolev_hessian_decomposition)
from .params import DerivedParams, from_lambda_p, to_ab, derive, CknParams
from .sphere import SphereGrid

SUITES = ("lemma-first", "lemma-second", "bochner", "sobolev-hessian", "djdt")


def _dp_from_n_alpha(n, alpha, d=3):
    a, b = to_ab(d, alpha, n)
    return derive(CknParams(d=d, a=a, b=b))


def lemma_first_suite(seeds, base_seed=0, ns=700, nmu=20, nphi=24):
    sphere = SphereGrid(3, nmu=nmu, nphi=nphi)
    out = []
    for k in range(seeds):
        rng = np.random.default_rng(base_seed + k)
        n = rng.uniform(3.5, 7.0)
        alpha = rng.uniform(0.3, 1.4)
        grid = RadialGrid(n, alpha, 3, 0.25, 4.0, ns, sphere)
        pres = random_product_pressure(grid, rng)
        out.append(lemma_first_residual(pres, n=n, alpha=alpha))
    return out


def lemma_second_suite(seeds, base_seed=0, nmu=64, nphi=64, alpha_below_fs=True):
    sphere = SphereGrid(3, nmu=nmu, nphi=nphi)
    out = []
    for k in range(seeds):
        rng = np.random.default_rng(base_seed + k)
        n = rng.uniform(3.5, 8.0)
        afs = math.sqrt(2.0 / (n - 1.0))
        alpha = afs * rng.uniform(0.2, 1.0) if alpha_below_fs else afs * rng.uniform(1.05, 2.0)
        pres = random_sphere_pressure(sphere, rng)
        out.append(lemma_second_check(pres, n, alpha))
    return out


def bochner_suite(seeds, base_seed=0, nmu=48, nphi=48, degree=8):
    sphere = SphereGrid(3, nmu=nmu, nphi=nphi)
    out = []
    for k in range(seeds):
        rng = np.random.default_rng(base_seed + k)
        f = Field(sphere, sphere.random_band_limited(degree, rng, terms=6))
        out.append(bochner_residual(f))
    return out


def sobolev_hessian_suite(seeds, base_seed=0, d=2, npts=192, length=6.0):
    box = BoxGrid(d, length, npts)
    out = []
    for k in range(seeds):
        rng = np.random.default_rng(base_seed + k)
        pres = random_box_pressure(box, rng)
        out.append(sobolev_hessian_decomposition(pres))
    return out


def random_flow_state(rng, ns=4000, s_max=400.0):
    """Strictly positive radial state with tails steeper than self-similar decay."""
    n = rng.uniform(3.5, 6.0)
    alpha = rng.uniform(0.3, 1.2)
    grid = RadialGrid(n, alpha, 3, 1e-3, s_max, ns, None)
    x = grid.x
    bump = np.zeros_like(x)
    for c, x0, w0 in zip(rng.uniform(0.05, 0.25, 3), rng.uniform(-0.7, 1.2, 3),
                         rng.uniform(0.35, 0.8, 3)):
        bump += c * np.exp(-((x - x0) / w0) ** 2)
    base = (1.0 + grid.s ** 2 / (2.0 * (n - 1.0) * alpha ** 2)) ** (-2.0 * n)
    v = (1.0 + bump) * base
    dp = _dp_from_n_alpha(n, alpha)
    return Field(grid, v[:, None], positive=True), dp


def djdt_suite(seeds, base_seed=0, ns=4000):
    out = []
    for k in range(seeds):
        rng = np.random.default_rng(base_seed + k)
        vfld, dp = random_flow_state(rng, ns=ns)
        u = Field(vfld.grid, vfld.values ** (1.0 / dp.p), positive=True)
        rep = djdt_identity(u, dp)
        out.append(IdentityReport(lhs=rep["lhs"], rhs=rep["rhs"], residual=rep["mismatch"],
                                  term_breakdown=[("scale", rep["scale"])]))
    return out


def run_suite(name, seeds, base_seed=0):
    if name == "lemma-first":
        return lemma_first_suite(seeds, base_seed)
    if name == "lemma-second":
        return lemma_second_suite(seeds, base_seed)
    if name == "bochner":
        return bochner_suite(seeds, base_seed)
    if name == "sobolev-hessian":
        return sobolev_hessian_suite(seeds, base_seed)
    if name == "djdt":
        return djdt_suite(seeds, base_seed)
    raise DomainError(f"unknown verification suite {name!r}; choose from {SUITES}")
