"""Grids, fields, quadrature weights, and the field snapshot format.

Line quadrature uses 4th-order end-corrected trapezoid (Gregory) weights.
For the exponentially decaying profiles this is as accurate as the plain
trapezoid rule (Euler-Maclaurin corrections live at the boundary), and for
generic smooth integrands it matches the 4th-order stencils used everywhere
else.  Total weight is exactly (n-1)h either way.
"""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DomainError
from .jsonio import dumps, fmt_float
from .sphere import SphereGrid


def sphere_volume(d):
    """Vol(S^{d-1}) = 2 pi^{d/2} / Gamma(d/2), via log-Gamma to dodge overflow."""
    if d < 2:
        raise DomainError(f"need d >= 2, got {d}")
    return math.exp(math.log(2.0) + (d / 2.0) * math.log(math.pi) - math.lgamma(d / 2.0))


def gregory_weights(npts, h):
    """4th-order end-corrected trapezoid weights on a uniform grid."""
    if npts < 8:
        raise DomainError("line quadrature needs at least 8 nodes")
    w = np.full(npts, h)
    ends = h * np.array([3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0])
    w[:3] = ends
    w[-3:] = ends[::-1]
    return w


@dataclass
class Field:
    """Grid function with values stored row-major (line x sphere nodes)."""
    grid: object
    values: np.ndarray
    positive: bool = dc_field(default=None)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        expect = self.grid.field_shape
        if self.values.shape != expect:
            raise DomainError(f"field shape {self.values.shape} does not match grid {expect}")
        if self.positive is None:
            self.positive = bool(np.all(self.values > 0.0))
        elif self.positive and not np.all(self.values > 0.0):
            raise DomainError("positivity flag set but field has non-positive entries")

    def copy(self):
        return Field(self.grid, self.values.copy(), self.positive)


class _LineSphereGrid:
    """Shared machinery for line x sphere product grids."""

    sphere: SphereGrid

    def _init_sphere(self, d, sphere):
        if sphere is not None and sphere.d != d:
            raise DomainError(f"sphere grid dimension {sphere.d} != {d}")
        self.sphere = sphere
        if sphere is None:
            self.nomega = 1
            self.omega_weights = np.array([sphere_volume(d)])
        else:
            self.nomega = sphere.nnodes
            self.omega_weights = sphere.weights.ravel()

    @property
    def field_shape(self):
        return (self.nline, self.nomega)

    @property
    def weights(self):
        return self.line_weights[:, None] * self.omega_weights[None, :]

    def integrate_values(self, values):
        return float(np.sum(self.weights * values))

    def to_sphere_shape(self, values):
        return values.reshape((self.nline,) + self.sphere.shape)

    def from_sphere_shape(self, values):
        return values.reshape(self.nline, self.nomega)

    def interior_mask(self, layers=3):
        m = np.zeros(self.field_shape, dtype=bool)
        m[layers:self.nline - layers, :] = True
        return m

    def constant_field(self, c=1.0):
        return Field(self, np.full(self.field_shape, float(c)))

    def field_from_line(self, line_values):
        v = np.broadcast_to(np.asarray(line_values, float)[:, None], self.field_shape).copy()
        return Field(self, v)


class CylinderGrid(_LineSphereGrid):
    """Truncated cylinder [-Z, Z] x S^{d-1}, uniform in z."""

    def __init__(self, d, z_max, nz, sphere=None):
        if nz < 8:
            raise DomainError("cylinder grid needs nz >= 8")
        if z_max <= 0:
            raise DomainError("z_max must be positive")
        self.d = int(d)
        self.z_max = float(z_max)
        self.nz = int(nz)
        self.z = np.linspace(-self.z_max, self.z_max, self.nz)
        self.hz = self.z[1] - self.z[0]
        self.line_weights = gregory_weights(self.nz, self.hz)
        self.nline = self.nz
        self._init_sphere(self.d, sphere)

    def describe(self):
        return {"kind": "cylinder", "d": self.d, "z_max": self.z_max, "nz": self.nz}


class RadialGrid(_LineSphereGrid):
    """Half line (s_min, s_max) x S^{d-1}, uniform in log(s), measure s^{n-1} ds domega."""

    def __init__(self, n, alpha, d, s_min, s_max, ns, sphere=None):
        if not (s_min > 0 and s_max > s_min):
            raise DomainError("need 0 < s_min < s_max")
        if ns < 8:
            raise DomainError("radial grid needs ns >= 8")
        if not n > 2:
            raise DomainError(f"effective dimension must exceed 2, got n = {n}")
        if not alpha > 0:
            raise DomainError(f"need alpha > 0, got {alpha}")
        self.n = float(n)
        self.alpha = float(alpha)
        self.d = int(d)
        self.s_min, self.s_max = float(s_min), float(s_max)
        self.ns = int(ns)
        self.x = np.linspace(math.log(s_min), math.log(s_max), self.ns)
        self.hx = self.x[1] - self.x[0]
        self.s = np.exp(self.x)
        # dmu = s^{n-1} ds = e^{n x} dx on the log grid
        self.line_weights = gregory_weights(self.ns, self.hx) * np.exp(self.n * self.x)
        self.nline = self.ns
        self._init_sphere(self.d, sphere)

    def describe(self):
        return {"kind": "radial", "d": self.d, "n": self.n, "alpha": self.alpha,
                "s_min": self.s_min, "s_max": self.s_max, "ns": self.ns}


class BoxGrid:
    """Uniform Cartesian box [-L, L]^d for flat-space identity checks."""

    def __init__(self, d, length, npts):
        if d not in (2, 3):
            raise DomainError("box grids support d in {2, 3}")
        if npts < 8:
            raise DomainError("box grid needs npts >= 8 per axis")
        self.d = int(d)
        self.length = float(length)
        self.npts = int(npts)
        self.axis = np.linspace(-self.length, self.length, self.npts)
        self.h = self.axis[1] - self.axis[0]
        self.field_shape = (self.npts,) * self.d
        w1 = gregory_weights(self.npts, self.h)
        if d == 2:
            self.weights = np.einsum("i,j->ij", w1, w1)
        else:
            self.weights = np.einsum("i,j,k->ijk", w1, w1, w1)

    def meshgrid(self):
        return np.meshgrid(*([self.axis] * self.d), indexing="ij")

    def integrate_values(self, values):
        return float(np.sum(self.weights * values))

    def interior_mask(self, layers=3):
        m = np.zeros(self.field_shape, dtype=bool)
        sl = tuple(slice(layers, self.npts - layers) for _ in range(self.d))
        m[sl] = True
        return m

    def constant_field(self, c=1.0):
        return Field(self, np.full(self.field_shape, float(c)))

    def describe(self):
        return {"kind": "box", "d": self.d, "length": self.length, "npts": self.npts}


def _sphere_token(sphere):
    if sphere is None:
        return {"kind": "none"}
    if sphere.d == 2:
        return {"kind": "circle", "ntheta": sphere.ntheta}
    return {"kind": "s2", "nmu": sphere.nmu, "nphi": sphere.nphi}


def _sphere_from_token(tok):
    if tok["kind"] == "none":
        return None
    if tok["kind"] == "circle":
        return SphereGrid(2, ntheta=tok["ntheta"])
    return SphereGrid(3, nmu=tok["nmu"], nphi=tok["nphi"])


def save_field(path, fld):
    """Text snapshot: header line then one value per line, 17 significant digits."""
    grid = fld.grid
    desc = grid.describe()
    if desc["kind"] == "box":
        raise DomainError("snapshots are defined for line x sphere grids")
    sphere_tok = dumps(_sphere_token(grid.sphere))
    params = dumps(desc)
    if desc["kind"] == "cylinder":
        nz, zmax = grid.nz, grid.z_max
    else:
        nz = grid.ns
        zmax = 0.5 * (math.log(grid.s_max) - math.log(grid.s_min))
    header = f"# d={grid.d} Nz={nz} Z={fmt_float(zmax)} sphere={sphere_tok} params={params}"
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for v in fld.values.ravel():
            fh.write(fmt_float(float(v)) + "\n")


def load_field(path):
    import json

    with open(path) as fh:
        header = fh.readline().strip()
        values = np.array([float(line) for line in fh if line.strip()])
    if not header.startswith("# "):
        raise DomainError("snapshot header missing")
    # header tokens: key=value with JSON values containing no spaces
    tokens = {}
    for part in header[2:].split(" "):
        key, _, val = part.partition("=")
        tokens[key] = val
    sphere = _sphere_from_token(json.loads(tokens["sphere"]))
    params = json.loads(tokens["params"])
    if params["kind"] == "cylinder":
        grid = CylinderGrid(params["d"], params["z_max"], params["nz"], sphere)
    elif params["kind"] == "radial":
        grid = RadialGrid(params["n"], params["alpha"], params["d"],
                          params["s_min"], params["s_max"], params["ns"], sphere)
    else:
        raise DomainError(f"unknown snapshot grid kind {params['kind']!r}")
    return Field(grid, values.reshape(grid.field_shape))
