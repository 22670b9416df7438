"""Localized sources and the scattering waves they emit.

A Gaussian source is normalised to its strength:
``sigma(r) = S (2 pi a^2)^(-3/2) exp(-|r - r0|^2 / 2a^2)``.

That profile is the imaginary-time kernel ``K(r, -i tau | r0)`` with
``tau = m a^2``.  In a uniform force field it equals ``S c K_F(r, -i tau | r0')``
with the centre moved against the force by ``delta = F tau^2 / 2m`` and
``c = exp(F^2 tau^3 / 3m - F.r0 tau)``.  Composing the two kernels gives

    psi(r) = S c exp(-E tau) [ G(r, r0'; E) + int_0^tau exp(E s) K_F(r, -i s | r0') ds ]

where the second term is real, positive and negligible a few widths away.
Far from the source a Gaussian therefore acts like a point source at ``r0'``
whose local kinetic energy is lowered to ``E - F delta``.
"""
from dataclasses import dataclass, field as dc_field
import math

import numpy as np

from .greens import green_array
from .propagators import FieldConfig
from ._parallel import map_chunks

__all__ = [
    "SourceSpec", "GridSpec", "WaveGrid", "VirtualSource", "sigma_eval", "gaussian_shift",
    "virtual_point_source", "scatter_points", "scatter_wave",
]


@dataclass(frozen=True)
class SourceSpec:
    kind: str
    position: tuple
    strength: complex
    width: float
    energy: float

    def __post_init__(self):
        if self.kind not in ("point", "gaussian"):
            raise ValueError(f"unknown source kind {self.kind!r}")
        pos = tuple(float(v) for v in self.position)
        if len(pos) != 3:
            raise ValueError("position must be a 3-vector")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "strength", complex(self.strength))
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "energy", float(self.energy))
        if (self.width == 0.0) != (self.kind == "point") or self.width < 0:
            raise ValueError("width must be 0 for a point source and > 0 for a gaussian")

    @classmethod
    def point(cls, position, energy, strength=1.0):
        return cls("point", position, strength, 0.0, energy)

    @classmethod
    def gaussian(cls, position, width, energy, strength=1.0):
        return cls("gaussian", position, strength, width, energy)

    def with_strength(self, strength):
        return SourceSpec(self.kind, self.position, strength, self.width, self.energy)


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned box: three coordinate axes (length-1 axes make planes or lines)."""
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        for name in "xyz":
            a = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if a.ndim != 1 or (a.size > 1 and np.any(np.diff(a) <= 0)):
                raise ValueError(f"axis {name} must be strictly increasing")
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def axes(self):
        return (self.x, self.y, self.z)

    @property
    def shape(self):
        return (self.x.size, self.y.size, self.z.size)

    @property
    def spacing(self):
        """Per-axis spacing (``inf`` for singleton axes); uniform axes are assumed."""
        return tuple(float(a[1] - a[0]) if a.size > 1 else math.inf for a in self.axes)

    def points(self):
        X, Y, Z = np.meshgrid(self.x, self.y, self.z, indexing="ij")
        return np.stack([X, Y, Z], axis=-1)


@dataclass(frozen=True)
class WaveGrid:
    grid: GridSpec
    psi: np.ndarray
    est_error: np.ndarray
    source: SourceSpec
    field: FieldConfig
    scale: object = None
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.psi.shape != self.grid.shape:
            raise ValueError("samples do not match the grid")
        if not np.all(np.isfinite(self.psi)):
            raise ValueError("non-finite wave samples")


@dataclass(frozen=True)
class VirtualSource:
    source: SourceSpec       # point source at the shifted position
    displacement: float      # shift against the force
    effective_energy: float  # E - F delta: kinetic energy at the original centre
    log_prefactor: float     # log of c exp(-E tau), folded into source.strength when finite


def sigma_eval(s, r):
    """Source density at ``r`` (..., 3); point sources have no pointwise value."""
    if s.kind == "point":
        raise ValueError("a point source is a delta distribution; use the Green function directly")
    r = np.asarray(r, dtype=float)
    d2 = np.sum((r - np.asarray(s.position)) ** 2, axis=-1)
    a2 = s.width ** 2
    return s.strength * (2.0 * math.pi * a2) ** -1.5 * np.exp(-0.5 * d2 / a2)


def gaussian_shift(s, field):
    """``(tau, delta, r0', log c)`` of the kernel representation of a Gaussian."""
    if s.kind != "gaussian":
        raise ValueError("gaussian_shift needs a gaussian source")
    if field.magnetic:
        raise ValueError("the kernel representation is implemented for B = 0 only")
    m = field.mass
    tau = m * s.width ** 2
    F = field.force_vec
    fmag = field.force_magnitude
    r0 = np.asarray(s.position)
    if fmag == 0.0:
        return tau, 0.0, r0.copy(), 0.0
    delta = fmag * tau ** 2 / (2.0 * m)
    r0p = r0 - delta * F / fmag
    logc = fmag ** 2 * tau ** 3 / (3.0 * m) - float(F @ r0) * tau
    return tau, delta, r0p, logc


def virtual_point_source(s, field, targets=None):
    """Point source reproducing a Gaussian's far field in a uniform force.

    ``targets`` (optional, (n, 3)) are checked against the far-field
    condition ``distance >= 10 max(a, beta)`` with ``beta = (2 m F)^(-1/3)``.
    """
    tau, delta, r0p, logc = gaussian_shift(s, field)
    fmag = field.force_magnitude
    if targets is not None:
        beta = (2.0 * field.mass * fmag) ** (-1.0 / 3.0) if fmag > 0 else 0.0
        d = np.linalg.norm(np.atleast_2d(targets) - np.asarray(s.position), axis=-1)
        if np.any(d < 10.0 * max(s.width, beta)):
            raise ValueError("target inside the near field of the source")
    logp = logc - s.energy * tau
    strength = s.strength * math.exp(logp) if logp < 700 else s.strength
    pt = SourceSpec.point(tuple(r0p), s.energy, strength)
    return VirtualSource(pt, delta, s.energy - fmag * delta, logp)


# ---------------------------------------------------------------------------
# analytic gaussian wave

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _euclid_correction(pts, r0p, E, field, tau):
    """``int_0^tau exp(E s) K_F(r, -i s | r0') ds`` by graded Gauss-Legendre panels."""
    m = field.mass
    F = field.force_vec
    f2 = float(F @ F)
    d2 = np.sum((pts - r0p) ** 2, axis=-1)
    fsum = (pts + r0p) @ F
    out = np.zeros(pts.shape[0])
    dmin2 = max(float(d2.min()), 1e-300)
    # panels [tau 2^-(k+1), tau 2^-k]; below the last one exp(-m d^2 / 2s) < e^-60
    kmax = int(min(200, max(4, math.ceil(math.log2(max(tau * 120.0 / (m * dmin2), 2.0))) + 2)))
    hi = tau
    for _ in range(kmax):
        lo = 0.5 * hi
        s = 0.5 * (hi + lo) + 0.5 * (hi - lo) * _GL_X
        w = 0.5 * (hi - lo) * _GL_W
        sc = s[None, :]
        expo = (E * sc - 0.5 * m * d2[:, None] / sc + 0.5 * fsum[:, None] * sc
                + f2 * sc ** 3 / (24.0 * m))
        out += ((m / (2.0 * math.pi * sc)) ** 1.5 * np.exp(expo)) @ w
        hi = lo
    return out


def _gaussian_analytic(s, field, pts, eta):
    tau, _, r0p, logc = gaussian_shift(s, field)
    E = s.energy
    logp = logc - E * tau
    if logp > 700:
        raise OverflowError("source prefactor overflows; rescale the strength or energy")
    pref = s.strength * math.exp(logp)
    # within dmin of r0' both terms diverge like 1/d and cancel; extrapolate
    dmin = 1e-3 * s.width
    d = np.linalg.norm(pts - r0p, axis=-1)
    near = d < dmin
    far = ~near
    psi = np.zeros(pts.shape[0], dtype=complex)
    err = np.zeros(pts.shape[0])
    if far.any():
        g, ge = green_array(pts[far], r0p, E, field, eta=eta)
        corr = _euclid_correction(pts[far], r0p, E, field, tau)
        psi[far] = pref * (g + corr)
        err[far] = abs(pref) * ge
    for i in np.nonzero(near)[0]:
        u = pts[i] - r0p
        nrm = np.linalg.norm(u)
        if nrm > 0:
            u = u / nrm
        elif field.force_magnitude > 0:
            u = field.force_vec / field.force_magnitude
        else:
            u = np.array([0.0, 0.0, 1.0])
        hs = np.array([1.0, 2.0, 3.0]) * dmin
        probe = r0p + hs[:, None] * u
        g, _ = green_array(probe, r0p, E, field, eta=eta)
        v = pref * (g + _euclid_correction(probe, r0p, E, field, tau))
        # quadratic through the three probes, evaluated at distance nrm
        coef = np.polyfit(hs, v, 2)
        lin = np.polyfit(hs[:2], v[:2], 1)
        psi[i] = np.polyval(coef, nrm)
        err[i] = abs(np.polyval(lin, nrm) - psi[i])
    return psi, err


# ---------------------------------------------------------------------------
# direct convolution (independent route)

def _gaussian_quadrature(s, field, pts, eta, *, cutoff=6.0, n_rad=40, n_pol=40, n_az=32):
    """Convolution in spherical coordinates centred on the field point.

    ``rho^2`` from the volume element cancels the ``1/rho`` of G, so the
    integrand is bounded.  The polar axis points at the source centre and the
    polar range is limited to the cone containing the truncated support.
    """
    a = s.width
    r0 = np.asarray(s.position)
    R = cutoff * a
    xr, wr = np.polynomial.legendre.leggauss(n_rad)
    xp, wp = np.polynomial.legendre.leggauss(n_pol)
    phi = 2.0 * math.pi * np.arange(n_az) / n_az
    out = np.zeros(pts.shape[0], dtype=complex)
    for i, r in enumerate(pts):
        v = r0 - r
        D = float(np.linalg.norm(v))
        ez = v / D if D > 0 else np.array([0.0, 0.0, 1.0])
        tmp = np.array([1.0, 0.0, 0.0]) if abs(ez[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        ex = np.cross(ez, tmp)
        ex /= np.linalg.norm(ex)
        ey = np.cross(ez, ex)
        if D > R:
            cmin = math.sqrt(1.0 - (R / D) ** 2)
        else:
            cmin = -1.0
        lo, hi = max(0.0, D - R), D + R
        rho = 0.5 * (hi + lo) + 0.5 * (hi - lo) * xr
        wrho = 0.5 * (hi - lo) * wr
        ct = 0.5 * (1.0 + cmin) + 0.5 * (1.0 - cmin) * xp
        wct = 0.5 * (1.0 - cmin) * wp
        st = np.sqrt(1.0 - ct ** 2)
        dirs = (ct[:, None, None] * ez + st[:, None, None] * (np.cos(phi)[None, :, None] * ex
                                                              + np.sin(phi)[None, :, None] * ey))
        dirs = dirs.reshape(-1, 3)
        wdir = np.repeat(wct, n_az) * (2.0 * math.pi / n_az)
        q = r + rho[:, None, None] * dirs[None, :, :]
        flat = q.reshape(-1, 3)
        g, _ = green_array(flat, r, s.energy, field, eta=eta)
        sig = sigma_eval(s, flat)
        f = (g * sig).reshape(rho.size, -1) * (rho ** 2)[:, None]
        out[i] = wrho @ f @ wdir
    return out


def scatter_points(s, field, points, *, method="auto", eta=1e-5, threads=1):
    """``psi_sc`` at an (n, 3) array of points; returns ``(psi, est_error)``.

    ``method``: ``auto``/``analytic`` (kernel representation for Gaussians,
    Green function for points) or ``quadrature`` (direct 3D convolution,
    error from comparing the 6a and 8a truncations).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if method not in ("auto", "analytic", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if s.kind == "point":
        def work(chunk):
            g, e = green_array(chunk, s.position, s.energy, field, eta=eta)
            return s.strength * g, abs(s.strength) * e
    elif method == "quadrature":
        def work(chunk):
            v6 = _gaussian_quadrature(s, field, chunk, eta, cutoff=6.0)
            v8 = _gaussian_quadrature(s, field, chunk, eta, cutoff=8.0)
            return v8, np.abs(v8 - v6)
    else:
        def work(chunk):
            return _gaussian_analytic(s, field, chunk, eta)
    parts = map_chunks(work, pts, threads)
    psi = np.concatenate([p[0] for p in parts])
    err = np.concatenate([np.broadcast_to(p[1], p[0].shape) for p in parts]).astype(float)
    return psi, err


def scatter_wave(s, field, grid, *, method="auto", eta=1e-5, threads=1, scale=None):
    """Scattering wave on a :class:`GridSpec`.

    Point sources require every grid point to stay at least one grid spacing
    away from the source.
    """
    pts = grid.points().reshape(-1, 3)
    if s.kind == "point":
        h = min(grid.spacing)
        if not math.isfinite(h):
            h = 0.0
        d = np.linalg.norm(pts - np.asarray(s.position), axis=-1)
        if np.any(d < max(h, 1e-12)):
            raise ValueError("grid point inside the standoff around the point source")
    psi, err = scatter_points(s, field, pts, method=method, eta=eta, threads=threads)
    return WaveGrid(grid, psi.reshape(grid.shape), err.reshape(grid.shape), s, field, scale)
