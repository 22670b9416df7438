"""Measurable quantities derived from scattering waves and Green functions.

Sign conventions (hbar = 1):

* ``j = (Im[psi* grad psi] - qA |psi|^2) / m``;
* ``div j = -2 Im[sigma* psi]``, so the total current leaving the source is
  ``J = -2 Im <sigma|G|sigma> >= 0``;
* local density of states ``n(r; E) = -Im G(r, r; E) / pi``.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.optimize import minimize_scalar
from scipy.signal import argrelextrema, find_peaks, peak_widths

from ._parallel import pairwise_sum
from .greens import coincidence_im
from .propagators import vector_potential
from .sources import GridSpec, gaussian_shift, scatter_points, sigma_eval

__all__ = [
    "GridTooCoarse", "CurrentField", "Spectrum", "Sphere", "Plane", "CurrentSampler",
    "current_density", "divergence", "continuity_residual", "total_current",
    "source_term_integral", "flux_through_surface", "dos", "spectrum_peaks",
    "schrodinger_residual", "fringe_visibility",
]


class GridTooCoarse(ValueError):
    """Second- and fourth-order derivatives disagree by more than the allowed margin."""


# ---------------------------------------------------------------------------
# finite differences

def _shift(f, k, axis):
    return np.roll(f, -k, axis=axis)


def _d4(f, h, axis):
    """Fourth-order central first derivative; NaN within two points of the edge."""
    out = (-_shift(f, 2, axis) + 8 * _shift(f, 1, axis) - 8 * _shift(f, -1, axis)
           + _shift(f, -2, axis)) / (12.0 * h)
    return _blank_edges(out, axis, 2)


def _d2(f, h, axis):
    out = (_shift(f, 1, axis) - _shift(f, -1, axis)) / (2.0 * h)
    return _blank_edges(out, axis, 1)


def _dd4(f, h, axis):
    """Fourth-order central second derivative."""
    out = (-_shift(f, 2, axis) + 16 * _shift(f, 1, axis) - 30 * f + 16 * _shift(f, -1, axis)
           - _shift(f, -2, axis)) / (12.0 * h * h)
    return _blank_edges(out, axis, 2)


def _blank_edges(a, axis, w):
    a = a.astype(complex if np.iscomplexobj(a) else float, copy=True)
    idx = [slice(None)] * a.ndim
    idx[axis] = np.r_[0:w, a.shape[axis] - w:a.shape[axis]]
    a[tuple(idx)] = np.nan
    return a


def _uniform_spacing(grid):
    hs = []
    for ax in grid.axes:
        if ax.size < 5:
            raise ValueError("current needs at least 5 points along every axis")
        d = np.diff(ax)
        if np.ptp(d) > 1e-9 * abs(d[0]):
            raise ValueError("finite differences need uniform axes")
        hs.append(float(d[0]))
    return hs


# ---------------------------------------------------------------------------
# current

@dataclass(frozen=True)
class CurrentField:
    grid: GridSpec
    j: np.ndarray                    # (nx, ny, nz, 3); NaN in the boundary layer
    valid: np.ndarray                # bool mask of interior samples
    divergence_residual: np.ndarray  # NaN where undefined
    order_mismatch: float            # max |grad_2 - grad_4| / max |grad_4|


def _gradient(psi, hs, order):
    d = _d4 if order == 4 else _d2
    return np.stack([d(psi, hs[k], k) for k in range(3)], axis=-1)


def current_density(w, field=None, *, include_gauge=True, max_mismatch=0.05):
    """Current of a :class:`~matterwave.sources.WaveGrid` by 4th-order differences."""
    field = w.field if field is None else field
    hs = _uniform_spacing(w.grid)
    psi = w.psi
    g4 = _gradient(psi, hs, 4)
    g2 = _gradient(psi, hs, 2)
    valid = np.all(np.isfinite(g4), axis=-1)
    scale = np.max(np.abs(g4[valid])) if valid.any() else 0.0
    mismatch = float(np.max(np.abs(g4[valid] - g2[valid])) / scale) if scale > 0 else 0.0
    if mismatch > max_mismatch:
        raise GridTooCoarse(f"2nd/4th order gradients differ by {mismatch:.3g}")
    j = np.imag(np.conj(psi)[..., None] * g4)
    if include_gauge:
        j = j - vector_potential(w.grid.points(), field) * (np.abs(psi) ** 2)[..., None]
    j = j / field.mass
    j[~valid] = np.nan
    div = _divergence(j, hs)
    return CurrentField(w.grid, j, valid, div, mismatch)


def _divergence(j, hs):
    return sum(_d4(j[..., k], hs[k], k) for k in range(3))


def divergence(c):
    return _divergence(c.j, _uniform_spacing(c.grid))


def continuity_residual(w, c, s=None):
    """``div j + 2 Im[sigma* psi]`` on the grid (NaN near the boundary)."""
    if c.grid is not w.grid and c.j.shape[:3] != w.psi.shape:
        raise ValueError("current and wave live on different grids")
    s = w.source if s is None else s
    res = c.divergence_residual.copy()
    if s.kind == "gaussian":
        sig = sigma_eval(s, w.grid.points())
        res = res + 2.0 * np.imag(np.conj(sig) * w.psi)
    return res


class CurrentSampler:
    """Current at arbitrary points from 4th-order stencils on the exact wave.

    Returns ``(j, err)`` where ``err`` compares step ``h`` with ``2h``.
    """

    def __init__(self, source, field, *, h=1e-3, eta=1e-5, threads=1):
        self.source, self.field, self.h, self.eta, self.threads = source, field, h, eta, threads

    def _grad(self, pts, h):
        offs = np.array([-2, -1, 1, 2], dtype=float)
        coef = np.array([1, -8, 8, -1], dtype=float) / (12.0 * h)
        grads = []
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            stencil = (pts[:, None, :] + offs[None, :, None] * e).reshape(-1, 3)
            v, _ = scatter_points(self.source, self.field, stencil, eta=self.eta, threads=self.threads)
            grads.append(v.reshape(-1, 4) @ coef)
        return np.stack(grads, axis=-1)

    def __call__(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        psi, _ = scatter_points(self.source, self.field, pts, eta=self.eta, threads=self.threads)
        a = vector_potential(pts, self.field)
        out = []
        for h in (self.h, 2 * self.h):
            g = self._grad(pts, h)
            out.append((np.imag(np.conj(psi)[:, None] * g) - a * (np.abs(psi) ** 2)[:, None])
                       / self.field.mass)
        return out[0], np.abs(out[1] - out[0]) / 15.0


# ---------------------------------------------------------------------------
# integrated currents

def total_current(s, field, *, eta=1e-5):
    """``J(E) = -2 Im <sigma|G|sigma>`` (exact for points and, at B = 0, for Gaussians)."""
    if s.kind == "point":
        im = coincidence_im(s.position, s.energy, field, eta=eta)
        return max(-2.0 * abs(s.strength) ** 2 * im, 0.0)
    tau, _, r0p, logc = gaussian_shift(s, field)
    # sigma = S c exp(-tau H)|r0'>, so Im<sigma|G|sigma> = |S c|^2 exp(-2 E tau) Im G(r0', r0')
    im = coincidence_im(tuple(r0p), s.energy, field, eta=eta)
    return max(-2.0 * abs(s.strength) ** 2 * math.exp(2.0 * (logc - s.energy * tau)) * im, 0.0)


def source_term_integral(s, field, *, n=24, eta=1e-5):
    """Volume integral of ``-2 Im[sigma* psi]`` by Gauss-Hermite quadrature (Gaussians only)."""
    if s.kind != "gaussian":
        raise ValueError("the source term of a point source is a delta; use total_current")
    x, wts = np.polynomial.hermite_e.hermegauss(n)
    x = x * s.width
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    pts = np.stack([X, Y, Z], -1).reshape(-1, 3) + np.asarray(s.position)
    W = (wts[:, None, None] * wts[None, :, None] * wts[None, None, :]).ravel() / (2.0 * math.pi) ** 1.5
    psi, _ = scatter_points(s, field, pts, eta=eta)
    return float(-2.0 * np.imag(np.conj(s.strength) * psi) @ W)


@dataclass(frozen=True)
class Sphere:
    center: tuple
    radius: float


@dataclass(frozen=True)
class Plane:
    """Square patch: centre ``point``, unit ``normal``, side ``size``."""
    point: tuple
    normal: tuple
    size: float


def _sphere_nodes(sph, n):
    ct, wct = np.polynomial.legendre.leggauss(n)
    phi = 2.0 * math.pi * (np.arange(2 * n) + 0.5) / (2 * n)
    st = np.sqrt(1.0 - ct ** 2)
    nrm = np.stack([np.outer(st, np.cos(phi)), np.outer(st, np.sin(phi)),
                    np.outer(ct, np.ones_like(phi))], -1).reshape(-1, 3)
    w = np.outer(wct, np.full(phi.size, math.pi / n)).ravel() * sph.radius ** 2
    return np.asarray(sph.center) + sph.radius * nrm, nrm, w


def _plane_nodes(pl, n):
    nv = np.asarray(pl.normal, dtype=float)
    nv = nv / np.linalg.norm(nv)
    tmp = np.array([1.0, 0, 0]) if abs(nv[0]) < 0.9 else np.array([0, 1.0, 0])
    u = np.cross(nv, tmp)
    u /= np.linalg.norm(u)
    v = np.cross(nv, u)
    x, wx = np.polynomial.legendre.leggauss(n)
    x = 0.5 * pl.size * x
    wx = 0.5 * pl.size * wx
    A, B = np.meshgrid(x, x, indexing="ij")
    pts = np.asarray(pl.point) + A.ravel()[:, None] * u + B.ravel()[:, None] * v
    return pts, np.broadcast_to(nv, pts.shape), np.outer(wx, wx).ravel()


def _grid_sampler(c):
    # interpolate on the interior only: the boundary layer is NaN
    inner = tuple(slice(2, -2) for _ in range(3))
    axes = tuple(ax[2:-2] for ax in c.grid.axes)
    comps = []
    for k in range(3):
        jk = c.j[..., k][inner]
        comps.append(RegularGridInterpolator(axes, jk, method="cubic", bounds_error=True))
    lo = [ax[0] for ax in axes]
    hi = [ax[-1] for ax in axes]

    def sample(p):
        if np.any(p < lo) or np.any(p > hi):
            raise ValueError("surface leaves the valid grid region")
        return np.stack([f(p) for f in comps], -1), np.zeros(len(p))
    return sample


def flux_through_surface(c, surface, *, n0=8, rtol=1e-5, nmax=256):
    """``int j.n dA`` with the node count doubled until the change is below ``rtol``.

    ``c`` is a :class:`CurrentField` (cubic interpolation inside the valid
    region) or any callable returning ``(j, err)`` at an (n, 3) point array.
    Returns ``(flux, est_error)``.
    """
    sample = _grid_sampler(c) if isinstance(c, CurrentField) else c
    nodes = _sphere_nodes if isinstance(surface, Sphere) else _plane_nodes
    prev = None
    n = n0
    while True:
        pts, nrm, w = nodes(surface, n)
        j, _ = sample(pts)
        val = float(pairwise_sum(w * np.einsum("ij,ij->i", j, nrm)))
        if prev is not None:
            diff = abs(val - prev)
            if diff <= rtol * max(abs(val), 1e-300) or diff < 1e-14:
                return val, diff
        if 2 * n > nmax:
            raise RuntimeError("surface quadrature did not converge")
        prev, n = val, 2 * n


# ---------------------------------------------------------------------------
# spectra

@dataclass(frozen=True)
class Spectrum:
    energies: np.ndarray
    values: np.ndarray
    eta: float
    kind: str = "dos"
    est_error: np.ndarray = None

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if e.ndim != 1 or e.shape != v.shape or np.any(np.diff(e) <= 0):
            raise ValueError("energies must be strictly increasing and match values")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite spectrum values")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "values", v)


def dos(r, energies, field, *, eta=None):
    """Local density of states ``-Im G(r, r; E) / pi`` over a sweep.

    ``eta`` is the broadening (reported in the result).  B = 0 cases use the
    exact eta -> 0 closed forms; a magnetic field needs ``eta > 0``.
    """
    E = np.asarray(energies, dtype=float)
    if field.magnetic:
        if not eta or eta <= 0:
            raise ValueError("a magnetic field needs a finite broadening eta")
    else:
        eta = 0.0
    vals = np.empty(E.size)
    errs = np.empty(E.size)
    for i, e in enumerate(E):
        v, err, ok = coincidence_im(r, float(e), field, eta=eta or 1e-5, with_error=True)
        if not ok:
            raise RuntimeError(f"coincidence sum did not converge at E={e}")
        vals[i] = -v / math.pi
        errs[i] = err / math.pi
    return Spectrum(E, vals, float(eta), "dos", errs)


def spectrum_peaks(spec, *, prominence=0.05):
    """Peak centres (parabolic refinement) and full widths at half prominence.

    ``prominence`` is relative to the spectrum's maximum.  Returns
    ``(centres, widths)`` in energy units.
    """
    E, v = spec.energies, spec.values
    pk, _ = find_peaks(v, prominence=prominence * np.max(np.abs(v)))
    centres = []
    for p in pk:
        if 0 < p < E.size - 1:
            y0, y1, y2 = v[p - 1], v[p], v[p + 1]
            den = y0 - 2 * y1 + y2
            off = 0.5 * (y0 - y2) / den if den != 0 else 0.0
            centres.append(E[p] + off * (E[p + 1] - E[p - 1]) / 2.0)
        else:
            centres.append(E[p])
    wid = peak_widths(v, pk, rel_height=0.5)[0] if pk.size else np.array([])
    de = np.mean(np.diff(E))
    return np.array(centres), wid * de


# ---------------------------------------------------------------------------
# residuals and fringes

def schrodinger_residual(w, field=None):
    """``(E - H) psi - sigma`` by 4th-order differences (NaN in the boundary layer)."""
    field = w.field if field is None else field
    hs = _uniform_spacing(w.grid)
    psi = w.psi
    m = field.mass
    pts = w.grid.points()
    lap = sum(_dd4(psi, hs[k], k) for k in range(3))
    hpsi = -lap / (2.0 * m) - (pts @ field.force_vec) * psi
    if field.magnetic:
        a = vector_potential(pts, field)
        grad = _gradient(psi, hs, 4)
        hpsi = hpsi + (1j * np.einsum("...k,...k->...", a, grad) + 0.5 * np.sum(a * a, -1) * psi) / m
    res = w.source.energy * psi - hpsi
    if w.source.kind == "gaussian":
        res = res - sigma_eval(w.source, pts)
    return res


def fringe_visibility(x, intensity, refine=None):
    """Contrast ``(I_max - I_min) / (I_max + I_min)`` of the fringes on a cut.

    Only dark fringes count: interior minima flanked by maxima on both sides.
    ``I_max`` is the brightest maximum and ``I_min`` the darkest such
    minimum.  A cut without a dark fringe has visibility 0.  ``refine``
    (optional callable ``x -> I``) polishes each extremum between its
    neighbouring samples.
    """
    x = np.asarray(x, dtype=float)
    I = np.asarray(intensity, dtype=float)
    mx = argrelextrema(I, np.greater)[0]
    mn = argrelextrema(I, np.less)[0]
    dark = [k for k in mn if np.any(mx < k) and np.any(mx > k)]
    if not dark or mx.size == 0:
        return 0.0

    def polish(k, sign):
        # sign +1 polishes a minimum, -1 a maximum
        if refine is None:
            return I[k]
        r = minimize_scalar(lambda t: sign * refine(t), bounds=(x[k - 1], x[k + 1]),
                            method="bounded", options={"xatol": 1e-10 * max(1.0, abs(x[k]))})
        return sign * min(r.fun, sign * I[k])

    imax = max(polish(k, -1) for k in mx)
    imin = min(polish(k, 1) for k in dark)
    return float((imax - imin) / (imax + imin))
