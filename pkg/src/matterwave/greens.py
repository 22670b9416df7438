"""Energy-dependent Green functions G(r, r'; E).

Convention (hbar = 1): ``G(E) = -i int_0^inf dT K(r, T | r', 0) exp(i (E + i eta) T)``,
which solves ``(E - H) G = delta`` with outgoing waves and gives
``Im G(r, r; E) <= 0``.  Routes:

* closed forms: free space (spherical wave) and the uniform force field
  (Airy / Ci form, evaluated with exponentially scaled Airy functions);
* ``landau_sum``: Landau-level expansion for a magnetic field along z, with
  the longitudinal 1D Green function (free or linear potential) at the
  shifted energies E - (n + 1/2) w_c;
* ``laplace_quadrature``: the defining time integral on a deformed contour,
  repeated at eta, eta/2, eta/4 and Richardson-extrapolated to eta -> 0;
* :func:`g_laplace_real_axis`: an independent real-axis evaluation at
  eta = 0 (oscillation pieces + Euler acceleration) used to cross-check the
  contour scheme.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import _accel
from ._accel import njit
from .propagators import FieldConfig, kernel_complex
from .quadrature import (QuadResult, Segment, gk_adaptive, integrate_path, line,
                         partial_oscillations, ray)
from .specfun import _airy_scalar_nb, airy_array, zeta

__all__ = [
    "METHODS", "GreenRequest", "GreenValue", "g_free", "g_free_array", "g_free_coincidence_im",
    "g_field", "g_field_array", "g_field_coincidence_im", "g1d_free", "g1d_field",
    "g_landau", "g_landau_array", "g_crossed_coincidence_im", "g_laplace",
    "g_laplace_real_axis", "laplace_contour", "green", "green_array", "coincidence_im",
    "AIRY_ARG_LIMIT",
]

METHODS = ("closed_form", "laplace_quadrature", "landau_sum", "auto")

# Beyond this the Airy phases lose more than ~1e-10 rad; the closed form then
# hands over to quadrature.
AIRY_ARG_LIMIT = 2.0e4

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GreenRequest:
    r: tuple
    rp: tuple
    energy: float
    eta: float = 1e-5
    field: FieldConfig = FieldConfig()
    method: str = "auto"
    coincidence: bool = False

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(float(v) for v in self.r))
        object.__setattr__(self, "rp", tuple(float(v) for v in self.rp))
        if len(self.r) != 3 or len(self.rp) != 3:
            raise ValueError("r and rp must be 3-vectors")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.r == self.rp and not self.coincidence:
            raise ValueError("coincident points: only Im G(r, r) is finite; set coincidence=True")

    @property
    def distance(self):
        return float(np.linalg.norm(np.subtract(self.r, self.rp)))


@dataclass(frozen=True)
class GreenValue:
    value: complex
    method_used: str
    est_error: float = 0.0
    converged: bool = True

    def __complex__(self):
        return complex(self.value)


def _dist(r, rp):
    d = float(np.linalg.norm(np.subtract(np.asarray(r, float), np.asarray(rp, float))))
    if d == 0.0:
        raise ValueError("coincident points: the real part of G diverges")
    return d


# ---------------------------------------------------------------------------
# free space

def _wavenumber(E, m, eta=0.0):
    # principal root; Im k >= 0 for E + i eta in the closed upper half plane
    return np.sqrt(2.0 * m * (np.asarray(E) + 1j * eta) + 0j)


def g_free_array(d, E, mass=1.0, eta=0.0):
    d = np.asarray(d, dtype=float)
    k = _wavenumber(E, mass, eta)
    return -(mass / _TWO_PI) * np.exp(1j * k * d) / d


def g_free(r, rp, E, mass=1.0, eta=0.0):
    """Spherical outgoing wave ``-(m / 2 pi) exp(i k d) / d``."""
    d = _dist(r, rp)
    v = complex(g_free_array(d, E, mass, eta))
    return GreenValue(v, "closed_form", 1e-15 * abs(v) * (1.0 + abs(math.sqrt(2 * mass * abs(E))) * d))


def g_free_coincidence_im(E, mass=1.0):
    """``Im G(r, r; E) = -m k / 2 pi`` for E > 0, else 0."""
    return -mass * math.sqrt(2.0 * mass * E) / _TWO_PI if E > 0 else 0.0


def g1d_free(z, zp, E, mass=1.0, eta=0.0):
    """1D outgoing Green function ``-i (m / k) exp(i k |z - z'|)``."""
    k = _wavenumber(E, mass, eta)
    return -1j * mass / k * np.exp(1j * k * np.abs(np.asarray(z, float) - np.asarray(zp, float)))


# ---------------------------------------------------------------------------
# uniform force field, closed form

def _field_args(d, eps, fmag, m):
    kappa = (2.0 * m * fmag) ** (1.0 / 3.0)
    u = eps / fmag
    return kappa, -kappa * (u - 0.5 * d), -kappa * (u + 0.5 * d)


def _ai_ci(a, b):
    """``Ai'(a) Ci(b) - Ai(a) Ci'(b)`` and ``Ai(a) Ci(b)`` without overflow (a >= b)."""
    sa = airy_array(a, scaled=True)
    sb = airy_array(b, scaled=True)
    za, zb = zeta(a), zeta(b)
    e_re = np.exp(zb - za)
    e_im = np.exp(-za - zb)
    w_re = e_re * (sa[1] * sb[2] - sa[0] * sb[3])
    w_im = e_im * (sa[1] * sb[0] - sa[0] * sb[1])
    p_re = e_re * sa[0] * sb[2]
    p_im = e_im * sa[0] * sb[0]
    return w_re + 1j * w_im, p_re + 1j * p_im


def g_field_array(r, rp, E, field):
    """Vectorised closed form for ``B = 0``; ``r`` may be (..., 3), ``rp`` a 3-vector."""
    r = np.asarray(r, dtype=float)
    rp = np.asarray(rp, dtype=float)
    F = field.force_vec
    fmag = field.force_magnitude
    m = field.mass
    d = np.linalg.norm(r - rp, axis=-1)
    if fmag == 0.0:
        return g_free_array(d, E, m)
    eps = E + 0.5 * ((r + rp) @ F)
    _, a, b = _field_args(d, eps, fmag, m)
    w, _ = _ai_ci(a, b)
    return 0.5 * m / d * w


def g_field(r, rp, E, field, *, eta=1e-5):
    """Uniform-field Green function ``(m / 2d) [Ai'(a) Ci(b) - Ai(a) Ci'(b)]``.

    ``a, b = -kappa (eps / F -+ d / 2)`` with ``kappa = (2 m F)^(1/3)`` and
    ``eps = E + F.(r + r') / 2``.  Arguments beyond :data:`AIRY_ARG_LIMIT`
    fall back to :func:`g_laplace` (``method_used`` says so).
    """
    if field.magnetic:
        raise ValueError("g_field needs B = 0")
    d = _dist(r, rp)
    if field.force_magnitude == 0.0:
        return g_free(r, rp, E, field.mass)
    eps = E + 0.5 * float(np.add(r, rp) @ field.force_vec)
    _, a, b = _field_args(d, eps, field.force_magnitude, field.mass)
    if max(abs(a), abs(b)) > AIRY_ARG_LIMIT:
        gv = g_laplace(GreenRequest(r, rp, E, eta, field, "laplace_quadrature"))
        return GreenValue(gv.value, "laplace_quadrature", gv.est_error, gv.converged)
    v = complex(g_field_array(np.asarray(r, float), rp, E, field))
    return GreenValue(v, "closed_form", 1e-13 * abs(v) * (1.0 + abs(b)))


def g_field_coincidence_im(r, E, field):
    """``Im G(r, r; E) = -(m kappa / 2) (Ai'(x)^2 - x Ai(x)^2)``, ``x = -kappa (E + F.r) / F``."""
    m = field.mass
    fmag = field.force_magnitude
    if fmag == 0.0:
        return g_free_coincidence_im(E, m)
    eps = E + float(np.asarray(r, float) @ field.force_vec)
    kappa = (2.0 * m * fmag) ** (1.0 / 3.0)
    x = -kappa * eps / fmag
    ai, aip, _, _ = airy_array(np.array([x]))
    return float(-0.5 * m * kappa * (aip[0] ** 2 - x * ai[0] ** 2))


def g1d_field(z, zp, E, force, mass=1.0):
    """1D Green function in the potential ``-force * z``: ``-(2 pi m / kappa) Ai(a) Ci(b)``."""
    z = np.asarray(z, float)
    zp = np.asarray(zp, float)
    if force == 0.0:
        return g1d_free(z, zp, E, mass)
    f = abs(force)
    d = np.abs(z - zp)
    eps = E + 0.5 * force * (z + zp)
    kappa, a, b = _field_args(d, eps, f, mass)
    _, p = _ai_ci(a, b)
    return -(_TWO_PI * mass / kappa) * p


# ---------------------------------------------------------------------------
# Landau levels: B along z, force parallel to B

@njit
def _g1d_term_nb(En, dz, ezs, m, fz, eta, im_only):
    """1D Green function at level energy ``En``; returns (complex value, bound)."""
    if fz == 0.0:
        k = np.sqrt(2.0 * m * complex(En, eta))
        g = -1j * m / k * np.exp(1j * k * dz)
        if im_only:
            return complex(0.0, g.imag), abs(g.imag)
        return g, abs(g)
    f = abs(fz)
    kappa = (2.0 * m * f) ** (1.0 / 3.0)
    u = (En + ezs) / f
    a = -kappa * (u - 0.5 * dz)
    b = -kappa * (u + 0.5 * dz)
    ai_a, aip_a, bi_a, bip_a = _airy_scalar_nb(a, True)
    ai_b, aip_b, bi_b, bip_b = _airy_scalar_nb(b, True)
    za = 2.0 / 3.0 * a * math.sqrt(a) if a > 0.0 else 0.0
    zb = 2.0 / 3.0 * b * math.sqrt(b) if b > 0.0 else 0.0
    pre = -2.0 * math.pi * m / kappa
    im = pre * ai_a * ai_b * math.exp(-za - zb)
    if im_only:
        return complex(0.0, im), abs(im)
    re = pre * ai_a * bi_b * math.exp(zb - za)
    return complex(re, im), math.hypot(re, im)


@njit
def _landau_point_nb(xperp, chi, dz, ezs, E, eta, m, w, fz, tol, nmax, im_only):
    pref = m * w / (2.0 * math.pi)
    lag_prev = 0.0
    lag = math.exp(-0.5 * xperp)  # exp(-x/2) L_0(x)
    e_open = E + ezs + 0.5 * abs(fz) * dz + 10.0 * max(eta, w)
    n_open = int(max(0.0, e_open / w - 0.5)) + 1
    total = 0.0 + 0.0j
    prev_bound = math.inf
    big = 0.0
    err = math.inf
    converged = False
    n = 0
    lorentz_tail = im_only and fz == 0.0
    while n < nmax:
        En = E - (n + 0.5) * w
        g, bound = _g1d_term_nb(En, dz, ezs, m, fz, eta, im_only)
        total += pref * lag * g
        bound *= pref
        big = max(big, bound)
        if n >= n_open + 10:
            if lorentz_tail:
                # remaining levels by the midpoint integral of -m Re(1/k)
                if -En > 200.0 * max(eta, w):
                    c = E - 0.5 * w
                    tail = -math.sqrt(0.5 * m) * (2.0 / w) * np.sqrt(complex(c - w * (n + 0.5), eta)).real
                    total += complex(0.0, pref * tail)
                    err = abs(pref * tail) * 1e-3 + bound
                    converged = True
                    n += 1
                    break
            else:
                ratio = bound / prev_bound if prev_bound > 0.0 else 0.0
                if ratio < 1.0:
                    tail = bound * ratio / (1.0 - ratio)
                    # floor: rounding already limits the sum to ~eps * largest term
                    if tail <= tol * abs(total) + 1e-13 * big or bound == 0.0:
                        err = tail
                        converged = True
                        n += 1
                        break
        prev_bound = bound
        # exp(-x/2) L_{n+1}(x) = ((2n + 1 - x) L_n - n L_{n-1}) / (n + 1)
        lag_next = ((2.0 * n + 1.0 - xperp) * lag - n * lag_prev) / (n + 1.0)
        lag_prev = lag
        lag = lag_next
        n += 1
    if not converged:
        err = prev_bound * n
    val = total * complex(math.cos(chi), math.sin(chi))
    return val, err, n, converged


@njit
def _landau_many_nb(xperp, chi, dz, ezs, E, eta, m, w, fz, tol, nmax, im_only):
    npts = xperp.shape[0]
    val = np.empty(npts, dtype=np.complex128)
    err = np.empty(npts)
    nterm = np.empty(npts, dtype=np.int64)
    conv = np.empty(npts, dtype=np.bool_)
    for i in range(npts):
        val[i], err[i], nterm[i], conv[i] = _landau_point_nb(
            xperp[i], chi[i], dz[i], ezs[i], E, eta, m, w, fz, tol, nmax, im_only)
    return val, err, nterm, conv


def _g1d_terms_np(En, dz, ezs, m, fz, eta, im_only):
    if fz == 0.0:
        k = np.sqrt(2.0 * m * (En + 1j * eta))
        g = -1j * m / k * np.exp(1j * k * dz)
        if im_only:
            g = 1j * g.imag
        return g, np.abs(g)
    f = abs(fz)
    kappa = (2.0 * m * f) ** (1.0 / 3.0)
    u = (En + ezs) / f
    a = -kappa * (u - 0.5 * dz)
    b = -kappa * (u + 0.5 * dz)
    sa = airy_array(a, scaled=True)
    sb = airy_array(b, scaled=True)
    za, zb = zeta(a), zeta(b)
    pre = -_TWO_PI * m / kappa
    im = pre * sa[0] * sb[0] * np.exp(-za - zb)
    if im_only:
        return 1j * im, np.abs(im)
    re = pre * sa[0] * sb[2] * np.exp(zb - za)
    return re + 1j * im, np.hypot(re, im)


def _landau_many_np(xperp, chi, dz, ezs, E, eta, m, w, fz, tol, nmax, im_only):
    npts = xperp.shape[0]
    pref = m * w / _TWO_PI
    total = np.zeros(npts, dtype=complex)
    err = np.full(npts, np.inf)
    nterm = np.zeros(npts, dtype=np.int64)
    conv = np.zeros(npts, dtype=bool)
    lag_prev = np.zeros(npts)
    lag = np.exp(-0.5 * xperp)
    e_open = E + ezs + 0.5 * abs(fz) * dz + 10.0 * max(eta, w)
    n_open = np.floor(np.maximum(0.0, e_open / w - 0.5)).astype(np.int64) + 1
    prev_bound = np.full(npts, np.inf)
    big = np.zeros(npts)
    active = np.ones(npts, dtype=bool)
    lorentz_tail = im_only and fz == 0.0
    for n in range(nmax):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        En = E - (n + 0.5) * w
        g, bound = _g1d_terms_np(En, dz[idx], ezs[idx], m, fz, eta, im_only)
        total[idx] += pref * lag[idx] * g
        bound = pref * bound
        big[idx] = np.maximum(big[idx], bound)
        nterm[idx] = n + 1
        check = n >= n_open[idx] + 10
        if lorentz_tail:
            if -En > 200.0 * max(eta, w):
                c = E - 0.5 * w
                tail = -math.sqrt(0.5 * m) * (2.0 / w) * np.sqrt(complex(c - w * (n + 0.5), eta)).real
                done = idx[check]
                total[done] += 1j * pref * tail
                err[done] = abs(pref * tail) * 1e-3 + bound[check]
                conv[done] = True
                active[done] = False
        else:
            pb = prev_bound[idx]
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(pb > 0, bound / pb, 0.0)
                tail = bound * ratio / (1.0 - ratio)
            ok = check & (ratio < 1.0) & ((tail <= tol * np.abs(total[idx]) + 1e-13 * big[idx]) | (bound == 0.0))
            done = idx[ok]
            err[done] = tail[ok]
            conv[done] = True
            active[done] = False
        prev_bound[idx] = bound
        lag_next = ((2.0 * n + 1.0 - xperp) * lag - n * lag_prev) / (n + 1.0)
        lag_prev, lag = lag, lag_next
    left = ~conv
    err[left] = prev_bound[left] * nterm[left]
    total *= np.exp(1j * chi)
    return total, err, nterm, conv


def _landau_geometry(r, rp, field):
    r = np.atleast_2d(np.asarray(r, dtype=float))
    rp = np.asarray(rp, dtype=float)
    m = field.mass
    w = field.omega_c
    dperp2 = (r[:, 0] - rp[0]) ** 2 + (r[:, 1] - rp[1]) ** 2
    xperp = 0.5 * m * w * dperp2
    chi = 0.5 * m * field.omega_signed * (rp[0] * r[:, 1] - r[:, 0] * rp[1])
    dz = np.abs(r[:, 2] - rp[2])
    fz = field.force_parallel
    ezs = 0.5 * fz * (r[:, 2] + rp[2])
    return xperp, chi, dz, ezs


def g_landau_array(r, rp, E, field, *, eta=1e-5, tol=1e-10, nmax=400000, im_only=False):
    """Landau-level sum at many field points ``r`` (n, 3) for one source ``rp``.

    Returns ``(values, est_error, n_levels, converged)``.  ``eta`` only
    enters when the force along z vanishes (it broadens the free 1D parts).
    """
    if not field.magnetic:
        raise ValueError("g_landau needs B > 0")
    if np.any(field.force_perp != 0):
        raise ValueError("off-diagonal Landau sums need the force parallel to B")
    geo = [np.ascontiguousarray(g) for g in _landau_geometry(r, rp, field)]
    args = (float(E), float(eta), field.mass, field.omega_c, float(field.force_parallel),
            float(tol), int(nmax), bool(im_only))
    if _accel.USE_NUMBA:
        return _landau_many_nb(*geo, *args)
    return _landau_many_np(*geo, *args)


def g_landau(r, rp, E, field, *, eta=1e-5, tol=1e-10, nmax=400000, coincidence=False):
    """Green function as a sum over Landau levels.

    For a force parallel to B the transverse Landau projector
    ``(m w / 2 pi) exp(i chi) exp(-x/2) L_n(x)`` multiplies the 1D Green
    function at ``E - (n + 1/2) w``.  With ``coincidence=True`` only
    ``i Im G(r, r)`` is returned; a force perpendicular to B is then allowed
    (guiding-centre average, see :func:`g_crossed_coincidence_im`).
    """
    if coincidence:
        if not np.allclose(r, rp):
            raise ValueError("coincidence=True needs r == rp")
        if np.any(field.force_perp != 0):
            v, e, conv = g_crossed_coincidence_im(r, E, field, eta=eta, tol=tol)
            return GreenValue(1j * v, "landau_sum", e, conv)
        val, err, _, conv = g_landau_array(np.asarray(r, float)[None], rp, E, field, eta=eta,
                                           tol=tol, nmax=nmax, im_only=True)
        return GreenValue(complex(val[0]), "landau_sum", float(err[0]), bool(conv[0]))
    _dist(r, rp)
    val, err, _, conv = g_landau_array(np.asarray(r, float)[None], rp, E, field, eta=eta,
                                       tol=tol, nmax=nmax)
    return GreenValue(complex(val[0]), "landau_sum", float(err[0]), bool(conv[0]))


def _hermite_sq(n, t):
    """``h_n(t)^2`` for the normalised Hermite function of order n."""
    h_prev = np.zeros_like(t)
    h = np.pi ** -0.25 * np.exp(-0.5 * t * t)
    for k in range(n):
        h, h_prev = math.sqrt(2.0 / (k + 1)) * t * h - math.sqrt(k / (k + 1.0)) * h_prev, h
    return h * h


def _im_g1d_coinc(Ez, m, fz, eta):
    if fz == 0.0:
        return -m * np.real(1.0 / np.sqrt(2.0 * m * (Ez + 1j * eta)))
    f = abs(fz)
    kappa = (2.0 * m * f) ** (1.0 / 3.0)
    ai = airy_array(-kappa * Ez / f)[0]
    return -(_TWO_PI * m / kappa) * ai * ai


def g_crossed_coincidence_im(r, E, field, *, eta=1e-2, tol=1e-8, nmax=100000):
    """``Im G(r, r; E)`` with B along z and a force with a transverse part.

    Landau states are labelled by their guiding centre; the transverse
    force shifts a level by ``F_perp l t`` across the cyclotron orbit
    (``t`` in units of the magnetic length ``l``) and lowers it by the drift
    energy ``F_perp^2 / (2 m w^2)``.  The local DOS therefore averages the 1D
    density of the longitudinal motion over ``h_n(t)^2``.

    Returns ``(value, est_error, converged)``.
    """
    if not field.magnetic:
        raise ValueError("crossed-field DOS needs B > 0")
    m = field.mass
    w = field.omega_c
    ell = 1.0 / math.sqrt(m * w)
    fp = field.force_perp
    fperp = float(np.hypot(*fp))
    fz = float(field.force_parallel)
    r = np.asarray(r, float)
    shift = E + float(fp @ r[:2]) + fz * r[2] - fperp ** 2 / (2.0 * m * w * w)
    pref = m * w / _TWO_PI
    e_open = shift + 10.0 * max(eta, w)
    total = 0.0
    err = 0.0
    conv = True
    n = 0
    while n < nmax:
        c = shift - (n + 0.5) * w
        half = math.sqrt(2.0 * n + 1.0) + 8.0
        if fperp == 0.0:
            val = float(_im_g1d_coinc(np.array([c]), m, fz, eta)[0])
            res_err = 0.0
        else:
            def f(t, n=n, c=c):
                return _hermite_sq(n, t) * _im_g1d_coinc(c + fperp * ell * t, m, fz, eta)
            t0 = -c / (fperp * ell)
            cuts = sorted({-half, half, *( [t0] if -half < t0 < half else [])})
            val = 0.0
            res_err = 0.0
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                q = gk_adaptive(f, lo, hi, rtol=1e-10, atol=1e-14, min_intervals=8)
                val += float(np.real(q.value))
                res_err += q.error
                conv &= q.converged
        total += pref * val
        err += pref * res_err
        n += 1
        if (n + 0.5) * w > e_open + fperp * ell * (math.sqrt(2.0 * n + 1.0) + 8.0):
            if fz == 0.0:
                # levels n, n+1, ... lie well below threshold: the t-average is
                # flat there, sum the Lorentzian tails by the midpoint integral
                tail = -math.sqrt(0.5 * m) * (2.0 / w) * np.sqrt(complex(shift - w * n, eta)).real
                total += pref * tail
                err += 1e-2 * abs(pref * tail)
                break
            elif abs(pref * val) <= tol * max(abs(total), 1e-300):
                break
    else:
        conv = False
    return float(total), float(err), bool(conv)


# ---------------------------------------------------------------------------
# Laplace transform on a deformed contour

def _const(m, dim):
    # -i (m / 2 pi)^(dim/2) (i)^(-dim/2): the kernel prefactor without T^(-dim/2)
    return -1j * (m / _TWO_PI) ** (0.5 * dim) * np.exp(-0.25j * math.pi * dim)


def _gd(x):
    return 2.0 * np.arctan(np.tanh(0.5 * x))


def _free_segments(A, Ec):
    """Steepest-descent-like path for ``exp(i (A/T + Ec T))`` through ``T* = sqrt(A/Ec)``."""
    Ts = np.sqrt(A / Ec + 0j)
    alpha = float(np.angle(np.sqrt(Ec + 0j)))
    c = 1.0 - 2.0 * alpha / math.pi
    q = abs(math.sqrt(abs(A * Ec)))
    X = math.log(max(60.0 / max(q, 1e-300), 1.0)) + 4.0
    def point(s):
        x = -X + 2.0 * X * s
        return Ts * np.exp(x + 1j * c * _gd(x))

    def deriv(s):
        x = -X + 2.0 * X * s
        return 2.0 * X * Ts * np.exp(x + 1j * c * _gd(x)) * (1.0 + 1j * c / np.cosh(x))

    return [Segment(point, deriv)]


def _saddles(A, eps, C):
    """Saddles of ``A/T + eps T - C T^3`` in the closed lower-right quadrant."""
    out = []
    for t in np.roots([3.0 * C, 0.0, -eps, 0.0, A]):
        tol = 1e-9 * abs(t)
        re_ = 0.0 if abs(t.real) <= tol else t.real
        im_ = 0.0 if abs(t.imag) <= tol else t.imag
        if re_ >= 0.0 and im_ <= 0.0:
            out.append(complex(re_, im_))
    return sorted(out, key=abs)


def _field_segments(A, eps, C):
    """Polyline through the relevant saddles, then a ray at -pi/6."""
    sad = _saddles(A, eps, C)
    pts = [0.0j]
    for i, s in enumerate(sad):
        d2 = 2.0 * A / s ** 3 - 6.0 * C * s  # phi''
        d3 = -6.0 * A / s ** 4 - 6.0 * C
        if d2 != 0:
            dirn = np.sqrt(1j / d2)
            dirn /= abs(dirn)
        else:
            dirn = np.exp(-0.25j * math.pi)
        if (dirn * np.exp(1j * math.pi / 6)).real < 0:
            dirn = -dirn
        h = 3.0 / math.sqrt(abs(d2)) if d2 != 0 else math.inf
        h = min(h, 2.0 * (3.0 / abs(d3)) ** (1.0 / 3.0), 0.5 * abs(s))
        for j, o in enumerate(sad):
            if j != i:
                h = min(h, 0.4 * abs(o - s))
        pts += [s - h * dirn, s + h * dirn]
    segs = [line(p, q) for p, q in zip(pts[:-1], pts[1:])]
    end = pts[-1]
    scale = max(abs(end), (abs(eps) / (3.0 * C)) ** 0.5 if C > 0 else 1.0, 1.0)
    segs.append(ray(end, np.exp(-1j * math.pi / 6), scale))
    return segs


def laplace_contour(kernel, energy, segments, *, rtol=1e-11):
    """``-i int K(T) exp(i E T) dT`` along ``segments`` (complex ``energy`` allowed)."""
    def f(T):
        with np.errstate(over="ignore", invalid="ignore"):
            v = -1j * kernel(T) * np.exp(1j * energy * T)
        # inf * 0 far out on a ray: the true integrand there is negligible
        return np.where(np.isfinite(v), v, 0.0)

    return integrate_path(f, segments, rtol=rtol)


def _laplace_segments(req):
    f = req.field
    m = f.mass
    A = 0.5 * m * req.distance ** 2
    if f.magnetic:
        if req.distance == 0.0:
            raise ValueError("coincident points")
        if f.force_parallel == 0.0:
            raise ValueError("Laplace contour for B > 0 needs a parallel force (use landau_sum)")
        scale = max(1.0, (abs(req.energy) * 24.0 * m) ** 0.5 / abs(f.force_parallel))
        return [ray(0.0, np.exp(-1j * math.pi / 8), scale)], None
    if f.is_free:
        return None, A
    eps = req.energy + 0.5 * float(np.add(req.r, req.rp) @ f.force_vec)
    C = f.force_magnitude ** 2 / (24.0 * m)
    return _field_segments(A, eps, C), None


def g_laplace(req, *, rtol=1e-11):
    """Numerical Laplace transform of the kernel, extrapolated to eta -> 0.

    The integral is evaluated at ``eta``, ``eta/2`` and ``eta/4`` on the same
    contour and the three values are extrapolated quadratically; the
    difference to the linear extrapolation is added to ``est_error``.
    """
    if req.coincidence or req.distance == 0.0:
        raise ValueError("g_laplace needs distinct points")
    kern = kernel_complex(req.r, req.rp, req.field)
    segs, A = _laplace_segments(req)
    etas = (req.eta, 0.5 * req.eta, 0.25 * req.eta)
    vals = []
    err = 0.0
    ok = True
    for eta in etas:
        Ec = req.energy + 1j * eta
        s = segs if segs is not None else _free_segments(A, Ec)
        q = laplace_contour(kern, Ec, s, rtol=rtol)
        vals.append(q.value)
        err = max(err, q.error)
        ok &= q.converged
    g1, g2, g4 = vals
    lin = 2.0 * g4 - g2
    quad = (8.0 * g4 - 6.0 * g2 + g1) / 3.0
    resid = abs(lin - quad)
    est = err + resid
    ok &= est <= 1e-6 * abs(quad)
    return GreenValue(complex(quad), "laplace_quadrature", float(est), bool(ok))


def g_laplace_real_axis(req, *, tol=1e-10):
    """Independent eta = 0 evaluation along the real time axis.

    ``(0, b1)`` is mapped by ``u = 1/T`` and summed by oscillation pieces,
    ``(b1, b2)`` is integrated adaptively, and ``(b2, inf)`` is summed by
    oscillation pieces again; both piece series are Euler-accelerated.
    Only for B = 0.
    """
    f = req.field
    if f.magnetic:
        raise ValueError("real-axis scheme is for B = 0")
    m = f.mass
    d = req.distance
    if d == 0.0:
        raise ValueError("g_laplace_real_axis needs distinct points")
    A = 0.5 * m * d * d
    eps = req.energy + 0.5 * float(np.add(req.r, req.rp) @ f.force_vec)
    C = f.force_magnitude ** 2 / (24.0 * m)
    c = _const(m, 3)

    def phase(T):
        return A / T + eps * T - C * T ** 3

    real = sorted(s.real for s in _saddles(A, eps, C) if s.imag == 0.0 and s.real > 0)
    if real:
        b1, b2 = 0.7 * real[0], 1.3 * real[-1]
    else:
        # split where |phi'| is smallest so both piece series start slowly
        b1 = b2 = math.sqrt(A / max(abs(eps), 1e-12)) if C == 0 else (A / (3.0 * C)) ** 0.25
    head = partial_oscillations(lambda u: c * u ** -0.5, lambda u: phase(1.0 / u), 1.0 / b1,
                                increasing=True, tol=tol, max_pieces=20000)
    mid = QuadResult(0.0, 0.0, True, 0)
    if b2 > b1:
        mid = gk_adaptive(lambda T: c * T ** -1.5 * np.exp(1j * phase(T)), b1, b2, rtol=1e-12,
                          min_intervals=16)
    rising = C == 0.0 and eps > 0.0
    tail = partial_oscillations(lambda T: c * T ** -1.5, phase, b2, increasing=rising,
                                tol=tol, max_pieces=20000)
    v = head.value + mid.value + tail.value
    est = head.error + mid.error + tail.error
    return GreenValue(complex(v), "laplace_real_axis", float(est),
                      bool(head.converged and mid.converged and tail.converged))


# ---------------------------------------------------------------------------
# dispatch

def _auto_method(field):
    return "landau_sum" if field.magnetic else "closed_form"


def green(req):
    """Evaluate a :class:`GreenRequest` by its ``method`` (``auto`` picks the fastest exact route)."""
    method = _auto_method(req.field) if req.method == "auto" else req.method
    if req.coincidence:
        v, e, ok = coincidence_im(req.r, req.energy, req.field, eta=req.eta, with_error=True)
        return GreenValue(1j * v, "landau_sum" if req.field.magnetic else "closed_form", e, ok)
    if method == "laplace_quadrature":
        return g_laplace(req)
    if method == "landau_sum":
        return g_landau(req.r, req.rp, req.energy, req.field, eta=req.eta)
    if req.field.magnetic:
        raise ValueError("no closed form with B > 0; use landau_sum")
    return g_field(req.r, req.rp, req.energy, req.field, eta=req.eta)


def coincidence_im(r, E, field, *, eta=1e-5, with_error=False):
    """``Im G(r, r; E)`` for any supported field configuration."""
    if field.magnetic:
        if np.any(field.force_perp != 0):
            v, e, ok = g_crossed_coincidence_im(r, E, field, eta=eta)
        else:
            gv = g_landau(r, r, E, field, eta=eta, coincidence=True)
            v, e, ok = gv.value.imag, gv.est_error, gv.converged
    elif field.is_free:
        v, e, ok = g_free_coincidence_im(E, field.mass), 0.0, True
    else:
        v = g_field_coincidence_im(r, E, field)
        e, ok = 1e-13 * abs(v), True
    return (v, e, ok) if with_error else v


def green_array(points, rp, E, field, *, eta=1e-5, tol=1e-10):
    """``G(points, rp; E)`` for an (n, 3) array; returns ``(values, est_error)``.

    Uses the closed form for B = 0 and the Landau sum otherwise.  Points
    whose Airy arguments exceed :data:`AIRY_ARG_LIMIT` are redone by
    quadrature one by one.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    rp = np.asarray(rp, dtype=float)
    if np.any(np.all(pts == rp, axis=1)):
        raise ValueError("a grid point coincides with the source")
    if field.magnetic:
        v, e, _, conv = g_landau_array(pts, rp, E, field, eta=eta, tol=tol)
        e = np.where(conv, e, np.inf)
        return v, e
    v = g_field_array(pts, rp, E, field)
    e = 1e-13 * np.abs(v)
    if field.force_magnitude > 0:
        d = np.linalg.norm(pts - rp, axis=1)
        eps = E + 0.5 * ((pts + rp) @ field.force_vec)
        _, a, b = _field_args(d, eps, field.force_magnitude, field.mass)
        e = e * (1.0 + np.abs(b))
        for i in np.nonzero(np.maximum(np.abs(a), np.abs(b)) > AIRY_ARG_LIMIT)[0]:
            gv = g_laplace(GreenRequest(pts[i], rp, E, eta, field, "laplace_quadrature"))
            v[i], e[i] = gv.value, gv.est_error
    return v, e
