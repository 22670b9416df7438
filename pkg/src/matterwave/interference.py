"""Two-path interference: point-aperture double slits and the uniform-field
"double slit" formed by the two classical trajectories to each point.

In a uniform force ``F`` the phase of the time integral for ``G`` is

    W(T) = m d^2 / 2T + F.(r + r') T / 2 - F^2 T^3 / 24 m + E T,

and ``W'(T) = 0`` is the biquadratic ``F^2 T^4 - 8 m eps T^2 + 4 m^2 d^2 = 0``
with ``eps = E + F.(r + r') / 2``.  Inside the paraboloid ``F d < 2 eps`` it
has two positive roots.  The shorter one is the direct path and the longer
one first climbs against the force.
"""
from dataclasses import dataclass
import math
import warnings

import numpy as np
from scipy.integrate import quad
from scipy.signal import argrelextrema

from .greens import g_free, g_free_array
from .quadrature import integrate_path, ray

__all__ = [
    "SlitConfig", "ClassicalPaths", "SemiclassicalPattern", "g_slit", "twin_slit_pattern",
    "classical_times", "action_along_path", "semiclassical_field_pattern", "count_maxima",
    "g_slit_time_domain",
]

DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class SlitConfig:
    hole1: tuple
    hole2: tuple
    source: tuple
    plane_point: tuple = (0.0, 0.0, 0.0)
    plane_normal: tuple = (0.0, 0.0, 1.0)
    open_holes: tuple = (True, True)

    def __post_init__(self):
        for name in ("hole1", "hole2", "source", "plane_point", "plane_normal"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        n = np.asarray(self.plane_normal)
        if np.linalg.norm(n) == 0:
            raise ValueError("detector plane normal must be non-zero")
        if abs(np.dot(np.subtract(self.source, self.plane_point), n)) < 1e-12 * np.linalg.norm(n):
            raise ValueError("source lies on the detector plane")
        if self.hole1 == self.hole2:
            warnings.warn("coincident holes: both paths are identical", stacklevel=2)


def g_slit(cfg, rb, E, mass=1.0, eta=0.0):
    """``i sum_k G(rb, H_k) G(H_k, rA)`` over the open holes (hbar = 1)."""
    total = 0j
    for hole, is_open in zip((cfg.hole1, cfg.hole2), cfg.open_holes):
        if is_open:
            total += (g_free(rb, hole, E, mass, eta).value
                      * g_free(hole, cfg.source, E, mass, eta).value)
    return 1j * total


def _g_slit_many(cfg, pts, E, mass):
    total = np.zeros(len(pts), dtype=complex)
    for hole, is_open in zip((cfg.hole1, cfg.hole2), cfg.open_holes):
        if is_open:
            d = np.linalg.norm(pts - np.asarray(hole), axis=1)
            if np.any(d == 0):
                raise ValueError("detector point coincides with a hole")
            total += g_free_array(d, E, mass) * g_free(hole, cfg.source, E, mass).value
    return 1j * total


def twin_slit_pattern(cfg, E, points, mass=1.0):
    """``|g_slit|^2`` on (n, 3) detector points, normalised to a peak of 1."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    I = np.abs(_g_slit_many(cfg, pts, E, mass)) ** 2
    return I / I.max()


def g_slit_time_domain(cfg, rb, E, mass=1.0, *, eta=None, n_lam=256, rtol=1e-10):
    """The same quantity from the time-convolved kernels, by 2D quadrature.

    ``G_slit = -i int dT exp(i(E + i eta)T) sum_k int_0^T dt K(rb, T - t | H_k) K(H_k, t | rA)``
    with ``t = lam T``.  T runs along a ray slightly below the real axis (allowed
    while ``arg(E + i eta)`` exceeds its angle), where both kernels decay at
    every ``lam``.  Compare with ``g_slit(..., eta=eta)``.  The default
    ``eta = |E|`` makes the ray steep enough for the fixed ``lam`` rule.
    """
    if eta is None:
        eta = abs(E) if E != 0 else 1.0
    Ec = complex(E, eta)
    theta = 0.5 * math.atan2(eta, E) if E > 0 else 0.25 * math.pi
    direction = np.exp(-1j * theta)
    u, wu = np.polynomial.legendre.leggauss(n_lam)
    u = 0.5 * (u + 1.0)
    lam = u * u * (3.0 - 2.0 * u)
    wl = 0.5 * wu * 6.0 * u * (1.0 - u)
    m = mass
    total = 0j
    for hole, is_open in zip((cfg.hole1, cfg.hole2), cfg.open_holes):
        if not is_open:
            continue
        d1 = float(np.linalg.norm(np.subtract(hole, cfg.source)))
        d2 = float(np.linalg.norm(np.subtract(rb, hole)))

        def f(T, d1=d1, d2=d2):
            T = np.asarray(T, dtype=complex)[..., None]
            t1, t2 = lam * T, (1.0 - lam) * T
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                k1 = (m / (2j * math.pi * t1)) ** 1.5 * np.exp(0.5j * m * d1 * d1 / t1)
                k2 = (m / (2j * math.pi * t2)) ** 1.5 * np.exp(0.5j * m * d2 * d2 / t2)
                conv = (k1 * k2) @ wl * T[..., 0]
                v = -1j * conv * np.exp(1j * Ec * T[..., 0])
            return np.where(np.isfinite(v), v, 0.0)

        scale = math.sqrt(0.5 * m * (d1 + d2) ** 2 / abs(Ec))
        total += integrate_path(f, [ray(0.0, direction, scale)], rtol=rtol).value
    # G_slit = i G G = -i int exp(iET) (K * K)(T) dT
    return total


# ---------------------------------------------------------------------------
# classical times in a uniform force

@dataclass(frozen=True)
class ClassicalPaths:
    times: tuple
    phases: tuple           # W(T_i): reduced action in units of hbar
    classification: str     # two_real | degenerate | classically_forbidden
    discriminant: float     # normalised: (p^2 - q) / p^2, 0 on the boundary
    residuals: tuple = ()


def _force(F):
    F = np.asarray(F, dtype=float)
    return np.array([0.0, 0.0, -float(F)]) if F.ndim == 0 else F


def _phase(T, d2, fsum, f2, E, m):
    return 0.5 * m * d2 / T + 0.5 * fsum * T - f2 * T ** 3 / (24.0 * m) + E * T


def _dphase(T, d2, fsum, f2, E, m):
    return -0.5 * m * d2 / T ** 2 + 0.5 * fsum - f2 * T ** 2 / (8.0 * m) + E


def classical_times(r, E, F, mass=1.0, source=(0.0, 0.0, 0.0)):
    """Positive stationary times of ``W`` for the path ``source -> r``.

    ``F`` is a force vector or a magnitude (then pointing along -z).  The
    quartic is solved from its companion matrix and each root is polished
    by Newton steps on ``W'``.
    """
    Fv = _force(F)
    f2 = float(Fv @ Fv)
    if f2 == 0:
        raise ValueError("classical_times needs a non-zero force")
    m = mass
    r = np.asarray(r, dtype=float)
    r0 = np.asarray(source, dtype=float)
    d2 = float(np.sum((r - r0) ** 2))
    fsum = float(Fv @ (r + r0))
    eps = E + 0.5 * fsum
    p = 4.0 * m * eps / f2          # u^2 - 2 p u + q = 0, u = T^2
    q = 4.0 * m * m * d2 / f2
    disc = (p * p - q) / (p * p) if p != 0 else -math.inf
    if p <= 0 or disc < -DEGENERACY_TOL:
        return ClassicalPaths((), (), "classically_forbidden", disc)
    roots = np.roots([f2, 0.0, -8.0 * m * eps, 0.0, 4.0 * m * m * d2])
    cand = sorted(float(z.real) for z in roots if z.real > 0 and abs(z.imag) <= 1e-6 * abs(z))
    if abs(disc) <= DEGENERACY_TOL:
        cand = [math.sqrt(p)]
    elif len(cand) < 2:
        # companion eigenvalues split off the real axis near the boundary
        u = p + np.array([-1.0, 1.0]) * math.sqrt(max(p * p - q, 0.0))
        cand = [math.sqrt(max(q / u[1], 0.0)), math.sqrt(u[1])]
    times = []
    for T in cand[:2]:
        for _ in range(50):
            g = _dphase(T, d2, fsum, f2, E, m)
            h = m * d2 / T ** 3 - f2 * T / (4.0 * m)
            if h == 0:
                break
            step = g / h
            T -= step
            if abs(step) <= 1e-16 * T:
                break
        times.append(T)
    times = tuple(sorted(times))
    scale = [abs(E) + 0.5 * abs(fsum) + 0.5 * m * d2 / T ** 2 + f2 * T ** 2 / (8.0 * m) for T in times]
    res = tuple(abs(_dphase(T, d2, fsum, f2, E, m)) / s for T, s in zip(times, scale))
    phases = tuple(_phase(T, d2, fsum, f2, E, m) for T in times)
    kind = "degenerate" if len(times) == 1 else "two_real"
    return ClassicalPaths(times, phases, kind, disc, res)


def action_along_path(r, T, E, F, mass=1.0, source=(0.0, 0.0, 0.0)):
    """Reduced action ``int L dt + E T`` on the parabola reaching ``r`` at ``T`` (numerical)."""
    Fv = _force(F)
    m = mass
    r = np.asarray(r, dtype=float)
    r0 = np.asarray(source, dtype=float)
    v0 = (r - r0) / T - Fv * T / (2.0 * m)

    def lag(t):
        v = v0 + Fv * t / m
        x = r0 + v0 * t + Fv * t * t / (2.0 * m)
        return 0.5 * m * float(v @ v) + float(Fv @ x)

    val, _ = quad(lag, 0.0, T, epsabs=0.0, epsrel=1e-13, limit=200)
    return val + E * T


@dataclass(frozen=True)
class SemiclassicalPattern:
    amplitude: np.ndarray   # complex two-path Green function
    intensity: np.ndarray
    delta_phase: np.ndarray  # W(T_2) - W(T_1)
    fringe_count: int       # interior maxima of the intensity along the input order


def _path_term(T, W, d2, f2, m):
    w2 = m * d2 / T ** 3 - f2 * T / (4.0 * m)
    amp = (m / (2.0 * math.pi * T)) ** 1.5 * math.sqrt(2.0 * math.pi / abs(w2))
    return -1j * amp * np.exp(1j * (W - 0.75 * math.pi + 0.25 * math.pi * math.copysign(1.0, w2)))


def semiclassical_field_pattern(points, E, F, mass=1.0, source=(0.0, 0.0, 0.0), *,
                                caustic_margin=0.02):
    """Two-path stationary-phase approximation to ``G(r, source; E)``.

    Points whose normalised discriminant is below ``caustic_margin`` sit too
    close to the caustic paraboloid for the approximation and are rejected;
    use the exact Green function there.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    Fv = _force(F)
    f2 = float(Fv @ Fv)
    amp = np.zeros(len(pts), dtype=complex)
    dphi = np.zeros(len(pts))
    for i, r in enumerate(pts):
        cp = classical_times(r, E, Fv, mass, source)
        if cp.classification != "two_real" or cp.discriminant < caustic_margin:
            raise ValueError(f"point {tuple(r)} is outside the region where two-path "
                             "semiclassics applies")
        d2 = float(np.sum((r - np.asarray(source)) ** 2))
        amp[i] = sum(_path_term(T, W, d2, f2, mass) for T, W in zip(cp.times, cp.phases))
        dphi[i] = cp.phases[1] - cp.phases[0]
    I = np.abs(amp) ** 2
    return SemiclassicalPattern(amp, I, dphi, count_maxima(I))


def count_maxima(values):
    """Number of strict interior local maxima."""
    return int(argrelextrema(np.asarray(values), np.greater)[0].size)
