"""Time-domain kernels K(r, T | r', 0) for the quadratic Hamiltonians in scope.

Units: hbar = 1, lengths/energies/times in the scenario's internal units
(see :mod:`matterwave.scales`).  The Hamiltonian is

    H = (p - q A)^2 / 2m - F . r,      A = (B/2) (-y, x, 0)

with the magnetic field along +z (symmetric gauge) and F the force on the
particle.  Kernels accept complex times so that the Laplace-transform
quadrature can run on deformed contours; the public wrappers insist on real
``T > 0``.
"""
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FieldConfig", "CausticError", "k_free", "k_field", "k_landau_field",
    "kernel_complex", "vector_potential",
]


class CausticError(ValueError):
    """Raised when a magnetic kernel is evaluated at a focal (caustic) time."""


@dataclass(frozen=True)
class FieldConfig:
    """Uniform external fields in internal units.

    ``b_field`` is the product |q| B expressed in internal units so that the
    cyclotron frequency is ``b_field / mass``; ``charge_sign`` fixes the
    sense of rotation.  The gauge is always the symmetric one.
    """
    force: tuple = (0.0, 0.0, 0.0)
    b_field: float = 0.0
    charge_sign: int = 1
    mass: float = 1.0
    gauge: str = "symmetric"

    def __post_init__(self):
        f = tuple(float(v) for v in np.broadcast_to(np.asarray(self.force, dtype=float), (3,)))
        object.__setattr__(self, "force", f)
        if self.b_field < 0:
            raise ValueError("b_field must be >= 0 (direction is +z)")
        if self.charge_sign not in (-1, 0, 1):
            raise ValueError("charge_sign must be -1, 0 or +1")
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if self.gauge != "symmetric":
            raise ValueError("only the symmetric gauge is supported")

    @property
    def force_vec(self):
        return np.array(self.force)

    @property
    def force_magnitude(self):
        return float(np.linalg.norm(self.force))

    @property
    def force_parallel(self):
        return self.force[2]

    @property
    def force_perp(self):
        return np.array(self.force[:2])

    @property
    def magnetic(self):
        return self.b_field > 0 and self.charge_sign != 0

    @property
    def omega_c(self):
        return self.b_field / self.mass if self.magnetic else 0.0

    @property
    def omega_signed(self):
        return self.charge_sign * self.omega_c

    @property
    def is_free(self):
        return self.force_magnitude == 0.0 and not self.magnetic

    def replace(self, **kw):
        d = dict(force=self.force, b_field=self.b_field, charge_sign=self.charge_sign,
                 mass=self.mass, gauge=self.gauge)
        d.update(kw)
        return FieldConfig(**d)


def vector_potential(points, field):
    """Symmetric-gauge ``q A`` at ``points`` (..., 3); zero without a magnetic field."""
    p = np.asarray(points, dtype=float)
    out = np.zeros_like(p)
    if field.magnetic:
        qb = field.charge_sign * field.b_field
        out[..., 0] = -0.5 * qb * p[..., 1]
        out[..., 1] = 0.5 * qb * p[..., 0]
    return out


def _check_time(T):
    T = np.asarray(T)
    if np.iscomplexobj(T) or np.any(T <= 0):
        raise ValueError("kernels need real elapsed time T > 0")
    return T.astype(float)


def _pow_free(m, T, dim):
    # (m / (2 pi i T))^(dim/2), principal branch of (iT)^(-dim/2)
    return (m / (2.0 * np.pi)) ** (0.5 * dim) * (1j * T) ** (-0.5 * dim)


def _kfree_c(d2, T, m):
    return _pow_free(m, T, 3) * np.exp(0.5j * m * d2 / T)


def _kfield_c(d2, fsum, f2, T, m):
    # fsum = F . (r + r'), f2 = |F|^2
    return _kfree_c(d2, T, m) * np.exp(0.5j * fsum * T - 1j * f2 * T ** 3 / (24.0 * m))


def _klandau_c(dperp2, chi, dz2, fz_sum, fz2, T, m, omega):
    h = 0.5 * omega * T
    s = np.sin(h)
    trans = m * omega / (4j * np.pi * s) * np.exp(0.25j * m * omega * np.cos(h) / s * dperp2 + 1j * chi)
    longi = _pow_free(m, T, 1) * np.exp(0.5j * m * dz2 / T + 0.5j * fz_sum * T
                                       - 1j * fz2 * T ** 3 / (24.0 * m))
    return trans * longi


def _geometry(r, rp):
    r = np.asarray(r, dtype=float)
    rp = np.asarray(rp, dtype=float)
    return r, rp, np.sum((r - rp) ** 2, axis=-1)


def k_free(r, rp, T, mass=1.0):
    """Free kernel ``(m / 2 pi i T)^(3/2) exp(i m |r - r'|^2 / 2T)``."""
    T = _check_time(T)
    _, _, d2 = _geometry(r, rp)
    return _kfree_c(d2, T, mass)


def k_field(r, rp, T, field):
    """Uniform-force kernel; requires ``field`` without a magnetic part."""
    if field.magnetic:
        raise ValueError("k_field is for B = 0; use k_landau_field")
    T = _check_time(T)
    r, rp, d2 = _geometry(r, rp)
    F = field.force_vec
    return _kfield_c(d2, (r + rp) @ F, F @ F, T, field.mass)


def _landau_parts(r, rp, field):
    r, rp, _ = _geometry(r, rp)
    dperp2 = (r[..., 0] - rp[..., 0]) ** 2 + (r[..., 1] - rp[..., 1]) ** 2
    dz2 = (r[..., 2] - rp[..., 2]) ** 2
    chi = 0.5 * field.mass * field.omega_signed * (rp[..., 0] * r[..., 1] - r[..., 0] * rp[..., 1])
    fz = field.force_parallel
    return dperp2, chi, dz2, fz * (r[..., 2] + rp[..., 2]), fz * fz


def k_landau_field(r, rp, T, field, caustic_tol=1e-9):
    """Kernel for B along z with a parallel force.

    Product of the symmetric-gauge 2D magnetic kernel and the 1D
    linear-potential kernel; the Hamiltonian separates because B and F are
    both along z.  Reduces to :func:`k_field` when B = 0.
    """
    if np.any(field.force_perp != 0):
        raise ValueError("k_landau_field needs the force parallel to B (along z)")
    T = _check_time(T)
    if not field.magnetic:
        return k_field(r, rp, T, field)
    w = field.omega_c
    period = 2.0 * np.pi / w
    n = np.rint(T / period)
    if np.any((n >= 1) & (np.abs(T - n * period) < caustic_tol)):
        raise CausticError("kernel evaluated at a multiple of the cyclotron period")
    return _klandau_c(*_landau_parts(r, rp, field), T, field.mass, w)


def kernel_complex(r, rp, field):
    """Return ``f(T)`` evaluating the appropriate kernel at complex times."""
    m = field.mass
    if field.is_free:
        _, _, d2 = _geometry(r, rp)
        return lambda T: _kfree_c(d2, T, m)
    if not field.magnetic:
        r_, rp_, d2 = _geometry(r, rp)
        F = field.force_vec
        fsum, f2 = float((r_ + rp_) @ F), float(F @ F)
        return lambda T: _kfield_c(d2, fsum, f2, T, m)
    if np.any(field.force_perp != 0):
        raise ValueError("no closed kernel for crossed fields; use the Landau-level route")
    parts = _landau_parts(r, rp, field)
    w = field.omega_c
    return lambda T: _klandau_c(*parts, T, m, w)
