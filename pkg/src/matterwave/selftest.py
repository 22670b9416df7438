"""Oracle checks behind ``matterwave selftest``.

Each check returns ``{"name", "measured", "limit", "passed"}``.  The Airy
checks accept an alternative implementation so that a deliberately broken
one can be shown to fail.
"""
import math

import numpy as np
from scipy import special

from . import specfun
from .greens import GreenRequest, g_field, g_free, g_laplace, g_laplace_real_axis, g_landau
from .interference import SlitConfig, classical_times, g_slit, g_slit_time_domain
from .observables import CurrentSampler, Sphere, dos, flux_through_surface, total_current
from .propagators import FieldConfig
from .sources import SourceSpec

__all__ = ["run_all", "CHECKS"]


def _result(name, measured, limit):
    measured = float(measured)
    return {"name": name, "measured": measured, "limit": float(limit),
            "passed": bool(np.isfinite(measured) and measured <= limit)}


def check_airy_wronskian(airy=None):
    airy = airy or specfun.airy_array
    x = np.linspace(-10.0, 10.0, 401)
    ai, aip, bi, bip = airy(x)
    w = ai * bip - aip * bi
    return _result("airy_wronskian", np.max(np.abs(w * math.pi - 1.0)), 1e-10)


def check_airy_reference(airy=None):
    airy = airy or specfun.airy_array
    x = np.linspace(-10.0, 10.0, 201)
    mine = np.array(airy(x))
    ref = np.array(special.airy(x))
    ref = ref[[0, 1, 2, 3]]
    scale = np.maximum(np.abs(ref), 1.0)
    return _result("airy_vs_scipy", np.max(np.abs(mine - ref) / scale), 1e-10)


def check_laplace_free():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        E = rng.uniform(0.1, 10.0)
        d = rng.uniform(0.1, 10.0)
        req = GreenRequest((0, 0, 0), (d, 0, 0), E, method="laplace_quadrature")
        a = g_laplace(req).value
        b = g_free((0, 0, 0), (d, 0, 0), E).value
        worst = max(worst, abs(a - b) / abs(b))
    return _result("g_laplace_vs_g_free", worst, 1e-6)


def _field_points():
    rng = np.random.default_rng(11)
    f = FieldConfig(force=(0, 0, -1.0), mass=0.5)
    pts = []
    for E in np.linspace(-2.0, 5.0, 20):
        r = rng.uniform(-3.0, 3.0, 3)
        pts.append((float(E), tuple(r)))
    return f, pts


def check_field_closed_form():
    f, pts = _field_points()
    worst = 0.0
    for E, r in pts:
        req = GreenRequest(r, (0, 0, 0), E, field=f, method="laplace_quadrature")
        a = g_laplace(req).value
        b = g_field(r, (0, 0, 0), E, f).value
        worst = max(worst, abs(a - b) / abs(b))
    return _result("g_field_vs_g_laplace", worst, 1e-6)


def check_quadrature_schemes():
    f, pts = _field_points()
    worst = 0.0
    for E, r in pts[::4]:
        req = GreenRequest(r, (0, 0, 0), E, field=f, method="laplace_quadrature")
        a = g_laplace(req).value
        b = g_laplace_real_axis(req).value
        worst = max(worst, abs(a - b) / abs(a))
    return _result("contour_vs_real_axis", worst, 1e-6)


def check_landau():
    f = FieldConfig(force=(0, 0, -0.7), b_field=0.8, mass=1.0)
    worst = 0.0
    for r, E in [((0.4, -0.3, -1.2), 1.3), ((1.0, 0.5, -2.5), 0.6), ((-0.2, 0.9, 1.1), 2.2)]:
        a = g_landau(r, (0.1, 0.0, 0.0), E, f).value
        b = g_laplace(GreenRequest(r, (0.1, 0.0, 0.0), E, field=f, method="laplace_quadrature")).value
        worst = max(worst, abs(a - b) / abs(b))
    return _result("landau_sum_vs_laplace", worst, 1e-6)


def check_current_triangle():
    s = SourceSpec.point((0, 0, 0), 0.5)
    f = FieldConfig()
    J = total_current(s, f)
    flux, _ = flux_through_surface(CurrentSampler(s, f), Sphere((0, 0, 0), 2.0))
    return _result("point_current_vs_flux", max(abs(J - 1.0 / math.pi), abs(flux - J)) / J, 1e-3)


def check_classical_times():
    cp = classical_times((0, 0, -1.5), 0.5, 1.0)
    err = max(abs(cp.times[0] - 1.0), abs(cp.times[1] - 3.0)) if len(cp.times) == 2 else math.inf
    return _result("classical_times_example", err, 1e-12)


def check_dos_slope():
    E = np.geomspace(0.1, 10.0, 30)
    n = dos((0, 0, 0), E, FieldConfig()).values
    slope = np.polyfit(np.log(E), np.log(n), 1)[0]
    return _result("free_dos_slope", abs(slope - 0.5), 0.01)


def check_slit_convolution():
    cfg = SlitConfig((0.5, 0, 0), (-0.5, 0, 0), (0, 0, -3), plane_point=(0, 0, 5))
    rb = (1.0, 0.3, 5.0)
    a = g_slit(cfg, rb, 2.0, eta=2.0)
    b = g_slit_time_domain(cfg, rb, 2.0, eta=2.0)
    return _result("slit_product_vs_time_domain", abs(a - b) / abs(a), 1e-3)


CHECKS = [check_airy_wronskian, check_airy_reference, check_laplace_free, check_field_closed_form,
          check_quadrature_schemes, check_landau, check_current_triangle, check_classical_times,
          check_dos_slope, check_slit_convolution]


def run_all():
    out = []
    for chk in CHECKS:
        try:
            out.append(chk())
        except Exception as exc:  # a crash is a failure, not an abort
            out.append({"name": chk.__name__, "measured": float("nan"), "limit": 0.0,
                        "passed": False, "error": f"{type(exc).__name__}: {exc}"})
    return out
