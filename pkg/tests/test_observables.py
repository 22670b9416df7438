import math

import numpy as np
import pytest

from matterwave.observables import (CurrentSampler, GridTooCoarse, Plane, Spectrum, Sphere,
                                    continuity_residual, current_density, dos,
                                    flux_through_surface, fringe_visibility, schrodinger_residual,
                                    source_term_integral, spectrum_peaks, total_current)
from matterwave.propagators import FieldConfig
from matterwave.sources import GridSpec, SourceSpec, WaveGrid, scatter_wave

FREE = FieldConfig()
FIELD = FieldConfig(force=(0, 0, -1.0), mass=0.5)


def _grid(x0, n, h):
    ax = [x0[k] + h * np.arange(n) for k in range(3)]
    return GridSpec(*ax)


def test_plane_wave_current():
    k = 0.8
    g = _grid((0, 0, 0), 12, 0.01)
    psi = np.exp(1j * k * g.points()[..., 2])
    w = WaveGrid(g, psi, np.zeros(g.shape), SourceSpec.point((9, 9, 9), k * k / 2), FREE)
    c = current_density(w)
    jv = c.j[c.valid]
    assert np.max(np.abs(jv - [0, 0, k])) <= 1e-8
    assert np.all(np.isnan(c.j[0, 0, 0]))


def test_coarse_grid_detected():
    g = _grid((1.0, 1.0, 1.0), 8, 0.8)
    w = scatter_wave(SourceSpec.point((0, 0, 0), 8.0), FREE, g)
    with pytest.raises(GridTooCoarse):
        current_density(w)


def test_point_current_inverse_square():
    s = SourceSpec.point((0, 0, 0), 0.5)
    rng = np.random.default_rng(1)
    dirs = rng.normal(size=(6, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    pts = np.concatenate([r * dirs for r in (1.0, 2.0, 4.0)])
    j, err = CurrentSampler(s, FREE)(pts)
    d = np.linalg.norm(pts, axis=1)
    flux_density = np.linalg.norm(j, axis=1) * d ** 2
    assert np.ptp(flux_density) <= 1e-4 * flux_density.mean()
    # radial
    assert np.max(np.linalg.norm(np.cross(j, pts), axis=1) / (np.linalg.norm(j, axis=1) * d)) < 1e-6
    assert flux_density.mean() == pytest.approx(1 / (4 * math.pi ** 2), rel=1e-4)


def test_fig2_rotational_symmetry():
    from matterwave.cli import _setup, parse_config
    sc = parse_config("[scenario]\nname = eb_parallel\n")
    _, field, E, eta = _setup(sc)
    samp = CurrentSampler(SourceSpec.point((0, 0, 0), E), field, eta=eta)
    phi = np.linspace(0, 2 * math.pi, 7)[:-1] + 0.3
    spread, size = [], []
    # allowed region, its edge, and deep in the forbidden region above the source
    for rho, z in ((4.0, -54.0), (12.0, -30.0), (30.0, -46.0), (20.0, -6.0), (25.0, 5.0), (36.0, 2.0)):
        pts = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), np.full_like(phi, z)])
        j, _ = samp(pts)
        er = pts[:, :2] / rho
        cyl = np.column_stack([np.sum(j[:, :2] * er, 1),
                               j[:, 1] * er[:, 0] - j[:, 0] * er[:, 1], j[:, 2]])
        spread.append(np.max(np.ptp(cyl, axis=0)))
        size.append(np.max(np.abs(cyl)))
    spread, size = np.array(spread), np.array(size)
    assert np.max(spread) <= 1e-6 * np.max(size)
    # pointwise wherever the current is not exponentially suppressed
    big = size >= 1e-6 * size.max()
    assert big.sum() >= 3
    assert np.all(spread[big] <= 1e-6 * size[big])


def test_continuity_off_source_point():
    s = SourceSpec.point((0, 0, 0), 0.5)
    h = 0.05
    g = _grid((0.8, -0.5, -0.5), 21, h)
    w = scatter_wave(s, FREE, g)
    c = current_density(w)
    res = continuity_residual(w, c)
    jmax = np.nanmax(np.linalg.norm(c.j, axis=-1))
    assert np.nanmax(np.abs(res)) <= 1e-5 * jmax / h


def test_continuity_inside_gaussian():
    s = SourceSpec.gaussian((0, 0, 0), 0.5, 1.0)
    h = 0.05
    g = _grid((-0.5, -0.5, -0.5), 21, h)
    w = scatter_wave(s, FIELD, g)
    c = current_density(w)
    div = c.divergence_residual
    from matterwave.sources import sigma_eval
    rhs = -2 * np.imag(np.conj(sigma_eval(s, g.points())) * w.psi)
    ok = np.isfinite(div)
    assert np.max(np.abs(div[ok] - rhs[ok])) <= 1e-4 * np.max(np.abs(rhs))
    res = continuity_residual(w, c, s)
    assert np.nanmax(np.abs(res)) <= 1e-4 * np.max(np.abs(rhs))


def test_zero_strength_gives_zero():
    s = SourceSpec.gaussian((0, 0, 0), 0.5, 1.0, strength=0.0)
    g = _grid((-0.3, -0.3, -0.3), 6, 0.1)
    w = scatter_wave(s, FIELD, g)
    c = current_density(w)
    assert np.all(c.j[c.valid] == 0)
    res = continuity_residual(w, c)
    assert np.all(res[c.valid & np.isfinite(res)] == 0)


def test_total_current_values():
    assert total_current(SourceSpec.point((0, 0, 0), 0.5), FREE) == pytest.approx(1 / math.pi, rel=1e-14)
    assert total_current(SourceSpec.point((0, 0, 0), -0.5), FREE) == 0.0
    jp = total_current(SourceSpec.point((0, 0, 0), 1.3), FIELD)
    jg = total_current(SourceSpec.gaussian((0, 0, 0), 1e-3, 1.3), FIELD)
    assert jg / jp == pytest.approx(1.0, abs=1e-3)


def test_sphere_flux_point_free():
    s = SourceSpec.point((0, 0, 0), 0.5)
    samp = CurrentSampler(s, FREE)
    f1, _ = flux_through_surface(samp, Sphere((0, 0, 0), 1.5))
    f2, _ = flux_through_surface(samp, Sphere((0.2, -0.1, 0.3), 3.0))
    assert f1 == pytest.approx(1 / math.pi, rel=1e-3)
    assert f2 == pytest.approx(f1, rel=1e-4)


def test_non_enclosing_plane_free():
    s = SourceSpec.point((0, 0, 0), 0.5)
    samp = CurrentSampler(s, FREE)
    enclosing, _ = flux_through_surface(samp, Sphere((0, 0, 0), 2.0))
    # plane containing the source direction: radial current is tangential to it
    f, _ = flux_through_surface(samp, Plane((0, 0, 2.0), (0, 1, 0), 2.0))
    assert abs(f) <= 1e-6 * enclosing


def test_flux_from_grid_field():
    # a point source cannot sit inside a regular grid (standoff), so use a Gaussian
    s = SourceSpec.gaussian((0, 0, 0), 0.3, 0.5)
    h = 0.1
    ax = -2.0 + h * np.arange(41)
    g = GridSpec(ax, ax, ax)
    c = current_density(scatter_wave(s, FREE, g))
    f, _ = flux_through_surface(c, Sphere((0, 0, 0), 1.4), rtol=1e-4)
    assert f == pytest.approx(total_current(s, FREE), rel=1e-3)
    with pytest.raises(ValueError):
        flux_through_surface(c, Sphere((0, 0, 0), 5.0))


@pytest.mark.parametrize("field", [FREE, FIELD])
def test_gaussian_triangle(field):
    s = SourceSpec.gaussian((0, 0, 0), 0.6, 1.1)
    J = total_current(s, field)
    vol = source_term_integral(s, field)
    flux, _ = flux_through_surface(CurrentSampler(s, field), Sphere((0, 0, 0), 4.0))
    for a, b in ((J, vol), (J, flux), (vol, flux)):
        assert abs(a - b) <= 1e-3 * J


def test_gauge_term_vanishes_without_b():
    s = SourceSpec.gaussian((0, 0, 0), 0.5, 1.0)
    g = _grid((0.5, 0.5, 0.5), 8, 0.05)
    w = scatter_wave(s, FIELD, g)
    a = current_density(w, include_gauge=True).j
    b = current_density(w, include_gauge=False).j
    ok = np.isfinite(a)
    assert np.max(np.abs(a[ok] - b[ok])) <= 1e-14


def test_free_dos_slope_and_value():
    E = np.geomspace(0.1, 10, 40)
    spec = dos((0, 0, 0), E, FREE)
    slope = np.polyfit(np.log(E), np.log(spec.values), 1)[0]
    assert abs(slope - 0.5) <= 0.01
    assert spec.values == pytest.approx(np.sqrt(2 * E) / (2 * math.pi ** 2), rel=1e-14)
    assert spec.eta == 0.0


def test_dos_positive_everywhere():
    E = np.linspace(-3, 4, 50)
    for field in (FIELD, FieldConfig(force=(0, 0.4, 0), b_field=1.0)):
        eta = 0.05 if field.magnetic else None
        v = dos((0.3, 0.1, -0.2), E, field, eta=eta).values
        assert np.all(v >= -1e-12)
    with pytest.raises(ValueError):
        dos((0, 0, 0), E, FieldConfig(b_field=1.0))


def test_spectrum_validation_and_peaks():
    with pytest.raises(ValueError):
        Spectrum([1.0, 0.5], [1.0, 2.0], 0.0)
    E = np.linspace(0, 10, 1001)
    v = 1 / ((E - 3.3) ** 2 + 0.01) + 0.5 / ((E - 7.1) ** 2 + 0.04)
    c, w = spectrum_peaks(Spectrum(E, v, 0.1))
    assert c == pytest.approx([3.3, 7.1], abs=2e-3)
    assert w == pytest.approx([0.2, 0.4], rel=0.03)


def test_schrodinger_residual_gaussian():
    s = SourceSpec.gaussian((0, 0, 0), 0.5, 1.0)
    g = _grid((-0.4, -0.4, -0.4), 17, 0.05)
    w = scatter_wave(s, FIELD, g)
    from matterwave.sources import sigma_eval
    res = schrodinger_residual(w)
    assert np.nanmax(np.abs(res)) <= 1e-3 * np.max(np.abs(sigma_eval(s, g.points())))


def test_fringe_visibility_basic():
    x = np.linspace(-3, 3, 601)
    I = 1 + 0.6 * np.cos(4 * x)
    assert fringe_visibility(x, I) == pytest.approx(0.6, abs=1e-3)
    assert fringe_visibility(x, I, refine=lambda t: 1 + 0.6 * math.cos(4 * t)) == pytest.approx(0.6, abs=1e-12)
    assert fringe_visibility(x, np.exp(-x * x)) == 0.0
