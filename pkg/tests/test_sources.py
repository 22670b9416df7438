import math

import numpy as np
import pytest

from matterwave.interference import count_maxima
from matterwave.propagators import FieldConfig
from matterwave.scales import to_dimensionless
from matterwave.sources import (GridSpec, SourceSpec, gaussian_shift, scatter_points, scatter_wave,
                                sigma_eval, virtual_point_source)

FIELD = FieldConfig(force=(0, 0, -1.0), mass=0.5)


def test_spec_validation():
    with pytest.raises(ValueError):
        SourceSpec("gaussian", (0, 0, 0), 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        SourceSpec("point", (0, 0, 0), 1.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        sigma_eval(SourceSpec.point((0, 0, 0), 1.0), (0, 0, 0))


def test_sigma_peak_and_norm():
    s = SourceSpec.gaussian((0.1, -0.2, 0.3), 0.7, 1.0, strength=2 - 1j)
    assert sigma_eval(s, s.position) == pytest.approx((2 - 1j) * (2 * math.pi * 0.49) ** -1.5)
    x, w = np.polynomial.legendre.leggauss(80)
    L = 10 * s.width
    X, Y, Z = np.meshgrid(L * x, L * x, L * x, indexing="ij")
    pts = np.stack([X, Y, Z], -1) + np.asarray(s.position)
    W = L ** 3 * w[:, None, None] * w[None, :, None] * w[None, None, :]
    total = np.sum(W * sigma_eval(s, pts))
    assert abs(total - s.strength) <= 1e-8 * abs(s.strength)


def test_delta_limit_of_gaussian():
    f = lambda p: np.cos(p[..., 0]) * np.exp(0.3 * p[..., 2]) + p[..., 1] ** 2
    r0 = np.array([0.2, 0.5, -0.1])
    x, w = np.polynomial.hermite_e.hermegauss(20)
    for a in (0.1, 0.05):
        X, Y, Z = np.meshgrid(a * x, a * x, a * x, indexing="ij")
        pts = np.stack([X, Y, Z], -1) + r0
        W = w[:, None, None] * w[None, :, None] * w[None, None, :] / (2 * math.pi) ** 1.5
        err = abs(np.sum(W * f(pts)) - f(r0))
        assert err <= 2 * a * a


def test_point_source_decay():
    s = SourceSpec.point((0, 0, 0), 0.5)
    psi, _ = scatter_points(s, FieldConfig(), np.array([[1.0, 0, 0], [0, 2.0, 0]]))
    assert abs(psi[0]) / abs(psi[1]) == pytest.approx(2.0, rel=1e-9)


def test_point_source_standoff():
    s = SourceSpec.point((0, 0, 0), 0.5)
    g = GridSpec(np.linspace(-1, 1, 5), [0.0], [0.0])
    with pytest.raises(ValueError):
        scatter_wave(s, FieldConfig(), g)


@pytest.mark.parametrize("field", [FieldConfig(), FIELD])
def test_small_gaussian_equals_point(field):
    g = GridSpec(np.linspace(0.55, 2.55, 6), np.linspace(-0.95, 1.05, 6), np.linspace(-1.15, 0.85, 6))
    wp = scatter_wave(SourceSpec.point((0, 0, 0), 1.5), field, g)
    wg = scatter_wave(SourceSpec.gaussian((0, 0, 0), 1e-3, 1.5), field, g)
    assert np.max(np.abs(wg.psi - wp.psi) / np.abs(wp.psi)) <= 1e-4


def test_linearity_and_superposition():
    s = SourceSpec.gaussian((0, 0, 0), 0.4, 1.2)
    pts = np.random.default_rng(5).uniform(-3, 3, (30, 3))
    base, _ = scatter_points(s, FIELD, pts)
    c = 2.5 - 0.75j
    scaled, _ = scatter_points(s.with_strength(c), FIELD, pts)
    assert np.array_equal(scaled, c * base) or np.max(np.abs(scaled - c * base)) <= 1e-15 * np.max(np.abs(base))
    other = SourceSpec.point((4.0, 0.0, 1.0), 1.2, 0.3j)
    second, _ = scatter_points(other, FIELD, pts)
    # superposition over a grid: the two waves add; wave equation is linear
    g = GridSpec(np.linspace(-2, 2, 5), np.linspace(-2, 2, 5), np.linspace(-2.2, 1.8, 5))
    w1 = scatter_wave(s, FIELD, g)
    w2 = scatter_wave(other, FIELD, g)
    pts_g = g.points().reshape(-1, 3)
    direct = scatter_points(s, FIELD, pts_g)[0] + scatter_points(other, FIELD, pts_g)[0]
    assert np.max(np.abs((w1.psi + w2.psi).ravel() - direct)) <= 1e-10 * np.max(np.abs(direct))
    zero, _ = scatter_points(s.with_strength(0.0), FIELD, pts)
    assert np.all(zero == 0)


@pytest.mark.parametrize("field", [FieldConfig(), FIELD])
def test_analytic_vs_direct_convolution(field):
    s = SourceSpec.gaussian((0.1, 0.0, -0.2), 0.5, 1.4)
    pts = np.random.default_rng(9).uniform(-2.0, 2.0, (5, 3))
    a, _ = scatter_points(s, field, pts, method="analytic")
    q, err = scatter_points(s, field, pts, method="quadrature")
    assert np.max(np.abs(a - q) / np.abs(a)) <= 1e-3
    assert np.all(err <= 1e-5 * np.abs(q) + 1e-12)


def test_kernel_shift_small_width_limit():
    s = SourceSpec.gaussian((0, 0, 0), 1e-6, 2.0)
    vs = virtual_point_source(s, FIELD)
    assert vs.displacement < 1e-20
    assert vs.effective_energy == pytest.approx(2.0, abs=1e-20)
    assert vs.source.kind == "point"
    # displaced against the force (upwards)
    vs2 = virtual_point_source(SourceSpec.gaussian((0, 0, 0), 1.5, 2.0), FIELD)
    assert vs2.source.position[2] > 0 and vs2.effective_energy < 2.0


def test_virtual_source_near_field_rejected():
    s = SourceSpec.gaussian((0, 0, 0), 1.0, 2.0)
    with pytest.raises(ValueError):
        virtual_point_source(s, FIELD, targets=np.array([[0.0, 0.0, -3.0]]))


def test_gaussian_shift_requires_no_magnetic_field():
    with pytest.raises(ValueError):
        gaussian_shift(SourceSpec.gaussian((0, 0, 0), 1.0, 1.0), FieldConfig(b_field=1.0))


WIDTHS_UM = (0.1, 0.2, 0.4, 1.0)
# E_eff = E - F^2 m a^4 / 2 (field units: m = 1/2, F = 1) in mpmath with
# beta = 3.00588392512693721e-7 m and E = 3.88853913491556829
E_EFF_ORACLE = {0.1: 3.885476810584, 0.2: 3.83954194561055, 0.4: 3.10458410603525,
                1.0: -26.7347041807218}


def test_effective_energy_monotone(atom_laser):
    scales, field, E, depth = atom_laser
    eff = []
    for a_um in WIDTHS_UM:
        a = to_dimensionless(a_um * 1e-6, "length", scales)
        vs = virtual_point_source(SourceSpec.gaussian((0, 0, 0), a, E), field)
        eff.append(vs.effective_energy)
        assert vs.effective_energy == pytest.approx(E_EFF_ORACLE[a_um], rel=1e-10)
    assert np.all(np.diff(eff) < 0)


@pytest.mark.parametrize("a_um", [0.4, 1.0])
def test_virtual_source_far_field(atom_laser, a_um):
    scales, field, E, depth = atom_laser
    a = to_dimensionless(a_um * 1e-6, "length", scales)
    src = SourceSpec.gaussian((0, 0, 0), a, E)
    half = 1.2 * math.sqrt(4.0 * (E / 1.0) * (E + depth))
    x = np.linspace(-half, half, 1601)
    pts = np.column_stack([x, np.zeros_like(x), np.full_like(x, -depth)])
    vs = virtual_point_source(src, field, targets=pts)
    full = np.abs(scatter_points(src, field, pts)[0]) ** 2
    virt = np.abs(scatter_points(vs.source, field, pts)[0]) ** 2
    # the far field is the same up to normalisation
    full, virt = full / full.max(), virt / virt.max()
    assert np.max(np.abs(full - virt)) <= 1e-6
    mf = x[np.nonzero(np.r_[False, (full[1:-1] > full[:-2]) & (full[1:-1] > full[2:]), False])]
    mv = x[np.nonzero(np.r_[False, (virt[1:-1] > virt[:-2]) & (virt[1:-1] > virt[2:]), False])]
    assert mf.size == mv.size
    if mf.size >= 2:
        spacing = np.min(np.diff(mf))
        assert np.max(np.abs(mf - mv)) <= 0.05 * spacing


def test_atom_laser_fringes_small_width(atom_laser):
    from matterwave.observables import fringe_visibility
    scales, field, E, depth = atom_laser
    a = to_dimensionless(0.1e-6, "length", scales)
    src = SourceSpec.gaussian((0, 0, 0), a, E)
    half = 1.2 * math.sqrt(4.0 * E * (E + depth))
    x = np.linspace(-half, half, 1201)
    pts = np.column_stack([x, np.zeros_like(x), np.full_like(x, -depth)])
    I = np.abs(scatter_points(src, field, pts)[0]) ** 2
    assert count_maxima(I) >= 3
    assert fringe_visibility(x, I) > 0.5
