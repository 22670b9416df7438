import math

import numpy as np
import pytest

from matterwave.propagators import (CausticError, FieldConfig, k_field, k_free, k_landau_field,
                                    kernel_complex, vector_potential)

# mpmath: (2 pi)^-3/2 exp(-3 pi i / 4) exp(i/2)
K_FREE_D1_T1 = complex(-0.0178759684914715368222226616486, -0.0609252948670899169101573239466)
# mpmath of the uniform-force kernel, F = m = 1 along +z, r = (0, 0, 1), r' = 0, T = 1
K_FIELD_T1 = complex(0.0109256340640861754295826744199, -0.0625465612519794404527313192096)
# Van Vleck oracle: classical path by ODE shooting, action by quadrature of the
# symmetric-gauge Lagrangian, det(dr/dv0) by linear sensitivity runs
K_LANDAU_T1 = complex(0.03904205738585276, -0.05348459033399091)


def test_free_golden():
    assert abs(k_free((1, 0, 0), (0, 0, 0), 1.0) - K_FREE_D1_T1) < 1e-15


def test_free_coincidence_modulus():
    T = 2 * math.pi
    v = k_free((0.3, 0.2, 0.1), (0.3, 0.2, 0.1), T)
    assert abs(v - (1 / (2j * math.pi * T)) ** 1.5) < 1e-17
    assert abs(v) == pytest.approx((4 * math.pi ** 2) ** -1.5, rel=1e-14)


def test_free_modulus_independent_of_positions():
    rng = np.random.default_rng(3)
    for T in (0.1, 1.0, 7.3):
        mods = [abs(k_free(rng.normal(size=3) * 5, rng.normal(size=3), T)) for _ in range(10)]
        assert np.ptp(mods) <= 1e-14 * mods[0]
        assert mods[0] == pytest.approx((2 * math.pi * T) ** -1.5, rel=1e-14)


def test_field_golden_and_limits():
    f = FieldConfig(force=(0, 0, 1.0))
    assert abs(k_field((0, 0, 1), (0, 0, 0), 1.0, f) - K_FIELD_T1) < 1e-15
    r, rp = (0.4, -1.0, 2.0), (1.0, 0.2, -0.5)
    assert k_field(r, rp, 1.3, FieldConfig()) == k_free(r, rp, 1.3)
    # z = z' = 0: only the -F^2 T^3 / 24 m correction survives
    T = 2.0
    ratio = k_field((1, 0, 0), (0, 0, 0), T, f) / k_free((1, 0, 0), (0, 0, 0), T)
    assert abs(ratio - np.exp(-1j * T ** 3 / 24)) < 1e-14


def test_landau_golden():
    f = FieldConfig(force=(0, 0, 1.0), b_field=1.0)
    v = k_landau_field((1, 0, 1), (0, 0, 0), 1.0, f)
    assert abs(v - K_LANDAU_T1) <= 1e-10 * abs(K_LANDAU_T1)


def test_landau_weak_field_limit():
    r, rp = (0.7, -0.3, 1.1), (0.1, 0.4, -0.2)
    ref = k_field(r, rp, 1.0, FieldConfig(force=(0, 0, 0.8)))
    v = k_landau_field(r, rp, 1.0, FieldConfig(force=(0, 0, 0.8), b_field=1e-9))
    assert abs(v - ref) <= 1e-8 * abs(ref)


def test_all_kernels_reduce_to_free():
    r, rp = (0.5, 0.5, -0.5), (0.0, 0.1, 0.0)
    ref = k_free(r, rp, 0.8)
    assert abs(k_field(r, rp, 0.8, FieldConfig(force=(0, 0, 1e-12))) - ref) <= 1e-10 * abs(ref)
    assert abs(k_landau_field(r, rp, 0.8, FieldConfig(b_field=1e-12)) - ref) <= 1e-10 * abs(ref)


def test_landau_transverse_prefactor_on_axis():
    # r_perp = r'_perp = 0: transverse part is m w / (4 pi i sin(wT/2))
    w, T = 0.9, 1.7
    f = FieldConfig(b_field=w)
    v = k_landau_field((0, 0, 0.6), (0, 0, 0), T, f)
    one_d = (1 / (2j * math.pi * T)) ** 0.5 * np.exp(0.5j * 0.36 / T)
    assert abs(v - w / (4j * math.pi * math.sin(w * T / 2)) * one_d) <= 1e-13 * abs(v)


def test_caustic_and_bad_times():
    f = FieldConfig(b_field=1.0)
    with pytest.raises(CausticError):
        k_landau_field((1, 0, 0), (0, 0, 0), 2 * math.pi, f)
    for T in (0.0, -1.0):
        with pytest.raises(ValueError):
            k_free((1, 0, 0), (0, 0, 0), T)
    with pytest.raises(ValueError):
        k_field((1, 0, 0), (0, 0, 0), 1.0, f)


def test_symmetric_gauge():
    f = FieldConfig(b_field=2.0)
    a = vector_potential(np.array([[1.0, 2.0, 3.0]]), f)
    assert np.allclose(a, [[-2.0, 1.0, 0.0]])
    assert np.all(vector_potential(np.ones((4, 3)), FieldConfig()) == 0)


def test_semigroup_free_kernel():
    # complex times with negative imaginary part make both factors Gaussian-damped
    K = lambda r, rp, T: kernel_complex(r, rp, FieldConfig())(T)
    T1, T2 = 0.6 - 0.6j, 0.4 - 0.5j
    r, rp = np.array([0.3, -0.2, 0.1]), np.array([-0.1, 0.2, 0.0])
    x, w = np.polynomial.legendre.leggauss(48)
    L = 6.0
    x, w = L * x, L * w
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    mid = np.stack([X, Y, Z], -1).reshape(-1, 3)
    W = (w[:, None, None] * w[None, :, None] * w[None, None, :]).ravel()
    k2 = K(r[None], mid, T2)
    k1 = K(mid, rp[None], T1)
    lhs = np.sum(W * k2 * k1)
    rhs = K(r, rp, T1 + T2)
    assert abs(lhs - rhs) <= 1e-3 * abs(rhs)
