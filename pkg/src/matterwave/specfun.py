"""Airy functions on the real axis.

Values inside ``|x| <= 10`` come from a table of Taylor expansions about
nodes spaced by 0.25; the table itself is generated at import by stepping the
Airy ODE with high-order Taylor series (``Ai`` downward from the asymptotic
region, ``Bi`` outward from the origin, both directions stable).  Outside
that window the standard asymptotic series are used; there the optimal
truncation error is below ``exp(-42)`` so both branches join smoothly.

The outgoing-wave combination ``Ci = Bi + i Ai`` is what the uniform-field
Green functions are built from.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import _accel
from ._accel import njit

__all__ = ["AiryPair", "airy", "airy_array", "airy_scaled_array", "ci", "ci_array", "zeta"]

_H = 0.25
_XMAX_TABLE = 10.0
_NODE_LO = -10.5
_NNODES = 85  # -10.5 .. 10.5
_NTAYLOR = 26
_NASYM = 30

_AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
_AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))
_BI0 = 1.0 / (3.0 ** (1.0 / 6.0) * math.gamma(2.0 / 3.0))
_BIP0 = 3.0 ** (1.0 / 6.0) / math.gamma(1.0 / 3.0)
_SQRTPI = math.sqrt(math.pi)


@dataclass(frozen=True)
class AiryPair:
    ai: float
    ai_prime: float
    bi: float
    bi_prime: float

    @property
    def wronskian(self):
        return self.ai * self.bi_prime - self.ai_prime * self.bi


def _asym_coefficients(n):
    u = [1.0]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, n)]
    return np.array(u), np.array(v)


_U, _V = _asym_coefficients(_NASYM)


def _taylor_coefficients(x0, y0, yp0, n=_NTAYLOR):
    # (k+2)(k+1) c[k+2] = x0 c[k] + c[k-1]
    c = [0.0] * n
    c[0] = y0
    c[1] = yp0
    c[2] = x0 * y0 / 2.0
    for k in range(1, n - 2):
        c[k + 2] = (x0 * c[k] + c[k - 1]) / ((k + 2) * (k + 1))
    return c


def _step(x0, y0, yp0, h):
    c = _taylor_coefficients(x0, y0, yp0, 34)
    y = math.fsum(ck * h ** k for k, ck in enumerate(c))
    yp = math.fsum(k * ck * h ** (k - 1) for k, ck in enumerate(c) if k)
    return y, yp


def _asym_positive_py(x):
    zt = 2.0 / 3.0 * x ** 1.5
    sa = math.fsum((-1) ** k * _U[k] / zt ** k for k in range(_NASYM))
    sap = math.fsum((-1) ** k * _V[k] / zt ** k for k in range(_NASYM))
    pref = math.exp(-zt) / (2.0 * _SQRTPI)
    return pref * sa / x ** 0.25, -pref * sap * x ** 0.25


def _build_table():
    xs = _NODE_LO + _H * np.arange(_NNODES)
    mid = (_NNODES - 1) // 2
    ai = np.zeros(_NNODES)
    aip = np.zeros(_NNODES)
    bi = np.zeros(_NNODES)
    bip = np.zeros(_NNODES)
    ai[-1], aip[-1] = _asym_positive_py(xs[-1])
    for j in range(_NNODES - 1, mid + 1, -1):
        ai[j - 1], aip[j - 1] = _step(xs[j], ai[j], aip[j], -_H)
    ai[mid], aip[mid] = _AI0, _AIP0
    bi[mid], bip[mid] = _BI0, _BIP0
    for j in range(mid, 0, -1):
        ai[j - 1], aip[j - 1] = _step(xs[j], ai[j], aip[j], -_H)
        bi[j - 1], bip[j - 1] = _step(xs[j], bi[j], bip[j], -_H)
    for j in range(mid, _NNODES - 1):
        bi[j + 1], bip[j + 1] = _step(xs[j], bi[j], bip[j], _H)
    ca = np.array([_taylor_coefficients(x, a, ap) for x, a, ap in zip(xs, ai, aip)])
    cb = np.array([_taylor_coefficients(x, b, bp) for x, b, bp in zip(xs, bi, bip)])
    return xs, ca, cb


_NODES, _CAI, _CBI = _build_table()


# --------------------------------------------------------------------------
# numba kernels

@njit
def _horner(c, t):
    n = c.shape[0]
    y = c[n - 1]
    yp = (n - 1) * c[n - 1]
    for k in range(n - 2, -1, -1):
        y = y * t + c[k]
        if k > 0:
            yp = yp * t + k * c[k]
    return y, yp


@njit
def _airy_scalar_nb(x, scaled):
    if abs(x) <= _XMAX_TABLE:
        j = int(math.floor((x - _NODE_LO) / _H + 0.5))
        t = x - (_NODE_LO + _H * j)
        ai, aip = _horner(_CAI[j], t)
        bi, bip = _horner(_CBI[j], t)
        if scaled and x > 0.0:
            zt = 2.0 / 3.0 * x * math.sqrt(x)
            e = math.exp(zt)
            ai *= e
            aip *= e
            bi /= e
            bip /= e
        return ai, aip, bi, bip
    if x > 0.0:
        zt = 2.0 / 3.0 * x * math.sqrt(x)
        q = x ** 0.25
        sa = 0.0
        sap = 0.0
        sb = 0.0
        sbp = 0.0
        p = 1.0
        for k in range(_NASYM):
            ta = _U[k] * p
            tb = _V[k] * p
            sb += ta
            sbp += tb
            if k % 2 == 0:
                sa += ta
                sap += tb
            else:
                sa -= ta
                sap -= tb
            if abs(ta) < 1e-18 * abs(sb) and abs(tb) < 1e-18 * abs(sbp):
                break
            p /= zt
        ai = sa / (2.0 * _SQRTPI * q)
        aip = -sap * q / (2.0 * _SQRTPI)
        bi = sb / (_SQRTPI * q)
        bip = sbp * q / _SQRTPI
        if not scaled:
            ea = math.exp(-zt)
            ai *= ea
            aip *= ea
            if zt < 709.0:
                eb = math.exp(zt)
                bi *= eb
                bip *= eb
            else:
                bi = math.inf
                bip = math.inf
        return ai, aip, bi, bip
    y = -x
    zt = 2.0 / 3.0 * y * math.sqrt(y)
    q = y ** 0.25
    # even / odd parts of the u and v series with alternating signs
    ue = 0.0
    uo = 0.0
    ve = 0.0
    vo = 0.0
    p = 1.0
    for k in range(_NASYM):
        sgn = 1.0 if (k // 2) % 2 == 0 else -1.0
        tu = sgn * _U[k] * p
        tv = sgn * _V[k] * p
        if k % 2 == 0:
            ue += tu
            ve += tv
        else:
            uo += tu
            vo += tv
        if abs(_U[k] * p) < 1e-18 and abs(_V[k] * p) < 1e-18:
            break
        p /= zt
    th = zt - 0.25 * math.pi
    c = math.cos(th)
    s = math.sin(th)
    ai = (c * ue + s * uo) / (_SQRTPI * q)
    bi = (-s * ue + c * uo) / (_SQRTPI * q)
    aip = q * (s * ve - c * vo) / _SQRTPI
    bip = q * (c * ve + s * vo) / _SQRTPI
    return ai, aip, bi, bip


@njit
def _airy_array_nb(x, scaled):
    n = x.shape[0]
    ai = np.empty(n)
    aip = np.empty(n)
    bi = np.empty(n)
    bip = np.empty(n)
    for i in range(n):
        ai[i], aip[i], bi[i], bip[i] = _airy_scalar_nb(x[i], scaled)
    return ai, aip, bi, bip


# --------------------------------------------------------------------------
# numpy kernels

def _airy_array_np(x, scaled):
    x = np.asarray(x, dtype=float)
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    bi = np.empty_like(x)
    bip = np.empty_like(x)

    tab = np.abs(x) <= _XMAX_TABLE
    if tab.any():
        xt = x[tab]
        j = np.floor((xt - _NODE_LO) / _H + 0.5).astype(int)
        t = xt - (_NODE_LO + _H * j)
        ca = _CAI[j]
        cb = _CBI[j]
        ya = ca[:, -1].copy()
        yb = cb[:, -1].copy()
        dya = (_NTAYLOR - 1) * ca[:, -1]
        dyb = (_NTAYLOR - 1) * cb[:, -1]
        for k in range(_NTAYLOR - 2, -1, -1):
            ya = ya * t + ca[:, k]
            yb = yb * t + cb[:, k]
            if k > 0:
                dya = dya * t + k * ca[:, k]
                dyb = dyb * t + k * cb[:, k]
        if scaled:
            e = np.exp(np.where(xt > 0, 2.0 / 3.0 * np.abs(xt) ** 1.5, 0.0))
            ya, dya, yb, dyb = ya * e, dya * e, yb / e, dyb / e
        ai[tab], aip[tab], bi[tab], bip[tab] = ya, dya, yb, dyb

    pos = x > _XMAX_TABLE
    if pos.any():
        xp = x[pos]
        zt = 2.0 / 3.0 * xp ** 1.5
        q = xp ** 0.25
        pw = zt[:, None] ** -np.arange(_NASYM)
        alt = (-1.0) ** np.arange(_NASYM)
        sa = pw @ (alt * _U)
        sap = pw @ (alt * _V)
        sb = pw @ _U
        sbp = pw @ _V
        a_, ap_ = sa / (2 * _SQRTPI * q), -sap * q / (2 * _SQRTPI)
        b_, bp_ = sb / (_SQRTPI * q), sbp * q / _SQRTPI
        if not scaled:
            a_ = a_ * np.exp(-zt)
            ap_ = ap_ * np.exp(-zt)
            with np.errstate(over="ignore"):
                eb = np.exp(zt)
            b_ = b_ * eb
            bp_ = bp_ * eb
        ai[pos], aip[pos], bi[pos], bip[pos] = a_, ap_, b_, bp_

    neg = x < -_XMAX_TABLE
    if neg.any():
        y = -x[neg]
        zt = 2.0 / 3.0 * y ** 1.5
        q = y ** 0.25
        k = np.arange(_NASYM)
        sgn = np.where((k // 2) % 2 == 0, 1.0, -1.0)
        pw = zt[:, None] ** -k
        even = (k % 2 == 0)
        ue = pw[:, even] @ (sgn * _U)[even]
        uo = pw[:, ~even] @ (sgn * _U)[~even]
        ve = pw[:, even] @ (sgn * _V)[even]
        vo = pw[:, ~even] @ (sgn * _V)[~even]
        th = zt - 0.25 * np.pi
        c, s = np.cos(th), np.sin(th)
        ai[neg] = (c * ue + s * uo) / (_SQRTPI * q)
        bi[neg] = (-s * ue + c * uo) / (_SQRTPI * q)
        aip[neg] = q * (s * ve - c * vo) / _SQRTPI
        bip[neg] = q * (c * ve + s * vo) / _SQRTPI
    return ai, aip, bi, bip


# --------------------------------------------------------------------------
# public API

def _check(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("Airy functions need finite arguments")
    return x


def airy_array(x, *, scaled=False):
    """Vectorised ``(Ai, Ai', Bi, Bi')`` on real arguments.

    With ``scaled=True`` and ``x > 0`` the values are ``Ai*exp(zeta)``,
    ``Ai'*exp(zeta)``, ``Bi*exp(-zeta)``, ``Bi'*exp(-zeta)`` where
    ``zeta = 2/3 x**1.5``; non-positive arguments are never scaled.
    Unscaled ``Bi`` overflows to ``inf`` beyond ``x ~ 104``.
    """
    x = _check(x)
    shape = x.shape
    flat = np.ascontiguousarray(x.ravel())
    if _accel.USE_NUMBA:
        out = _airy_array_nb(flat, scaled)
    else:
        out = _airy_array_np(flat, scaled)
    return tuple(o.reshape(shape) for o in out)


def airy_scaled_array(x):
    return airy_array(x, scaled=True)


def airy(x):
    """Airy functions and derivatives at a single real point."""
    ai, aip, bi, bip = airy_array(np.array([x], dtype=float))
    return AiryPair(float(ai[0]), float(aip[0]), float(bi[0]), float(bip[0]))


def zeta(x):
    """Exponent ``2/3 x**1.5`` for ``x > 0``, zero otherwise (scaling convention)."""
    x = np.asarray(x, dtype=float)
    return np.where(x > 0, 2.0 / 3.0 * np.abs(x) ** 1.5, 0.0)


def ci_array(x):
    """``Ci = Bi + i Ai`` and its derivative; outgoing for ``x -> -inf``."""
    ai, aip, bi, bip = airy_array(x)
    return bi + 1j * ai, bip + 1j * aip


def ci(x):
    v, dv = ci_array(np.array([x], dtype=float))
    return complex(v[0]), complex(dv[0])
