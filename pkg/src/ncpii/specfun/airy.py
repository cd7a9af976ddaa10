"""Airy function Ai and its derivative for complex arguments.

Three regimes:

* Maclaurin series for ``|z| <= 2``, and further out (up to ``|z| < 9``)
  wherever the cancellation factor ``exp(|zeta| + Re zeta)`` stays below
  ``e^4``.
* Otherwise for ``|z| < 9``, generalized Gauss-Laguerre quadrature of the
  K-Bessel integral, on a ray tilted away from the branch point.
* ``|z| >= 9``: asymptotic series truncated at the smallest term.

Points with ``|arg z| > 2pi/3`` are mapped back through the connection
identity ``Ai(z) = -w Ai(wz) - w^2 Ai(w^2 z)`` with ``w = exp(2pi i/3)``.
"""

import math

import numpy as np
from scipy.special import roots_genlaguerre

from ..errors import SpecialFunctionRangeError

__all__ = ["airy", "airy_ai", "airy_ai_prime", "MACLAURIN_RADIUS",
           "ASYMPTOTIC_RADIUS", "MAX_MODULUS"]

MACLAURIN_RADIUS = 2.0
ASYMPTOTIC_RADIUS = 9.0
MAX_MODULUS = 1.0e5
_EXP_LIMIT = 700.0
_SERIES_LOSS = 4.0

_C1 = 0.355028053887817239260063186004
_C2 = 0.258819403792806798405183560189
_OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)
_SQRT_PI = math.sqrt(math.pi)
_GAMMA_5_6 = math.gamma(5.0 / 6.0)
_GAMMA_7_6 = math.gamma(7.0 / 6.0)

_N_QUAD = 48
_LAG_AI = roots_genlaguerre(_N_QUAD, -1.0 / 6.0)
_LAG_AIP = roots_genlaguerre(_N_QUAD, 1.0 / 6.0)


def _maclaurin(z):
    z3 = z ** 3
    f = np.ones_like(z)
    g = z.copy()
    fp = np.zeros_like(z)
    gp = np.ones_like(z)
    tf = np.ones_like(z)
    tg = z.copy()
    df = 0.5 * z ** 2
    dg = np.ones_like(z)
    fp += df
    for k in range(40):
        tf = tf * z3 / ((3 * k + 2) * (3 * k + 3))
        tg = tg * z3 / ((3 * k + 3) * (3 * k + 4))
        f += tf
        g += tg
        if k >= 1:
            df = df * z3 / ((3 * k) * (3 * k + 2))
            fp += df
        dg = dg * z3 / ((3 * k + 1) * (3 * k + 3))
        gp += dg
    return _C1 * f - _C2 * g, _C1 * fp - _C2 * gp


def _prefactor(z):
    zeta = (2.0 / 3.0) * z * np.sqrt(z)
    if np.any(-zeta.real > _EXP_LIMIT):
        bad = z[-zeta.real > _EXP_LIMIT][0]
        raise SpecialFunctionRangeError(
            f"Ai overflows at z = {complex(bad)!r}", argument=complex(bad))
    return zeta, np.exp(-zeta), z ** 0.25


def _quadrature(z):
    zeta, ez, q = _prefactor(z)
    # tilt the integration ray toward arg(zeta) to keep clear of t = -2 zeta
    theta = np.clip(np.angle(zeta) / 2.0, -math.pi / 4, math.pi / 4)
    rot = np.exp(1j * theta) / np.cos(theta)
    tan = np.tan(theta)
    out = []
    for (x, w), a in ((_LAG_AI, -1.0 / 6.0), (_LAG_AIP, 1.0 / 6.0)):
        t = x[None, :] * rot[:, None]
        f = np.exp(-1j * x[None, :] * tan[:, None]) * \
            (1.0 + t / (2.0 * zeta[:, None])) ** a
        out.append(rot ** (a + 1.0) * (f @ w))
    ai = ez / (2.0 * _SQRT_PI * q * _GAMMA_5_6) * out[0]
    aip = -q * ez / (2.0 * _SQRT_PI * _GAMMA_7_6) * out[1]
    return ai, aip


def _asymptotic(z):
    zeta, ez, q = _prefactor(z)
    inv = -1.0 / zeta
    su = np.ones_like(z)
    sv = np.ones_like(z)
    u = 1.0
    pw = np.ones_like(z)
    last = np.full(z.shape, np.inf)
    live = np.ones(z.shape, dtype=bool)
    for k in range(1, 60):
        u = u * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        v = -(6 * k + 1) / (6 * k - 1) * u
        pw = pw * inv
        tu = u * pw
        mag = np.abs(tu)
        live &= mag < last
        if not live.any():
            break
        su = np.where(live, su + tu, su)
        sv = np.where(live, sv + v * pw, sv)
        last = mag
        live &= mag > 1e-17 * np.abs(su)
    ai = ez / (2.0 * _SQRT_PI * q) * su
    aip = -q * ez / (2.0 * _SQRT_PI) * sv
    return ai, aip


def _principal(z):
    # |arg z| <= 2pi/3 or |z| small
    ai = np.empty_like(z)
    aip = np.empty_like(z)
    r = np.abs(z)
    zeta = (2.0 / 3.0) * z * np.sqrt(z)
    # series loses about exp(|zeta| + Re zeta) to cancellation
    series = (r <= MACLAURIN_RADIUS) | \
        ((np.abs(zeta) + zeta.real <= _SERIES_LOSS) & (r < ASYMPTOTIC_RADIUS))
    for mask, fn in ((series, _maclaurin),
                     (~series & (r < ASYMPTOTIC_RADIUS), _quadrature),
                     (r >= ASYMPTOTIC_RADIUS, _asymptotic)):
        if mask.any():
            ai[mask], aip[mask] = fn(z[mask])
    return ai, aip


def airy(z):
    """Return ``(Ai(z), Ai'(z))``.

    Accepts scalars or arrays. Real input gives real output.
    """
    arr = np.asarray(z)
    real_in = not np.iscomplexobj(arr)
    zc = np.atleast_1d(arr.astype(complex))
    if not np.all(np.isfinite(zc)):
        raise SpecialFunctionRangeError("Ai of a non-finite argument",
                                        argument=complex(zc[~np.isfinite(zc)][0]))
    if np.any(np.abs(zc) > MAX_MODULUS):
        bad = complex(zc[np.abs(zc) > MAX_MODULUS][0])
        raise SpecialFunctionRangeError(f"|z| > {MAX_MODULUS:g} at z = {bad!r}",
                                        argument=bad)
    flat = zc.ravel()
    zeta = (2.0 / 3.0) * flat * np.sqrt(flat)
    if np.any(-zeta.real > _EXP_LIMIT):
        bad = complex(flat[-zeta.real > _EXP_LIMIT][0])
        raise SpecialFunctionRangeError(f"Ai overflows at z = {bad!r}", argument=bad)
    ai = np.empty_like(flat)
    aip = np.empty_like(flat)
    far = (np.abs(np.angle(flat)) > 2.0 * math.pi / 3.0) & \
        (np.abs(flat) > MACLAURIN_RADIUS)
    near = ~far
    if near.any():
        ai[near], aip[near] = _principal(flat[near])
    if far.any():
        zf = flat[far]
        # negative real axis: keep conjugate symmetry exact
        a1, d1 = _principal(_OMEGA * zf)
        a2, d2 = _principal(_OMEGA.conjugate() * zf)
        w, w2 = _OMEGA, _OMEGA.conjugate()
        ai[far] = -w * a1 - w2 * a2
        aip[far] = -w2 * d1 - w * d2
    ai = ai.reshape(zc.shape)
    aip = aip.reshape(zc.shape)
    if real_in:
        ai, aip = ai.real, aip.real
    if arr.ndim == 0:
        return ai[0].item(), aip[0].item()
    return ai, aip


def airy_ai(z):
    return airy(z)[0]


def airy_ai_prime(z):
    return airy(z)[1]
