"""Complex log-Gamma on the principal branch (Lanczos g=7, n=9)."""

import cmath
import math

import numpy as np

from ..errors import PoleError

__all__ = ["log_gamma", "gamma", "rgamma"]

_G = 7.0
_P = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


def _lanczos(z):
    # valid for Re z >= 1/2
    zm = z - 1.0
    a = _P[0]
    for k in range(1, 9):
        a = a + _P[k] / (zm + k)
    t = zm + _G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(a)


def _expm1(z):
    x, y = z.real, z.imag
    s = np.sin(0.5 * y)
    return np.expm1(x) * np.cos(y) - 2.0 * s * s + 1j * np.exp(x) * np.sin(y)


def _log_sin_pi(z):
    # branch of log(sin(pi z)) matching the principal log-Gamma, Im z >= 0
    return (math.log(0.5) + 0.5j * math.pi - 1j * math.pi * z
            + np.log(-_expm1(2j * math.pi * (z - np.round(z.real)))))


def _is_pole(z):
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def _log_gamma_array(z):
    out = np.empty_like(z)
    right = z.real >= 0.5
    if right.any():
        out[right] = _lanczos(z[right])
    # exact factorials at small positive integers
    ints = (z.imag == 0) & (z.real >= 1) & (z.real <= 30) & (z.real == np.round(z.real))
    for i in np.flatnonzero(ints):
        out[i] = math.log(math.factorial(int(z[i].real) - 1))
    # near the origin the reflection formula loses sin(pi z) to underflow
    tiny = ~right & (np.abs(z) < 1e-3)
    if tiny.any():
        w = z[tiny]
        # the negative real axis belongs to the upper side, whatever the sign of zero
        lw = np.where((w.imag == 0) & (w.real < 0),
                      np.log(np.abs(w)) + 1j * math.pi, np.log(w))
        out[tiny] = _lanczos(w + 1.0) - lw
    left = ~right & ~tiny
    if left.any():
        w = z[left]
        flip = w.imag < 0
        w = np.where(flip, w.conjugate(), w)
        # log G(w) = log pi - log sin(pi w) - log G(1 - w)
        v = _LOG_PI - _log_sin_pi(w) - _lanczos(1.0 - w)
        v = np.where(flip, v.conjugate(), v)
        out[left] = v
    return out


def log_gamma(z):
    """Principal-branch log Gamma(z); raises PoleError at 0, -1, -2, ..."""
    arr = np.asarray(z)
    zc = np.atleast_1d(arr.astype(complex))
    if _is_pole(zc).any():
        bad = zc[_is_pole(zc)][0].real
        raise PoleError(f"Gamma has a pole at z = {bad:g}")
    out = _log_gamma_array(zc.ravel()).reshape(zc.shape)
    if arr.ndim == 0:
        return complex(out[0])
    return out


def gamma(z):
    return np.exp(log_gamma(z))


def rgamma(z):
    """1/Gamma(z), entire: zero at the poles of Gamma."""
    arr = np.asarray(z)
    zc = np.atleast_1d(arr.astype(complex))
    pole = _is_pole(zc)
    out = np.zeros(zc.shape, dtype=complex)
    if (~pole).any():
        out[~pole] = np.exp(-_log_gamma_array(zc[~pole]))
    if arr.ndim == 0:
        return complex(out[0])
    return out
