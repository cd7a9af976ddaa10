"""Parabolic cylinder function D_nu(z) for complex order and argument.

Small and moderate |z| use the Taylor expansion of the Weber equation
``D'' = (z^2/4 - nu - 1/2) D`` about the origin, summed in multiprecision
so that the ``exp(|z|^2/2)`` cancellation is absorbed. Large |z| uses the
asymptotic series (with the Stokes term on ``|arg z| > pi/2``) whenever
its smallest term certifies double precision.
"""

import cmath
import math

import mpmath as mp
import numpy as np

from ..errors import SpecialFunctionRangeError
from .gamma import rgamma

__all__ = ["pcf_d", "pcf_d_prime", "NU_MAX", "Z_MAX"]

NU_MAX = 5.0
Z_MAX = 50.0
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_ASYMPTOTIC_TOL = 2e-16


def _series(nu, z, scale):
    # sum_s r_s with r_{s+1}/r_s = (a + 2s)(a + 2s + 1) * scale / (s + 1)
    total = 1.0 + 0j
    term = 1.0 + 0j
    smallest = 1.0
    for s in range(200):
        nxt = term * (nu + 2 * s) * (nu + 2 * s + 1) * scale / (s + 1)
        m = abs(nxt)
        if m >= abs(term) and s > 0:
            break
        term = nxt
        total += term
        smallest = m / max(abs(total), 1e-300)
        if smallest < 1e-18:
            break
    return total, smallest


def _asymptotic(nu, z):
    z2 = 2.0 * z * z
    main, err = _series(-nu, z, -1.0 / z2)
    lz = cmath.log(z)
    val = cmath.exp(-z * z / 4.0 + nu * lz) * main
    ph = cmath.phase(z)
    if abs(ph) > math.pi / 2:
        sign = 1.0 if ph > 0 else -1.0
        rg = rgamma(-nu)
        if rg != 0:
            second, err2 = _series(nu + 1.0, z, 1.0 / z2)
            extra = -_SQRT_2PI * rg * cmath.exp(sign * 1j * math.pi * nu) * \
                cmath.exp(z * z / 4.0 - (nu + 1.0) * lz) * second
            # weight each error by the size of its contribution
            tot = abs(val) + abs(extra)
            err = (err * abs(val) + err2 * abs(extra)) / max(abs(val + extra), 1e-300)
            if tot > 0 and abs(val + extra) < 1e-3 * tot:
                err = 1.0
            val = val + extra
    return val, err


_MAX_LOSS = 10.0


def _taylor_double(nu, z):
    """(D, D') from the Taylor sum in double precision.

    Returns None when the largest term exceeds the result by more than
    _MAX_LOSS, i.e. when cancellation would cost more than two digits.
    """
    p = 2.0 ** (nu / 2)
    a = [math.sqrt(math.pi) * p * rgamma((1 - nu) / 2),
         -_SQRT_2PI * p * rgamma(-nu / 2)]
    c = nu + 0.5
    val = a[0] + a[1] * z
    der = a[1] + 0j
    zp = z            # z^(k+1) after step k
    zd = 1.0 + 0j     # z^k
    peak = max(abs(a[0]), abs(a[1] * z))
    k = 0
    quiet = 0
    while k < 400:
        prev2 = a[k - 2] if k >= 2 else 0.0
        nxt = (prev2 / 4 - c * a[k]) / ((k + 1) * (k + 2))
        a.append(nxt)
        zd = zd * z if k > 0 else z
        zp = zp * z
        term = nxt * zp
        val += term
        der += (k + 2) * nxt * zd
        peak = max(peak, abs(term))
        k += 1
        if abs(term) <= 1e-17 * peak:
            quiet += 1
            if quiet >= 4:
                break
        else:
            quiet = 0
    else:
        return None
    scale = max(abs(val), 1e-300)
    if peak / scale > _MAX_LOSS or peak * (1 + abs(z)) / max(abs(der), 1e-300) > _MAX_LOSS * 10:
        return None
    return val, der


def _taylor(nu, z):
    """(D, D') from the Taylor sum in multiprecision."""
    r = abs(z)
    dps = 20 + int(r * r / (2.0 * math.log(10.0))) + 5
    with mp.workdps(dps):
        nu_m = mp.mpc(nu)
        z_m = mp.mpc(z)
        p = mp.power(2, nu_m / 2)
        a = [mp.sqrt(mp.pi) * p * mp.rgamma((1 - nu_m) / 2),
             -mp.sqrt(2 * mp.pi) * p * mp.rgamma(-nu_m / 2)]
        c = nu_m + mp.mpf(1) / 2
        total = a[0] + a[1] * z_m
        der = a[1]
        zd = mp.mpc(1)
        zp = z_m
        peak = max(abs(a[0]), abs(a[1] * z_m))
        eps = mp.mpf(10) ** (-(dps - 2))
        k = 0
        quiet = 0
        while True:
            prev2 = a[k - 2] if k >= 2 else 0
            nxt = (prev2 / 4 - c * a[k]) / ((k + 1) * (k + 2))
            a.append(nxt)
            zd = zp
            zp = zp * z_m
            term = nxt * zp
            total += term
            der += (k + 2) * nxt * zd
            m = abs(term)
            if m > peak:
                peak = m
            k += 1
            if m <= eps * peak:
                quiet += 1
                if quiet >= 4:
                    break
            else:
                quiet = 0
            if k > 20000:
                raise SpecialFunctionRangeError(
                    f"Taylor series for D_{nu}({z}) did not converge",
                    argument=complex(z))
        return complex(total), complex(der)


def _eval(nu, z):
    if abs(z) > 6.0:
        val, err = _asymptotic(nu, z)
        if err < _ASYMPTOTIC_TOL:
            return val
    else:
        fast = _taylor_double(nu, z)
        if fast is not None:
            return fast[0]
    return _taylor(nu, z)[0]


def _check(nu, z, nu_max):
    if not (cmath.isfinite(nu) and cmath.isfinite(z)):
        raise SpecialFunctionRangeError("non-finite argument to D_nu",
                                        argument=complex(z))
    if abs(nu) > nu_max * (1 + 1e-12) or abs(z) > Z_MAX * (1 + 1e-12):
        raise SpecialFunctionRangeError(
            f"D_nu(z) evaluated outside |nu| <= {nu_max:g}, |z| <= {Z_MAX:g}: "
            f"nu = {nu!r}, z = {z!r}", argument=complex(z))


def pcf_d(nu, z):
    """D_nu(z) for |nu| <= 5 and |z| <= 50."""
    nu, z = complex(nu), complex(z)
    _check(nu, z, NU_MAX)
    return _eval(nu, z)


def pcf_d_prime(nu, z):
    """d/dz D_nu(z) via the ladder D' = -(z/2) D + nu D_{nu-1}."""
    nu, z = complex(nu), complex(z)
    _check(nu, z, NU_MAX)
    if abs(z) <= 6.0:
        fast = _taylor_double(nu, z)
        return fast[1] if fast is not None else _taylor(nu, z)[1]
    out = -0.5 * z * _eval(nu, z)
    if nu != 0:
        out += nu * _eval(nu - 1.0, z)
    return out


pcf_d_vec = np.vectorize(pcf_d, otypes=[complex])
