"""The Airy and parabolic cylinder model Riemann-Hilbert solutions.

Both are sectionally analytic 2x2 functions. Each sector carries its own
entire formula, so jumps are checked by evaluating the two neighbouring
formulas at the same point of the ray (analytic continuation of each side)
instead of at small normal offsets, where the drift of the function would
swamp a 1e-8 budget.

Ray orientation fixes the + side as the one on the left.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContourError, DomainError, PoleError
from .specfun import airy, pcf_d, pcf_d_prime, rgamma

__all__ = ["Ray", "AIRY_RAYS", "PC_RAYS", "airy_sector", "airy_parametrix",
           "airy_leading", "airy_normalized_error", "PCJumpData", "pc_jump_data",
           "pc_sector", "pc_parametrix", "pc_connection_defect", "pc_normalized", "pc_log",
           "jump_residual", "airy_jump_residuals", "pc_jump_residuals",
           "fit_power", "airy_report", "pc_report", "Z_MAX", "NU_MAX"]

Z_MAX = 30.0
NU_MAX = 2.0
_OMEGA = cmath.exp(2j * math.pi / 3)
_SQRT_2PI = math.sqrt(2 * math.pi)
_ANGLE_EPS = 1e-13


@dataclass(frozen=True)
class Ray:
    name: str
    angle: float
    outward: bool
    plus: int      # sector on the left of the orientation
    minus: int


def _on_ray(z, angles):
    if z == 0:
        return True
    a = cmath.phase(z)
    for t in angles:
        d = (a - t + math.pi) % (2 * math.pi) - math.pi
        if abs(d) <= _ANGLE_EPS:
            return True
    return False


# Airy parametrix: sectors 0..3 are (0, 3pi/4), (3pi/4, pi), (-pi, -3pi/4), (-3pi/4, 0)

AIRY_RAYS = (
    Ray("Sigma1", 0.0, True, 0, 3),
    Ray("Sigma2", 3 * math.pi / 4, False, 0, 1),
    Ray("Sigma3", math.pi, False, 1, 2),
    Ray("Sigma4", -3 * math.pi / 4, False, 2, 3),
)

_AIRY_JUMPS = {
    "Sigma1": np.array([[1, 1], [0, 1]], dtype=complex),
    "Sigma2": np.array([[1, 0], [1, 1]], dtype=complex),
    "Sigma3": np.array([[0, 1], [-1, 0]], dtype=complex),
    "Sigma4": np.array([[1, 0], [1, 1]], dtype=complex),
}


def airy_sector(z):
    z = complex(z)
    if _on_ray(z, [r.angle for r in AIRY_RAYS]):
        raise ContourError(f"z = {z} lies on the jump contour")
    a = cmath.phase(z)
    if 0 < a < 3 * math.pi / 4:
        return 0
    if a > 0:
        return 1
    if a < -3 * math.pi / 4:
        return 2
    return 3


def _check_modulus(z, bound):
    if abs(z) > bound:
        raise DomainError(f"|z| = {abs(z)} exceeds {bound}")


def airy_parametrix(z, sector=None):
    """Sectionally analytic Airy solution; ``sector`` forces one formula."""
    z = complex(z)
    _check_modulus(z, Z_MAX)
    if sector is None:
        sector = airy_sector(z)
    w, w2 = _OMEGA, _OMEGA * _OMEGA
    a0, d0 = airy(z)
    a1, d1 = airy(w * z)
    a2, d2 = airy(w2 * z)
    col_z = (a0, -1j * d0)
    col_w_neg = (-w * a1, 1j * w2 * d1)      # -w Ai(wz), i w^2 Ai'(wz)
    col_w_pos = (w * a1, -1j * w2 * d1)
    col_w2_neg = (-w2 * a2, 1j * w * d2)
    col_w2_pos = (w2 * a2, -1j * w * d2)
    if sector == 0:
        cols = (col_z, col_w2_neg)
    elif sector == 1:
        cols = (col_w_neg, col_w2_neg)
    elif sector == 2:
        cols = (col_w2_neg, col_w_pos)
    elif sector == 3:
        cols = (col_z, col_w_pos)
    else:
        raise ValueError(f"unknown sector {sector}")
    return _SQRT_2PI * np.array([[cols[0][0], cols[1][0]],
                                 [cols[0][1], cols[1][1]]], dtype=complex)


def airy_leading(z):
    """(1/sqrt 2) diag(z^{-1/4}, z^{1/4}) [[1, i], [i, 1]] on the principal branch."""
    z = complex(z)
    q = z ** 0.25
    return np.array([[1 / q, 1j / q], [1j * q, q]]) / math.sqrt(2)


def airy_normalized_error(z):
    """max-norm of L(z)^{-1} Phi(z) e^{(2/3) z^{3/2} sigma3} - I."""
    z = complex(z)
    th = (2.0 / 3.0) * z ** 1.5
    m = np.linalg.solve(airy_leading(z), airy_parametrix(z))
    m = m * np.array([cmath.exp(th), cmath.exp(-th)])[None, :]
    return float(np.max(np.abs(m - np.eye(2))))


# parabolic cylinder parametrix: sectors 0..4 are (-pi/4, 0), (0, pi/2),
# (pi/2, pi), (-pi, -pi/2), (-pi/2, -pi/4); sector 0 is the seed

PC_RAYS = (
    Ray("Sigma1", 0.0, True, 1, 0),
    Ray("Sigma2", math.pi / 2, True, 2, 1),
    Ray("Sigma3", math.pi, True, 3, 2),
    Ray("Sigma4", -math.pi / 2, True, 4, 3),
    Ray("Sigma5", -math.pi / 4, True, 0, 4),
)


@dataclass(frozen=True)
class PCJumpData:
    nu: complex
    h0: complex
    h1: complex
    H: tuple          # H0, H1, H2, H3
    twist: np.ndarray  # e^{2 pi i nu sigma3}

    def jump(self, ray_index):
        return self.H[ray_index] if ray_index < 4 else self.twist

    def cyclic_product(self):
        return self.H[0] @ self.H[1] @ self.H[2] @ self.H[3] @ self.twist


def _check_nu(nu):
    if abs(nu) > NU_MAX:
        raise DomainError(f"|nu| = {abs(nu)} exceeds {NU_MAX}")


def pc_jump_data(nu) -> PCJumpData:
    nu = complex(nu)
    _check_nu(nu)
    if nu != 0 and nu.imag == 0 and nu.real == round(nu.real):
        raise PoleError(f"nu = {nu}: a Gamma pole degenerates the jump data")
    h0 = -1j * _SQRT_2PI * rgamma(nu + 1)
    h1 = _SQRT_2PI * rgamma(-nu) * cmath.exp(1j * math.pi * nu)
    H0 = np.array([[1, 0], [h0, 1]], dtype=complex)
    H1 = np.array([[1, h1], [0, 1]], dtype=complex)
    e = cmath.exp(1j * math.pi * (nu + 0.5))
    # conjugation by e^{a sigma3} scales the off-diagonal entries by e^{+-2a}
    H2 = np.array([[1, 0], [h0 / (e * e), 1]], dtype=complex)
    H3 = np.array([[1, h1 * e * e], [0, 1]], dtype=complex)
    tw = cmath.exp(2j * math.pi * nu)
    return PCJumpData(nu, h0, h1, (H0, H1, H2, H3), np.diag([tw, 1 / tw]))


def pc_sector(z):
    z = complex(z)
    if _on_ray(z, [r.angle for r in PC_RAYS]):
        raise ContourError(f"z = {z} lies on the jump contour")
    a = cmath.phase(z)
    if -math.pi / 4 < a < 0:
        return 0
    if 0 < a < math.pi / 2:
        return 1
    if a > math.pi / 2:
        return 2
    if a < -math.pi / 2:
        return 3
    return 4


def _basis(z, nu, which):
    """(F, dF/dz) for the four Weber solutions used as sector bases.

    1: D_{-nu-1}(iz)   2: D_nu(z)   3: D_{-nu-1}(-iz)   4: D_nu(-z)
    """
    if which == 1:
        return np.array([pcf_d(-nu - 1, 1j * z), 1j * pcf_d_prime(-nu - 1, 1j * z)])
    if which == 2:
        return np.array([pcf_d(nu, z), pcf_d_prime(nu, z)])
    if which == 3:
        return np.array([pcf_d(-nu - 1, -1j * z), -1j * pcf_d_prime(-nu - 1, -1j * z)])
    return np.array([pcf_d(nu, -z), -pcf_d_prime(nu, -z)])


# the solution recessive somewhere in each sector, per column; a column that
# is recessive in part of a sector is a multiple of that one function, so no
# exponentially large terms cancel when it is evaluated
_RECESSIVE = {0: (1, 2), 1: (3, 2), 2: (3, 4), 3: (1, 4), 4: (1, 2)}
_PARTNER = {1: 2, 3: 2, 2: 1, 4: 1}


def _seed_chain(sector, data: PCJumpData):
    """Right factor taking the seed formula to ``sector`` by the shortest walk."""
    H0, H1, H2, H3 = data.H
    inv_tw = np.diag(1 / np.diag(data.twist))
    if sector == 0:
        return np.eye(2, dtype=complex)
    if sector == 1:
        return H0
    if sector == 2:
        return H0 @ H1
    if sector == 4:
        return inv_tw
    if sector == 3:
        return inv_tw @ np.linalg.inv(H3)
    raise ValueError(f"unknown sector {sector}")


@lru_cache(maxsize=64)
def _sector_coefficients(nu):
    """Per sector and column: (basis id, multiple, neglected partner coefficient).

    The seed formula times the jump chain is re-expanded at z = 0 in the
    pair (recessive solution, partner); the partner coefficient vanishes
    analytically and its size is kept as a diagnostic.
    """
    data = pc_jump_data(nu)
    ph = cmath.exp(0.5j * math.pi * (nu + 1))
    seed0 = np.stack([ph * _basis(0j, nu, 1), _basis(0j, nu, 2)], axis=1)
    out = {}
    for sector, rec in _RECESSIVE.items():
        target = seed0 @ _seed_chain(sector, data)
        cols = []
        for j in range(2):
            b = np.stack([_basis(0j, nu, rec[j]), _basis(0j, nu, _PARTNER[rec[j]])], axis=1)
            alpha, beta = np.linalg.solve(b, target[:, j])
            cols.append((rec[j], complex(alpha), complex(beta)))
        out[sector] = tuple(cols)
    return out


def pc_connection_defect(nu):
    """Largest |partner / multiple| over all sector columns (zero in exact arithmetic)."""
    co = _sector_coefficients(complex(nu))
    return max(abs(b) / max(abs(a), 1e-300) for cols in co.values() for _, a, b in cols)


def pc_parametrix(z, nu, sector=None, data: PCJumpData | None = None):
    z = complex(z)
    nu = complex(nu)
    _check_modulus(z, Z_MAX)
    if data is None:
        pc_jump_data(nu)
    if sector is None:
        sector = pc_sector(z)
    cols = _sector_coefficients(nu)[sector]
    left = np.array([[z / 2, 1], [1, 0]], dtype=complex)
    u = np.stack([a * _basis(z, nu, which) for which, a, _ in cols], axis=1)
    return left @ u


def pc_log(z):
    """log z with arg in [-pi/4, 7pi/4): the cut lies on the twist ray."""
    z = complex(z)
    a = cmath.phase(z)
    if a < -math.pi / 4:
        a += 2 * math.pi
    return complex(math.log(abs(z)), a)


def pc_normalized(z, nu):
    """Phi(z) e^{-(z^2/4 - nu log z) sigma3}, which tends to I."""
    z = complex(z)
    g = z * z / 4 - nu * pc_log(z)
    return pc_parametrix(z, nu) * np.array([cmath.exp(-g), cmath.exp(g)])[None, :]


# checks

def jump_residual(phi, ray: Ray, jump, r):
    """Column-wise relative |Phi_+ - Phi_- J| at z = r e^{i angle}."""
    z = r * cmath.exp(1j * ray.angle)
    plus = phi(z, ray.plus)
    rhs = phi(z, ray.minus) @ jump
    num = np.max(np.abs(plus - rhs), axis=0)
    den = np.maximum(np.max(np.abs(plus), axis=0), 1e-300)
    return float(np.max(num / den))


def _probe_radii(count, rmax):
    return np.linspace(rmax / count, rmax, count)


def airy_jump_residuals(count=20, rmax=10.0):
    out = {}
    for ray in AIRY_RAYS:
        J = _AIRY_JUMPS[ray.name]
        out[ray.name] = max(jump_residual(airy_parametrix, ray, J, r)
                            for r in _probe_radii(count, rmax))
    return out


def pc_jump_residuals(nu, count=20, rmax=6.0):
    data = pc_jump_data(nu)

    def phi(z, s):
        return pc_parametrix(z, nu, s, data)

    out = {}
    for i, ray in enumerate(PC_RAYS):
        out[ray.name] = max(jump_residual(phi, ray, data.jump(i), r)
                            for r in _probe_radii(count, rmax))
    return out


def fit_power(r, err):
    """Least-squares slope of log err against log r."""
    return float(np.polyfit(np.log(r), np.log(err), 1)[0])


_AIRY_DIRECTIONS = (0.3, 1.2, 2.5, 2.9, -2.9, -2.5, -1.2, -0.3)
_PC_DIRECTIONS = (-0.4, 0.5, 1.2, 2.0, 2.7, -2.2, -1.3)


def airy_report(count=20):
    r = np.linspace(5.0, 30.0, 12)
    slopes = {}
    for a in _AIRY_DIRECTIONS:
        err = [airy_normalized_error(x * cmath.exp(1j * a)) for x in r]
        slopes[f"{a:+.2f}"] = fit_power(r, err)
    probes = [cmath.rect(x, a) for a in _AIRY_DIRECTIONS for x in (0.5, 2.0, 7.0)]
    det = max(abs(np.linalg.det(airy_parametrix(z)) - 1) for z in probes)
    return {"jump_residuals": airy_jump_residuals(count), "det_error": float(det),
            "decay_exponents": slopes}


def pc_first_coefficient(nu, radii=None, directions=_PC_DIRECTIONS):
    """Fit z (Phi e^{-(..) sigma3} - I) = A + B/z over the sampled radii."""
    if radii is None:
        radii = np.linspace(10.0, 25.0, 16)
    zs, rows = [], []
    for a in directions:
        for x in radii:
            z = cmath.rect(x, a)
            zs.append(z)
            rows.append(z * (pc_normalized(z, nu) - np.eye(2)))
    zs = np.array(zs)
    design = np.stack([np.ones_like(zs), 1 / zs, 1 / zs ** 2], axis=1)
    y = np.array(rows).reshape(len(zs), 4)
    coef = np.linalg.lstsq(design, y, rcond=None)[0]
    return coef[0].reshape(2, 2)


def pc_report(nu, count=20):
    nu = complex(nu)
    data = pc_jump_data(nu)
    A = pc_first_coefficient(nu)
    expected = np.array([[0, nu], [1, 0]])
    r = np.linspace(8.0, 25.0, 10)
    slopes = {}
    for a in _PC_DIRECTIONS:
        err = []
        for x in r:
            z = cmath.rect(x, a)
            rem = pc_normalized(z, nu) - np.eye(2) - expected / z
            err.append(float(np.max(np.abs(rem))))
        slopes[f"{a:+.2f}"] = fit_power(r, err)
    probes = [cmath.rect(x, a) for a in _PC_DIRECTIONS for x in (0.5, 2.0, 5.0)]
    det = max(abs(np.linalg.det(pc_parametrix(z, nu, data=data)) - 1) for z in probes)
    return {
        "nu": [nu.real, nu.imag],
        "identity_error": float(abs(1 + data.h0 * data.h1 - cmath.exp(2j * math.pi * nu))),
        "cyclic_error": float(np.max(np.abs(data.cyclic_product() - np.eye(2)))),
        "first_coefficient_error": float(np.max(np.abs(A - expected))),
        "jump_residuals": pc_jump_residuals(nu, count),
        "det_error": float(det),
        "decay_exponents": slopes,
    }
