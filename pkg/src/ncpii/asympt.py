"""Closed-form behaviour of the matrix PII solution as S -> -infinity.

Three per-entry branches, selected by the product p = c_kl c_lk:

* p = 1: ``sqrt((-s_k - s_l)/2) c_kl``
* p = 0: ``(-s_k - s_l)^{-1/4} / sqrt(pi) * cos(Theta - pi/4) c_kl``
* otherwise: ``(-s_k - s_l)^{-1/4} sqrt(-ln(1-p)/(pi p)) cos(psi) c_kl``

with ``Theta = (2/3)(-s_k - s_l)^{3/2}`` and

    psi = Theta + (3/(4 pi)) ln(1-p) ln(-4(s_k+s_l))
          + (i/2) [log Gamma(nu) - log Gamma(-nu)] + pi/4,
    nu  = i ln(1-p) / (2 pi).

The Gamma term is a difference of principal log-Gammas rather than the log
of the ratio; only that choice tends to -pi/2 as p -> 0 and so joins the
p = 0 branch continuously.

These formulas pair with boundary data ``+c Ai`` at +infinity. The
integrator in :mod:`ncpii.pii` starts from ``-c Ai``, so the matching
prediction for a trajectory is the value for coupling ``-C``, which is
``-1`` times the value returned here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchError, DomainError, RegimeError
from .specfun import log_gamma
from .structure import AS, HM, ZERO, RayConfig, StructuredCoupling

__all__ = ["AsymptoticPrediction", "theta_hat", "i_theta_sum", "hm_value",
           "zero_product_value", "as_value", "as_phase", "hm_branch",
           "zero_product_branch", "as_branch", "predict_entry", "predict_matrix",
           "scalar_hm", "scalar_as", "scalar_complex_as", "scalar_chi",
           "EPS_MAX"]

EPS_MAX = 0.9
_SQRT_PI = math.sqrt(math.pi)

REGIME_NAMES = {HM: "HM", ZERO: "ZeroProduct", AS: "AblowitzSegur"}


@dataclass(frozen=True)
class AsymptoticPrediction:
    entry: tuple
    regime: str
    value: complex
    envelope: float
    phase: complex | None
    error_order: str = "O(S^-1)"


def _check_config(config: RayConfig, k: int, l: int):
    if not config.S < 0:
        raise DomainError(f"S = {config.S} must be negative")
    for i in (k, l):
        if abs(config.eps[i]) > EPS_MAX:
            raise DomainError(f"|eps_{i + 1}| = {abs(config.eps[i])} exceeds {EPS_MAX}")


def theta_hat(k: int, z, config: RayConfig):
    """i (-S)^{3/2} (z^3/6 - (s_k/S) z)."""
    S = config.S
    if not S < 0:
        raise DomainError(f"S = {S} must be negative")
    sk = config.s[k]
    return 1j * (-S) ** 1.5 * (z ** 3 / 6.0 - (sk / S) * z)


def i_theta_sum(sk, sl, S=None):
    """i(theta_k + theta_l) at z = sqrt((s_k + s_l)/S), in real arithmetic.

    At that argument the sum collapses to (2/3)(-s_k - s_l)^{3/2}.
    """
    a = -(np.asarray(sk, dtype=float) + np.asarray(sl, dtype=float))
    if np.any(a <= 0):
        raise DomainError("s_k + s_l must be negative")
    if S is not None and np.any(np.asarray(S) >= 0):
        raise DomainError("S must be negative")
    return (2.0 / 3.0) * a ** 1.5


def hm_value(sk, sl, ckl):
    a = -(np.asarray(sk, dtype=float) + np.asarray(sl, dtype=float))
    if np.any(a <= 0):
        raise DomainError("s_k + s_l must be negative")
    return np.sqrt(a / 2.0) * ckl


def zero_product_value(sk, sl, ckl):
    a = -(np.asarray(sk, dtype=float) + np.asarray(sl, dtype=float))
    th = i_theta_sum(sk, sl)
    return a ** -0.25 / _SQRT_PI * np.cos(th - math.pi / 4.0) * ckl


def _nu(p):
    return 1j * cmath.log(1.0 - p) / (2.0 * math.pi)


def _gamma_term(p):
    """(i/2)[log Gamma(nu) - log Gamma(-nu)]; real when p is real in (0, 1)."""
    nu = _nu(p)
    if nu.real == 0.0:
        # nu purely imaginary: Gamma(-nu) = conj Gamma(nu), so the term is
        # -Im log Gamma(nu); computing it that way keeps psi exactly real
        return complex(-log_gamma(nu).imag)
    return 0.5j * (log_gamma(nu) - log_gamma(-nu))


def _check_product(p):
    if p == 0 or abs(p - 1.0) == 0:
        raise RegimeError(f"product {p} belongs to another branch")
    w = 1.0 - p
    if w.imag == 0 and w.real <= 0:
        raise BranchError(f"1 - c_kl c_lk = {w} lies on the branch cut of log")


def as_phase(sk, sl, p):
    p = complex(p)
    _check_product(p)
    a = -(np.asarray(sk, dtype=float) + np.asarray(sl, dtype=float))
    L = cmath.log(1.0 - p)
    coef = 3.0 * L / (4.0 * math.pi)
    th = i_theta_sum(sk, sl)
    tail = _gamma_term(p) + math.pi / 4.0
    if coef.imag == 0 and tail.imag == 0:
        return th + coef.real * np.log(4.0 * a) + tail.real
    return th + coef * np.log(4.0 * a) + tail


def _as_amplitude(p):
    L = cmath.log(1.0 - p)
    r = -L / (math.pi * p)
    if r.imag == 0 and r.real > 0:
        return math.sqrt(r.real)
    return cmath.sqrt(r)


def as_value(sk, sl, ckl, clk):
    p = complex(ckl) * complex(clk)
    psi = as_phase(sk, sl, p)
    a = -(np.asarray(sk, dtype=float) + np.asarray(sl, dtype=float))
    return a ** -0.25 * _as_amplitude(p) * np.cos(psi) * ckl


def _pair(config, coupling, k, l):
    _check_config(config, k, l)
    c = coupling.C
    s = config.s
    return s[k], s[l], c[k, l], c[l, k]


def _regime_of(coupling, k, l):
    if coupling.sigma[k] != l:
        return None
    return coupling.regime[k]


def hm_branch(k, l, config: RayConfig, coupling: StructuredCoupling) -> complex:
    sk, sl, ckl, clk = _pair(config, coupling, k, l)
    if _regime_of(coupling, k, l) != HM:
        raise RegimeError(f"entry ({k + 1},{l + 1}) is not in the product-one regime")
    return complex(hm_value(sk, sl, ckl))


def zero_product_branch(k, l, config: RayConfig,
                        coupling: StructuredCoupling) -> AsymptoticPrediction:
    sk, sl, ckl, clk = _pair(config, coupling, k, l)
    if ckl * clk != 0:
        raise RegimeError(f"entry ({k + 1},{l + 1}) has nonzero product")
    a = -(sk + sl)
    env = a ** -0.25 / _SQRT_PI * abs(ckl)
    th = float(i_theta_sum(sk, sl))
    return AsymptoticPrediction((k, l), "ZeroProduct",
                                complex(zero_product_value(sk, sl, ckl)), env,
                                complex(th - math.pi / 4.0))


def as_branch(k, l, config: RayConfig, coupling: StructuredCoupling) -> AsymptoticPrediction:
    sk, sl, ckl, clk = _pair(config, coupling, k, l)
    p = ckl * clk
    if p == 0 or _regime_of(coupling, k, l) == HM:
        raise RegimeError(f"entry ({k + 1},{l + 1}) is not in the oscillatory regime")
    psi = complex(as_phase(sk, sl, p))
    a = -(sk + sl)
    pref = a ** -0.25 * _as_amplitude(p) * ckl
    env = abs(pref) * math.cosh(psi.imag)
    return AsymptoticPrediction((k, l), "AblowitzSegur",
                                complex(pref * cmath.cos(psi)), env, psi)


def predict_entry(k, l, config, coupling) -> AsymptoticPrediction | None:
    reg = _regime_of(coupling, k, l)
    if reg is None or coupling.C[k, l] == 0:
        return None
    if reg == HM:
        v = hm_branch(k, l, config, coupling)
        return AsymptoticPrediction((k, l), "HM", v, abs(v), None)
    if reg == ZERO:
        return zero_product_branch(k, l, config, coupling)
    return as_branch(k, l, config, coupling)


def predict_matrix(config: RayConfig, coupling: StructuredCoupling):
    """Per-entry predictions (None off the sigma pattern) and the value matrix."""
    n = coupling.n
    preds = [[None] * n for _ in range(n)]
    values = np.zeros((n, n), dtype=complex)
    for k in range(n):
        l = coupling.sigma[k]
        pr = predict_entry(k, l, config, coupling)
        preds[k][l] = pr
        if pr is not None:
            values[k, l] = pr.value
    return preds, values


# scalar formulas

def scalar_chi(k):
    return cmath.log(1.0 - complex(k) ** 2) / (2.0 * math.pi)


def scalar_hm(s, sign=1):
    s = np.asarray(s, dtype=float)
    if np.any(s >= 0):
        raise DomainError("s must be negative")
    return sign * np.sqrt(-s / 2.0)


def scalar_as(s, k):
    """Leading oscillatory term of q(s; k) for real k in (-1, 1)."""
    s = np.asarray(s, dtype=float)
    if np.any(s >= 0):
        raise DomainError("s must be negative")
    k = float(k)
    if not -1.0 < k < 1.0:
        raise DomainError(f"k = {k} outside (-1, 1)")
    if k == 0:
        return np.zeros_like(s)
    chi = math.log(1.0 - k * k) / (2.0 * math.pi)
    phi = -math.pi / 4.0 - log_gamma(1j * chi).imag - cmath.phase(-1j * k)
    m = -s
    return math.sqrt(-2.0 * chi) * m ** -0.25 * np.cos(
        (2.0 / 3.0) * m ** 1.5 + chi * np.log(8.0 * m ** 1.5) + phi)


def scalar_complex_as(s, k):
    """Leading term for complex k off (-inf, -1] and [1, inf).

    The sine form is written with the -i/2 Gamma-ratio coefficient and the
    amplitude -k sqrt(-2 chi / k^2); that amplitude keeps the formula odd in
    k, so it agrees with :func:`scalar_as` for real k of either sign.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s >= 0):
        raise DomainError("s must be negative")
    k = complex(k)
    if k.imag == 0 and abs(k.real) >= 1:
        raise DomainError(f"k = {k} lies on a cut of the admissible domain")
    if k == 0:
        return np.zeros_like(s, dtype=complex)
    chi = scalar_chi(k)
    if abs(chi.imag) >= 0.5:
        raise DomainError(f"|Im chi| = {abs(chi.imag)} is not below 1/2")
    phit = -math.pi / 4.0 - 0.5j * (log_gamma(-1j * chi) - log_gamma(1j * chi))
    amp = -k * cmath.sqrt(-2.0 * chi / (k * k))
    m = -s
    return amp * m ** -0.25 * np.sin((2.0 / 3.0) * m ** 1.5
                                     + chi * np.log(8.0 * m ** 1.5) + phit)
