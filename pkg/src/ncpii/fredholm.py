"""Nystrom discretization of the matrix Airy operator on L^2(R_+, C^n).

The operator has kernel ``c_jk Ai(x + y + s_j + s_k)``. Quadrature nodes come
from Gauss-Legendre on [0, 1) pushed through ``x = L u / (1 - u)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .pii import CouplingTrajectory, Trajectory, trace_integral
from .specfun import airy
from .structure import StructuredCoupling

__all__ = ["NystromSystem", "quadrature", "build_system", "det_identity_check",
           "tw_scalar", "tw_scalar_pii", "airy_kernel", "MAP_SCALE"]

MAP_SCALE = 10.0
_AIRY_CUTOFF = 200.0   # Ai(200) ~ exp(-1886): zero in double precision


def quadrature(m, scale=MAP_SCALE):
    """Nodes and weights on (0, inf) from m Gauss-Legendre points."""
    if m < 1:
        raise ValueError("m must be positive")
    u, w = np.polynomial.legendre.leggauss(m)
    u = 0.5 * (u + 1.0)
    w = 0.5 * w
    x = scale * u / (1.0 - u)
    return x, w * scale / (1.0 - u) ** 2


def _ai_clamped(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    ok = x < _AIRY_CUTOFF
    if ok.any():
        out[ok] = airy(x[ok])[0]
    return out


@dataclass
class NystromSystem:
    m: int
    nodes: np.ndarray
    weights: np.ndarray
    K: np.ndarray
    s: np.ndarray

    @property
    def n(self):
        return self.s.size

    def det_minus(self):
        return complex(np.linalg.det(np.eye(self.K.shape[0]) - self.K))

    def det_plus(self):
        return complex(np.linalg.det(np.eye(self.K.shape[0]) + self.K))

    def det_minus_square(self):
        return complex(np.linalg.det(np.eye(self.K.shape[0]) - self.K @ self.K))


def build_system(s, coupling, m=100, delta=None, scale=MAP_SCALE) -> NystromSystem:
    """Assemble K at the base point s (s_j = s + delta_j)."""
    if m < 20:
        raise ValueError("m must be at least 20")
    C = coupling.C if isinstance(coupling, StructuredCoupling) else \
        np.atleast_2d(np.asarray(coupling, dtype=complex))
    n = C.shape[0]
    delta = np.zeros(n) if delta is None else np.asarray(delta, dtype=float)
    sv = float(s) + delta
    x, w = quadrature(m, scale)
    sw = np.sqrt(w)
    K = np.zeros((n * m, n * m), dtype=complex)
    for j in range(n):
        for k in range(n):
            if C[j, k] == 0:
                continue
            arg = x[:, None] + x[None, :] + sv[j] + sv[k]
            K[j * m:(j + 1) * m, k * m:(k + 1) * m] = \
                C[j, k] * sw[:, None] * _ai_clamped(arg) * sw[None, :]
    return NystromSystem(m=m, nodes=x, weights=w, K=K, s=sv)


def det_identity_check(system: NystromSystem, traj, s) -> float:
    """|det(I - K^2) - exp(-4 int_s^inf (t - s) Tr beta_1^2 dt)|."""
    if isinstance(traj, (Trajectory, CouplingTrajectory)) and getattr(traj, "diverged", False):
        raise DomainError("trajectory diverged; the trace integral is unavailable")
    rhs = np.exp(trace_integral(traj, s))
    return float(abs(system.det_minus_square() - rhs))


def airy_kernel(x, y):
    """(Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y), with Ai'(x)^2 - x Ai(x)^2 on x = y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ax, dx = airy(x)
    ay, dy = airy(y)
    diff = x[:, None] - y[None, :]
    num = ax[:, None] * dy[None, :] - dx[:, None] * ay[None, :]
    same = diff == 0
    with np.errstate(invalid="ignore", divide="ignore"):
        k = num / np.where(same, 1.0, diff)
    diag = dx * dx - x * ax * ax
    k = np.where(same, np.broadcast_to(diag[:, None], k.shape), k)
    return k


def tw_scalar(s, gamma, m=100, scale=MAP_SCALE) -> float:
    """det(I - gamma K_Ai) on L^2(s, inf) by the same Nystrom scheme."""
    x, w = quadrature(m, scale)
    y = float(s) + x
    keep = y < _AIRY_CUTOFF
    y, w = y[keep], w[keep]
    sw = np.sqrt(w)
    K = gamma * sw[:, None] * airy_kernel(y, y) * sw[None, :]
    return float(np.linalg.det(np.eye(y.size) - K))


def tw_scalar_pii(s, gamma, tol=1e-11, x0=8.0) -> float:
    """exp(-int_s^inf (x - s) q(x)^2 dx) with q the PII solution ~ sqrt(gamma) Ai.

    Independent route to :func:`tw_scalar`; the part beyond x0 uses the
    closed-form Airy integrals.
    """
    from .pii import scalar_pii_integrate, _GL_NODES, _GL_WEIGHTS
    k = math.sqrt(gamma)
    s = float(s)
    if s >= x0:
        raise DomainError(f"s = {s} must lie below the start point {x0}")
    sol = scalar_pii_integrate(k, x0, s, tol)
    if sol.diverged:
        raise DomainError("scalar trajectory diverged")
    ts = sol.t
    a, b = ts[1:], ts[:-1]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    xq = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    wq = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    q = sol(xq)[0].real.ravel()
    total = float(np.sum(wq * (xq - s) * q * q))
    ai, aip = airy(x0)
    i0 = aip * aip - x0 * ai * ai
    i1 = -(x0 * x0 * ai * ai - x0 * aip * aip + ai * aip) / 3.0
    total += gamma * (i1 - s * i0)
    return math.exp(-total)
