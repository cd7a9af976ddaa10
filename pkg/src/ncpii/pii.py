"""Matrix Painleve II along the ray s = t*1 + delta.

On the ray the equation reads ``B'' = 4 s B + 4 B s + 8 B^3`` with
``s = diag(t + delta)``. The boundary data at ``t0`` is the Airy tail
``B_kl = -c_kl Ai(2 t0 + delta_k + delta_l)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryError, DomainError
from .ode import DenseSecondOrder, solve_second_order
from .specfun import airy
from .structure import StructuredCoupling

__all__ = ["RayState", "Trajectory", "CouplingTrajectory", "rhs", "airy_boundary",
           "boundary_error_bound", "required_t0", "integrate", "integrate_coupling",
           "integrate_matrix",
           "scalar_pii_integrate", "scalar_reduction_check", "trace_integral",
           "trajectory_csv",
           "DEFAULT_T0", "BLOWUP"]

DEFAULT_T0 = 6.0
BLOWUP = 1e6
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass
class RayState:
    t: float
    B: np.ndarray
    Bp: np.ndarray


def rhs(t, B, delta):
    """Second derivative 4 s B + 4 B s + 8 B^3 with s = diag(t + delta)."""
    s = t + np.asarray(delta, dtype=float)
    return 4.0 * (s[:, None] * B + B * s[None, :]) + 8.0 * (B @ B @ B)


def _c_matrix(coupling):
    if isinstance(coupling, StructuredCoupling):
        return coupling.C
    return np.atleast_2d(np.asarray(coupling, dtype=complex))


def boundary_error_bound(t0, delta):
    """sqrt(t0) exp(-(4/3) x^{3/2}) at the smallest Airy argument x."""
    delta = np.asarray(delta, dtype=float)
    x = 2.0 * t0 + 2.0 * float(np.min(delta)) if delta.size else 2.0 * t0
    if x <= 0:
        return math.inf
    return math.sqrt(t0) * math.exp(-(4.0 / 3.0) * x ** 1.5)


def required_t0(delta, tol, t_min=DEFAULT_T0):
    """Smallest t0 >= t_min (on a 0.5 grid) whose boundary bound is below tol."""
    t0 = float(t_min)
    while boundary_error_bound(t0, delta) >= tol:
        t0 += 0.5
        if t0 > 1e4:
            raise BoundaryError("no start point reaches the requested tolerance")
    return t0


def airy_boundary(t0, coupling, delta=None, tol=None):
    """Airy-tail state at t0. With ``tol`` set, t0 must make the tail error small."""
    c = _c_matrix(coupling)
    n = c.shape[0]
    delta = np.zeros(n) if delta is None else np.asarray(delta, dtype=float)
    if tol is not None:
        bound = boundary_error_bound(t0, delta)
        if not bound < tol:
            raise BoundaryError(
                f"boundary error bound {bound:.3g} at t0 = {t0} exceeds tolerance {tol:.3g}",
                achievable=bound)
    x = 2.0 * t0 + delta[:, None] + delta[None, :]
    ai, aip = airy(x)
    return RayState(t=float(t0), B=-c * ai, Bp=-2.0 * c * aip)


@dataclass
class Trajectory:
    """Dense solution of the matrix equation for one block of indices."""
    sol: DenseSecondOrder
    delta: np.ndarray
    C: np.ndarray
    tol: float
    t0: float

    @property
    def diverged(self) -> bool:
        return self.sol.diverged

    @property
    def last_reliable_t(self) -> float:
        return self.sol.last_reliable_t

    @property
    def t(self) -> np.ndarray:
        return self.sol.t

    def state(self, t) -> RayState:
        B, Bp = self.sol(t)
        return RayState(float(t), B, Bp)

    def __call__(self, t):
        return self.sol(t)


def integrate(state0: RayState, t_end, tol, delta=None, C=None, atol=0.0,
              blowup=BLOWUP) -> Trajectory:
    """Adaptive DP5(4) from ``state0.t`` to ``t_end``."""
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError(f"tol = {tol} outside [1e-13, 1e-6]")
    n = np.asarray(state0.B).shape[0]
    delta = np.zeros(n) if delta is None else np.asarray(delta, dtype=float)
    sol = solve_second_order(lambda t, B: rhs(t, B, delta), state0.t, state0.B,
                             state0.Bp, t_end, rtol=tol, atol=atol, blowup=blowup)
    return Trajectory(sol=sol, delta=delta, C=None if C is None else np.asarray(C),
                      tol=tol, t0=state0.t)


@dataclass
class CouplingTrajectory:
    """Per-orbit trajectories of a structured coupling, assembled on demand.

    Each sigma-orbit is integrated on its own, so an entry that blows up
    (the separatrix entries) does not stop the others.
    """
    coupling: StructuredCoupling
    delta: np.ndarray
    tol: float
    t0: float
    t_end: float
    parts: list = field(default_factory=list)   # (orbit, Trajectory or None)

    @property
    def n(self):
        return self.coupling.n

    def last_reliable(self) -> np.ndarray:
        """n x n array of the smallest trustworthy t per entry."""
        out = np.full((self.n, self.n), self.t_end, dtype=float)
        for orb, tr in self.parts:
            if tr is not None and tr.diverged:
                for i in orb:
                    for j in orb:
                        out[i, j] = tr.last_reliable_t
        return out

    @property
    def diverged(self) -> bool:
        return any(tr is not None and tr.diverged for _, tr in self.parts)

    def __call__(self, t, strict=False):
        """(B, Bp) at t; entries past their divergence point are NaN."""
        scalar = np.ndim(t) == 0
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        B = np.zeros((tt.size, self.n, self.n), dtype=complex)
        Bp = np.zeros_like(B)
        for orb, tr in self.parts:
            if tr is None:
                continue
            idx = np.ix_(range(tt.size), orb, orb)
            ok = tt >= tr.last_reliable_t if tr.diverged else np.ones(tt.size, dtype=bool)
            if strict and not ok.all():
                raise DomainError(f"orbit {tuple(i + 1 for i in orb)} diverged at "
                                  f"t = {tr.last_reliable_t:.6g}")
            sub_b = np.full((tt.size, len(orb), len(orb)), np.nan, dtype=complex)
            sub_p = sub_b.copy()
            if ok.any():
                sub_b[ok], sub_p[ok] = tr(tt[ok])
            B[idx] = sub_b
            Bp[idx] = sub_p
        if scalar:
            return B[0], Bp[0]
        return B, Bp

    def entry(self, k, l, t):
        return self(t)[0][..., k, l]


def integrate_coupling(coupling: StructuredCoupling, t_end, tol, delta=None,
                       t0=None, blowup=BLOWUP) -> CouplingTrajectory:
    """Integrate each sigma-orbit from its Airy data down to t_end.

    ``t0`` defaults to the smallest start point (at least 6) whose boundary
    error bound is below ``tol``.
    """
    n = coupling.n
    delta = np.zeros(n) if delta is None else np.asarray(delta, dtype=float)
    if t0 is None:
        t0 = required_t0(delta, tol)
    C = coupling.C
    out = CouplingTrajectory(coupling=coupling, delta=delta, tol=tol, t0=float(t0),
                             t_end=float(t_end))
    for orb in coupling.orbits():
        orb = list(orb)
        sub = C[np.ix_(orb, orb)]
        if not np.any(sub):
            out.parts.append((orb, None))
            continue
        d = delta[orb]
        st = airy_boundary(t0, sub, d, tol=tol)
        out.parts.append((orb, integrate(st, t_end, tol, delta=d, C=sub, blowup=blowup)))
    return out


def integrate_matrix(C, t_end, tol, delta=None, t0=None, blowup=BLOWUP) -> Trajectory:
    """Integrate the full n x n system for an arbitrary coupling matrix."""
    C = _c_matrix(C)
    n = C.shape[0]
    delta = np.zeros(n) if delta is None else np.asarray(delta, dtype=float)
    if t0 is None:
        t0 = required_t0(delta, tol)
    st = airy_boundary(t0, C, delta, tol=tol)
    return integrate(st, t_end, tol, delta=delta, C=C, blowup=blowup)


def scalar_pii_integrate(k, s0, s_end, tol, blowup=BLOWUP) -> DenseSecondOrder:
    """q'' = s q + 2 q^3 from q = k Ai(s0), q' = k Ai'(s0)."""
    ai, aip = airy(float(s0))
    k = complex(k)
    return solve_second_order(lambda s, q: s * q + 2.0 * q ** 3, float(s0),
                              np.array([k * ai]), np.array([k * aip]), s_end,
                              rtol=tol, blowup=blowup)


def scalar_reduction_check(matrix_traj, scalar_traj, t_grid) -> float:
    """max |beta_1(t) - q(2t)| for an n = 1 trajectory and a scalar solution.

    The scalar solution must carry the boundary constant k = -c.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1-d array")
    if not (matrix_traj.sol.covers(t_grid) if isinstance(matrix_traj, Trajectory)
            else matrix_traj.covers(t_grid)):
        raise ValueError("t_grid is not covered by the matrix trajectory")
    if not scalar_traj.covers(2.0 * t_grid):
        raise ValueError("2 * t_grid is not covered by the scalar trajectory")
    b = matrix_traj(t_grid)[0].reshape(t_grid.size, -1)
    if b.shape[1] != 1:
        raise ValueError("scalar reduction needs an n = 1 trajectory")
    q = scalar_traj(2.0 * t_grid)[0].reshape(t_grid.size)
    return float(np.max(np.abs(b[:, 0] - q)))


def _tail(C, delta, t0, s):
    """-4 * int_{t0}^inf (t - s) Tr B(t)^2 dt with the Airy form of B."""
    prod = C * C.T
    total = 0j
    n = C.shape[0]
    for k in range(n):
        for l in range(n):
            if prod[k, l] == 0:
                continue
            d = delta[k] + delta[l]
            x0 = 2.0 * t0 + d
            ai, aip = airy(x0)
            i0 = aip * aip - x0 * ai * ai
            i1 = -(x0 * x0 * ai * ai - x0 * aip * aip + ai * aip) / 3.0
            # t = (x - d)/2: int (t - s) Ai(x)^2 dt = (1/4) int x Ai^2 - ((d + 2s)/4) int Ai^2
            total += prod[k, l] * (0.25 * i1 - 0.25 * (d + 2.0 * s) * i0)
    return -4.0 * total


def _block_pieces(traj):
    if isinstance(traj, CouplingTrajectory):
        for orb, tr in traj.parts:
            if tr is not None:
                yield tr, tr.C, np.asarray(tr.delta)
    else:
        if traj.C is None:
            raise ValueError("trajectory has no coupling attached; the tail needs it")
        yield traj, traj.C, np.asarray(traj.delta)


def trace_integral(traj, s):
    """-4 * int_s^inf (t - s) Tr(beta_1(t + delta)^2) dt.

    Steps of the dense output are integrated by 8-point Gauss-Legendre and
    the part beyond the start point uses the closed-form Airy tail.
    """
    total = 0j
    for tr, C, delta in _block_pieces(traj):
        sol = tr.sol
        lo = sol.t_last
        if sol.diverged or s < lo - 1e-12 * max(1.0, abs(lo)):
            raise DomainError(f"trajectory does not reach s = {s} reliably "
                              f"(last reliable t = {sol.last_reliable_t:.6g})")
        ts = sol.t
        t_hi = ts[:-1]
        t_lo = ts[1:]
        keep = t_hi > s
        a = np.maximum(t_lo[keep], s)
        b = t_hi[keep]
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        tq = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        wq = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
        B = sol(tq)[0]
        tr2 = np.einsum("kij,kji->k", B, B)
        total += -4.0 * np.sum(wq * (tq - s) * tr2)
        total += _tail(C, delta, tr.t0, s)
    return total


def trajectory_csv(traj, t_grid, entries=None) -> str:
    """CSV text: t, then Re/Im of B and Bp for each tracked (k, l), 1-based names."""
    t_grid = np.asarray(t_grid, dtype=float)
    B, Bp = traj(t_grid)
    B = np.asarray(B).reshape(t_grid.size, *np.shape(B)[-2:])
    Bp = np.asarray(Bp).reshape(B.shape)
    n = B.shape[-1]
    if entries is None:
        entries = [(k, l) for k in range(n) for l in range(n)]
    head = ["t"]
    for k, l in entries:
        tag = f"{k + 1}{l + 1}" if n < 10 else f"{k + 1}_{l + 1}"
        head += [f"B{tag}_re", f"B{tag}_im", f"Bp{tag}_re", f"Bp{tag}_im"]
    lines = [",".join(head)]
    for i, t in enumerate(t_grid):
        vals = [t]
        for k, l in entries:
            b, bp = B[i, k, l], Bp[i, k, l]
            vals += [b.real, b.imag, bp.real, bp.imag]
        lines.append(",".join(f"{float(v):.17g}" for v in vals))
    return "\n".join(lines) + "\n"
