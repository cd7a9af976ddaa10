"""Dormand-Prince 5(4) for second-order systems x'' = a(t, x).

The state is the pair (x, v) with v = x'. Every accepted step stores
x, v and a at its end, so the dense output is the quintic Hermite
interpolant of x; v is read off as its derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import StiffnessError

__all__ = ["DenseSecondOrder", "solve_second_order"]

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# difference between the 5th and 4th order weights
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_TINY = 1e-300


@dataclass
class DenseSecondOrder:
    """Accepted steps of a second-order solve with quintic Hermite output."""
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    a: np.ndarray
    diverged: bool = False
    last_reliable_t: float = math.nan
    rejected: int = 0
    info: dict = field(default_factory=dict)

    @property
    def t_first(self) -> float:
        return float(self.t[0])

    @property
    def t_last(self) -> float:
        return float(self.t[-1])

    def covers(self, t) -> bool:
        lo, hi = sorted((self.t_first, self.t_last))
        t = np.asarray(t)
        return bool(np.all((t >= lo - 1e-12 * max(1.0, abs(lo))) &
                           (t <= hi + 1e-12 * max(1.0, abs(hi)))))

    def __call__(self, t):
        """Return (x(t), v(t)); t may be a scalar or a 1-d array."""
        scalar = np.ndim(t) == 0
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        if not self.covers(tt):
            raise ValueError(f"t outside the solved interval [{self.t_last}, {self.t_first}]")
        ts = self.t
        desc = ts[0] > ts[-1]
        key = -ts if desc else ts
        q = -tt if desc else tt
        idx = np.clip(np.searchsorted(key, q, side="right") - 1, 0, len(ts) - 2)
        t0 = ts[idx]
        h = ts[idx + 1] - t0
        th = (tt - t0) / h
        shape = (-1,) + (1,) * (self.x.ndim - 1)
        th = th.reshape(shape)
        h = h.reshape(shape)
        th2 = th * th
        th3 = th2 * th
        th4 = th3 * th
        th5 = th4 * th
        h0 = 1 - 10 * th3 + 15 * th4 - 6 * th5
        h1 = th - 6 * th3 + 8 * th4 - 3 * th5
        h2 = 0.5 * (th2 - 3 * th3 + 3 * th4 - th5)
        h3 = 1 - h0
        h4 = -4 * th3 + 7 * th4 - 3 * th5
        h5 = 0.5 * (th3 - 2 * th4 + th5)
        d0 = (-30 * th2 + 60 * th3 - 30 * th4)
        d1 = 1 - 18 * th2 + 32 * th3 - 15 * th4
        d2 = 0.5 * (2 * th - 9 * th2 + 12 * th3 - 5 * th4)
        d4 = -12 * th2 + 28 * th3 - 15 * th4
        d5 = 0.5 * (3 * th2 - 8 * th3 + 5 * th4)
        xa, xb = self.x[idx], self.x[idx + 1]
        va, vb = self.v[idx], self.v[idx + 1]
        aa, ab = self.a[idx], self.a[idx + 1]
        x = h0 * xa + h * h1 * va + h * h * h2 * aa + h3 * xb + h * h4 * vb + h * h * h5 * ab
        v = d0 * (xa - xb) / h + d1 * va + h * d2 * aa + d4 * vb + h * d5 * ab
        if scalar:
            return x[0], v[0]
        return x, v


def _initial_step(f, t, y, f0, direction, scale, span):
    # norm-wise estimate: a component that starts at zero must not force h -> 0
    d0 = np.max(np.abs(y)) / scale
    d1 = np.max(np.abs(f0)) / scale
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, abs(span))
    y1 = y + direction * h0 * f0
    f1 = f(t + direction * h0, y1)
    d2 = np.max(np.abs(f1 - f0)) / scale / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, abs(span))


def solve_second_order(accel, t0, x0, v0, t_end, rtol, atol=0.0,
                       blowup=1e6, max_steps=2_000_000, h_init=None):
    """Integrate x'' = accel(t, x) from t0 to t_end.

    ``x0`` and ``v0`` may be arrays of any (matching) shape. Error control is
    componentwise against ``atol + rtol * m_i``, where ``m_i`` is the running
    maximum of ``|y_i|``; with the default ``atol = 0`` the control is purely
    relative, which is what tiny Airy-tail data needs.

    If ``max |x|`` exceeds ``blowup`` the solve stops early with
    ``diverged = True``. A step-size underflow raises StiffnessError.
    """
    x0 = np.asarray(x0, dtype=complex)
    v0 = np.asarray(v0, dtype=complex)
    shape = x0.shape
    m = x0.size
    direction = 1.0 if t_end >= t0 else -1.0
    span = t_end - t0

    def f(t, y):
        xs = y[:m].reshape(shape)
        return np.concatenate([y[m:], np.asarray(accel(t, xs), dtype=complex).ravel()])

    y = np.concatenate([x0.ravel(), v0.ravel()])
    t = float(t0)
    k1 = f(t, y)
    ts = [t]
    xs = [x0.copy()]
    vs = [v0.copy()]
    as_ = [k1[m:].reshape(shape).copy()]
    atol_eff = max(float(atol), _TINY)
    runmax = np.abs(y)
    diverged = False
    rejected = 0

    if span == 0:
        return DenseSecondOrder(np.array(ts), np.array(xs), np.array(vs), np.array(as_),
                                last_reliable_t=t)

    scale0 = atol_eff + rtol * max(float(np.max(runmax)), _TINY)
    h = abs(h_init) if h_init else _initial_step(f, t, y, k1, direction, scale0, span)
    k = np.empty((7, y.size), dtype=complex)
    for _ in range(max_steps):
        if direction * (t - t_end) >= 0:
            break
        h = min(h, abs(t_end - t))
        hmin = 1e-14 * max(1.0, abs(t))
        if h < hmin:
            raise StiffnessError(f"step size underflow at t = {t:.17g}", t=t)
        hs = direction * h
        k[0] = k1
        for i in range(1, 7):
            acc = y.copy()
            for j, aij in enumerate(_A[i]):
                if aij:
                    acc += hs * aij * k[j]
            k[i] = f(t + _C[i] * hs, acc)
        y_new = acc  # the 7th stage is evaluated at the 5th order solution
        err = hs * (_E @ k)
        scale = atol_eff + rtol * np.maximum(runmax, np.abs(y_new))
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.abs(err) / scale
        ratio = np.where(err == 0, 0.0, ratio)
        en = float(np.max(ratio)) if ratio.size else 0.0
        if not math.isfinite(en):
            en = 1e10
        if en <= 1.0:
            t_new = t + hs
            if abs(t_end - t_new) < 1e-13 * max(1.0, abs(t_end)):
                t_new = t_end
            t = t_new
            y = y_new
            k1 = k[6].copy()
            runmax = np.maximum(runmax, np.abs(y))
            ts.append(t)
            xs.append(y[:m].reshape(shape).copy())
            vs.append(y[m:].reshape(shape).copy())
            as_.append(k1[m:].reshape(shape).copy())
            if np.max(np.abs(y[:m])) > blowup or not np.all(np.isfinite(y)):
                diverged = True
                break
            fac = _MAX_FACTOR if en == 0 else min(_MAX_FACTOR, _SAFETY * en ** -0.2)
            h = h * max(fac, _MIN_FACTOR)
        else:
            rejected += 1
            h = h * max(_MIN_FACTOR, _SAFETY * en ** -0.2)
    else:
        raise StiffnessError(f"step budget exhausted at t = {t:.17g}", t=t)

    ts = np.array(ts)
    last = float(ts[-2]) if diverged and len(ts) > 1 else float(ts[-1])
    return DenseSecondOrder(ts, np.array(xs), np.array(vs), np.array(as_),
                            diverged=diverged, last_reliable_t=last, rejected=rejected)
