"""Structured couplings C = Lambda P and ray coordinates.

Indices are 0-based in code. The CLI and the reports shift them to 1-based.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundError, InvolutionError, RegimeError, StructureError

__all__ = ["StructuredCoupling", "RayConfig", "validate_coupling", "from_mu_sigma",
           "connection_exponent", "commutation_check", "PRODUCT_ONE_TOL"]

PRODUCT_ONE_TOL = 1e-14
_MODULUS_SLACK = 1e-14

HM = "I"
ZERO = "J1"
AS = "J2"


@dataclass(frozen=True)
class StructuredCoupling:
    n: int
    mu: tuple
    sigma: tuple
    regime: tuple = field(repr=False)

    @property
    def C(self) -> np.ndarray:
        c = np.zeros((self.n, self.n), dtype=complex)
        for i in range(self.n):
            c[i, self.sigma[i]] = self.mu[i]
        return c

    def product(self, j: int) -> complex:
        return self.mu[j] * self.mu[self.sigma[j]]

    @property
    def I(self) -> frozenset:
        return frozenset(i for i in range(self.n) if self.regime[i] == HM)

    @property
    def J1(self) -> frozenset:
        return frozenset(i for i in range(self.n) if self.regime[i] == ZERO)

    @property
    def J2(self) -> frozenset:
        return frozenset(i for i in range(self.n) if self.regime[i] == AS)

    @property
    def J(self) -> frozenset:
        return self.J1 | self.J2

    def nu(self, j: int) -> complex:
        return connection_exponent(self, j)

    def orbits(self) -> list:
        """sigma-orbits as sorted tuples: fixed points and transpositions."""
        seen = set()
        out = []
        for i in range(self.n):
            if i not in seen:
                orb = tuple(sorted({i, self.sigma[i]}))
                seen.update(orb)
                out.append(orb)
        return out

    def pattern(self) -> np.ndarray:
        """Boolean mask of the positions (k, sigma(k))."""
        m = np.zeros((self.n, self.n), dtype=bool)
        for i in range(self.n):
            m[i, self.sigma[i]] = True
        return m

    def relabel(self, perm) -> "StructuredCoupling":
        """Coupling P C P^T for the index map i -> perm[i]."""
        perm = list(perm)
        mu = [0j] * self.n
        sigma = [0] * self.n
        for i in range(self.n):
            mu[perm[i]] = self.mu[i]
            sigma[perm[i]] = perm[self.sigma[i]]
        return from_mu_sigma(mu, sigma)


def _classify(p: complex) -> str:
    if abs(p - 1.0) <= PRODUCT_ONE_TOL:
        return HM
    if p == 0:
        return ZERO
    return AS


def from_mu_sigma(mu, sigma) -> StructuredCoupling:
    mu = tuple(complex(m) for m in mu)
    sigma = tuple(int(s) for s in sigma)
    n = len(mu)
    if n == 0 or len(sigma) != n:
        raise StructureError("mu and sigma must be non-empty and of equal length")
    if sorted(sigma) != list(range(n)):
        raise StructureError(f"sigma {sigma} is not a permutation of 0..{n - 1}")
    for i in range(n):
        if not (cmath.isfinite(mu[i])):
            raise StructureError(f"non-finite entry mu[{i}]")
        if abs(mu[i]) > 1.0 + _MODULUS_SLACK:
            raise BoundError(f"|mu_{i + 1}| = {abs(mu[i]):.17g} exceeds 1")
        if sigma[sigma[i]] != i:
            raise InvolutionError(
                f"sigma is not an involution at index {i + 1}; C^2 is not diagonal")
    regime = []
    for i in range(n):
        p = mu[i] * mu[sigma[i]]
        r = _classify(p)
        if r == AS and (1.0 - p).imag == 0 and (1.0 - p).real <= 0:
            raise RegimeError(
                f"1 - mu_j mu_sigma(j) = {1.0 - p} lies on the branch cut of log")
        regime.append(r)
    return StructuredCoupling(n=n, mu=mu, sigma=sigma, regime=tuple(regime))


def validate_coupling(raw) -> StructuredCoupling:
    """Decompose a raw n x n matrix into Lambda, sigma and index sets."""
    c = np.asarray(raw, dtype=complex)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
        raise StructureError(f"coupling must be a non-empty square matrix, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise StructureError("coupling has non-finite entries")
    n = c.shape[0]
    nz = c != 0
    if np.any(nz.sum(axis=1) > 1) or np.any(nz.sum(axis=0) > 1):
        raise StructureError("coupling has more than one nonzero per row or column")
    f = {}
    for i, j in zip(*np.nonzero(nz)):
        f[int(i)] = int(j)
    sigma = [None] * n
    for i, j in f.items():
        if j in f and f[j] != i:
            raise InvolutionError(
                f"C^2 has an off-diagonal entry at ({i + 1}, {f[j] + 1})")
        sigma[i] = j
        sigma[j] = i
    for i in range(n):
        if sigma[i] is None:
            sigma[i] = i
    mu = [c[i, sigma[i]] for i in range(n)]
    return from_mu_sigma(mu, sigma)


def connection_exponent(coupling: StructuredCoupling, j: int) -> complex:
    """nu_j = -(1/(2 pi i)) ln(1 - mu_j mu_sigma(j)), principal log.

    Equivalently nu_j = i ln(1 - p)/(2 pi); for real p = k^2 this is
    nu = i chi with chi = ln(1 - k^2)/(2 pi).
    """
    if coupling.regime[j] == HM:
        raise RegimeError(f"index {j + 1} has product 1; the exponent is singular")
    p = coupling.product(j)
    if p == 0:
        return 0j
    return 1j * cmath.log(1.0 - p) / (2.0 * math.pi)


def commutation_check(coupling: StructuredCoupling, subset) -> bool:
    """Exact test that the diagonal projector onto ``subset`` commutes with C."""
    e = np.zeros(coupling.n)
    for i in subset:
        e[i] = 1.0
    c = coupling.C
    return bool(np.array_equal(e[:, None] * c, c * e[None, :]))


@dataclass(frozen=True)
class RayConfig:
    """Base coordinate S with offsets delta_i = eps_i S, sum(eps) = 0."""
    S: float
    eps: tuple

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps)
        object.__setattr__(self, "eps", eps)
        if not math.isfinite(self.S):
            raise StructureError("S must be finite")
        for i, e in enumerate(eps):
            if not -1.0 < e < 1.0:
                raise StructureError(f"eps_{i + 1} = {e} is outside (-1, 1)")
        if abs(sum(eps)) > 1e-12 * max(1, len(eps)):
            raise StructureError(f"offsets must average to zero, sum(eps) = {sum(eps)}")

    @property
    def n(self) -> int:
        return len(self.eps)

    @property
    def delta(self) -> np.ndarray:
        return np.array(self.eps) * self.S

    @property
    def s(self) -> np.ndarray:
        return self.S + self.delta

    def r_pair(self, coupling: StructuredCoupling, k: int) -> float:
        return (self.eps[k] + self.eps[coupling.sigma[k]]) / 2.0 + 1.0

    def t_pair(self, coupling: StructuredCoupling, k: int) -> float:
        return (self.eps[k] - self.eps[coupling.sigma[k]]) / 2.0


def zero_offsets(n: int) -> tuple:
    return (0.0,) * n
