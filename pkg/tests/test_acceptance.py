"""Acceptance gates. Each test prints one PASS/FAIL line and asserts it."""

import cmath
import math

import numpy as np
import pytest

from acceptance_log import criterion
from ncpii.asympt import as_branch, as_phase, hm_branch, zero_product_branch
from ncpii.fredholm import build_system, det_identity_check
from ncpii.parametrix import airy_report, pc_first_coefficient, pc_jump_data
from ncpii.pii import (RayState, integrate, integrate_coupling, integrate_matrix,
                       scalar_pii_integrate)
from ncpii.specfun import airy, airy_ai, gamma, log_gamma, pcf_d
from ncpii.structure import RayConfig, from_mu_sigma, validate_coupling


# 1. scalar oscillatory connection

@pytest.mark.parametrize("k", [0.3, 0.5, 0.7])
def test_c01_scalar_oscillatory_connection(k):
    with criterion(1, f"scalar oscillatory connection k={k}") as box:
        c = validate_coupling([[k]])
        tr = integrate_coupling(c, -10.0, 1e-11, t0=6.0)
        grid = np.linspace(-10.0, -5.0, 51)
        dev = []
        for S in grid:
            pr = as_branch(0, 0, RayConfig(S, (0.0,)), c)
            # the trajectory carries -C, so it tracks -value
            dev.append(abs(tr(S)[0][0, 0] + pr.value) / pr.envelope)
        dev = np.array(dev)
        scaled = dev * np.abs(grid)
        trend = np.polyfit(np.abs(grid), scaled, 1)[0]
        d5, d10 = dev[-1], dev[0]
        box["detail"] = (f"dev(-5)={d5:.2e} (<=0.08), dev(-10)={d10:.2e} (<=0.04), "
                         f"trend of dev*|S| {trend:+.1e} (<=0)")
        box["ok"] = d5 <= 0.08 and d10 <= 0.04 and trend <= 0
    assert box["ok"] and box["runtime"] < 5


# 2. separatrix branch

def test_c02_separatrix_branch():
    with criterion(2, "product-one branch at S=-4") as box:
        c = validate_coupling([[0, 1], [1, 0]])
        # separatrix orbits amplify local error; 1e-12 is the loosest tol that holds 3%
        tr = integrate_coupling(c, -4.0, 1e-12)
        pred = -hm_branch(0, 1, RayConfig(-4.0, (0.0, 0.0)), c)
        got = tr(-4.0, strict=True)[0][0, 1]
        rel = abs(got - pred) / abs(pred)
        box["detail"] = f"B12={got.real:.6f}, prediction {pred.real:.6f}, rel {rel:.2e} (<=0.03)"
        box["ok"] = rel <= 0.03
    assert box["ok"] and box["runtime"] < 5


# 3. hybrid behaviour and entry asymmetry

def _fit_amplitude(tr, coupling, k, l, grid):
    """Least-squares amplitude of entry (k, l) against the predicted phase."""
    p = complex(coupling.C[k, l] * coupling.C[l, k]).real
    y = np.array([tr(S)[0][k, l].real for S in grid])
    g = np.array([(-2 * S) ** -0.25 * math.cos(as_phase(S, S, p)) for S in grid])
    return -float(np.dot(g, y) / np.dot(g, g))


def test_c03_hybrid_and_asymmetry():
    with criterion(3, "hybrid behaviour and entry asymmetry") as box:
        runs = {}
        ok = True
        notes = []
        for mu3 in (0.2, 0.4):
            c = from_mu_sigma([0.6, 1.0, mu3], [2, 1, 0])
            tr = integrate_coupling(c, -9.0, 1e-12)
            hm_pred = -hm_branch(1, 1, RayConfig(-4.0, (0.0,) * 3), c)
            hm_rel = abs(tr(-4.0, strict=True)[0][1, 1] - hm_pred) / abs(hm_pred)
            as_dev = 0.0
            for k, l in ((0, 2), (2, 0)):
                pr = as_branch(k, l, RayConfig(-8.0, (0.0,) * 3), c)
                as_dev = max(as_dev, abs(tr(-8.0)[0][k, l] + pr.value) / pr.envelope)
            ok &= hm_rel <= 0.03 and as_dev <= 0.4 / 8
            runs[mu3] = _fit_amplitude(tr, c, 0, 2, np.linspace(-9.0, -7.0, 41))
            notes.append(f"mu3={mu3}: (2,2) rel {hm_rel:.1e}, AS dev {as_dev:.1e}")
        ratio = runs[0.2] / runs[0.4]
        expected = math.sqrt((math.log(0.88) / 0.12) / (math.log(0.76) / 0.24))
        miss = abs(ratio / expected - 1)
        ok &= miss <= 0.10
        box["detail"] = "; ".join(notes) + \
            f"; envelope ratio {ratio:.4f} vs {expected:.4f} (miss {miss:.1e} <= 0.10)"
        box["ok"] = bool(ok)
    assert box["ok"]


# 4. regime continuity

def test_c04_regime_continuity():
    with criterion(4, "continuity as the product tends to zero") as box:
        gap = 0.0
        for S in np.linspace(-12.0, -4.0, 81):
            for eps in ((0.0, 0.0), (0.3, -0.3)):
                ray = RayConfig(S, eps)
                zp = zero_product_branch(0, 1, ray, validate_coupling([[0, 0.7], [0, 0]]))
                ap = as_branch(0, 1, ray, validate_coupling([[0, 0.7], [1e-8 / 0.7, 0]]))
                gap = max(gap, abs(ap.value - zp.value))
        box["detail"] = f"max gap {gap:.2e} (<1e-6)"
        box["ok"] = gap < 1e-6
    assert box["ok"] and box["runtime"] < 1


# 5. determinant identity

COUPLINGS = [
    [[0.3]],
    [[0.6]],
    [[0.9]],
    [[0, 0.5], [0.3, 0]],
    [[0.9, 0], [0, 0.4]],
    [[0, 0.6 + 0.3j], [0.2 - 0.5j, 0]],
]


def test_c05_determinant_identity():
    with criterion(5, "Fredholm determinant identity") as box:
        worst = 0.0
        for C in COUPLINGS:
            assert max(np.linalg.svd(np.array(C, dtype=complex), compute_uv=False)) <= 0.9
            tr = integrate_matrix(C, -2.0, 1e-10)
            for s in (-2.0, -1.0, 0.0, 1.0):
                worst = max(worst, det_identity_check(build_system(s, C, 100), tr, s))
        box["detail"] = f"max residual {worst:.2e} over 6 couplings x 4 points (<1e-6)"
        box["ok"] = worst < 1e-6
    assert box["ok"] and box["runtime"] < 30


# 6. one-channel reduction

def test_c06_scalar_reduction():
    with criterion(6, "one-channel reduction beta(t) = q(2t)") as box:
        tol = 1e-11
        tr = integrate_matrix([[0.5]], -4.0, tol)
        q = scalar_pii_integrate(-0.5, 12.0, -8.0, tol)
        t = np.linspace(-4.0, 4.0, 401)
        gap = float(np.max(np.abs(tr(t)[0][:, 0, 0] - q(2 * t)[0][:, 0])))
        box["detail"] = f"max |beta - q(2t)| = {gap:.2e} (<1e-8)"
        box["ok"] = gap < 1e-8
    assert box["ok"]


def test_c06_rescaled_form_is_not_a_solution():
    # sqrt(2) q(2 sqrt(2) t) fails the one-channel equation B'' = 8 t B + 8 B^3
    q = scalar_pii_integrate(-0.5, 12.0, -12.0, 1e-12)
    t, h = -1.0, 1e-3
    f = lambda x: math.sqrt(2) * q(2 * math.sqrt(2) * x)[0][0].real
    second = (f(t + h) - 2 * f(t) + f(t - h)) / h ** 2
    res = second - 8 * t * f(t) - 8 * f(t) ** 3
    assert abs(res) > 1e-2


# 7. Airy model problem

def test_c07_airy_model_problem():
    with criterion(7, "Airy parametrix") as box:
        rep = airy_report(count=20)
        jump = max(rep["jump_residuals"].values())
        slopes = list(rep["decay_exponents"].values())
        spread = max(abs(s + 1.5) for s in slopes)
        box["detail"] = (f"jump {jump:.1e} (<1e-8), det {rep['det_error']:.1e} (<1e-10), "
                         f"exponents in [{min(slopes):.3f}, {max(slopes):.3f}] (-1.5 +- 0.1)")
        box["ok"] = jump < 1e-8 and rep["det_error"] < 1e-10 and spread <= 0.1
    assert box["ok"] and box["runtime"] < 2


# 8. parabolic cylinder model problem

def test_c08_pc_model_problem():
    with criterion(8, "parabolic cylinder parametrix") as box:
        worst = {"identity": 0.0, "cyclic": 0.0, "coefficient": 0.0}
        for nu in (0.0, 0.3, 0.1j, 0.3 + 0.1j):
            d = pc_jump_data(nu)
            worst["identity"] = max(worst["identity"],
                                    abs(1 + d.h0 * d.h1 - cmath.exp(2j * math.pi * nu)))
            worst["cyclic"] = max(worst["cyclic"],
                                  float(np.max(np.abs(d.cyclic_product() - np.eye(2)))))
            A = pc_first_coefficient(nu)
            worst["coefficient"] = max(worst["coefficient"],
                                       float(np.max(np.abs(A - [[0, nu], [1, 0]]))))
        box["detail"] = (f"identity {worst['identity']:.1e} (<1e-12), cyclic "
                         f"{worst['cyclic']:.1e} (<1e-10), 1/z coefficient "
                         f"{worst['coefficient']:.1e} (<1e-3)")
        box["ok"] = (worst["identity"] < 1e-12 and worst["cyclic"] < 1e-10
                     and worst["coefficient"] < 1e-3)
    assert box["ok"] and box["runtime"] < 5


# 9. behaviour at +infinity

def test_c09_plus_infinity_slope():
    target = -(4.0 / 3.0) * 2 ** 1.5
    with criterion(9, "+infinity residual slope") as box:
        c = 0.5
        a, ap = airy(10.0)
        st = RayState(5.0, np.array([[-c * a]]), np.array([[-2 * c * ap]]))
        tr = integrate(st, 8.0, 1e-11)
        t = np.linspace(5.2, 8.0, 15)
        res = np.abs(tr(t)[0][:, 0, 0] + c * airy(2 * t)[0])
        slope = np.polyfit((2 * t) ** 1.5, np.log(res), 1)[0]
        miss = abs(slope / target - 1)
        box["detail"] = f"slope {slope:+.3f} vs {target:.3f} (miss {miss:.2f} <= 0.10)"
        box["ok"] = miss <= 0.10
    assert box["ok"]


# 10. special functions

OMEGA = cmath.exp(2j * math.pi / 3)


def test_c10_special_functions():
    with criterion(10, "special-function identities") as box:
        rng = np.random.default_rng(3)
        r = 5.0 * np.sqrt(rng.uniform(0, 1, 100))
        z = r * np.exp(1j * rng.uniform(-math.pi, math.pi, 100))
        a = airy_ai(z)
        con = a + OMEGA * airy_ai(OMEGA * z) + OMEGA ** 2 * airy_ai(OMEGA ** 2 * z)
        airy_res = float(np.max(np.abs(con) / np.maximum(np.abs(a), 1.0)))
        refl = 0.0
        for nu in (0.3j, 0.1j, 1.7j, 0.25 + 0.4j, -0.6 + 0.2j):
            lhs = gamma(nu) * gamma(-nu)
            refl = max(refl, abs(lhs + math.pi / (nu * cmath.sin(nu * math.pi))) / abs(lhs))
        half = abs(log_gamma(0.5) - math.log(math.sqrt(math.pi)))
        rec = 0.0
        for _ in range(50):
            nu = complex(rng.uniform(-3.5, 3.5), rng.uniform(-1.5, 1.5))
            x = rng.uniform(0, 12) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
            d0, dp, dm = pcf_d(nu, x), pcf_d(nu + 1, x), pcf_d(nu - 1, x)
            scale = max(abs(dp), abs(x * d0), abs(nu * dm))
            rec = max(rec, abs(dp - x * d0 + nu * dm) / scale)
        box["detail"] = (f"Airy connection {airy_res:.1e} (<1e-12), reflection "
                         f"{max(refl, half):.1e} (<1e-12), pcf recurrence {rec:.1e} (<1e-10)")
        box["ok"] = airy_res < 1e-12 and max(refl, half) < 1e-12 and rec < 1e-10
    assert box["ok"] and box["runtime"] < 2
