import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncpii.errors import DomainError
from ncpii.fredholm import (airy_kernel, build_system, det_identity_check, quadrature,
                            tw_scalar, tw_scalar_pii)
from ncpii.pii import integrate_coupling, integrate_matrix
from ncpii.structure import validate_coupling


def test_quadrature_integrates_exponential():
    x, w = quadrature(80)
    assert abs(np.sum(w * np.exp(-x)) - 1.0) < 1e-12
    assert abs(np.sum(w * x * np.exp(-x / 3)) - 9.0) < 1e-10


def test_minimum_nodes():
    with pytest.raises(ValueError):
        build_system(0.0, [[0.5]], m=10)


def test_factorization_and_symmetry():
    C = np.array([[0.3, 0.5], [-0.2, 0.4]])
    for s in (-2.0, 0.0, 1.5):
        sy = build_system(s, C, 60, delta=[0.3, -0.3])
        lhs = sy.det_minus_square()
        assert abs(lhs - sy.det_minus() * sy.det_plus()) < 1e-10
        # block (j,k) is c_jk times a symmetric matrix
        m = sy.m
        for j in range(2):
            for k in range(2):
                blk = sy.K[j * m:(j + 1) * m, k * m:(k + 1) * m] / C[j, k]
                assert np.allclose(blk, blk.T, atol=1e-15)


def test_node_doubling_converges():
    C = validate_coupling([[0, 0.5], [0.3, 0]])
    for s in (-2.0, 0.0):
        a = build_system(s, C, 100).det_minus_square()
        b = build_system(s, C, 200).det_minus_square()
        assert abs(a - b) < 1e-12


def test_determinant_in_unit_interval_and_monotone():
    C = np.array([[0.0, 0.8], [0.7, 0.0]])
    grid = np.linspace(-3, 3, 13)
    d = np.array([build_system(s, C, 60).det_minus_square() for s in grid])
    assert np.all(np.abs(d.imag) < 1e-12)
    assert np.all(d.real > -1e-8) and np.all(d.real <= 1 + 1e-8)
    assert np.all(np.diff(d.real) > 0)


def test_identity_residual_scalar():
    tr = integrate_matrix([[0.5]], -1.0, 1e-10)
    sy = build_system(-1.0, [[0.5]], 100)
    assert det_identity_check(sy, tr, -1.0) < 1e-6


def test_identity_residual_offdiagonal():
    c = validate_coupling([[0, 0.5], [0.3, 0]])
    tr = integrate_coupling(c, 0.0, 1e-10)
    sy = build_system(0.0, c, 100)
    assert det_identity_check(sy, tr, 0.0) < 1e-6


def test_identity_with_offsets():
    C = np.array([[0.4, 0.2], [0.1, -0.3]])
    delta = [0.25, -0.25]
    tr = integrate_matrix(C, -1.5, 1e-10, delta=delta)
    for s in (-1.5, 0.0):
        sy = build_system(s, C, 100, delta=delta)
        assert det_identity_check(sy, tr, s) < 1e-8


def test_identity_needs_covered_range():
    tr = integrate_matrix([[0.5]], 0.0, 1e-10)
    with pytest.raises(DomainError):
        det_identity_check(build_system(-1.0, [[0.5]], 40), tr, -1.0)


def test_airy_kernel_diagonal_is_limit():
    x = np.array([-1.3, 0.4, 2.0])
    k = airy_kernel(x, x + 1e-6)
    assert np.allclose(np.diag(k), np.diag(airy_kernel(x, x)), atol=1e-6)


def test_tracy_widom_value():
    # published value of the GUE edge distribution at -2
    assert abs(tw_scalar(-2.0, 1.0, 200) - 0.4132241425) < 1e-10


def test_thinned_tw_against_pii():
    assert abs(tw_scalar(-2.0, 0.5) - tw_scalar_pii(-2.0, 0.5)) < 1e-6


def test_single_channel_square_is_thinned_tw():
    # (A_s)^2 for one channel with coupling g is g^2 K_Ai on (2s, inf)
    for s in (-1.0, 0.5):
        sy = build_system(s, [[0.7]], 100)
        assert abs(sy.det_minus_square() - tw_scalar(2 * s, 0.49)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 2), st.floats(0.05, 1.0))
def test_thinned_tw_monotone_in_gamma(s, g):
    a = tw_scalar(s, g, 50)
    b = tw_scalar(s, 0.9 * g, 50)
    assert 0 < a <= b + 1e-13 <= 1 + 1e-8
