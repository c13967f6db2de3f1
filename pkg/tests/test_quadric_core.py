import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mtembed import quadric_core as qc
from mtembed.quadric_core import QuadricError, QuadricPoint
from mtembed.suites import fd_jacobian

S = 1 / math.sqrt(2)


def close(a, b, tol=1e-12):
    return all(abs(complex(x) - complex(y)) <= tol for x, y in zip(a, b))


def test_constants():
    assert qc.TAU_SQ == pytest.approx((2 + math.sqrt(2)) / 3, abs=1e-15)
    assert qc.TAU == pytest.approx(1.0668041935883540, abs=1e-13)
    assert qc.TWO_OVER_SQRT3 > qc.TAU


@pytest.mark.parametrize("z, w", [
    ((1, 0, 0, 0), (1, 1, 0, 0)),
    ((0, 0, 0, 1), (0, 0, 1j, -1j)),
])
def test_coordinate_change_examples(z, w):
    assert close(qc.to_w_coords(*z), w)
    assert close(qc.from_w_coords(*w), z)


def test_random_quadric_in_z_maps_onto_quadric():
    rng = np.random.default_rng(3)
    for _ in range(200):
        z = rng.normal(size=3) + 1j * rng.normal(size=3)
        s = complex(1 - np.sum(z * z))
        z4 = cmath.sqrt(s)
        w = qc.to_w_coords(*z, z4)
        assert abs(w[0] * w[1] + w[2] * w[3] - 1) <= 1e-12 * max(1, float(np.max(np.abs(z))) ** 2)


@pytest.mark.parametrize("w, t", [((1, 1, 0, 0), 1.0), ((1, 1, 1, 0), 1.5), ((1, 1, 0.3, 0), 1.045)])
def test_t_level(w, t):
    assert qc.t_level(QuadricPoint(*w)) == pytest.approx(t, abs=1e-14)


def test_eval_map_examples():
    assert close(qc.eval_map(QuadricPoint(1, 1, 0, 0)), (1, 0, 0))
    assert close(qc.eval_map(QuadricPoint(S, S, S, S)), (S, S, 0.25 + 0.25j), 1e-15)
    assert close(qc.eval_map(QuadricPoint(1, 1, 1, 0)), (1, 1, 0))


def test_map_agrees_with_sphere_map_at_equal_point():
    # f(z, w) = (z, w, w zb wb^2 + i z zb^2 wb) at z = w = 1/sqrt 2
    z = w = S
    f3 = w * z * w * w + 1j * z * z * z * w
    assert close(qc.ar_map(z, w), (z, w, f3))
    assert close(qc.eval_map(qc.sphere_point(z, w)), (z, w, f3))


def test_jacobian_examples():
    J = qc.eval_jacobian(QuadricPoint(1, 1, 0, 0))
    assert J.chart == "phi" and J.value == pytest.approx(1j)
    a = qc.DEGENERACY_PRODUCTS[0]
    W = QuadricPoint(1, 1 - a, 1, a)
    assert abs(qc.eval_jacobian(W).value) <= 1e-12


def test_jacobian_chart_choice():
    W = QuadricPoint.from_chart(0.3, 1.7, 0.2 + 0.1j)
    assert qc.eval_jacobian(W).chart == "psi"


def test_min_g():
    assert qc.min_g(1, 1) == (4.0, (1.0, 1.0))
    val, (x, y) = qc.min_g(qc.DEGENERACY_P, qc.DEGENERACY_Q)
    assert val == pytest.approx(2 * qc.TAU, abs=1e-14)
    assert (x, y) == pytest.approx((0.754345, 0.312460), abs=1e-6)
    with pytest.raises(QuadricError):
        qc.min_g(0, 1)


def test_degeneracy_witness_at_tau():
    W = qc.degeneracy_witness(qc.TAU)
    assert W.w1 == pytest.approx(0.868530, abs=1e-6)
    assert W.w3 == pytest.approx(0.558981, abs=1e-6)
    assert W.w2 == pytest.approx((3 + math.sqrt(2) + 1j) / 6 / 0.868530, abs=1e-5)
    assert qc.t_level(W) == pytest.approx(qc.TAU, abs=1e-12)
    assert abs(qc.eval_jacobian(W).value) <= 1e-12


def test_degeneracy_witness_above_tau():
    W = qc.degeneracy_witness(1.2)
    assert qc.t_level(W) == pytest.approx(1.2, abs=1e-12)
    assert abs(qc.eval_jacobian(W).value) <= 1e-9


def test_degeneracy_witness_below_tau_raises_quoting_threshold():
    with pytest.raises(QuadricError, match="tau"):
        qc.degeneracy_witness(1.05)


def test_sample_mt_examples():
    assert close(qc.sample_mt(1.045, 0, 0, 0, split=0.0).coords, (1, 1, 0.3, 0), 1e-12)
    W = qc.sample_mt(1.05, 0.5, 0, 0, 0.5)
    assert close(W.coords, (0.827694, 0.604088, 0.827694, 0.604088), 1e-6)
    assert qc.t_level(W) == pytest.approx(1.05, abs=1e-13)


def test_sample_mt_on_ellipse_boundary():
    z = 0.3 + 0.1j
    t = abs(1 - z) + abs(z)
    W = qc.sample_mt(t, z, 0, 0, 0.5)
    assert qc.t_level(W) == pytest.approx(t, abs=1e-13)
    assert abs(W.w1) == pytest.approx(abs(cmath.sqrt(1 - z)), abs=1e-7)
    assert abs(W.w3) == pytest.approx(abs(cmath.sqrt(z)), abs=1e-7)
    assert W.w3 * W.w4 == pytest.approx(z, abs=1e-14)


def test_sample_mt_infeasible():
    with pytest.raises(QuadricError):
        qc.sample_mt(1.05, 2.0)
    with pytest.raises(QuadricError):
        qc.sample_mt(0.9, 0.5)


def test_off_quadric_rejected():
    with pytest.raises(QuadricError):
        QuadricPoint(1, 1, 1, 1)
    with pytest.raises(QuadricError):
        QuadricPoint(float("nan"), 1, 0, 0)


def test_solve_x_plus_p_over_x():
    r = qc.solve_x_plus_p_over_x(0.25, 1.05)
    assert r.value == pytest.approx(0.685078, abs=1e-6)
    assert r.value + 0.25 / r.value == pytest.approx(1.05)
    assert qc.solve_x_plus_p_over_x(0, 0.3).value == 0.3


# -- properties -------------------------------------------------------------

angle = st.floats(0, 2 * math.pi)
modulus = st.floats(0.2, 2.0)


@settings(max_examples=200, deadline=None)
@given(modulus, angle, modulus, angle, st.floats(-3, 3), st.floats(-3, 3))
def test_roundtrip_and_membership(r1, t1, r3, t3, x4, y4):
    W = QuadricPoint.from_chart(r1 * cmath.exp(1j * t1), r3 * cmath.exp(1j * t3), complex(x4, y4))
    assert W.residual <= 1e-12 * max(1.0, max(abs(w) for w in W.coords) ** 2)
    back = qc.to_w_coords(*qc.from_w_coords(*W.coords))
    assert close(back, W.coords, 1e-12 * max(abs(w) for w in W.coords))


@settings(max_examples=200, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_map_matches_sphere_map(a, b, c, d):
    n = math.sqrt(a * a + b * b + c * c + d * d)
    if n < 1e-3:
        return
    z, w = complex(a, b) / n, complex(c, d) / n
    W = qc.sphere_point(z, w)
    assert qc.t_level(W) == pytest.approx(1.0, abs=1e-12)
    assert qc.eval_map(W).distance(qc.ar_map(z, w)) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(0.3, 1.5), angle, st.floats(0.3, 1.5), angle, st.floats(-2, 2), st.floats(-2, 2))
def test_jacobian_matches_finite_differences(r1, t1, r3, t3, x4, y4):
    W = QuadricPoint.from_chart(r1 * cmath.exp(1j * t1), r3 * cmath.exp(1j * t3), complex(x4, y4))
    J = qc.eval_jacobian(W)
    fd = fd_jacobian(W, J.chart)
    assert abs(fd - J.value) <= 1e-5 * max(abs(J.value), 1e-3)


@settings(max_examples=100, deadline=None)
@given(st.floats(1.001, 1.5), st.floats(0.05, 0.95), angle, angle)
def test_samples_lie_on_level(t, split, p1, p3):
    W = qc.sample_mt(t, 0.5, p1, p3, split)
    assert qc.t_level(W) == pytest.approx(t, abs=1e-12)
    assert W.w3 * W.w4 == pytest.approx(0.5, abs=1e-14)
