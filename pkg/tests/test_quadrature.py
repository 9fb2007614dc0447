import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nitsche_bem.quadrature import (PanelPairClass, classify_pair, gauss_1d,
                                    near_singular_point_rule, pair_rule, singular_pair_rule,
                                    split_pair, tensor_2d)

import oracles

UNIT = (0.0, 1.0, 0.0, 1.0)


def kernel_sum(rule):
    return float(np.sum(rule.weights / np.linalg.norm(rule.x - rule.y, axis=1)))


def test_gauss_two_points():
    r = gauss_1d(2)
    assert np.allclose(np.sort(r.points[:, 0]), [(3 - np.sqrt(3)) / 6, (3 + np.sqrt(3)) / 6])
    assert np.allclose(r.weights, 0.5)
    assert r.integrate(lambda p: p[:, 0] ** 3) == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("q", [1, 2, 3, 5])
def test_tensor_exactness(q):
    r = tensor_2d(q)
    for a in range(2 * q):
        for b in range(2 * q):
            val = r.integrate(lambda p: p[:, 0] ** a * p[:, 1] ** b)
            assert val == pytest.approx(1.0 / ((a + 1) * (b + 1)), rel=1e-13)
    assert np.all(r.weights > 0)
    assert r.weights.sum() == pytest.approx(1.0, abs=1e-14)


def test_tensor_on_rectangle_measure():
    r = tensor_2d(3, (0.5, 2.0, -1.0, 0.0))
    assert r.weights.sum() == pytest.approx(1.5)


def test_bad_order():
    with pytest.raises(ValueError):
        gauss_1d(0)


@pytest.mark.parametrize("Q, cls", [
    (UNIT, PanelPairClass.COINCIDENT),
    ((1.0, 2.0, 0.0, 1.0), PanelPairClass.EDGE_ADJACENT),
    ((0.0, 1.0, -1.0, 0.0), PanelPairClass.EDGE_ADJACENT),
    ((1.0, 2.0, 1.0, 2.0), PanelPairClass.VERTEX_ADJACENT),
    ((-1.0, 0.0, 1.0, 2.0), PanelPairClass.VERTEX_ADJACENT),
    ((2.0, 3.0, 0.0, 1.0), PanelPairClass.SEPARATED),
])
def test_classification_symmetric(Q, cls):
    assert classify_pair(UNIT, Q) is cls
    assert classify_pair(Q, UNIT) is cls


def test_nonconforming_contact_rejected():
    with pytest.raises(ValueError):
        classify_pair(UNIT, (1.0, 2.0, 0.3, 0.7))


def test_singular_rule_class_mismatch():
    with pytest.raises(ValueError):
        singular_pair_rule(PanelPairClass.EDGE_ADJACENT, 4, UNIT, UNIT)
    with pytest.raises(ValueError):
        singular_pair_rule(PanelPairClass.SEPARATED, 4, UNIT, (2.0, 3.0, 0.0, 1.0))


@pytest.mark.parametrize("Q", list(oracles.PAIR_VALUES))
def test_pair_rule_against_oracle(Q):
    ref = oracles.PAIR_VALUES[Q]
    assert kernel_sum(pair_rule(UNIT, Q)) == pytest.approx(ref, rel=1e-6)


def test_coincident_against_closed_form():
    val = kernel_sum(singular_pair_rule(PanelPairClass.COINCIDENT, 6, UNIT, UNIT))
    assert abs(val - oracles.SQUARE_SELF) / oracles.SQUARE_SELF < 1e-7


def test_separated_plain_tensor_rule():
    Q = (2.0, 3.0, 0.0, 1.0)
    assert kernel_sum(pair_rule(UNIT, Q)) == pytest.approx(oracles.PAIR_VALUES[Q], rel=1e-10)


def test_live_oracle_on_rectangles():
    P, Q = (0.0, 1.0, 0.0, 0.5), (1.0, 1.5, 0.0, 0.5)
    assert kernel_sum(pair_rule(P, Q)) == pytest.approx(oracles.pair_integral(P, Q), rel=1e-7)


def test_coincident_convergence_monotone():
    errs = [abs(kernel_sum(singular_pair_rule(PanelPairClass.COINCIDENT, q, UNIT, UNIT))
                - oracles.SQUARE_SELF) for q in range(2, 9)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-9


def test_pair_weights_positive():
    for Q in oracles.PAIR_VALUES:
        assert np.all(pair_rule(UNIT, Q).weights > 0)


@pytest.mark.parametrize("Q", [UNIT, (1.0, 2.0, 0.0, 1.0), (1.0, 2.0, 1.0, 2.0)])
def test_scaling_cubed(Q):
    s = 0.125
    a = kernel_sum(pair_rule(UNIT, Q))
    b = kernel_sum(pair_rule(tuple(s * np.array(UNIT)), tuple(s * np.array(Q))))
    assert b == pytest.approx(s ** 3 * a, rel=1e-12)


def test_smooth_density_on_pair():
    # g(x, y) = x_1 y_2 on the edge-adjacent pair against a finer rule
    Q = (1.0, 2.0, 0.0, 1.0)
    f = lambda r: np.sum(r.weights * r.x[:, 0] * r.y[:, 1] / np.linalg.norm(r.x - r.y, axis=1))
    assert f(pair_rule(UNIT, Q, 5, 6)) == pytest.approx(f(pair_rule(UNIT, Q, 8, 12)), rel=1e-8)


def test_split_pair_cuts_at_foreign_breakpoints():
    Ps, Qs = split_pair(UNIT, (1.0, 2.0, 0.3, 0.7))
    ys = sorted({y for R in Ps for y in R[2:]})
    assert ys == [0.0, 0.3, 0.7, 1.0]
    for A in Ps:
        for B in Qs:
            classify_pair(A, B)   # every piece is in conforming contact or separated


@pytest.mark.parametrize("x", [(0.0, 0.5), (0.3, 0.4), (1.0, 1.0), (1.2, 0.5), (-0.01, 0.99),
                               (0.5, -0.001)])
def test_point_rule_against_closed_form(x):
    r = near_singular_point_rule(UNIT, x)
    d = np.linalg.norm(r.points - np.asarray(x), axis=1)
    assert r.integrate(lambda p: 1 / d) == pytest.approx(oracles.rect_potential(x, UNIT), rel=1e-7)
    assert np.dot(r.weights, r.points[:, 0] / d) == pytest.approx(
        oracles.rect_potential_linear(x, UNIT), rel=1e-7)


def test_point_rule_weights_positive_on_closed_panel():
    for x in [(0.0, 0.5), (0.3, 0.4), (1.0, 0.0)]:
        assert np.all(near_singular_point_rule(UNIT, x).weights > 0)


def test_point_rule_far_is_tensor():
    x = np.array([5.0, 0.5])
    r = near_singular_point_rule(UNIT, x)
    t = tensor_2d(6)
    f = lambda p: 1 / np.linalg.norm(p - x, axis=1)
    assert abs(r.integrate(f) - t.integrate(f)) < 1e-12 * t.integrate(f)


@settings(max_examples=25, deadline=None)
@given(s=st.floats(0.01, 10.0), x1=st.floats(-0.5, 1.5), x2=st.floats(-0.5, 1.5))
def test_point_rule_homogeneous(s, x1, x2):
    x = np.array([x1, x2])
    R = np.array(UNIT)
    a = near_singular_point_rule(R, x)
    b = near_singular_point_rule(s * R, s * x)
    fa = a.integrate(lambda p: 1 / np.linalg.norm(p - x, axis=1))
    fb = b.integrate(lambda p: 1 / np.linalg.norm(p - s * x, axis=1))
    assert fb == pytest.approx(s * fa, rel=1e-10)
