import numpy as np
import pytest

from nitsche_bem.femspace import make_space
from nitsche_bem.geometry import Screen, build_uniform_mesh, decompose
from nitsche_bem.potential import (FOUR_PI, BlockCache, PointCache, kernel, pair_block,
                                   point_potential, potential_at, trace_T, v_galerkin_entry)

import oracles

UNIT = (0.0, 1.0, 0.0, 1.0)


def test_kernel_properties():
    x, y = np.array([0.1, 0.2]), np.array([0.7, -0.4])
    assert kernel(x, y) == kernel(y, x) > 0
    assert kernel(3 * x, 3 * y) == pytest.approx(kernel(x, y) / 3)


def test_self_term_constant_density():
    # phi_2 + phi_3 = y on the unit panel, whose curl is (1, 0)
    B = pair_block(UNIT, UNIT)
    c = np.array([0.0, 0.0, 1.0, 1.0])
    assert c @ B @ c == pytest.approx(oracles.SQUARE_SELF / FOUR_PI, rel=1e-7)


def test_block_symmetry_and_cache():
    P, Q = (0.0, 0.5, 0.0, 0.5), (0.5, 1.0, 0.25, 0.75)
    a = pair_block(P, Q)
    b = pair_block(Q, P)
    assert np.allclose(a, b.T, rtol=1e-7, atol=1e-12)
    cache = BlockCache()
    c = cache.blocks(np.array([P, P]), np.array([Q, Q]))
    assert np.allclose(c[0], a, rtol=1e-12) and np.array_equal(c[0], c[1])


def test_galerkin_entry_examples():
    s = make_space(build_uniform_mesh(Screen(), 2), "conforming")
    assert s.n_dofs == 1
    assert v_galerkin_entry(s, 0, 0) > 0
    w = make_space(build_uniform_mesh(Screen(), 3), "weak_boundary")
    assert v_galerkin_entry(w, 3, 9) == pytest.approx(v_galerkin_entry(w, 9, 3), rel=1e-12)


def test_galerkin_entry_homogeneous():
    s = 0.3
    a = make_space(build_uniform_mesh(Screen(), 3), "weak_boundary")
    b = make_space(build_uniform_mesh(Screen((0, s), (0, s)), 3), "weak_boundary")
    for i, j in [(0, 0), (5, 6), (1, 14)]:
        assert v_galerkin_entry(b, i, j) == pytest.approx(s * v_galerkin_entry(a, i, j), rel=1e-10)


def test_point_potential_constant_density():
    # constant curl (0, -1) of phi = x on the unit panel
    x = np.array([0.0, 0.37])
    c = np.array([0.0, 1.0, 1.0, 0.0])
    pot = c @ point_potential(x, UNIT)
    assert pot[0] == pytest.approx(0.0, abs=1e-15)
    assert pot[1] == pytest.approx(-oracles.rect_potential(x, UNIT) / FOUR_PI, rel=1e-9)


def test_point_potential_linear_density():
    # phi_0 = (1 - x)(1 - y): curl = (-(1 - x), (1 - y)), linear densities
    x = np.array([1.0, 0.4])
    pot = point_potential(x, UNIT)[0]
    ref0 = -(oracles.rect_potential(x, UNIT) - oracles.rect_potential_linear(x, UNIT))
    mirrored = (x[1], x[0])   # density y_2 is density y_1 of the mirrored geometry
    ref1 = oracles.rect_potential(x, UNIT) - oracles.rect_potential_linear(mirrored, UNIT)
    assert pot * FOUR_PI == pytest.approx([ref0, ref1], rel=1e-8)


def test_far_field():
    x = np.array([20.0, 10.0])
    pot = point_potential(x, UNIT)[0] * FOUR_PI
    # curl phi_0 = (y_1 - 1, 1 - y_2)
    one = oracles.rect_potential(x, UNIT)
    ref = [oracles.far_point_potential(x, UNIT, (1, 0)) - one,
           one - oracles.far_point_potential(x, UNIT, (0, 1))]
    assert pot == pytest.approx(ref, rel=1e-10)
    # and the midpoint-rule approximation one would use by hand agrees to 1%
    mid = np.array([-0.5, 0.5]) / np.linalg.norm(x - 0.5)
    assert np.allclose(pot, mid, rtol=1e-2)


@pytest.fixture(scope="module")
def dd_space():
    m, d = decompose(Screen(), 0.5, 4, 6)
    return make_space(m, "dd", d)


def test_potential_linear_and_zero(dd_space):
    rng = np.random.default_rng(0)
    v, w = rng.standard_normal((2, dd_space.n_dofs))
    x = (0.5, 0.3)
    cache = PointCache()
    assert np.array_equal(potential_at(dd_space, x, np.zeros(dd_space.n_dofs), cache), [0.0, 0.0])
    lhs = potential_at(dd_space, x, 2 * v - 3 * w, cache)
    rhs = 2 * potential_at(dd_space, x, v, cache) - 3 * potential_at(dd_space, x, w, cache)
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-12 * np.abs(rhs).max())


def test_potential_rejects_nodes(dd_space):
    with pytest.raises(ValueError):
        potential_at(dd_space, (0.5, 0.5), np.ones(dd_space.n_dofs))


def test_traces_cancel(dd_space):
    rng = np.random.default_rng(1)
    v = rng.standard_normal(dd_space.n_dofs)
    for y in (0.1, 0.45, 0.8):
        t1 = trace_T(dd_space, 1, v, (0.5, y))
        t2 = trace_T(dd_space, 2, v, (0.5, y))
        assert t1 + t2 == 0.0
        assert trace_T(dd_space, 1, np.zeros(dd_space.n_dofs), (0.5, y)) == 0.0


def test_trace_requires_coupling_curve(dd_space):
    with pytest.raises(ValueError):
        trace_T(dd_space, 1, np.ones(dd_space.n_dofs), (0.3, 0.3))
    w = make_space(build_uniform_mesh(Screen(), 2), "weak_boundary")
    with pytest.raises(ValueError):
        trace_T(w, 2, np.ones(w.n_dofs), (0.3, 0.0))
    # T of a constant vanishes: its curl is zero
    assert abs(trace_T(w, 1, np.ones(w.n_dofs), (0.3, 0.0))) < 1e-15


def test_potential_continuous_along_gamma(dd_space):
    rng = np.random.default_rng(2)
    v = rng.standard_normal(dd_space.n_dofs)
    cache = PointCache()
    # across the side-2 breakpoint y = 1/3 and an interior side-1 point
    for y in (1 / 3, 0.6):
        a = potential_at(dd_space, (0.5, y - 1e-7), v, cache)
        b = potential_at(dd_space, (0.5, y + 1e-7), v, cache)
        assert np.abs(a - b).max() < 1e-4 * np.abs(a).max()
