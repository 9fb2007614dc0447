import numpy as np
import pytest

from nitsche_bem.analysis import (ConvergenceRecord, ExtrapolationError, SolveError, error_e1,
                                  error_e2, extrapolate_energy, fit_rate, jump_l2, residual, slope,
                                  solve)
from nitsche_bem.assembly import LinearSystem, assemble_parts
from nitsche_bem.femspace import make_space
from nitsche_bem.geometry import Screen, build_uniform_mesh, decompose


def records(h, e1, e2=None):
    e2 = e1 if e2 is None else e2
    return [ConvergenceRecord(k, a, a, 0, 0.0, b, c, 0.0, 0.0, 0, "conforming", 0.0)
            for k, (a, b, c) in enumerate(zip(h, e1, e2))]


def test_solve_trivial():
    e1 = np.eye(3)[0]
    assert np.array_equal(solve(LinearSystem(np.eye(3), e1)), e1)
    x = solve(LinearSystem(np.array([[2.0, 1.0], [1.0, 2.0]]), np.array([3.0, 3.0])))
    assert np.allclose(x, [1.0, 1.0], rtol=1e-15)


def test_solve_singular():
    with pytest.raises(SolveError) as err:
        solve(LinearSystem(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2)))
    assert err.value.condition > 1e14
    with pytest.raises(SolveError):
        solve(LinearSystem(np.array([[1.0, 2.0], [2.0, 4.0 + 1e-20]]), np.ones(2)), symmetric=False)
    with pytest.raises(SolveError):
        solve(LinearSystem(np.zeros((2, 2)), np.ones(2)))


@pytest.fixture(scope="module")
def dd_parts():
    m, d = decompose(Screen(), 0.5, 4, 6)
    return assemble_parts(make_space(m, "dd", d))


def test_residual_and_symmetric_path(dd_parts):
    for sigma in (-1, 1):
        sysm = dd_parts.combine(sigma, 2.0)
        x = solve(sysm)
        assert residual(sysm, x) <= 1e-10
    sysm = dd_parts.combine(1, 2.0)
    a = solve(sysm, symmetric=True)
    b = solve(sysm, symmetric=False)
    assert np.abs(a - b).max() <= 1e-10 * np.abs(b).max()


def test_permutation_invariance(dd_parts):
    sysm = dd_parts.combine(-1, 2.0)
    u = solve(sysm)
    p = np.random.default_rng(5).permutation(len(u))
    up = solve(LinearSystem(sysm.A[np.ix_(p, p)], sysm.b[p]))
    assert np.allclose(up, u[p], rtol=0, atol=1e-12 * np.abs(u).max())
    assert float(sysm.b[p] @ up) == pytest.approx(float(sysm.b @ u), rel=1e-13)
    assert jump_l2(dd_parts.space, u) == pytest.approx(
        jump_l2(dd_parts.space, up[np.argsort(p)]), rel=1e-12)


def test_aitken_examples():
    r = extrapolate_energy(1.0, 1.5, 1.75)
    assert r.q == pytest.approx(0.5) and r.limit == pytest.approx(2.0)
    assert extrapolate_energy(0.0, 0.9, 0.99).limit == pytest.approx(1.0)
    assert r.norm == pytest.approx(np.sqrt(2.0))
    assert r.limit > r.energies[-1]
    with pytest.raises(ExtrapolationError):
        extrapolate_energy(1.0, 2.0, 3.0)    # q = 1
    with pytest.raises(ExtrapolationError):
        extrapolate_energy(1.0, 0.5, 2.0)    # not monotone
    with pytest.raises(ExtrapolationError):
        extrapolate_energy(1.0, 2.0, 4.0)    # q > 1


def test_error_measures():
    assert error_e1(2.0, 2.0) == 0.0
    assert error_e1(0.96, 1.0) == pytest.approx(0.2)
    assert error_e1(1.04, 1.0) == pytest.approx(0.2)   # overshoot counts by modulus
    assert error_e2(0.0, 1.0) == 0.0
    assert error_e2(0.04, 2.0) == pytest.approx(0.1)   # square root of the norm


def test_fit_rate_power_law():
    h = 1 / np.array([4, 8, 16, 32, 64.0])
    assert fit_rate(records(h, 3 * h ** 0.5)) == pytest.approx(0.5, abs=1e-12)
    assert fit_rate(records(h, 3 * h ** 0.5), last=None) == pytest.approx(0.5, abs=1e-12)
    assert fit_rate(records(h, np.full(5, 0.3))) == pytest.approx(0.0, abs=1e-12)


def test_fit_rate_log_perturbed():
    # local slope of |log h| h^(1/2) is 1/2 + 1/log h < 1/2; values computed
    # with a plain numpy least-squares fit before the build
    h = 1 / np.array([4, 8, 16, 32, 64.0])
    e = np.abs(np.log(h)) * np.sqrt(h)
    assert fit_rate(records(h, e), last=None) == pytest.approx(0.10931094043914813, abs=1e-12)
    assert fit_rate(records(h, e)) == pytest.approx(0.20751874963942182, abs=1e-12)


def test_fit_rate_ordering_and_errors():
    h = 1 / np.array([4, 8, 16.0])
    recs = records(h, h ** 0.7)
    assert fit_rate(recs[::-1], last=2) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        fit_rate(recs, "e3")
    with pytest.raises(ValueError):
        fit_rate(recs[:1])
    with pytest.raises(ValueError):
        fit_rate(records(h, h, np.zeros(3)), "e2")
    assert slope([1.0, 0.5], [1.0, 0.25]) == pytest.approx(2.0)


def test_jump_norm_conforming_and_scaling(dd_parts):
    c = make_space(build_uniform_mesh(Screen(), 3), "conforming")
    assert jump_l2(c, np.ones(c.n_dofs)) == 0.0
    u = np.random.default_rng(6).standard_normal(dd_parts.space.n_dofs)
    assert jump_l2(dd_parts.space, -2.5 * u) == pytest.approx(2.5 * jump_l2(dd_parts.space, u))


def test_record_dict():
    r = records([0.5], [0.1])[0]
    assert r.as_dict()["e1"] == 0.1
