import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize, rosen, rosen_der

from reupload.optim import lbfgsb, sep_cmaes


def sphere(x):
    return float(np.sum((np.asarray(x) - 0.5) ** 2))


def test_cmaes_solves_shifted_sphere():
    res = sep_cmaes(sphere, np.zeros(6), 1.0, rng=np.random.default_rng(0), max_evaluations=5000, tol=1e-14)
    assert res.fun < 1e-8
    assert np.allclose(res.x, 0.5, atol=1e-3)


def test_cmaes_respects_budget_and_bounds():
    calls = []

    def f(x):
        calls.append(np.array(x))
        return sphere(x)

    sep_cmaes(f, np.zeros(4), 2.0, rng=np.random.default_rng(1), max_evaluations=100, bounds=(-0.2, 0.2), tol=0)
    assert len(calls) <= 100
    assert np.all(np.abs(np.array(calls)) <= 0.2)


def test_cmaes_history_is_best_so_far():
    res = sep_cmaes(rosen, np.zeros(4), 0.5, rng=np.random.default_rng(2), max_evaluations=2000)
    values = [v for _, v in res.history]
    assert values == sorted(values, reverse=True)
    assert [i for i, _ in res.history] == sorted(i for i, _ in res.history)


def test_cmaes_reproducible():
    a = sep_cmaes(rosen, np.zeros(3), 0.5, rng=np.random.default_rng(7), max_evaluations=600)
    b = sep_cmaes(rosen, np.zeros(3), 0.5, rng=np.random.default_rng(7), max_evaluations=600)
    assert np.array_equal(a.x, b.x) and a.fun == b.fun


@pytest.mark.parametrize("lo,hi", [(-2.0, 2.0), (-2.0, 0.5), (0.2, 0.8)])
def test_lbfgsb_matches_scipy_on_rosenbrock(lo, hi):
    x0 = np.full(5, 0.3)
    ours = lbfgsb(rosen, rosen_der, x0, lo, hi, max_evaluations=20_000, tol=1e-14)
    ref = minimize(rosen, x0, jac=rosen_der, method="L-BFGS-B", bounds=[(lo, hi)] * 5,
                   options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 20_000})
    assert ours.fun == pytest.approx(ref.fun, abs=1e-7)
    assert np.allclose(ours.x, ref.x, atol=1e-3)
    assert np.all((ours.x >= lo) & (ours.x <= hi))


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=6), st.floats(-1, 0), st.floats(0.1, 1))
def test_lbfgsb_box_quadratic(center, lo, hi):
    c = np.array(center)

    def f(x):
        return float(np.sum((x - c) ** 2))

    res = lbfgsb(f, lambda x: 2 * (x - c), np.zeros(c.size), lo, hi, tol=1e-15)
    assert np.allclose(res.x, np.clip(c, lo, hi), atol=1e-6)


def test_lbfgsb_charges_gradient_cost():
    res = lbfgsb(rosen, rosen_der, np.zeros(3), -2, 2, max_evaluations=50, grad_cost=6)
    assert res.evaluations <= 50 + 6
