import numpy as np
import pytest

from dialogue_acts.svm import (BinarySvmModel, TrainConfig, calibrate,
                               decision_value, dual_objective, fit_platt,
                               posterior, sigmoid_posterior, train_smo)

from oracles import qp_dual_solve, random_tiny_svm_problem

TIGHT = TrainConfig(C=1.0, tol=1e-5, max_passes=20, seed=0)


def test_two_point_analytic():
    # x1=+1 at +1, x2=-1 at -1: the dual optimum is alpha = (0.5, 0.5),
    # giving w = 1, b = 0 and margins exactly +/-1
    X = np.array([[1.0], [-1.0]])
    y = np.array([1.0, -1.0])
    model = train_smo(X, y, TIGHT)
    assert model.weights[0] == pytest.approx(1.0, abs=1e-6)
    assert model.bias == pytest.approx(0.0, abs=1e-6)
    assert model.alphas == pytest.approx({0: 0.5, 1: 0.5}, abs=1e-6)


def test_decision_values_two_point():
    X = np.array([[1.0], [-1.0]])
    y = np.array([1.0, -1.0])
    model = train_smo(X, y, TIGHT)
    assert decision_value(model, np.array([2.0])) == pytest.approx(2.0, abs=1e-5)
    assert decision_value(model, np.array([0.0])) == pytest.approx(0.0, abs=1e-5)


def test_duplicated_dataset_same_separator():
    rng = np.random.default_rng(5)
    X, y = random_tiny_svm_problem(rng)
    base = train_smo(X, y, TIGHT)
    dup = train_smo(np.vstack([X, X]), np.hstack([y, y]),
                    TrainConfig(C=0.5, tol=1e-5, max_passes=20, seed=0))
    # duplicating every point while halving C leaves the dual optimum
    # (and hence the separator) unchanged
    assert np.allclose(dup.weights, base.weights, atol=1e-4)
    assert dup.bias == pytest.approx(base.bias, abs=1e-3)


@pytest.mark.parametrize("seed", range(20))
def test_against_qp_oracle(seed):
    rng = np.random.default_rng(seed)
    X, y = random_tiny_svm_problem(rng)
    C = 1.0
    model = train_smo(X, y, TrainConfig(C=C, tol=1e-6, max_passes=30, seed=seed))
    alpha = np.zeros(len(y))
    for i, a in model.alphas.items():
        alpha[i] = a
    obj = dual_objective(X, y, alpha)
    _, obj_star = qp_dual_solve(X, y, C)
    # SMO must reach the QP optimum within 1e-4 relative
    assert obj == pytest.approx(obj_star, rel=1e-4, abs=1e-6)


@pytest.mark.parametrize("seed", range(10))
def test_kkt_and_feasibility(seed):
    rng = np.random.default_rng(100 + seed)
    X, y = random_tiny_svm_problem(rng)
    C = 1.0
    cfg = TrainConfig(C=C, tol=1e-4, max_passes=20, seed=seed)
    model = train_smo(X, y, cfg)
    alpha = np.zeros(len(y))
    for i, a in model.alphas.items():
        alpha[i] = a
    # box feasibility
    assert np.all(alpha >= -1e-12)
    assert np.all(alpha <= C + 1e-12)
    # stored weights are exactly the support expansion
    w = (alpha * y) @ X
    assert np.allclose(w, model.weights, atol=1e-12)
    # KKT conditions at the working tolerance
    margins = y * (X @ model.weights + model.bias)
    for i in range(len(y)):
        if alpha[i] < 1e-8:
            assert margins[i] >= 1.0 - 10 * cfg.tol
        elif alpha[i] > C - 1e-8:
            assert margins[i] <= 1.0 + 10 * cfg.tol
        else:
            assert margins[i] == pytest.approx(1.0, abs=10 * cfg.tol)


def test_train_deterministic():
    rng = np.random.default_rng(42)
    X, y = random_tiny_svm_problem(rng)
    a = train_smo(X, y, TIGHT)
    b = train_smo(X, y, TIGHT)
    assert np.array_equal(a.weights, b.weights)
    assert a.bias == b.bias
    assert a.alphas == b.alphas


def test_train_rejects_bad_labels():
    X = np.array([[1.0], [2.0]])
    with pytest.raises(ValueError):
        train_smo(X, np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        train_smo(X, np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        TrainConfig(C=-1.0)


# --- Platt calibration ------------------------------------------------------


def test_platt_symmetric_margins():
    # symmetric margins and balanced labels: B must be 0 and A negative
    f = np.array([-2.0, -1.0, 1.0, 2.0])
    y = np.array([-1, -1, 1, 1])
    a, b = fit_platt(f, y)
    assert a < 0
    assert b == pytest.approx(0.0, abs=1e-6)
    assert sigmoid_posterior(0.0, a, b) == pytest.approx(0.5, abs=1e-9)


def test_platt_monotone_in_margin():
    f = np.array([-3.0, -1.0, -0.5, 0.5, 1.0, 3.0])
    y = np.array([-1, -1, -1, 1, 1, 1])
    a, b = fit_platt(f, y)
    ps = [sigmoid_posterior(v, a, b) for v in np.linspace(-4, 4, 9)]
    assert all(p1 < p2 for p1, p2 in zip(ps, ps[1:]))


def test_platt_prior_shift():
    # mostly-positive data pushes the posterior at f=0 above 0.5
    f = np.array([-1.0, 0.5, 1.0, 1.5, 2.0, 2.5])
    y = np.array([-1, 1, 1, 1, 1, 1])
    a, b = fit_platt(f, y)
    assert sigmoid_posterior(0.0, a, b) > 0.5


def test_platt_flip_symmetry():
    f = np.array([-2.0, -0.5, 0.25, 1.0, 2.0])
    y = np.array([-1, -1, 1, 1, 1])
    a, b = fit_platt(f, y)
    a2, b2 = fit_platt(-f, -y)
    for v in (-1.5, 0.0, 0.3, 2.0):
        p = sigmoid_posterior(v, a, b)
        q = sigmoid_posterior(-v, a2, b2)
        assert p + q == pytest.approx(1.0, abs=1e-6)


def test_platt_requires_both_classes():
    with pytest.raises(ValueError):
        fit_platt(np.array([1.0, 2.0]), np.array([1, 1]))


def test_posterior_requires_calibration():
    model = BinarySvmModel(weights=np.array([1.0]), bias=0.0, alphas={})
    with pytest.raises(ValueError):
        posterior(model, np.array([1.0]))


def test_calibrated_posterior_bounds():
    rng = np.random.default_rng(9)
    X, y = random_tiny_svm_problem(rng)
    model = calibrate(train_smo(X, y, TIGHT), X, y)
    for row in X:
        p = posterior(model, row)
        assert 0.0 < p < 1.0
