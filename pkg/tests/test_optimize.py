import numpy as np
import pytest

from cosfilter.optimize import OptimizerConfig, central_difference_gradient, minimize


def test_quadratic_1d_nelder_mead():
    result = minimize(lambda x: (x[0] - 1) ** 2, np.array([0.0]), OptimizerConfig(max_evals=300))
    assert result.x[0] == pytest.approx(1.0, abs=1e-4)


def test_quadratic_2d_reaches_floor():
    result = minimize(
        lambda x: x[0] ** 2 + x[1] ** 2,
        np.array([0.7, -0.4]),
        OptimizerConfig(max_evals=500, tolerance=1e-12),
    )
    assert result.fun < 1e-6


def test_gradient_descent_quadratic():
    cfg = OptimizerConfig(method="gradient-descent", max_evals=800, learning_rate=0.2)
    result = minimize(lambda x: (x[0] - 1) ** 2, np.array([0.0]), cfg)
    assert result.x[0] == pytest.approx(1.0, abs=1e-3)


def test_adam_update_quadratic():
    cfg = OptimizerConfig(
        method="gradient-descent", update="adam", max_evals=2000, learning_rate=0.1
    )
    result = minimize(lambda x: (x[0] + 2) ** 2 + x[1] ** 2, np.array([0.0, 1.0]), cfg)
    assert result.fun < 1e-4


def test_central_difference_gradient_of_sin():
    h = 1e-5
    grad = central_difference_gradient(lambda x: float(np.sin(x[0])), np.array([0.0]), h)
    assert grad[0] == pytest.approx(1.0, abs=h * h * 10)


def test_never_worse_than_start():
    # objective with a nasty cliff near the start; best-so-far must win
    def f(x):
        return float(np.where(abs(x[0]) < 0.1, x[0] ** 2, 50.0 + x[0] ** 2))

    for method in ("nelder-mead", "gradient-descent"):
        result = minimize(f, np.array([0.0]), OptimizerConfig(method=method, max_evals=100))
        assert result.fun <= f(np.array([0.0]))


def test_empty_parameter_vector():
    result = minimize(lambda x: 3.5, np.array([]), OptimizerConfig())
    assert result.fun == 3.5 and result.x.size == 0


def test_max_evals_flag_not_error():
    result = minimize(
        lambda x: float(np.sum(x**2)),
        np.full(8, 2.0),
        OptimizerConfig(max_evals=25, tolerance=1e-16),
    )
    assert not result.converged
    assert result.n_evals <= 25 + 8  # bounded overshoot from the final ordering


def test_determinism():
    calls = []

    def f(x):
        calls.append(x.copy())
        return float((x[0] - 0.3) ** 2 + 0.5 * x[1] ** 2)

    cfg = OptimizerConfig(max_evals=200, restarts=2, seed=42)
    r1 = minimize(f, np.array([1.0, -1.0]), cfg)
    r2 = minimize(f, np.array([1.0, -1.0]), cfg)
    assert np.array_equal(r1.x, r2.x) and r1.fun == r2.fun


def test_target_value_early_stop():
    evals = []

    def f(x):
        evals.append(1)
        return float(np.sum(x**2))

    cfg = OptimizerConfig(
        method="gradient-descent",
        update="adam",
        max_evals=5000,
        learning_rate=0.3,
        target_value=1e-3,
    )
    result = minimize(f, np.array([0.5, 0.5]), cfg)
    assert result.fun <= 1e-3
    assert len(evals) < 5000  # stopped well before the budget


def test_tuple_unpacking():
    x, fun = minimize(lambda v: (v[0] - 2) ** 2, np.array([0.0]), OptimizerConfig(max_evals=200))
    assert fun == pytest.approx(0.0, abs=1e-6)
    assert x[0] == pytest.approx(2.0, abs=1e-3)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(method="cobyla")
    with pytest.raises(ValueError):
        OptimizerConfig(max_evals=0)
    with pytest.raises(ValueError):
        OptimizerConfig(update="momentum")
