"""Deterministic derivative-free and gradient optimizers.

Dependency-free on purpose: both methods are adequate for the <= 30-parameter
circuits used here, and full determinism (stable sorting, fixed tie-breaking)
keeps traces reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Objective = Callable[[np.ndarray], float]


@dataclass
class OptimizerConfig:
    method: str = "nelder-mead"  # or "gradient-descent"
    max_evals: int = 400
    tolerance: float = 1e-8
    learning_rate: float = 0.1
    fd_step: float = 1e-4
    initial_step: float = 0.25  # first simplex spread
    update: str = "plain"  # gradient-descent update rule: "plain" | "adam"
    target_value: float | None = None  # stop as soon as the objective reaches this
    restarts: int = 0  # extra seeded starts scattered around x0
    restart_spread: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("nelder-mead", "gradient-descent"):
            raise ValueError(f"unknown optimizer method {self.method!r}")
        if self.update not in ("plain", "adam"):
            raise ValueError(f"unknown gradient update {self.update!r}")
        for name in ("max_evals", "tolerance", "learning_rate", "fd_step", "initial_step"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.restarts < 0 or self.restart_spread <= 0:
            raise ValueError("restarts must be >= 0 with positive spread")


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    n_evals: int
    converged: bool

    def __iter__(self):
        # allow `x, f = minimize(...)`
        yield self.x
        yield self.fun


def minimize(objective: Objective, x0, config: OptimizerConfig) -> MinimizeResult:
    """Minimize a deterministic objective; never returns worse than f(x0).

    With restarts > 0 the same method reruns from seeded perturbations of
    x0 and the best result wins; ties keep the earliest attempt, so the
    outcome is deterministic for a fixed config.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.ndim != 1:
        raise ValueError("x0 must be a flat parameter vector")
    if x0.size == 0:
        return MinimizeResult(x0.copy(), float(objective(x0)), 1, True)
    runner = _nelder_mead if config.method == "nelder-mead" else _fd_gradient_descent
    best = runner(objective, x0, config)
    if config.restarts:
        rng = np.random.default_rng(config.seed)
        evals = best.n_evals
        for _ in range(config.restarts):
            start = x0 + rng.normal(0.0, config.restart_spread, x0.size)
            attempt = runner(objective, start, config)
            evals += attempt.n_evals
            if attempt.fun < best.fun:
                best = attempt
        best = MinimizeResult(best.x, best.fun, evals, best.converged)
    return best


def central_difference_gradient(objective: Objective, x: np.ndarray, step: float) -> np.ndarray:
    grad = np.empty_like(x)
    for i in range(x.size):
        bumped = x.copy()
        bumped[i] = x[i] + step
        hi = objective(bumped)
        bumped[i] = x[i] - step
        lo = objective(bumped)
        grad[i] = (hi - lo) / (2.0 * step)
    return grad


def _fd_gradient_descent(objective: Objective, x0: np.ndarray, cfg: OptimizerConfig) -> MinimizeResult:
    if cfg.update == "adam":
        return _fd_adam(objective, x0, cfg)
    x = x0.copy()
    fx = float(objective(x))
    best_x, best_f = x.copy(), fx
    evals = 1
    lr = cfg.learning_rate
    converged = False
    while evals + 2 * x.size + 1 <= cfg.max_evals:
        if cfg.target_value is not None and best_f <= cfg.target_value:
            converged = True
            break
        grad = central_difference_gradient(objective, x, cfg.fd_step)
        evals += 2 * x.size
        candidate = x - lr * grad
        fc = float(objective(candidate))
        evals += 1
        if fc < fx:
            x, fx = candidate, fc
            lr = min(lr * 1.2, 10.0 * cfg.learning_rate)
            if fc < best_f:
                best_x, best_f = candidate.copy(), fc
        else:
            lr *= 0.5
            if lr < 1e-12:
                converged = True
                break
        if np.linalg.norm(grad) < cfg.tolerance:
            converged = True
            break
    return MinimizeResult(best_x, best_f, evals, converged)


def _fd_adam(objective: Objective, x0: np.ndarray, cfg: OptimizerConfig) -> MinimizeResult:
    """Adam-style steps on central-difference gradients; handles the
    ill-conditioned overlap landscapes where plain descent stalls."""
    beta1, beta2, eps = 0.9, 0.999, 1e-9
    x = x0.copy()
    best_x, best_f = x.copy(), float(objective(x))
    evals = 1
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    t = 0
    converged = False
    while evals + 2 * x.size + 1 <= cfg.max_evals:
        if cfg.target_value is not None and best_f <= cfg.target_value:
            converged = True
            break
        t += 1
        grad = central_difference_gradient(objective, x, cfg.fd_step)
        evals += 2 * x.size
        m = beta1 * m + (1 - beta1) * grad
        v = beta2 * v + (1 - beta2) * grad * grad
        m_hat = m / (1 - beta1**t)
        v_hat = v / (1 - beta2**t)
        x = x - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + eps)
        fx = float(objective(x))
        evals += 1
        if fx < best_f:
            best_x, best_f = x.copy(), fx
        if np.linalg.norm(grad) < cfg.tolerance:
            converged = True
            break
    return MinimizeResult(best_x, best_f, evals, converged)


def _nelder_mead(objective: Objective, x0: np.ndarray, cfg: OptimizerConfig) -> MinimizeResult:
    """Standard reflection/expansion/contraction/shrink with stable ordering."""
    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5
    dim = x0.size
    points = [x0.copy()]
    for i in range(dim):
        vertex = x0.copy()
        vertex[i] += cfg.initial_step if vertex[i] == 0.0 else cfg.initial_step * (1 + abs(vertex[i]))
        points.append(vertex)
    values = [float(objective(p)) for p in points]
    evals = dim + 1
    converged = False

    def order():
        # stable: ties resolved by insertion order (lowest index wins)
        idx = sorted(range(len(values)), key=lambda k: (values[k], k))
        return [points[k] for k in idx], [values[k] for k in idx]

    points, values = order()
    while evals < cfg.max_evals:
        if abs(values[-1] - values[0]) <= cfg.tolerance:
            converged = True
            break
        centroid = np.mean(points[:-1], axis=0)
        reflected = centroid + alpha * (centroid - points[-1])
        f_r = float(objective(reflected))
        evals += 1
        if values[0] <= f_r < values[-2]:
            points[-1], values[-1] = reflected, f_r
        elif f_r < values[0]:
            expanded = centroid + gamma * (reflected - centroid)
            f_e = float(objective(expanded))
            evals += 1
            if f_e < f_r:
                points[-1], values[-1] = expanded, f_e
            else:
                points[-1], values[-1] = reflected, f_r
        else:
            contracted = centroid + rho * (points[-1] - centroid)
            f_c = float(objective(contracted))
            evals += 1
            if f_c < values[-1]:
                points[-1], values[-1] = contracted, f_c
            else:
                best = points[0]
                for k in range(1, len(points)):
                    points[k] = best + sigma * (points[k] - best)
                    values[k] = float(objective(points[k]))
                evals += len(points) - 1
        points, values = order()
    points, values = order()
    return MinimizeResult(points[0].copy(), values[0], evals, converged)
