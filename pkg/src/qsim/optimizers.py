"""Derivative-free and gradient optimizers for variational loops.

Three methods behind one ``minimize`` call:

* "simplex": Nelder-Mead with the standard coefficients (reflect 1,
  expand 2, contract 0.5, shrink 0.5).
* "evolution-strategy": (mu=4, lambda=12) Gaussian ES with one-fifth
  success-rule step adaptation; fully determined by the seed.
* "parameter-shift-descent": gradient descent whose partial derivatives
  come from the shift rule dE/dtheta = [E(theta + pi/2) -
  E(theta - pi/2)] / 2, exact for the catalog's half-angle rotations.

Every method counts objective evaluations against ``budget`` and
returns the best point seen when the budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DimensionError, ObjectiveError

METHODS = ("simplex", "evolution-strategy", "parameter-shift-descent")

ES_PARENTS = 4
ES_OFFSPRING = 12


@dataclass(frozen=True)
class OptimizerSpec:
    method: str = "simplex"
    budget: int = 1000
    tolerance: float = 1e-8
    seed: Optional[int] = None
    learning_rate: float = 0.1  # parameter-shift-descent step
    sigma: float = 0.3  # evolution-strategy initial spread

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(
                f"unknown method {self.method!r} "
                f"(known: {', '.join(METHODS)})"
            )
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")


class MinimizeResult(NamedTuple):
    x: np.ndarray
    fun: float
    evaluations: int
    converged: bool


class _BudgetExhausted(Exception):
    pass


class _Counted:
    """Objective wrapper: enforces the evaluation budget and tracks the
    best point; rejects non-finite values with the offending point."""

    def __init__(self, objective, budget):
        self.objective = objective
        self.budget = budget
        self.evaluations = 0
        self.best_x = None
        self.best_f = np.inf

    def __call__(self, x):
        if self.evaluations >= self.budget:
            raise _BudgetExhausted
        value = float(self.objective(np.asarray(x, dtype=np.float64)))
        self.evaluations += 1
        if not np.isfinite(value):
            raise ObjectiveError(
                f"objective returned non-finite value {value!r}",
                point=np.array(x, dtype=np.float64),
            )
        if value < self.best_f:
            self.best_f = value
            self.best_x = np.array(x, dtype=np.float64)
        return value

    def result(self, converged):
        return MinimizeResult(
            x=self.best_x,
            fun=float(self.best_f),
            evaluations=self.evaluations,
            converged=converged,
        )


def minimize(objective, x0, spec=None):
    """Minimize a real function of a real vector within spec.budget
    evaluations; returns MinimizeResult(x, fun, evaluations, converged).
    """
    if spec is None:
        spec = OptimizerSpec()
    x0 = np.asarray(x0, dtype=np.float64).ravel()
    if x0.size < 1:
        raise DimensionError("x0 must hold at least one parameter")
    counted = _Counted(objective, spec.budget)
    runner = {
        "simplex": _nelder_mead,
        "evolution-strategy": _evolution_strategy,
        "parameter-shift-descent": _shift_descent,
    }[spec.method]
    try:
        converged = runner(counted, x0, spec)
    except _BudgetExhausted:
        converged = False
    return counted.result(converged)


def _nelder_mead(f, x0, spec):
    d = x0.size
    alpha, gamma, rho, shrink = 1.0, 2.0, 0.5, 0.5
    step = 0.5  # smaller simplices stall in high dimension
    points = [x0.copy()]
    for i in range(d):
        vertex = x0.copy()
        vertex[i] += step
        points.append(vertex)
    values = [f(p) for p in points]
    flat = 0
    while True:
        order = np.argsort(values, kind="stable")
        points = [points[i] for i in order]
        values = [values[i] for i in order]
        # tolerance is an objective-stagnation threshold; a single flat
        # reading can be a coincidental tie across a wide simplex, so
        # require it on consecutive iterations
        if abs(values[-1] - values[0]) < spec.tolerance:
            flat += 1
            if flat >= 2:
                return True
        else:
            flat = 0
        centroid = np.mean(points[:-1], axis=0)
        reflected = centroid + alpha * (centroid - points[-1])
        f_reflected = f(reflected)
        if f_reflected < values[0]:
            expanded = centroid + gamma * (reflected - centroid)
            f_expanded = f(expanded)
            if f_expanded < f_reflected:
                points[-1], values[-1] = expanded, f_expanded
            else:
                points[-1], values[-1] = reflected, f_reflected
            continue
        if f_reflected < values[-2]:
            points[-1], values[-1] = reflected, f_reflected
            continue
        if f_reflected < values[-1]:
            contracted = centroid + rho * (reflected - centroid)
        else:
            contracted = centroid - rho * (centroid - points[-1])
        f_contracted = f(contracted)
        if f_contracted < min(f_reflected, values[-1]):
            points[-1], values[-1] = contracted, f_contracted
            continue
        best = points[0]
        for i in range(1, d + 1):
            points[i] = best + shrink * (points[i] - best)
            values[i] = f(points[i])


def _evolution_strategy(f, x0, spec):
    d = x0.size
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    mean = x0.copy()
    sigma = float(spec.sigma)
    adapt = 0.82  # one-fifth rule multiplier
    parent_fitness = f(mean)
    previous_best = parent_fitness
    generations_flat = 0
    while True:
        offspring = mean + sigma * rng.standard_normal((ES_OFFSPRING, d))
        fitness = np.array([f(child) for child in offspring])
        successes = int(np.sum(fitness < parent_fitness))
        order = np.argsort(fitness, kind="stable")
        selected = offspring[order[:ES_PARENTS]]
        mean = selected.mean(axis=0)
        parent_fitness = float(fitness[order[0]])
        rate = successes / ES_OFFSPRING
        if rate > 0.2:
            sigma /= adapt
        elif rate < 0.2:
            sigma *= adapt
        if abs(previous_best - parent_fitness) < spec.tolerance:
            generations_flat += 1
            if generations_flat >= 3:
                return True
        else:
            generations_flat = 0
        previous_best = min(previous_best, parent_fitness)


def parameter_shift_gradient(objective, x, shift=np.pi / 2.0):
    """Shift-rule gradient: component i is [f(x + shift e_i) -
    f(x - shift e_i)] / 2 (exact, not approximate, for expectation
    landscapes generated by half-angle rotations)."""
    x = np.asarray(x, dtype=np.float64).ravel()
    grad = np.empty_like(x)
    for i in range(x.size):
        shifted = x.copy()
        shifted[i] = x[i] + shift
        plus = float(objective(shifted))
        shifted[i] = x[i] - shift
        minus = float(objective(shifted))
        grad[i] = (plus - minus) / 2.0
    return grad


def _shift_descent(f, x0, spec):
    x = x0.copy()
    current = f(x)
    while True:
        grad = parameter_shift_gradient(f, x)
        x = x - spec.learning_rate * grad
        value = f(x)
        if abs(current - value) < spec.tolerance:
            return True
        current = value
