"""Benchmark objectives behind a common box-bounded interface.

All four functions are minimized, reach 0 at their known optimum, and are
nonnegative everywhere, so result magnitudes are directly comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


def sphere(x: np.ndarray) -> float:
    """Sphere function: f(x) = sum(x_i^2). Optimum f(0) = 0."""
    x = np.asarray(x, dtype=float)
    return float(np.sum(x**2))


def rosenbrock(x: np.ndarray) -> float:
    """Rosenbrock function: f(x) = sum(100*(x_{i+1} - x_i^2)^2 + (1 - x_i)^2).

    Narrow curved valley; optimum f(1, ..., 1) = 0. Needs dim >= 2.
    """
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise ValueError("rosenbrock needs at least 2 dimensions")
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def rastrigin(x: np.ndarray) -> float:
    """Rastrigin function: f(x) = 10*d + sum(x_i^2 - 10*cos(2*pi*x_i)).

    Highly multimodal; optimum f(0) = 0.
    """
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x**2 - 10.0 * np.cos(2.0 * np.pi * x)))


def ackley1(x: np.ndarray) -> float:
    """Ackley function (d-normalized sums):

    f(x) = -20*exp(-0.2*sqrt(sum(x_i^2)/d)) - exp(sum(cos(2*pi*x_i))/d) + 20 + e

    Nearly flat outer region with a deep hole at the origin; optimum f(0) = 0.
    """
    x = np.asarray(x, dtype=float)
    d = x.size
    s1 = np.sum(x**2)
    s2 = np.sum(np.cos(2.0 * np.pi * x))
    return float(-20.0 * np.exp(-0.2 * np.sqrt(s1 / d)) - np.exp(s2 / d) + 20.0 + np.e)


# Canonical box bounds per function; overridable through make_objective.
DEFAULT_BOUNDS: dict[str, tuple[float, float]] = {
    "sphere": (-5.12, 5.12),
    "rosenbrock": (-2.048, 2.048),
    "rastrigin": (-5.12, 5.12),
    "ackley1": (-32.768, 32.768),
}

_FUNCTIONS: dict[str, Callable[[np.ndarray], float]] = {
    "sphere": sphere,
    "rosenbrock": rosenbrock,
    "rastrigin": rastrigin,
    "ackley1": ackley1,
}

FUNCTION_NAMES: tuple[str, ...] = tuple(_FUNCTIONS)


@dataclass(frozen=True, eq=False)
class Objective:
    """A named box-bounded minimization target."""

    name: str
    dim: int
    lower: np.ndarray  # per-dimension lower bounds
    upper: np.ndarray  # per-dimension upper bounds
    fn: Callable[[np.ndarray], float]

    def __call__(self, x: np.ndarray) -> float:
        return self.fn(x)

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lower, self.upper


def make_objective(
    name: str, dim: int, bounds: tuple[float, float] | None = None
) -> Objective:
    """Build one of the known objectives with its default (or given) box.

    Raises ValueError for unknown names (listing the valid ones) and for
    configurations the function cannot support.
    """
    key = name.lower()
    if key not in _FUNCTIONS:
        raise ValueError(
            f"unknown objective {name!r}; valid names: {', '.join(_FUNCTIONS)}"
        )
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")
    if key == "rosenbrock" and dim < 2:
        raise ValueError("rosenbrock needs dim >= 2")
    lo, hi = bounds if bounds is not None else DEFAULT_BOUNDS[key]
    if not lo < hi:
        raise ValueError(f"lower bound {lo} must be below upper bound {hi}")
    lower = np.full(dim, float(lo))
    upper = np.full(dim, float(hi))
    lower.flags.writeable = False
    upper.flags.writeable = False
    return Objective(key, dim, lower, upper, _FUNCTIONS[key])
