"""Benchmark problems, evaluation accounting, and the resampling wrapper.

Eight standard problems: sphere, ellipsoid, rosenbrock, and cigar, each in
an unconstrained and an implicitly constrained (``ic-``) variant.  The
constrained variants reveal feasibility only upon evaluation and report
``+inf`` for infeasible points; every evaluation, feasible or not, counts
against the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .engine import INFEASIBLE_VALUE, EvaluatedSolution

DEFAULT_RESAMPLE_CAP = 10**6


class ResampleCapError(RuntimeError):
    """Too many consecutive infeasible draws while resampling."""


class BudgetExhaustedError(RuntimeError):
    """The evaluation budget ran out while collecting a population."""


@dataclass
class EvalCounter:
    """Evaluation tally for one trial; infeasible evaluations included."""

    total: int = 0
    infeasible: int = 0


@dataclass(frozen=True)
class Problem:
    """Objective plus implicit-feasibility predicate plus initial distribution.

    ``batch_values``/``batch_feasible`` are vectorized equivalents of the
    scalar callables over an (n, d) array of points; they never touch an
    :class:`EvalCounter` (accounting happens in :func:`evaluate` and the
    batch helpers below).
    """

    name: str
    d: int
    objective: Callable[[np.ndarray], float]
    feasible: Callable[[np.ndarray], bool]
    optimum_value: float
    init_m: np.ndarray
    init_sigma: float
    batch_values: Callable[[np.ndarray], np.ndarray]
    batch_feasible: Callable[[np.ndarray], np.ndarray]


def evaluate(problem: Problem, x: np.ndarray, counter: EvalCounter) -> tuple[bool, float]:
    """Evaluate one point, updating the counter.

    Returns ``(feasible, value)`` where the value is the ``+inf`` marker for
    infeasible points; the objective is not called on them.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.d,):
        raise ValueError(f"point has shape {x.shape}, problem {problem.name!r} expects ({problem.d},)")
    counter.total += 1
    if problem.feasible(x):
        return True, float(problem.objective(x))
    counter.infeasible += 1
    return False, INFEASIBLE_VALUE


def evaluate_population(problem: Problem, pop: list[EvaluatedSolution], counter: EvalCounter) -> None:
    """Evaluate every solution in place, with batch math, point-wise accounting."""
    xs = np.array([s.x for s in pop])
    feas = problem.batch_feasible(xs)
    values = problem.batch_values(xs)
    counter.total += len(pop)
    counter.infeasible += int(np.sum(~feas))
    for sol, ok, value in zip(pop, feas, values):
        sol.mark(bool(ok), float(value) if ok else INFEASIBLE_VALUE)


def resample_ask(
    state,
    params,
    problem: Problem,
    counter: EvalCounter,
    rng: np.random.Generator,
    max_total: Optional[int] = None,
    cap: int = DEFAULT_RESAMPLE_CAP,
) -> list[EvaluatedSolution]:
    """Draw until the population holds ``lambda`` feasible solutions.

    Draws are independent (no mirroring); infeasible draws are discarded but
    still counted.  Raises :class:`ResampleCapError` after ``cap``
    consecutive infeasible draws and :class:`BudgetExhaustedError` when
    ``max_total`` evaluations would be exceeded first.  Draws are consumed
    in order, so the accounting matches a one-at-a-time loop exactly.
    """
    lam = params.lam
    d = state.dim
    scaled_b = state.sigma * state.B
    kept: list[EvaluatedSolution] = []
    consecutive_infeasible = 0
    chunk = max(lam, 64)
    while len(kept) < lam:
        zs = rng.standard_normal((chunk, d))
        xs = state.m + zs @ scaled_b.T
        feas = problem.batch_feasible(xs)
        values = problem.batch_values(xs)
        for k in range(chunk):
            if max_total is not None and counter.total >= max_total:
                raise BudgetExhaustedError(
                    f"budget of {max_total} evaluations exhausted with "
                    f"{len(kept)}/{lam} feasible solutions collected"
                )
            counter.total += 1
            if feas[k]:
                consecutive_infeasible = 0
                sol = EvaluatedSolution(z=zs[k], x=xs[k])
                sol.mark(True, float(values[k]))
                kept.append(sol)
                if len(kept) == lam:
                    break
            else:
                counter.infeasible += 1
                consecutive_infeasible += 1
                if consecutive_infeasible >= cap:
                    raise ResampleCapError(
                        f"{cap} consecutive infeasible draws while resampling"
                    )
    return kept


# ---------------------------------------------------------------------------
# Benchmark definitions
# ---------------------------------------------------------------------------


def _sphere(d: int):
    def one(x):
        return float(x @ x)

    def many(xs):
        return np.einsum("ij,ij->i", xs, xs)

    return one, many


def _ellipsoid(d: int):
    coeffs = 1000.0 ** (np.arange(d) / (d - 1))

    def one(x):
        y = coeffs * x
        return float(y @ y)

    def many(xs):
        ys = xs * coeffs
        return np.einsum("ij,ij->i", ys, ys)

    return one, many


def _rosenbrock(d: int):
    def one(x):
        return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2))

    def many(xs):
        head, tail = xs[:, :-1], xs[:, 1:]
        return np.sum(100.0 * (tail - head**2) ** 2 + (head - 1.0) ** 2, axis=1)

    return one, many


def _cigar(d: int):
    def one(x):
        tail = 100.0 * x[1:]
        return float(x[0] ** 2 + tail @ tail)

    def many(xs):
        tails = 100.0 * xs[:, 1:]
        return xs[:, 0] ** 2 + np.einsum("ij,ij->i", tails, tails)

    return one, many


def _always_feasible():
    def one(x):
        return True

    def many(xs):
        return np.ones(len(xs), dtype=bool)

    return one, many


def _nonnegative():
    def one(x):
        return bool(np.all(x >= 0.0))

    def many(xs):
        return np.all(xs >= 0.0, axis=1)

    return one, many


def _at_most_one():
    def one(x):
        return bool(np.all(x <= 1.0))

    def many(xs):
        return np.all(xs <= 1.0, axis=1)

    return one, many


def _make(name, d, obj_factory, feas_factory, optimum_value, m0_value, sigma0, m0_vector=None):
    one, many = obj_factory(d)
    feas_one, feas_many = feas_factory()
    init_m = np.full(d, float(m0_value)) if m0_vector is None else np.asarray(m0_vector, dtype=float)
    return Problem(
        name=name,
        d=d,
        objective=one,
        feasible=feas_one,
        optimum_value=optimum_value,
        init_m=init_m,
        init_sigma=sigma0,
        batch_values=many,
        batch_feasible=feas_many,
    )


_REGISTRY: dict[str, Callable[[int], Problem]] = {
    "sphere": lambda d: _make("sphere", d, _sphere, _always_feasible, 0.0, 20.0, 2.0),
    "ellipsoid": lambda d: _make("ellipsoid", d, _ellipsoid, _always_feasible, 0.0, 20.0, 2.0),
    "rosenbrock": lambda d: _make("rosenbrock", d, _rosenbrock, _always_feasible, 0.0, 0.0, 0.5),
    "cigar": lambda d: _make("cigar", d, _cigar, _always_feasible, 0.0, 20.0, 2.0),
    "ic-sphere": lambda d: _make("ic-sphere", d, _sphere, _nonnegative, 0.0, 20.0, 2.0),
    "ic-ellipsoid": lambda d: _make("ic-ellipsoid", d, _ellipsoid, _nonnegative, 0.0, 20.0, 2.0),
    "ic-rosenbrock": lambda d: _make("ic-rosenbrock", d, _rosenbrock, _at_most_one, 0.0, 0.0, 0.5),
    "ic-cigar": lambda d: _make("ic-cigar", d, _cigar, _nonnegative, 0.0, 20.0, 2.0),
}

BENCHMARK_NAMES = tuple(_REGISTRY)


def make_benchmark(name: str, d: int) -> Problem:
    """Instantiate a registered benchmark at dimension ``d``."""
    key = name.lower().replace("_", "-")
    if key not in _REGISTRY:
        raise ValueError(f"unknown problem {name!r}; expected one of {BENCHMARK_NAMES}")
    if d < 2:
        raise ValueError("benchmarks require dimension >= 2")
    return _REGISTRY[key](d)


def optimum_point(name: str, d: int) -> np.ndarray:
    """The documented optimum location of a registered benchmark."""
    key = name.lower().replace("_", "-")
    if key in ("rosenbrock", "ic-rosenbrock"):
        return np.ones(d)
    return np.zeros(d)
