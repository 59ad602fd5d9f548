"""Generation loop shared by FM-NES, DX-NES-IC, xNES, and the ablations.

One generation, in fixed order: mirrored sampling, constraint-aware
ranking, first-infeasibility reset, step-size path update, phase
detection, weight/rate switching, natural-gradient estimation, mean /
step-size / shape updates, movement-path update, expansion emphasis, and
the ridge-gated rank-one shape stretch.  Feature switches in
:class:`~fmnes.distribution.StrategyConfig` turn individual stages off to
recover the simpler strategies exactly.

Updates that consume the pre-update transformation matrix (the mean
shift, the movement path, the second-moment change ratios, and the
rank-one direction) all read the matrix captured right after the reset
stage; the exponential shape updates multiply on the right so that
``det(B)`` is preserved.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .distribution import (
    SIGMA_MAX,
    SIGMA_MIN,
    ResolvedParams,
    SearchState,
    StrategyConfig,
    compute_distance_weights,
)

INFEASIBLE_VALUE = math.inf


class StepSizeRangeError(RuntimeError):
    """Step size left the representable range; the trial must abort."""


class DivergenceError(RuntimeError):
    """Optimizer state stopped being finite; the trial must abort.

    Degenerate configurations (for example very small sample sizes) can send
    the transformation matrix into overflow before the step-size guard
    trips; this keeps such runs recordable instead of crashing them.
    """


@dataclass
class EvaluatedSolution:
    """One sampled candidate: latent draw, point, and evaluation outcome.

    ``feasible``/``value`` stay ``None`` between ``ask`` and evaluation.
    ``value`` is ``+inf`` exactly when the point is infeasible; ranking
    never compares objective values of infeasible points.
    """

    z: np.ndarray
    x: np.ndarray
    value: Optional[float] = None
    feasible: Optional[bool] = None

    def __post_init__(self) -> None:
        self.z_norm = float(np.linalg.norm(self.z))

    def mark(self, feasible: bool, value: float) -> None:
        if feasible and not math.isfinite(value):
            raise ValueError(f"feasible solution with non-finite value {value!r}")
        if not feasible and value != INFEASIBLE_VALUE:
            raise ValueError("infeasible solution must carry the +inf marker")
        self.feasible = feasible
        self.value = value


class Phase(enum.Enum):
    MOVEMENT = "movement"
    STAGNATION = "stagnation"
    CONVERGENCE = "convergence"


@dataclass
class NaturalGradients:
    """Monte Carlo natural-gradient estimates in the latent space."""

    g_delta: np.ndarray
    g_m: np.ndarray
    g_sigma: float
    g_b: np.ndarray


def ask(state: SearchState, params: ResolvedParams, rng: np.random.Generator) -> list[EvaluatedSolution]:
    """Sample one population of mirrored pairs: z, -z interleaved."""
    d = state.dim
    half = rng.standard_normal((params.lam // 2, d))
    scaled_b = state.sigma * state.B
    pop: list[EvaluatedSolution] = []
    for z in half:
        neg = -z
        pop.append(EvaluatedSolution(z=z, x=state.m + scaled_b @ z))
        pop.append(EvaluatedSolution(z=neg, x=state.m + scaled_b @ neg))
    return pop


def rank(pop: Sequence[EvaluatedSolution]) -> list[EvaluatedSolution]:
    """Total preference order: feasible by ascending value, then infeasible
    by ascending latent norm.  Stable for exact ties."""
    for sol in pop:
        if sol.feasible is None:
            raise ValueError("population must be fully evaluated before ranking")
    return sorted(pop, key=lambda s: (0, s.value) if s.feasible else (1, s.z_norm))


def maybe_reset(state: SearchState, pop: Sequence[EvaluatedSolution], config: StrategyConfig) -> SearchState:
    """Reset the shape learning when an infeasible point is seen first.

    The ``h_unconst`` flag flips on the first infeasible sample in every
    mode; the reset of ``B``, the paths, and the expansion rate happens
    only when the reset feature is enabled.
    """
    any_infeasible = any(not s.feasible for s in pop)
    if state.h_unconst and any_infeasible:
        if config.enable_reset:
            state.B = np.eye(state.dim)
            state.p_sigma = np.zeros(state.dim)
            state.p_c = np.zeros(state.dim)
            state.gamma = 1.0
        state.h_unconst = False
    return state


def update_p_sigma(state: SearchState, sorted_z: np.ndarray, params: ResolvedParams) -> SearchState:
    """Decay-and-accumulate the step-size path with rank weights."""
    c = params.c_sigma
    step = sorted_z.T @ params.w_rank
    state.p_sigma = (1.0 - c) * state.p_sigma + math.sqrt(c * (2.0 - c) * params.mu_eff) * step
    return state


def detect_phase(p_sigma: np.ndarray, chi: float) -> Phase:
    norm = float(np.linalg.norm(p_sigma))
    if norm >= chi:
        return Phase.MOVEMENT
    if norm >= 0.1 * chi:
        return Phase.STAGNATION
    return Phase.CONVERGENCE


def select_weights_and_rates(
    phase: Phase,
    sorted_z: np.ndarray,
    params: ResolvedParams,
    n_feas: int,
) -> tuple[np.ndarray, float, float]:
    """Pick recombination weights and learning rates for this generation.

    With phase switching disabled the movement-slot rates apply
    unconditionally and the weights are always the rank weights.
    """
    if not params.config.enable_phase_switching:
        return params.w_rank, params.eta_sigma("movement", n_feas), params.eta_b("movement", n_feas)
    name = phase.value
    eta_sigma = params.eta_sigma(name, n_feas)
    eta_b = params.eta_b(name, n_feas)
    if phase is Phase.MOVEMENT:
        weights = compute_distance_weights(sorted_z, params.alpha(n_feas))
    else:
        weights = params.w_rank
    return weights, eta_sigma, eta_b


def estimate_gradients(sorted_z: np.ndarray, weights: np.ndarray) -> NaturalGradients:
    """Weighted Monte Carlo estimates of the natural gradients."""
    d = sorted_z.shape[1]
    g_delta = sorted_z.T @ weights
    g_m = sorted_z.T @ (sorted_z * weights[:, None]) - weights.sum() * np.eye(d)
    g_m = (g_m + g_m.T) / 2.0
    g_sigma = float(np.trace(g_m)) / d
    g_b = g_m - g_sigma * np.eye(d)
    return NaturalGradients(g_delta=g_delta, g_m=g_m, g_sigma=g_sigma, g_b=g_b)


def apply_updates(
    state: SearchState,
    grads: NaturalGradients,
    eta_sigma: float,
    eta_b: float,
    eta_m: float,
) -> SearchState:
    """Update mean, step size, and shape; mean uses the pre-update state."""
    state.m = state.m + eta_m * state.sigma * (state.B @ grads.g_delta)
    state.sigma = state.sigma * math.exp(eta_sigma * grads.g_sigma / 2.0)
    if not (SIGMA_MIN <= state.sigma <= SIGMA_MAX):
        raise StepSizeRangeError(
            f"step size {state.sigma!r} left [{SIGMA_MIN:g}, {SIGMA_MAX:g}] at generation {state.g}"
        )
    state.B = state.B @ linalg.sym_exp(eta_b * grads.g_b / 2.0)
    return state


def update_p_c(state: SearchState, b_old: np.ndarray, g_delta: np.ndarray, params: ResolvedParams) -> SearchState:
    """Decay-and-accumulate the movement path in problem coordinates."""
    c = params.c_c
    state.p_c = (1.0 - c) * state.p_c + math.sqrt(c * (2.0 - c) * params.mu_eff) * (b_old @ g_delta)
    return state


def emphasize_expansion(state: SearchState, b_old: np.ndarray, phase: Phase, params: ResolvedParams) -> SearchState:
    """Amplify directions whose second moment grew this generation.

    The expansion rate updates every generation from the largest relative
    second-moment change; the amplification itself is applied to the shape
    and the step size only during movement, with the shape renormalized so
    its determinant stays one.
    """
    cov_old = b_old @ b_old.T
    cov_new = state.B @ state.B.T
    eig = linalg.sym_eigen(cov_old)
    vectors = eig.eigenvectors
    numer = np.einsum("ij,jk,ki->i", vectors.T, cov_new, vectors)
    tau = numer / eig.eigenvalues - 1.0

    tau_max = float(tau.max())
    c_g, d_g = params.c_gamma, params.d_gamma
    state.gamma = max((1.0 - c_g) * state.gamma + c_g * math.sqrt(1.0 + d_g * tau_max), 1.0)

    if phase is Phase.MOVEMENT:
        expanding = vectors[:, tau > 0.0]
        q = (state.gamma - 1.0) * (expanding @ expanding.T) + np.eye(state.dim)
        root = linalg.det(q) ** (1.0 / state.dim)
        state.sigma = state.sigma * root
        state.B = (q @ state.B) / root
    return state


def ridge_ratio(b: np.ndarray) -> float:
    """sqrt of the ratio of the two largest eigenvalues of ``B B^T``."""
    eig = linalg.sym_eigen(b @ b.T)
    return math.sqrt(eig.eigenvalues[0] / eig.eigenvalues[1])


def rank_one_update(state: SearchState, b_old: np.ndarray, params: ResolvedParams) -> SearchState:
    """Stretch the shape along the accumulated movement direction.

    Skipped when the learning rate is zero, or when the ridge condition is
    active and neither holds: no infeasible point seen yet, or the shape
    already elongated beyond the ridge threshold.  The direction is read in
    the normalized space of the pre-update transformation; the traceless
    correction keeps the determinant unchanged.
    """
    if params.c1 == 0.0:
        return state
    if params.config.enable_ridge_condition:
        if not (state.h_unconst or ridge_ratio(state.B) > params.beta):
            return state
    direction = np.linalg.solve(b_old, state.p_c)
    r = np.outer(direction, direction) - np.eye(state.dim)
    r_b = r - (np.trace(r) / state.dim) * np.eye(state.dim)
    state.B = state.B @ linalg.sym_exp(params.c1 * r_b / 2.0)
    return state


def step(state: SearchState, pop: Sequence[EvaluatedSolution], params: ResolvedParams) -> SearchState:
    """Consume one evaluated population and advance the state one generation."""
    config = params.config
    ordered = rank(pop)
    n_feas = sum(1 for s in ordered if s.feasible)

    maybe_reset(state, ordered, config)
    b_old = state.B.copy()

    sorted_z = np.array([s.z for s in ordered])
    update_p_sigma(state, sorted_z, params)
    phase = detect_phase(state.p_sigma, params.chi)
    weights, eta_sigma, eta_b = select_weights_and_rates(phase, sorted_z, params, n_feas)
    grads = estimate_gradients(sorted_z, weights)
    apply_updates(state, grads, eta_sigma, eta_b, params.eta_m)
    update_p_c(state, b_old, grads.g_delta, params)
    if config.enable_expansion:
        emphasize_expansion(state, b_old, phase, params)
    if config.enable_rank_one:
        rank_one_update(state, b_old, params)

    if not (
        math.isfinite(state.sigma)
        and np.isfinite(state.m).all()
        and np.isfinite(state.B).all()
        and np.isfinite(state.p_sigma).all()
        and np.isfinite(state.p_c).all()
    ):
        raise DivergenceError(f"non-finite optimizer state at generation {state.g}")

    state.g += 1
    return state


class Optimizer:
    """Ask/tell interface around one strategy run.

    ``ask`` returns a population of :class:`EvaluatedSolution` shells; the
    caller fills in feasibility and value for every solution (via
    :meth:`EvaluatedSolution.mark` or a problem's ``evaluate``) and hands
    the population back to ``tell``.
    """

    def __init__(self, config: StrategyConfig, m0, sigma0: float, seed=None):
        self.params = config.resolve()
        m0 = np.asarray(m0, dtype=float)
        if m0.size != config.dim:
            raise ValueError(f"initial mean has dimension {m0.size}, config says {config.dim}")
        self.state = SearchState.initial(m0, sigma0)
        self.rng = np.random.default_rng(seed)

    def ask(self) -> list[EvaluatedSolution]:
        return ask(self.state, self.params, self.rng)

    def tell(self, pop: Sequence[EvaluatedSolution]) -> None:
        if len(pop) != self.params.lam:
            raise ValueError(f"expected {self.params.lam} solutions, got {len(pop)}")
        step(self.state, pop, self.params)
