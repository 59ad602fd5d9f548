"""Search-distribution state and parameter bookkeeping.

The multivariate normal search distribution is parameterized as
``N(m, (sigma * B)(sigma * B)^T)`` with ``det(B) = 1``, so that ``sigma``
carries the scale and ``B`` the shape.  This module owns that state, the
recombination weights, the effective selection mass, and the learning-rate
schedules shared by every strategy mode, plus the config-file surface used
to document exactly which values an experiment ran with.

Hyperparameter defaults follow the DX-NES-IC recommended settings.  Most
learning rates there are schedules in the number of feasible solutions of
the current population (``n_feas``), so the corresponding config fields
accept the sentinel ``auto``: ``auto`` means "use the recommended
schedule", while a number pins the rate regardless of feasibility.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, fields, replace
from functools import lru_cache
from typing import Optional, TextIO

import numpy as np

ETA_MEAN = 1.0

# sigma outside this range aborts the run before NaNs can propagate.
SIGMA_MIN = 1e-250
SIGMA_MAX = 1e250

STRATEGY_MODES = (
    "fmnes",
    "dxnes-ic",
    "xnes",
    "xnes-r",
    "method-a",
    "method-b",
    "method-c",
)


@dataclass
class SearchState:
    """Full optimizer state for one run.

    ``B`` is the normalized transformation (det = 1 at every generation
    boundary); ``p_sigma`` and ``p_c`` are the step-size and movement
    evolution paths; ``gamma`` is the expansion rate (>= 1); ``h_unconst``
    records that no infeasible solution has been seen yet.
    """

    m: np.ndarray
    sigma: float
    B: np.ndarray
    p_sigma: np.ndarray
    p_c: np.ndarray
    gamma: float = 1.0
    h_unconst: bool = True
    g: int = 0

    @classmethod
    def initial(cls, m0, sigma0: float) -> "SearchState":
        m = np.asarray(m0, dtype=float).copy()
        if m.ndim != 1:
            raise ValueError("initial mean must be a vector")
        if not sigma0 > 0:
            raise ValueError("initial step size must be positive")
        d = m.size
        return cls(
            m=m,
            sigma=float(sigma0),
            B=np.eye(d),
            p_sigma=np.zeros(d),
            p_c=np.zeros(d),
        )

    @property
    def dim(self) -> int:
        return self.m.size

    def copy(self) -> "SearchState":
        return SearchState(
            m=self.m.copy(),
            sigma=self.sigma,
            B=self.B.copy(),
            p_sigma=self.p_sigma.copy(),
            p_c=self.p_c.copy(),
            gamma=self.gamma,
            h_unconst=self.h_unconst,
            g=self.g,
        )


def compute_rank_weights(lam: int) -> np.ndarray:
    """Zero-sum log-rank recombination weights over sorted positions.

    Position i (1-based, best first) gets ``max(0, ln(lam/2 + 1) - ln i)``,
    normalized to sum to one, shifted by ``-1/lam``.
    """
    _check_lambda(lam)
    raw = rank_weight_numerators(lam)
    return raw / raw.sum() - 1.0 / lam


def rank_weight_numerators(lam: int) -> np.ndarray:
    """Unnormalized log-rank weights ``max(0, ln(lam/2 + 1) - ln i)``."""
    _check_lambda(lam)
    i = np.arange(1, lam + 1, dtype=float)
    return np.maximum(0.0, math.log(lam / 2 + 1) - np.log(i))


def compute_mu_eff(w_rank: np.ndarray, lam: int) -> float:
    """Effective selection mass: ``1 / sum((w_i + 1/lam)^2)``."""
    w_rank = np.asarray(w_rank, dtype=float)
    return float(1.0 / np.sum((w_rank + 1.0 / lam) ** 2))


def compute_distance_weights(z, alpha: float) -> np.ndarray:
    """Distance-boosted weights over a preference-sorted population.

    Each sorted position's log-rank numerator is multiplied by
    ``exp(alpha * ||z_i||)`` before normalizing, which shifts weight toward
    samples drawn far from the mean.  The largest exponent is subtracted
    before exponentiating; the normalization makes the result invariant
    under that shift, and it keeps ``exp`` in range for any draw.
    """
    z = np.asarray(z, dtype=float)
    if z.ndim != 2:
        raise ValueError("z must be a (lambda, d) array of sorted latent draws")
    lam = z.shape[0]
    _check_lambda(lam)
    norms = np.linalg.norm(z, axis=1)
    exponents = alpha * norms
    boost = np.exp(exponents - exponents.max())
    raw = rank_weight_numerators(lam) * boost
    return raw / raw.sum() - 1.0 / lam


def chi_d(d: int) -> float:
    """Expected norm of a d-dimensional standard normal draw.

    Standard asymptotic approximation ``sqrt(d)*(1 - 1/(4d) + 1/(21 d^2))``.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    return math.sqrt(d) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d))


@lru_cache(maxsize=None)
def distance_weight_scale(d: int) -> float:
    """Base distance-weight parameter for dimension ``d``.

    Root of ``(1 + a^2) * exp(a^2 / 2) / 0.24 - 10 - d`` (Newton iteration),
    per the DX-NES recommended setting.
    """
    if d < 2:
        raise ValueError("dimension must be >= 2")

    def f(a: float) -> float:
        return (1.0 + a * a) * math.exp(a * a / 2.0) / 0.24 - 10.0 - d

    def f_prime(a: float) -> float:
        return (1.0 / 0.24) * a * math.exp(a * a / 2.0) * (3.0 + a * a)

    a = 1.0
    while abs(f(a)) > 1e-10:
        a -= 0.5 * f(a) / f_prime(a)
    return a


def distance_weight_alpha(d: int, lam: int, n_feas: int) -> float:
    """Feasibility-damped distance-weight parameter (DX-NES-IC schedule)."""
    return (
        distance_weight_scale(d)
        * min(1.0, math.sqrt(lam / d))
        * math.sqrt(n_feas / lam)
    )


def eta_sigma_movement(d: int, n_feas: int) -> float:
    return 1.0


def eta_sigma_stagnation(d: int, n_feas: int) -> float:
    return math.tanh((0.024 * n_feas + 0.7 * d + 20.0) / (d + 12.0))


def eta_sigma_convergence(d: int, n_feas: int) -> float:
    return 2.0 * math.tanh((0.025 * n_feas + 0.75 * d + 10.0) / (d + 4.0))


def eta_b_default(d: int, lam: int, n_feas: int) -> float:
    """Shape learning rate (same schedule in every phase).

    The classic exponential-NES rate for a full transformation matrix,
    damped by the feasible fraction of the current population: shape
    learning slows while the distribution presses against a constraint
    boundary, which keeps the corner approach stable.
    """
    return xnes_learning_rate(d) * n_feas / lam


def c_sigma_default(d: int, mu_eff: float) -> float:
    return (mu_eff + 2.0) / (d + mu_eff + 5.0)


def c_c_default(d: int, mu_eff: float) -> float:
    return (4.0 + mu_eff / d) / (d + 4.0 + 2.0 * mu_eff / d)


def c1_default(d: int, mu_eff: float) -> float:
    return 2.0 / ((d + 1.3) ** 2 + mu_eff)


def c_gamma_default(d: int) -> float:
    return 1.0 / (3.0 * (d - 1.0))


def d_gamma_default(d: int, lam: int) -> float:
    return min(1.0, d / lam)


def xnes_learning_rate(d: int) -> float:
    """Fixed step-size/shape learning rate of the xNES baseline."""
    return (9.0 + 3.0 * math.log(d)) / (5.0 * d * math.sqrt(d))


def _check_lambda(lam: int) -> None:
    if lam < 2 or lam % 2 != 0:
        raise ValueError(f"sample size must be a positive even integer >= 2, got {lam}")


@dataclass
class DerivedParams:
    """Quantities derived from (lambda, d) alone."""

    mu_eff: float
    w_rank: np.ndarray
    chi: float

    @classmethod
    def for_config(cls, lam: int, d: int) -> "DerivedParams":
        w_rank = compute_rank_weights(lam)
        return cls(mu_eff=compute_mu_eff(w_rank, lam), w_rank=w_rank, chi=chi_d(d))


# Config fields that accept the "auto" sentinel (None) for the recommended
# schedule/formula, keyed by the reason they cannot always be one number.
_AUTO_FIELDS = (
    "eta_sigma_move",
    "eta_sigma_stag",
    "eta_sigma_conv",
    "eta_b_move",
    "eta_b_stag",
    "eta_b_conv",
    "alpha",
    "c_sigma",
    "c_c",
    "c1",
    "c_gamma",
    "d_gamma",
)


@dataclass
class StrategyConfig:
    """Sample size, learning rates, and feature switches for one strategy.

    ``None`` in a rate field means "auto": resolve to the recommended
    DX-NES-IC schedule, which on implicitly constrained problems depends on
    the feasible count of the current population.  The feature switches
    select the strategy mode:

    =============  ========  ===============  ======  ==========
    mode           rank_one  ridge_condition  reset   phase/expand
    =============  ========  ===============  ======  ==========
    fmnes          on        on               on      on
    dxnes-ic       off       (inert)          off     on
    method-a       on        off (always)     on      on
    method-b       on        on               off     on
    method-c       on        off (always)     off     on
    xnes / xnes-r  off       (inert)          off     off (fixed rates)
    =============  ========  ===============  ======  ==========
    """

    lam: int
    dim: int
    eta_m: float = ETA_MEAN
    eta_sigma_move: Optional[float] = None
    eta_sigma_stag: Optional[float] = None
    eta_sigma_conv: Optional[float] = None
    eta_b_move: Optional[float] = None
    eta_b_stag: Optional[float] = None
    eta_b_conv: Optional[float] = None
    alpha: Optional[float] = None
    c_sigma: Optional[float] = None
    c_c: Optional[float] = None
    c1: Optional[float] = None
    beta: float = 1.2
    c_gamma: Optional[float] = None
    d_gamma: Optional[float] = None
    enable_rank_one: bool = True
    enable_ridge_condition: bool = True
    enable_reset: bool = True
    enable_phase_switching: bool = True
    enable_expansion: bool = True

    def __post_init__(self) -> None:
        _check_lambda(self.lam)
        if self.dim < 2:
            raise ValueError("dimension must be >= 2")
        if not self.beta > 1.0:
            raise ValueError("ridge threshold beta must exceed 1")
        for name in ("c_sigma", "c_c", "c1"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {value}")
        if self.c_gamma is not None and not 0.0 <= self.c_gamma <= 1.0:
            raise ValueError("c_gamma must lie in [0, 1]")
        if self.d_gamma is not None and not self.d_gamma > 0.0:
            raise ValueError("d_gamma must be positive")

    @classmethod
    def preset(cls, mode: str, dim: int, lam: int) -> "StrategyConfig":
        """Named strategy configurations (see the class table)."""
        mode = mode.lower()
        if mode not in STRATEGY_MODES:
            raise ValueError(f"unknown strategy mode {mode!r}; expected one of {STRATEGY_MODES}")
        if mode == "fmnes":
            return cls(lam=lam, dim=dim)
        if mode == "dxnes-ic":
            return cls(lam=lam, dim=dim, enable_rank_one=False, enable_reset=False)
        if mode == "method-a":
            return cls(lam=lam, dim=dim, enable_ridge_condition=False)
        if mode == "method-b":
            return cls(lam=lam, dim=dim, enable_reset=False)
        if mode == "method-c":
            return cls(lam=lam, dim=dim, enable_ridge_condition=False, enable_reset=False)
        # xnes / xnes-r: fixed learning rates, rank weights only, no extras.
        eta = xnes_learning_rate(dim)
        return cls(
            lam=lam,
            dim=dim,
            eta_sigma_move=eta,
            eta_sigma_stag=eta,
            eta_sigma_conv=eta,
            eta_b_move=eta,
            eta_b_stag=eta,
            eta_b_conv=eta,
            enable_rank_one=False,
            enable_reset=False,
            enable_phase_switching=False,
            enable_expansion=False,
        )

    def resolve(self) -> "ResolvedParams":
        return ResolvedParams(self)


class ResolvedParams:
    """A ``StrategyConfig`` with derived quantities and schedules bound.

    Rate accessors take the feasible count of the current population and
    return the configured fixed value when one was given, otherwise the
    recommended schedule value.
    """

    def __init__(self, config: StrategyConfig):
        self.config = config
        self.lam = config.lam
        self.dim = config.dim
        self.derived = DerivedParams.for_config(config.lam, config.dim)
        self.eta_m = config.eta_m
        mu = self.derived.mu_eff
        self.c_sigma = config.c_sigma if config.c_sigma is not None else c_sigma_default(config.dim, mu)
        self.c_c = config.c_c if config.c_c is not None else c_c_default(config.dim, mu)
        self.c1 = config.c1 if config.c1 is not None else c1_default(config.dim, mu)
        self.beta = config.beta
        self.c_gamma = config.c_gamma if config.c_gamma is not None else c_gamma_default(config.dim)
        self.d_gamma = config.d_gamma if config.d_gamma is not None else d_gamma_default(config.dim, config.lam)

    @property
    def mu_eff(self) -> float:
        return self.derived.mu_eff

    @property
    def w_rank(self) -> np.ndarray:
        return self.derived.w_rank

    @property
    def chi(self) -> float:
        return self.derived.chi

    def alpha(self, n_feas: int) -> float:
        if self.config.alpha is not None:
            return self.config.alpha
        return distance_weight_alpha(self.dim, self.lam, n_feas)

    def eta_sigma(self, phase: str, n_feas: int) -> float:
        fixed = {
            "movement": self.config.eta_sigma_move,
            "stagnation": self.config.eta_sigma_stag,
            "convergence": self.config.eta_sigma_conv,
        }[phase]
        if fixed is not None:
            return fixed
        schedule = {
            "movement": eta_sigma_movement,
            "stagnation": eta_sigma_stagnation,
            "convergence": eta_sigma_convergence,
        }[phase]
        return schedule(self.dim, n_feas)

    def eta_b(self, phase: str, n_feas: int) -> float:
        fixed = {
            "movement": self.config.eta_b_move,
            "stagnation": self.config.eta_b_stag,
            "convergence": self.config.eta_b_conv,
        }[phase]
        if fixed is not None:
            return fixed
        return eta_b_default(self.dim, self.lam, n_feas)


# ---------------------------------------------------------------------------
# Config file format: "key = value" lines, '#' comments, "auto" sentinel.
# ---------------------------------------------------------------------------

_FILE_KEYS = {
    "lambda": "lam",
    "d": "dim",
    "eta_m": "eta_m",
    "eta_sigma_move": "eta_sigma_move",
    "eta_sigma_stag": "eta_sigma_stag",
    "eta_sigma_conv": "eta_sigma_conv",
    "eta_b_move": "eta_b_move",
    "eta_b_stag": "eta_b_stag",
    "eta_b_conv": "eta_b_conv",
    "alpha": "alpha",
    "c_sigma": "c_sigma",
    "c_c": "c_c",
    "c1": "c1",
    "beta": "beta",
    "c_gamma": "c_gamma",
    "d_gamma": "d_gamma",
    "enable_rank_one": "enable_rank_one",
    "enable_ridge_condition": "enable_ridge_condition",
    "enable_reset": "enable_reset",
    "enable_phase_switching": "enable_phase_switching",
    "enable_expansion": "enable_expansion",
}
_ATTR_KEYS = {attr: key for key, attr in _FILE_KEYS.items()}

_HEADER = """\
# Strategy configuration: one "key = value" per line, '#' starts a comment.
# Defaults follow the DX-NES-IC recommended settings.  Fields set to "auto"
# are schedules in n_feas, the number of feasible solutions in the current
# population (n_feas = lambda on unconstrained problems):
#   eta_sigma_move = 1
#   eta_sigma_stag = tanh((0.024*n_feas + 0.7*d + 20) / (d + 12))
#   eta_sigma_conv = 2*tanh((0.025*n_feas + 0.75*d + 10) / (d + 4))
#   eta_b_*        = (9 + 3*ln(d)) / (5*d*sqrt(d)) * n_feas/lambda
#   alpha          = a*min(1, sqrt(lambda/d))*sqrt(n_feas/lambda),
#                    (1 + a^2)*exp(a^2/2) = 0.24*(10 + d)
#   c_sigma        = (mu_eff + 2) / (d + mu_eff + 5)
#   c_c            = (4 + mu_eff/d) / (d + 4 + 2*mu_eff/d)
#   c1             = 2 / ((d + 1.3)^2 + mu_eff)
#   c_gamma        = 1 / (3*(d - 1))
#   d_gamma        = min(1, d/lambda)
# A number in place of "auto" pins that rate for every generation.
"""


def _format_value(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(config: StrategyConfig, stream: Optional[TextIO] = None) -> str:
    """Write ``config`` in the documented key-value format.

    Auto fields get a trailing comment with the value they resolve to at
    full feasibility, so a dumped file records exactly what a run used on
    unconstrained problems.
    """
    resolved = config.resolve()
    out = io.StringIO()
    out.write(_HEADER)
    lines = []
    resolved_at_full = {
        "eta_sigma_move": resolved.eta_sigma("movement", config.lam),
        "eta_sigma_stag": resolved.eta_sigma("stagnation", config.lam),
        "eta_sigma_conv": resolved.eta_sigma("convergence", config.lam),
        "eta_b_move": resolved.eta_b("movement", config.lam),
        "eta_b_stag": resolved.eta_b("stagnation", config.lam),
        "eta_b_conv": resolved.eta_b("convergence", config.lam),
        "alpha": resolved.alpha(config.lam),
        "c_sigma": resolved.c_sigma,
        "c_c": resolved.c_c,
        "c1": resolved.c1,
        "c_gamma": resolved.c_gamma,
        "d_gamma": resolved.d_gamma,
    }
    for f in fields(config):
        key = _ATTR_KEYS[f.name]
        value = getattr(config, f.name)
        line = f"{key} = {_format_value(value)}"
        if value is None and f.name in resolved_at_full:
            line += f"  # resolves to {resolved_at_full[f.name]!r} at n_feas = lambda"
        lines.append(line)
    out.write("\n".join(lines) + "\n")
    text = out.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    lowered = raw.lower()
    if lowered == "auto":
        return None
    if lowered in ("true", "false"):
        return lowered == "true"
    attr = _FILE_KEYS[key]
    if attr in ("lam", "dim"):
        return int(raw)
    return float(raw)


def parse_config(text: str) -> StrategyConfig:
    """Parse the key-value format produced by :func:`dump_config`."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _FILE_KEYS:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        values[_FILE_KEYS[key]] = _parse_value(key, raw)
    if "lam" not in values or "dim" not in values:
        raise ValueError("config must set both 'lambda' and 'd'")
    return StrategyConfig(**values)


def load_config(path) -> StrategyConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def save_config(config: StrategyConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        dump_config(config, fh)


def config_for_strategy(strategy: str, dim: int, lam: int, overrides: Optional[dict] = None) -> StrategyConfig:
    """Preset for ``strategy`` with optional field overrides applied."""
    config = StrategyConfig.preset(strategy, dim=dim, lam=lam)
    if overrides:
        config = replace(config, **overrides)
    return config
