"""Sweeps and derivative-free maximization of the Clauser-Horne parameter.

The search asks how close the model family gets to the Bell limit B = 1
when coefficients, angle and memory strength are all knobs.  The objective
is the analytic closed form, so the optimizer is deterministic and cheap;
Monte Carlo stays a post-hoc verification tool.

Feasibility (the response staying inside [0, 1]) has no convenient
projection, so infeasible points receive an additive penalty of -1000 minus
the violation magnitude, which dominates every feasible objective value.
Restarts start from a scrambled Sobol sequence over the box plus the
built-in reference model, so known values are never missed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import qmc

from .analytic import BellBreakdown, ch_with_memory
from .errors import EmptySpaceError, LhvError, RejectionLimitError
from .model import (
    CosineResponse,
    LhvModel,
    MemoryKind,
    MemoryRule,
    require_valid_model,
    symmetric_model,
    validate_response,
)

__all__ = [
    "PARAMETER_NAMES",
    "PENALTY_BASE",
    "SearchSpace",
    "TraceEntry",
    "SearchResult",
    "random_valid_model",
    "sweep_phi",
    "maximize_ch",
]

PARAMETER_NAMES = ("a0", "a1", "a2", "phi", "strength")

#: Default values for parameters that a space neither frees nor fixes.
DEFAULT_PARAMETERS = {
    "a0": 1.0 / 3.0,
    "a1": math.sqrt(2.0) / 3.0,
    "a2": 1.0 / 6.0,
    "phi": math.pi / 8.0,
    "strength": 1.0,
}

PENALTY_BASE = -1e3

_REJECTION_LIMIT = 100_000

_MAX_ITERATIONS = 500
_DIAMETER_TOL = 1e-8
# Standard simplex moves: reflect, expand, contract, shrink.
_REFLECT, _EXPAND, _CONTRACT, _SHRINK = 1.0, 2.0, 0.5, 0.5


@dataclass(frozen=True)
class SearchSpace:
    """Box-constrained subset of {a0, a1, a2, phi, strength}.

    Parameters absent from both ``free`` and ``fixed`` take the defaults in
    :data:`DEFAULT_PARAMETERS` (reference coefficients, phi = pi/8,
    strength = 1).  Models are symmetric by construction; coefficient
    validity is enforced post hoc through the penalty.
    """

    rule_kind: MemoryKind
    free: Mapping[str, tuple[float, float]]
    fixed: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in list(self.free) + list(self.fixed):
            if name not in PARAMETER_NAMES:
                raise ValueError(f"unknown parameter {name!r}")
        overlap = set(self.free) & set(self.fixed)
        if overlap:
            raise ValueError(f"parameters both free and fixed: {sorted(overlap)}")
        for name, (lo, hi) in self.free.items():
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"bounds for {name!r} must be finite with lo < hi")
        if "strength" in self.free:
            lo, hi = self.free["strength"]
            if lo < 0.0 or hi > 1.0:
                raise ValueError("strength bounds must lie within [0, 1]")
        if not 0.0 <= float(self.fixed.get("strength", 1.0)) <= 1.0:
            raise ValueError("fixed strength must lie within [0, 1]")

    @property
    def free_names(self) -> tuple[str, ...]:
        return tuple(n for n in PARAMETER_NAMES if n in self.free)

    def resolve(self, vector: Sequence[float]) -> dict[str, float]:
        """Full parameter dict from a free-parameter vector."""
        params = dict(DEFAULT_PARAMETERS)
        params.update(self.fixed)
        for name, value in zip(self.free_names, vector):
            params[name] = float(value)
        return params


@dataclass(frozen=True)
class TraceEntry:
    params: dict[str, float]
    b: float
    penalized: bool


@dataclass(frozen=True)
class SearchResult:
    best_params: dict[str, float]
    best_b: float
    evaluations: int
    trace: list[TraceEntry]


def random_valid_model(seed: int) -> LhvModel:
    """Symmetric model drawn by rejection: a0 ~ U[0,1], a1, a2 ~ U[-1,1].

    Acceptance is comfortable because the valid region contains the simplex
    |a1| + |a2| <= min(a0, 1 - a0); the attempt cap only guards against a
    broken generator.
    """
    rng = np.random.default_rng(seed)
    for _ in range(_REJECTION_LIMIT):
        a0 = rng.uniform(0.0, 1.0)
        a1 = rng.uniform(-1.0, 1.0)
        a2 = rng.uniform(-1.0, 1.0)
        if validate_response(CosineResponse(a0, a1, a2)).valid:
            return symmetric_model(a0, a1, a2)
    raise RejectionLimitError(
        f"no valid model after {_REJECTION_LIMIT} attempts; generator misconfigured?"
    )


def sweep_phi(
    model: LhvModel, rule: MemoryRule, grid: Sequence[float]
) -> list[tuple[float, BellBreakdown]]:
    """Clauser-Horne parameter at each grid angle, in grid order."""
    require_valid_model(model)
    return [(float(phi), ch_with_memory(model, rule, float(phi), validate=False)) for phi in grid]


class _Objective:
    """Penalized Clauser-Horne objective over a search space."""

    def __init__(self, space: SearchSpace):
        self.space = space
        self.trace: list[TraceEntry] = []
        names = space.free_names
        self.lower = np.array([space.free[n][0] for n in names])
        self.upper = np.array([space.free[n][1] for n in names])

    def __call__(self, vector: np.ndarray) -> float:
        params = self.space.resolve(vector)
        box_violation = float(
            np.sum(np.maximum(0.0, self.lower - vector))
            + np.sum(np.maximum(0.0, vector - self.upper))
        )
        if box_violation > 0.0:
            value, penalized = PENALTY_BASE - box_violation, True
        else:
            response = CosineResponse(params["a0"], params["a1"], params["a2"])
            report = validate_response(response)
            if not report.valid:
                violation = max(0.0, -report.min_value) + max(0.0, report.max_value - 1.0)
                value, penalized = PENALTY_BASE - violation, True
            else:
                rule = MemoryRule(self.space.rule_kind, params["strength"])
                model = symmetric_model(params["a0"], params["a1"], params["a2"])
                value = ch_with_memory(model, rule, params["phi"], validate=False).b
                penalized = False
        self.trace.append(TraceEntry(params=params, b=value, penalized=penalized))
        return value


def _simplex_diameter(vertices: np.ndarray) -> float:
    diff = vertices[:, None, :] - vertices[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=2)).max())


def _nelder_mead(objective, x0: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> None:
    """Simplex ascent from ``x0``; results live in the objective's trace.

    Standard moves (reflect 1, expand 2, contract 0.5, shrink 0.5) on the
    negated objective, stopping when the simplex diameter drops below
    1e-8 or after 500 iterations.
    """
    n = len(x0)
    vertices = [np.array(x0, dtype=float)]
    for i in range(n):
        step = 0.05 * (upper[i] - lower[i])
        if x0[i] + step > upper[i]:
            step = -step
        vertex = np.array(x0, dtype=float)
        vertex[i] += step
        vertices.append(vertex)
    vertices = np.array(vertices)
    values = np.array([-objective(v) for v in vertices])  # minimize -b

    for _ in range(_MAX_ITERATIONS):
        order = np.argsort(values, kind="stable")
        vertices, values = vertices[order], values[order]
        if _simplex_diameter(vertices) < _DIAMETER_TOL:
            break
        centroid = vertices[:-1].mean(axis=0)
        worst = vertices[-1]
        reflected = centroid + _REFLECT * (centroid - worst)
        f_reflected = -objective(reflected)
        if f_reflected < values[0]:
            expanded = centroid + _EXPAND * (centroid - worst)
            f_expanded = -objective(expanded)
            if f_expanded < f_reflected:
                vertices[-1], values[-1] = expanded, f_expanded
            else:
                vertices[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[-2]:
            vertices[-1], values[-1] = reflected, f_reflected
        else:
            if f_reflected < values[-1]:
                contracted = centroid + _CONTRACT * (reflected - centroid)
            else:
                contracted = centroid + _CONTRACT * (worst - centroid)
            f_contracted = -objective(contracted)
            if f_contracted < min(f_reflected, values[-1]):
                vertices[-1], values[-1] = contracted, f_contracted
            else:
                best = vertices[0]
                for i in range(1, n + 1):
                    vertices[i] = best + _SHRINK * (vertices[i] - best)
                    values[i] = -objective(vertices[i])


def _start_points(space: SearchSpace, restarts: int, seed: int) -> np.ndarray:
    """Reference-model start followed by ``restarts`` scrambled Sobol points."""
    names = space.free_names
    lower = np.array([space.free[n][0] for n in names])
    upper = np.array([space.free[n][1] for n in names])
    reference = np.clip(
        np.array([DEFAULT_PARAMETERS[n] for n in names]), lower, upper
    )
    starts = [reference]
    if restarts > 0:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
        sampler = qmc.Sobol(d=len(names), scramble=True, seed=rng)
        with warnings.catch_warnings():
            # restart counts need not be powers of two; balance is irrelevant here
            warnings.simplefilter("ignore", UserWarning)
            points = sampler.random(restarts)
        starts.extend(qmc.scale(points, lower, upper))
    return np.array(starts)


def maximize_ch(space: SearchSpace, restarts: int, seed: int) -> SearchResult:
    """Multi-start Nelder-Mead maximization of the penalized objective.

    Returns the best evaluation over all starts; exact ties keep the
    first-found point (restart order), so results do not depend on how
    restarts might be scheduled.
    """
    if not space.free:
        raise EmptySpaceError("search space declares no free parameters")
    if restarts < 0:
        raise ValueError("restarts must be >= 0")

    objective = _Objective(space)
    for start in _start_points(space, restarts, seed):
        _nelder_mead(objective, start, objective.lower, objective.upper)

    best = None
    for entry in objective.trace:
        if not entry.penalized and (best is None or entry.b > best.b):
            best = entry
    if best is None:
        raise LhvError("search never reached a valid model; widen the space")

    rule = MemoryRule(space.rule_kind, best.params["strength"])
    model = symmetric_model(best.params["a0"], best.params["a1"], best.params["a2"])
    check = ch_with_memory(model, rule, best.params["phi"]).b
    if abs(check - best.b) > 1e-12:
        raise LhvError(f"re-evaluation mismatch: {check!r} vs {best.b!r}")
    return SearchResult(
        best_params=dict(best.params),
        best_b=best.b,
        evaluations=len(objective.trace),
        trace=objective.trace,
    )
