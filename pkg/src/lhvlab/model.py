"""Core model family: hidden-variable density, detection responses, memory rules.

The family describes one hidden variable lambda shared by a photon pair,
distributed uniformly on [0, pi] (density 1/pi, not configurable).  Each
observer registers a detection with a probability given by a truncated
cosine series in the analyzer setting theta:

    P(lambda, theta) = a0 + a1*cos(2*(lambda -+ theta)) + a2*cos(4*(lambda -+ theta))

Alice's response uses the MINUS orientation (argument lambda - theta), Bob's
the PLUS orientation (argument lambda + theta).  A response is *valid* when
P stays inside [0, 1] for every lambda; the closed interval is deliberate so
degenerate constant responses (always dark, always firing) remain
representable.

Time correlation between consecutive pair emissions is expressed by a
``MemoryRule``: the second event of a disjoint event pair may be inhibited
(forced non-detection) or enhanced (forced detection) for an observer that
detected in the first event.  The rule fires with probability ``strength``;
``strength=1`` gives the all-or-nothing rules, ``strength=0`` is memoryless.

Everything here is pure and immutable; values can be shared freely across
threads.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .errors import InvalidResponseError

__all__ = [
    "Orientation",
    "CosineResponse",
    "LhvModel",
    "MemoryKind",
    "MemoryRule",
    "ResponseValidity",
    "HIDDEN_VARIABLE_DENSITY",
    "VALIDITY_TOL",
    "VALIDATION_GRID_POINTS",
    "response_at",
    "validate_response",
    "require_valid_response",
    "require_valid_model",
    "is_symmetric",
    "symmetric_model",
    "reference_model",
    "model_to_dict",
    "model_from_dict",
    "normalize_angle",
    "memoryless",
    "inhibit",
    "enhance",
]

#: Constant hidden-variable density on [0, pi].
HIDDEN_VARIABLE_DENSITY = 1.0 / math.pi

#: Tolerance for the [0, 1] validity bounds.
VALIDITY_TOL = 1e-9

#: Number of uniform grid points used by the extremum scan.
VALIDATION_GRID_POINTS = 8192


class Orientation(enum.Enum):
    """Sign of the analyzer angle inside the response argument."""

    MINUS = "minus"  # argument lambda - theta (Alice)
    PLUS = "plus"    # argument lambda + theta (Bob)


@dataclass(frozen=True)
class CosineResponse:
    """Two-harmonic cosine detection response.

    Evaluates to ``a0 + a1*cos(2*arg) + a2*cos(4*arg)`` where ``arg`` is
    ``lambda - theta`` (MINUS) or ``lambda + theta`` (PLUS).  Construction
    only checks finiteness; whether the response stays inside [0, 1] is a
    separate question answered by :func:`validate_response`.
    """

    a0: float
    a1: float
    a2: float
    orientation: Orientation = Orientation.MINUS

    def __post_init__(self) -> None:
        for name in ("a0", "a1", "a2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"coefficient {name} must be finite, got {value!r}")
        if not isinstance(self.orientation, Orientation):
            raise ValueError(f"orientation must be an Orientation, got {self.orientation!r}")


@dataclass(frozen=True)
class LhvModel:
    """Pair of observer responses over the shared uniform hidden variable.

    Alice must carry the MINUS orientation and Bob the PLUS orientation; the
    hidden-variable density is fixed at 1/pi on [0, pi] and is not a field.
    """

    alice: CosineResponse
    bob: CosineResponse

    def __post_init__(self) -> None:
        if self.alice.orientation is not Orientation.MINUS:
            raise ValueError("alice response must use the MINUS orientation")
        if self.bob.orientation is not Orientation.PLUS:
            raise ValueError("bob response must use the PLUS orientation")


class MemoryKind(enum.Enum):
    """Kind of time correlation applied to the second event of a pair."""

    MEMORYLESS = "none"
    INHIBIT = "inhibit"
    ENHANCE = "enhance"


@dataclass(frozen=True)
class MemoryRule:
    """Time-correlation rule with strength in [0, 1].

    With probability ``strength`` the second-event outcome of an observer
    who detected in the first event is forced (INHIBIT: no detection,
    ENHANCE: certain detection); otherwise the ordinary response applies.
    MEMORYLESS ignores ``strength``.
    """

    kind: MemoryKind
    strength: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.kind, MemoryKind):
            raise ValueError(f"kind must be a MemoryKind, got {self.kind!r}")
        if not (math.isfinite(self.strength) and 0.0 <= self.strength <= 1.0):
            raise ValueError(f"strength must lie in [0, 1], got {self.strength!r}")

    @property
    def effective_kind(self) -> MemoryKind:
        """MEMORYLESS when the rule cannot fire (strength 0)."""
        if self.kind is not MemoryKind.MEMORYLESS and self.strength == 0.0:
            return MemoryKind.MEMORYLESS
        return self.kind


def memoryless() -> MemoryRule:
    return MemoryRule(MemoryKind.MEMORYLESS, 0.0)


def inhibit(strength: float = 1.0) -> MemoryRule:
    return MemoryRule(MemoryKind.INHIBIT, strength)


def enhance(strength: float = 1.0) -> MemoryRule:
    return MemoryRule(MemoryKind.ENHANCE, strength)


def response_at(response: CosineResponse, lam, theta):
    """Evaluate the detection probability at hidden variable(s) ``lam``.

    Pure evaluation: no validity check, accepts any finite real angles and
    broadcasts over NumPy arrays.  For a valid response the result lies in
    [0, 1] up to :data:`VALIDITY_TOL`.
    """
    sign = -1.0 if response.orientation is Orientation.MINUS else 1.0
    x = 2.0 * (np.asarray(lam, dtype=float) + sign * np.asarray(theta, dtype=float))
    value = response.a0 + response.a1 * np.cos(x) + response.a2 * np.cos(2.0 * x)
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class ResponseValidity:
    """Extremum scan outcome for one response."""

    min_value: float
    max_value: float
    arg_min: float
    arg_max: float
    valid: bool


def _stationary_candidates(response: CosineResponse) -> np.ndarray:
    """Stationary points of the series on [0, pi], independent of theta.

    d/dx [a1*cos(2x) + a2*cos(4x)] = -2*sin(2x)*(a1 + 4*a2*cos(2x)), so the
    candidates are sin(2x)=0 plus cos(2x) = -a1/(4*a2) when that ratio is
    admissible.
    """
    candidates = [0.0, math.pi / 2.0, math.pi]
    if response.a2 != 0.0:
        c = -response.a1 / (4.0 * response.a2)
        if -1.0 <= c <= 1.0:
            x = 0.5 * math.acos(c)
            candidates.extend([x, math.pi - x])
    return np.asarray(candidates)


def validate_response(response: CosineResponse, tol: float = VALIDITY_TOL) -> ResponseValidity:
    """Scan the response for its extrema over lambda in [0, pi].

    Evaluates a dense uniform grid plus the analytically known stationary
    candidates of the two-harmonic series, so reported extrema are exact up
    to floating-point rounding.  The scan is done at theta = 0; a setting
    angle only shifts the argument and cannot change the extrema.
    """
    grid = np.linspace(0.0, math.pi, VALIDATION_GRID_POINTS)
    points = np.concatenate([grid, _stationary_candidates(response)])
    values = response_at(response, points, 0.0)
    i_min = int(np.argmin(values))
    i_max = int(np.argmax(values))
    min_value = float(values[i_min])
    max_value = float(values[i_max])
    valid = (min_value >= -tol) and (max_value <= 1.0 + tol)
    return ResponseValidity(
        min_value=min_value,
        max_value=max_value,
        arg_min=float(points[i_min]),
        arg_max=float(points[i_max]),
        valid=valid,
    )


def require_valid_response(response: CosineResponse, label: str = "response") -> ResponseValidity:
    """Raise :class:`InvalidResponseError` naming the offending extremum."""
    report = validate_response(response)
    if not report.valid:
        if report.min_value < -VALIDITY_TOL:
            detail = f"minimum {report.min_value!r} at lambda={report.arg_min!r}"
        else:
            detail = f"maximum {report.max_value!r} at lambda={report.arg_max!r}"
        raise InvalidResponseError(
            f"{label} leaves [0, 1]: {detail}", report=report
        )
    return report


def require_valid_model(model: LhvModel) -> None:
    """Validate both responses, raising on the first violation."""
    require_valid_response(model.alice, "alice response")
    require_valid_response(model.bob, "bob response")


def is_symmetric(model: LhvModel, tol: float = 0.0) -> bool:
    """True when Alice and Bob share coefficients (within ``tol``)."""
    return (
        abs(model.alice.a0 - model.bob.a0) <= tol
        and abs(model.alice.a1 - model.bob.a1) <= tol
        and abs(model.alice.a2 - model.bob.a2) <= tol
    )


def symmetric_model(a0: float, a1: float, a2: float) -> LhvModel:
    """Model with identical coefficients for both observers."""
    return LhvModel(
        alice=CosineResponse(a0, a1, a2, Orientation.MINUS),
        bob=CosineResponse(a0, a1, a2, Orientation.PLUS),
    )


def reference_model() -> LhvModel:
    """The built-in squared-cosine model.

    Both observers respond with (1/6)*(1 + sqrt(2)*cos(2*(lambda -+ theta)))^2,
    i.e. coefficients a0=1/3, a1=sqrt(2)/3, a2=1/6.  Being a perfect square
    the response touches 0 exactly (at cos(2*(lambda-theta)) = -1/sqrt(2)) and
    peaks at (3+2*sqrt(2))/6; it is valid under the closed-interval rule.  Its
    coincidence statistics reproduce those of maximally entangled photon
    pairs observed with detector efficiency 2/3.
    """
    return symmetric_model(1.0 / 3.0, math.sqrt(2.0) / 3.0, 1.0 / 6.0)


def model_to_dict(model: LhvModel) -> dict[str, dict[str, float]]:
    """Serializable form; orientation is implicit (Alice MINUS, Bob PLUS)."""
    return {
        "alice": {"a0": model.alice.a0, "a1": model.alice.a1, "a2": model.alice.a2},
        "bob": {"a0": model.bob.a0, "a1": model.bob.a1, "a2": model.bob.a2},
    }


def model_from_dict(data: Mapping[str, Any]) -> LhvModel:
    """Parse the JSON object form ``{"alice": {"a0": ..}, "bob": {..}}``."""
    try:
        alice = data["alice"]
        bob = data["bob"]
        return LhvModel(
            alice=CosineResponse(
                float(alice["a0"]), float(alice["a1"]), float(alice["a2"]),
                Orientation.MINUS,
            ),
            bob=CosineResponse(
                float(bob["a0"]), float(bob["a1"]), float(bob["a2"]),
                Orientation.PLUS,
            ),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed model object: {exc!r}") from exc


def normalize_angle(value: float) -> float:
    """Map an angle to [0, 2*pi) for display; computation keeps raw values."""
    return float(np.mod(value, 2.0 * math.pi))
