"""Closed-form singles/coincidence rates and Clauser-Horne parameters.

Averaging a two-harmonic response over the uniform hidden variable kills
every cosine term, so the singles probability is just the constant
coefficient.  The coincidence probability of the two responses survives
through the matching harmonics:

    p_ab(phi) = a0_A*a0_B + (a1_A*a1_B/2)*cos(2*phi) + (a2_A*a2_B/2)*cos(4*phi)

``phi`` is the single effective angle of the coincidence rate.  With Alice
on the MINUS orientation and Bob on PLUS, the lambda average of the product
depends on alpha + beta; treating phi as the analyzer separation therefore
assumes Bob's setting is measured with the opposite sign convention.

The Clauser-Horne parameter is the probability-form ratio

    B = (3*p_ab(phi) - p_ab(3*phi)) / (p_a + p_b)

which no memoryless model of this family can push above 1.  The memory
rules modify the per-event rates over two-event blocks; for the
all-or-nothing rules (strength 1) the resulting parameter splits into a
scaled copy of the memoryless B plus quadratic and constant corrections,
and that decomposition is reported alongside the total.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import (
    AllDarkModelError,
    AsymmetricModelError,
    AsymmetricRatesError,
    EfficiencyRangeError,
    LhvError,
)
from .model import (
    LhvModel,
    MemoryKind,
    MemoryRule,
    is_symmetric,
    require_valid_model,
)

__all__ = [
    "Observer",
    "Rates",
    "BellBreakdown",
    "RATE_SYMMETRY_TOL",
    "DECOMPOSITION_TOL",
    "singles_closed",
    "coincidence_closed",
    "rates_closed",
    "ch_parameter",
    "memory_adjusted_rates",
    "ch_with_memory",
    "quantum_reference",
]

#: Largest tolerated |p_a - p_b| before the memory algebra refuses to run.
RATE_SYMMETRY_TOL = 1e-12

#: Required agreement between the total parameter and its term decomposition.
DECOMPOSITION_TOL = 1e-12

_RATE_SLACK = 1e-9


class Observer(enum.Enum):
    ALICE = "alice"
    BOB = "bob"


@dataclass(frozen=True)
class Rates:
    """Per-event singles and coincidence probabilities."""

    p_a: float
    p_b: float
    p_ab: float

    def __post_init__(self) -> None:
        if not (-_RATE_SLACK <= self.p_ab <= min(self.p_a, self.p_b) + _RATE_SLACK):
            raise ValueError(
                f"inconsistent rates: need 0 <= p_ab <= min(p_a, p_b), got {self!r}"
            )
        if max(self.p_a, self.p_b) > 1.0 + _RATE_SLACK:
            raise ValueError(f"singles probabilities exceed 1: {self!r}")


@dataclass(frozen=True)
class BellBreakdown:
    """Clauser-Horne parameter with its term decomposition.

    The terms are populated for strength 0 (where they collapse to
    ``(b, 0, 0)``) and strength 1 (the all-or-nothing rules); they are None
    for fractional strength, where only the total is defined.
    """

    b: float
    term_scaled: float | None = None
    term_quadratic: float | None = None
    term_offset: float | None = None

    @property
    def has_terms(self) -> bool:
        return self.term_scaled is not None


def singles_closed(model: LhvModel, observer: Observer) -> float:
    """Per-event singles probability; independent of the setting angle.

    The cosine harmonics average to zero over lambda in [0, pi] under the
    1/pi density, leaving the constant coefficient.
    """
    response = model.alice if observer is Observer.ALICE else model.bob
    return response.a0


def coincidence_closed(model: LhvModel, phi: float) -> float:
    """Per-event coincidence probability at effective angle ``phi``."""
    a, b = model.alice, model.bob
    return (
        a.a0 * b.a0
        + 0.5 * a.a1 * b.a1 * math.cos(2.0 * phi)
        + 0.5 * a.a2 * b.a2 * math.cos(4.0 * phi)
    )


def rates_closed(model: LhvModel, phi: float) -> Rates:
    """Closed-form per-event rates at effective angle ``phi``."""
    return Rates(
        p_a=singles_closed(model, Observer.ALICE),
        p_b=singles_closed(model, Observer.BOB),
        p_ab=coincidence_closed(model, phi),
    )


def ch_parameter(rates_phi: Rates, rates_3phi: Rates) -> float:
    """Clauser-Horne ratio ``(3*p_ab(phi) - p_ab(3*phi)) / (p_a + p_b)``.

    Both inputs must come from the same model and rule, hence share their
    singles probabilities.
    """
    if (
        abs(rates_phi.p_a - rates_3phi.p_a) > RATE_SYMMETRY_TOL
        or abs(rates_phi.p_b - rates_3phi.p_b) > RATE_SYMMETRY_TOL
    ):
        raise ValueError("rate pair mixes different models: singles probabilities differ")
    denominator = rates_phi.p_a + rates_phi.p_b
    if denominator == 0.0:
        raise AllDarkModelError("p_a + p_b = 0: Bell ratio undefined for all-dark model")
    return (3.0 * rates_phi.p_ab - rates_3phi.p_ab) / denominator


def memory_adjusted_rates(rates: Rates, rule: MemoryRule) -> Rates:
    """Per-event rates over a two-event block under a memory rule.

    The block algebra assumes p_a = p_b; asymmetric inputs are rejected.
    With detection probability p per event and strength s, the forced
    outcome fires for an observer with probability s only after that
    observer's own first-event detection:

    INHIBIT:  p' = p - (s/2)*p^2
              p'_ab = (1/2)*[p_ab + p_ab*((1-s)^2*p_ab
                        + 2*(1-s)*(p - p_ab) + (1 - 2p + p_ab))]
    ENHANCE:  p'' = p + (s/2)*p*(1-p)
              p''_ab = (1/2)*[p_ab + p_ab*(s^2 + 2s(1-s)*p + (1-s)^2*p_ab)
                        + 2*(p - p_ab)*(s*p + (1-s)*p_ab)
                        + (1 - 2p + p_ab)*p_ab]

    Strength 1 reduces to the all-or-nothing forms
    ``p - p^2/2, p_ab - p*p_ab + p_ab^2/2`` (inhibit) and
    ``3p/2 - p^2/2, 3*p_ab/2 - 2*p*p_ab + p_ab^2/2 + p^2`` (enhance).
    """
    if abs(rates.p_a - rates.p_b) > RATE_SYMMETRY_TOL:
        raise AsymmetricRatesError(
            f"memory algebra requires p_a = p_b, got {rates.p_a!r} vs {rates.p_b!r}"
        )
    kind = rule.effective_kind
    if kind is MemoryKind.MEMORYLESS:
        return rates

    p = rates.p_a
    pab = rates.p_ab
    s = rule.strength
    if kind is MemoryKind.INHIBIT:
        single = p - 0.5 * s * p * p
        coincidence = 0.5 * (
            pab
            + pab * ((1.0 - s) ** 2 * pab + 2.0 * (1.0 - s) * (p - pab) + (1.0 - 2.0 * p + pab))
        )
    else:
        single = p + 0.5 * s * p * (1.0 - p)
        coincidence = 0.5 * (
            pab
            + pab * (s * s + 2.0 * s * (1.0 - s) * p + (1.0 - s) ** 2 * pab)
            + 2.0 * (p - pab) * (s * p + (1.0 - s) * pab)
            + (1.0 - 2.0 * p + pab) * pab
        )
    return Rates(p_a=single, p_b=single, p_ab=coincidence)


def _decomposition(
    kind: MemoryKind, b_plain: float, rates_phi: Rates, rates_3phi: Rates
) -> tuple[float, float, float]:
    """Strength-1 term split of the memory-adjusted parameter."""
    p = rates_phi.p_a
    quad = 3.0 * rates_phi.p_ab ** 2 - rates_3phi.p_ab ** 2
    if kind is MemoryKind.INHIBIT:
        return (
            b_plain * (1.0 - p) / (1.0 - 0.5 * p),
            quad / (2.0 * p * (2.0 - p)),
            0.0,
        )
    return (
        b_plain * (3.0 - 4.0 * p) / (3.0 - p),
        quad / (2.0 * p * (3.0 - p)),
        2.0 * p / (3.0 - p),
    )


def ch_with_memory(
    model: LhvModel, rule: MemoryRule, phi: float, *, validate: bool = True
) -> BellBreakdown:
    """Clauser-Horne parameter of a symmetric model under a memory rule.

    Computes closed-form rates at ``phi`` and ``3*phi``, applies the rule's
    block algebra and forms the ratio.  At strength 0 or 1 the term
    decomposition is emitted as well and cross-checked against the total to
    ``DECOMPOSITION_TOL``; fractional strengths report only the total.
    """
    if validate:
        require_valid_model(model)
    if not is_symmetric(model):
        raise AsymmetricModelError(
            "memory rules are defined for symmetric models (alice == bob coefficients)"
        )
    rates_phi = rates_closed(model, phi)
    rates_3phi = rates_closed(model, 3.0 * phi)
    adjusted_phi = memory_adjusted_rates(rates_phi, rule)
    adjusted_3phi = memory_adjusted_rates(rates_3phi, rule)
    b = ch_parameter(adjusted_phi, adjusted_3phi)

    kind = rule.effective_kind
    if kind is MemoryKind.MEMORYLESS:
        terms = (b, 0.0, 0.0)
    elif rule.strength == 1.0:
        b_plain = ch_parameter(rates_phi, rates_3phi)
        terms = _decomposition(kind, b_plain, rates_phi, rates_3phi)
    else:
        return BellBreakdown(b=b)

    if abs(b - sum(terms)) > DECOMPOSITION_TOL:
        raise LhvError(
            f"decomposition identity violated: b={b!r} vs terms sum {sum(terms)!r}"
        )
    return BellBreakdown(b=b, term_scaled=terms[0], term_quadratic=terms[1], term_offset=terms[2])


def quantum_reference(eta: float, phi: float) -> float:
    """CH parameter of maximally entangled pairs at detector efficiency eta.

    Singles are eta/2 and coincidences (eta^2/2)*cos^2(phi), so the ratio
    collapses to ``(eta/2)*(3*cos(phi)^2 - cos(3*phi)^2)``.  At eta = 2/3 and
    phi = pi/8 this coincides with the reference model's memoryless value;
    at eta = 1 it exceeds the Bell limit.
    """
    if not (math.isfinite(eta) and 0.0 <= eta <= 1.0):
        raise EfficiencyRangeError(f"efficiency must lie in [0, 1], got {eta!r}")
    return 0.5 * eta * (3.0 * math.cos(phi) ** 2 - math.cos(3.0 * phi) ** 2)
