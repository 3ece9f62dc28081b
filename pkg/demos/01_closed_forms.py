"""Walk through the model family and its closed-form Bell parameters.

The detection response of each observer is a two-harmonic cosine series in
lambda - theta (Alice) or lambda + theta (Bob), with lambda uniform on
[0, pi].  Averaging over lambda gives per-event singles and coincidence
rates, and from those the Clauser-Horne parameter B, which a memoryless
model of this kind can never push above 1.
"""

import math

from lhvlab import (
    ch_with_memory,
    enhance,
    inhibit,
    memoryless,
    quantum_reference,
    rates_closed,
    reference_model,
    validate_response,
)

PHI = math.pi / 8.0

model = reference_model()
report = validate_response(model.alice)
print("The built-in reference response is the square (1 + sqrt(2) c)^2 / 6:")
print(f"  coefficients    a0={model.alice.a0:.10f}  a1={model.alice.a1:.10f}  a2={model.alice.a2:.10f}")
print(f"  range over lambda  [{report.min_value:.3e}, {report.max_value:.10f}]  (valid: {report.valid})")
print("  it touches zero exactly, at cos(2 lambda) = -1/sqrt(2).")

rates = rates_closed(model, PHI)
print(f"\nPer-event rates at the usual angle phi = pi/8:")
print(f"  p_a = p_b = {rates.p_a:.10f}")
print(f"  p_ab(phi)   = {rates.p_ab:.10f}")
print(f"  p_ab(3 phi) = {rates_closed(model, 3 * PHI).p_ab:.10f}")

print("\nClauser-Horne parameter B = (3 p_ab(phi) - p_ab(3 phi)) / (p_a + p_b):")
for label, rule in (
    ("memoryless      ", memoryless()),
    ("inhibit  (s = 1)", inhibit()),
    ("enhance  (s = 1)", enhance()),
):
    b = ch_with_memory(model, rule, PHI)
    terms = ""
    if b.has_terms:
        terms = f"  =  {b.term_scaled:.4f} + {b.term_quadratic:.4f} + {b.term_offset:.4f}"
    print(f"  {label}  B = {b.b:.7f}{terms}")

print("\nInhibition lowers B, enhancement raises it slightly; neither crosses 1.")

b_model = ch_with_memory(model, memoryless(), PHI).b
b_qm = quantum_reference(2.0 / 3.0, PHI)
print(f"\nQuantum pairs seen by detectors of efficiency 2/3 give the same number:")
print(f"  model B = {b_model:.12f}")
print(f"  B_qm    = {b_qm:.12f}   (difference {abs(b_model - b_qm):.1e})")
print(f"At full efficiency the quantum value is {quantum_reference(1.0, PHI):.7f} > 1.")
