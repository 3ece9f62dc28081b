"""Search the family for its largest Clauser-Horne parameter.

A sweep locates the best angle for the reference coefficients; the simplex
maximizer then frees coefficients, angle and strength together.  However the
knobs are set, the family stays below the Bell limit: time correlation moves
B by too little to manufacture a violation.
"""

import math

import numpy as np

from lhvlab import MemoryKind, SearchSpace, maximize_ch, memoryless, reference_model, sweep_phi

model = reference_model()

print("Angle sweep, memoryless reference model:")
grid = np.linspace(0.0, math.pi / 2, 9)
rows = sweep_phi(model, memoryless(), grid)
for phi, breakdown in rows:
    bar = "#" * int(round(40 * max(breakdown.b, 0.0)))
    print(f"  phi = {phi:5.3f}  B = {breakdown.b:9.6f}  {bar}")

space = SearchSpace(rule_kind=MemoryKind.MEMORYLESS, free={"phi": (0.0, math.pi / 2)})
result = maximize_ch(space, 8, 42)
print(f"\nBest angle for the reference coefficients: phi = {result.best_params['phi']:.6f}, "
      f"B = {result.best_b:.7f} ({result.evaluations} evaluations)")

print("\nFreeing coefficients, angle and enhancement strength together:")
space = SearchSpace(
    rule_kind=MemoryKind.ENHANCE,
    free={
        "a0": (0.0, 1.0),
        "a1": (-1.0, 1.0),
        "a2": (-1.0, 1.0),
        "phi": (0.0, math.pi / 2),
        "strength": (0.0, 1.0),
    },
)
result = maximize_ch(space, 32, 7)
p = result.best_params
print(f"  best B = {result.best_b:.7f}  ({result.evaluations} evaluations)")
print(f"  at a0 = {p['a0']:.4f}, a1 = {p['a1']:.4f}, a2 = {p['a2']:.4f}, "
      f"phi = {p['phi']:.4f}, s = {p['strength']:.4f}")
print("\nThe optimizer climbs to the always-firing model (a0 = 1), where every")
print("event is a coincidence and B = (3 - 1)/2 = 1 exactly: the bound is")
print("saturated by a trivial deterministic model but never exceeded.")

print("\nKeeping the detector honest (a0 capped at 1/2) shows the real landscape:")
coefficient_box = {
    "a0": (0.0, 0.5),
    "a1": (-1.0, 1.0),
    "a2": (-1.0, 1.0),
    "phi": (0.0, math.pi / 2),
}
plain = maximize_ch(
    SearchSpace(rule_kind=MemoryKind.MEMORYLESS, free=dict(coefficient_box)), 32, 8
)
enhanced = maximize_ch(
    SearchSpace(
        rule_kind=MemoryKind.ENHANCE,
        free={**coefficient_box, "strength": (0.0, 1.0)},
    ),
    32, 8,
)
p = enhanced.best_params
print(f"  memoryless best        B = {plain.best_b:.7f}")
print(f"  with enhancement free  B = {enhanced.best_b:.7f}  "
      f"(a0 = {p['a0']:.4f}, a1 = {p['a1']:.4f}, a2 = {p['a2']:.4f}, "
      f"phi = {p['phi']:.4f}, s = {p['strength']:.4f})")
print(f"\nEmpirical conclusion: enhancement buys about "
      f"{enhanced.best_b - plain.best_b:.4f} here and the family never crosses")
print("the limit; time correlation alone cannot manufacture a Bell violation.")
