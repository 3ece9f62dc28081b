"""Treat the memory strength as a continuous knob.

The all-or-nothing rules force the second-event outcome with certainty;
generalizing them to fire only with probability s interpolates smoothly
between the memoryless value and the full-strength ones.  The interpolated
block algebra is certified against event-level simulation at s = 1/2.
"""

import math

from lhvlab import (
    MemoryKind,
    MemoryRule,
    ch_with_memory,
    estimate_ch_mc,
    reference_model,
)

PHI = math.pi / 8.0
model = reference_model()

print("B as a function of the strength s at phi = pi/8:")
print(f"  {'s':>5}  {'inhibit':>10}  {'enhance':>10}")
for i in range(6):
    s = i / 5.0
    b_inh = ch_with_memory(model, MemoryRule(MemoryKind.INHIBIT, s), PHI).b
    b_enh = ch_with_memory(model, MemoryRule(MemoryKind.ENHANCE, s), PHI).b
    print(f"  {s:5.2f}  {b_inh:10.7f}  {b_enh:10.7f}")

print("\nInhibition lowers B monotonically.  Enhancement first dips below the")
print("memoryless 0.8047379 (the forced extra singles dilute the ratio before")
print("the coincidence gain catches up) and only passes it near full strength,")
print("topping out at 0.8130782: a gain of less than 0.009 toward B = 1.")

print("\nSimulation check at fractional strength s = 1/2 (10^6 pairs each):")
for kind in (MemoryKind.INHIBIT, MemoryKind.ENHANCE):
    rule = MemoryRule(kind, 0.5)
    exact = ch_with_memory(model, rule, PHI).b
    est = estimate_ch_mc(model, rule, PHI, 1_000_000, 2718, threads=2)
    pull = (est.b.value - exact) / est.b.stderr
    print(f"  {kind.value:8s} closed {exact:.6f}  MC {est.b.value:.6f} "
          f"+- {est.b.stderr:.6f}  (pull {pull:+.2f} sigma)")
