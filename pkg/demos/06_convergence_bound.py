"""The convergence-bound diagnostic as a design tool.

The average squared gradient norm is bounded by

    1/T  +  C1 (1 - r)  +  C2 (1 - r) ln(1/delta) / (N^2 eps^2)

with unit constants by default (the analysis leaves C1, C2 abstract).  The
two (1-r) terms vanish as the encrypted share grows: encrypting more of
the update removes both the clipping distortion and the injected noise
from the bound.  Qualitative shape only, not a certificate.
"""

from fedsplit import BoundInputs, theorem_bound

print("bound vs encrypted share r (eps=1, delta=1e-5, N=10, T=50):")
for r in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
    b = BoundInputs(C1=1.0, C2=1.0, r=r, epsilon=1.0, delta=1e-5, N=10, T=50)
    bar = "#" * int(40 * theorem_bound(b) / 1.2)
    print(f"  r={r:.1f}  {theorem_bound(b):.4f}  {bar}")

print()
print("bound vs privacy budget eps at r=0.1:")
for eps in (0.25, 0.5, 1.0, 2.0, 4.0):
    b = BoundInputs(C1=1.0, C2=1.0, r=0.1, epsilon=eps, delta=1e-5, N=10, T=50)
    print(f"  eps={eps:<5} {theorem_bound(b):.4f}")

print()
print("at r=1 only the 1/T horizon term survives:")
for T in (10, 50, 250):
    b = BoundInputs(C1=1.0, C2=1.0, r=1.0, epsilon=1.0, delta=1e-5, N=10, T=T)
    print(f"  T={T:<4} bound={theorem_bound(b):.4f} (= 1/{T})")
