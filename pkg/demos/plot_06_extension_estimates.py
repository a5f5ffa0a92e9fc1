"""
Measuring extension constants
=============================

Ratios ||(g dsigma)^v||_q / ||g||_{L^2(dsigma)} for structured and random g
give lower bounds for the extension constant. The isotropic line available
when -1 is a square shows why q >= 4 is needed, and the exponent algebra
behind the headline exponents is reproduced in exact fractions.
"""

from fractions import Fraction

from ffrestrict import get_field
from ffrestrict.estimator import exponent_algebra, search_lower_bound, section6_chain, subspace_sharpness

for p in (5, 13):
    for q in (3, 4):
        measured, closed = subspace_sharpness(get_field(p), q)
        print(f"GF({p}), 2 -> {q}: subspace ratio {measured:.6f}  closed form {closed:.6f}")

rep = search_lower_bound(get_field(7), 2, Fraction(16, 5), seed=0, iterations=20)
print(f"GF(7), 2 -> 16/5: best ratio {rep.value:.4f} from family {rep.family!r} (digest {rep.digest})")

for key, value in exponent_algebra().items():
    print(f"  {key:28s} {value}")
print("chain at theta = 1/10:", {k: str(v) for k, v in section6_chain(Fraction(1, 10)).items() if "_" not in k})
