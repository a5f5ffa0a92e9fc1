"""
Finite fields and the Fourier transform
=======================================

Arithmetic in GF(p^k), the additive character, and the transform on F^n
with counting measure in space and normalized measure in frequency.
"""

import numpy as np

from ffrestrict import get_field
from ffrestrict.fourier import GridFn, fourier_transform, lp_norm, plancherel_check

# GF(9) built from x^2 + 1; elements are base-3 digit encodings
F = get_field(3, 2, (1, 0, 1))
x = F.element([0, 1])
print(F.describe(), "x*x =", F.mul(x, x), " -1 is a square:", F.minus_one_is_square())
print("subfield orders:", [G.order for G in F.subfields()])

# the character e(a) sums to zero over the field
print("sum of e(a):", abs(F.char_table.sum()).round(12))

# a random function on GF(5)^3 and Plancherel
F5 = get_field(5)
rng = np.random.default_rng(0)
f = GridFn(F5, 3, rng.normal(size=125))
lhs, rhs, rel = plancherel_check(f)
print(f"||f^||_2 = {lhs:.6f}, ||f||_2 = {rhs:.6f}, relative error {rel:.1e}")

# the transform of a point mass is identically 1
print("delta transform:", np.unique(fourier_transform(GridFn.delta(F5, 3)).values.round(12)))
print("L^4 norm of f:", lp_norm(f, 4))
