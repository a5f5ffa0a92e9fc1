"""
The paraboloid and its extension operator
=========================================

The Fourier transform of surface measure has size exactly 1/q away from the
origin, the Bochner-Riesz kernel has a Gauss-sum closed form, and a single
slice of a function obeys an exact pseudo-conformal identity.
"""

import numpy as np

from ffrestrict import get_field
from ffrestrict.paraboloid import (
    ParaboloidCtx,
    fourier_dimension_report,
    gauss_sum,
    kernel_formula_check,
    pseudo_conformal_identity,
)

for p in (3, 7, 11):
    rep = fourier_dimension_report(ParaboloidCtx(get_field(p)))
    print(f"GF({p}): max |(dsigma)^v(x)| over x != 0 = {rep['max']:.6f}  (1/p = {1 / p:.6f})")

F = get_field(7)
print("|S(1)|^2 on GF(7):", round(abs(gauss_sum(F, 1)) ** 2, 9))
print("kernel closed form, max deviation:", kernel_formula_check(ParaboloidCtx(F)))

pctx = ParaboloidCtx(get_field(5))
h0 = np.random.default_rng(1).choice([-1.0, 1.0], size=(5, 5))
res = pseudo_conformal_identity(pctx, h0)
print(f"||h0 * K||_4 = {res.lhs:.6f}, q ||(h0 dsigma)^v||_4 (t != 0) = {res.rhs:.6f}")
