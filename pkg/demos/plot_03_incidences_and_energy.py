"""
Additive energy on the paraboloid as an incidence count
=======================================================

The L^4 norm of an extension counts additive quadruples. A Galilean change
of variables turns the quadruple count into point-line incidences, provided
-1 is not a square.
"""

import numpy as np

from ffrestrict import get_field
from ffrestrict.incidence import energy_chain, l4_identity_check, line_map_injectivity
from ffrestrict.paraboloid import ParaboloidCtx

for p in (5, 7, 13):
    ok, witness = line_map_injectivity(get_field(p))
    print(f"GF({p}): line map injective = {ok}, witness = {witness}")

pctx = ParaboloidCtx(get_field(7))
E = np.random.default_rng(2).choice(pctx.size, size=20, replace=False)
analytic, direct, rel = l4_identity_check(pctx, E)
print(f"||(1_E dsigma)^v||_4^4: summed {direct:.6e}, from quadruples {analytic:.6e}")

ch = energy_chain(pctx, E)
print(f"Lambda(E) = {ch['Lambda']} <= |E|(|E| + I) = {ch['E_size'] * (ch['E_size'] + ch['incidences'])}")
print(f"measured incidence exponent {ch['alpha_hat']:.3f}")
