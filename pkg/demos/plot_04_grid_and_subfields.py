"""
Recovering a subfield grid from a rich configuration
====================================================

A planted configuration in GF(3^4) has its points on an affine copy of
GF(9) x GF(9) and 81 lines with 9 points each. Pruning, a bush
construction and a projective normalization give a Cartesian grid whose
axes are detected as affine copies of GF(9).
"""

from ffrestrict import get_field
from ffrestrict.generators import random_points, subfield_grid
from ffrestrict.incidence import PointLineConfig, count_incidences
from ffrestrict.structure import incidence_structure_pipeline

F = get_field(3, 4)
cfg = PointLineConfig.from_json(subfield_grid(F, 9)["config"])
print(f"|P| = {cfg.n_points}, |L| = {cfg.n_lines}, I = {count_incidences(cfg)}")

rep = incidence_structure_pipeline(cfg, K=2)
print("status:", rep["status"])
print("grid sizes |A|, |B|:", rep["grid"]["measured"]["A_size"], rep["grid"]["measured"]["B_size"])
print("subfield on A:", rep["subfield_A"])
print("subfield on B:", rep["subfield_B"])
print("fraction of P inside the grid:", round(rep["P_coverage"], 3))

# a sparse random configuration does not meet the incidence hypothesis
sparse = PointLineConfig.from_json(random_points(get_field(31), 30, seed=0)["config"])
print("random configuration:", incidence_structure_pipeline(sparse, K=1)["status"])
