"""
Are the sixteen solutions independent?
======================================

Sample each solution at 16 points and look at the singular values of the
(column scaled) matrix.  At e1 = 1 the first two solutions coincide.
"""

import numpy as np

from k2hyper import K2Params, independence_check, sample_points

points = sample_points(16, seed=12345)
generic = K2Params(0.3, 0.5, 0.7, 0.3, 0.45, 0.6, 0.75)

diag = independence_check(generic, points)
np.set_printoptions(precision=2)
print(diag.singular_values)
print("ratio", diag.ratio, "full rank:", diag.full_rank)

diag = independence_check(generic.replace(e1=1.0), points)
print("e1 = 1: ratio", diag.ratio, "full rank:", diag.full_rank, diag.notes)
