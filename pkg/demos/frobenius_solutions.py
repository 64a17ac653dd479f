"""
The sixteen local solutions of the K2 system
============================================

Every solution is a power prefactor times K2 with shifted parameters.  We
print the table and check the second order residuals at a random point.
"""

from fractions import Fraction

from k2hyper import K2Params, TruncationPolicy, pde_residual_2nd, sample_points, solution_function, solution_spec

exact = K2Params(*(Fraction(v) for v in ("3/10", "1/2", "7/10", "3/10", "9/20", "3/5", "3/4")))
for j in (1, 2, 7, 16):
    spec = solution_spec(j, exact)
    print(j, [str(e) for e in spec.exponents.as_tuple()], [str(v) for v in spec.shifted.as_tuple()])

params = K2Params(0.3, 0.5, 0.7, 0.3, 0.45, 0.6, 0.75)
pt = sample_points(1, seed=12345)[0]
worst = 0.0
for j in range(1, 17):
    f = solution_function(j, params, pt, TruncationPolicy(24))
    worst = max(worst, max(abs(pde_residual_2nd(eq, f, params, pt)) for eq in range(1, 5)))
print("largest residual over 16 solutions x 4 equations:", worst)
