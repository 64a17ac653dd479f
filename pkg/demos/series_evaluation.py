"""
Evaluating K2 and its relatives
===============================

Truncated series with a tail estimate, the four axis collapses to Gauss
2F1 and derivatives by parameter shift.
"""

from k2hyper import (K2Params, Point4, TruncationPolicy, gauss_2f1, k2_eval,
                     k2_mixed_partial)

params = K2Params(0.3, 0.5, 0.7, 1.5, 2.5, 3.5, 4.5)
point = Point4(0.1, 0.05, 0.02, 0.03)

# a value always comes with the degree used and the size of the last shell
for degree in (10, 20, 30):
    v = k2_eval(params, point, TruncationPolicy(degree))
    print(f"D={degree:2d}  value={v.value:.16f}  tail~{v.tail_estimate:.1e}  terms={v.terms_summed}")

# on the z axis only the c-slot survives
z = 0.08
print("z axis:", k2_eval(params, Point4(0, 0, z, 0)).value, gauss_2f1(params.a, params.c, params.e3, z).value)

# second order mixed partial d2/dx dt
print("d2K2/dxdt:", k2_mixed_partial(params, point, (1, 0, 0, 1)).value)
