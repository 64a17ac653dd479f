"""
Checking the summation identities
=================================

Each identity is evaluated as stated and in the corrected variants that a
rederivation suggests.  Every report says match or mismatch.
"""

from k2hyper import Point4, TruncationPolicy, matching_variants, verify_3_10, verify_3_12

point = Point4(0.2, 0.1, 0.05, 0.08)
reports = verify_3_10(2, 1 / 5, 1 / 7, 1.5, 2.5, 3.5, 4.5, point)
for r in reports:
    print(f"{r.variant:28s} {r.status:9s} rel diff {r.rel_diff:.1e}")

# the decomposition is an infinite sum: D and D+4 must agree within the tail
reports = verify_3_12(1 / 3, 1 / 5, 1.5, 2.5, 3.5, 4.5, Point4(0.05, 0.04, 0.03, 0.02),
                      TruncationPolicy(16), outer_bound=6)
for r in reports:
    print(f"{r.variant:28s} {r.status:9s} delta {r.stability_delta:.1e} tail {r.tail_estimate:.1e}")
print("matching:", matching_variants(reports))
