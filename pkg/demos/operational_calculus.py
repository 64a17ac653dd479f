"""
Operator expansions with exact rationals
========================================

Derivatives and integrals act on monomials x^lambda, and expanding the
operator product reproduces the K2 coefficients exactly.
"""

from fractions import Fraction as F

from k2hyper import K2Params, Monomial, apply_derive, apply_integrate, verify_lemma1, verify_theorem31

m = Monomial.of(1, [("x", F(1, 2))])
print(apply_derive("x", 2, m))
print(apply_integrate("x", 2, m))

print(verify_lemma1(F(1, 2), F(2, 3), F(5, 4), 6, "3.4"))

params = K2Params(F(1, 3), F(1, 5), F(1, 7), F(3, 2), F(5, 2), F(7, 2), F(9, 2))
check = verify_theorem31(params, 4, "3.7")
print("coefficients checked:", check.checked, "all exact:", check.match)

# with the uncorrected t4 exponent in the target the z coefficient is off
bad = verify_theorem31(params, 4, "3.7", printed_target=True)
print("printed target: first mismatch at", bad.first_mismatch)
