"""
First orders of the homotopy series
===================================

Build the deformation sequence in exact arithmetic and watch the initial
slope approach the shooting value.
"""

from fractions import Fraction

from tfham.basis_series import EXACT, BasisParams, deriv_at_zero
from tfham.ham_engine import HamConfig, run

# The unit basis is alpha = beta = gamma = 1; the shifted basis uses alpha = 3/4
basis = BasisParams(Fraction(3, 4), 1, 1)
seq = run(HamConfig(basis, Fraction(-4, 5), 6, EXACT))

###############################################################################
# Every order is an exact finite sum of powers of 1/(3/4 + x)
print(seq.orders[1])

###############################################################################
# Partial sums of u'(0), as fractions and as decimals
for n, s in enumerate(seq.partial_slopes):
    print(n, s, float(s))

###############################################################################
# The first-order term has u_1(0) = 0 and a slope proportional to h
print(deriv_at_zero(seq.orders[1], 1))
