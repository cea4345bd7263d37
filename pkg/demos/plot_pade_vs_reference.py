"""
Pade acceleration against the shooting reference
================================================

The reference slope comes from bisection on shooting trajectories.  The
homotopy series is then summed directly and through diagonal Pade
approximants of the per-order slopes.
"""

from fractions import Fraction

from tfham.basis_series import BasisParams, NumericMode
from tfham.ham_engine import HamConfig, run
from tfham.reference_solver import find_initial_slope
from tfham.series_accel import error_percent, pade_at_one

ref = find_initial_slope()
print("reference u'(0) =", ref.slope, "after", ref.iterations, "bisection steps")

seq = run(HamConfig(BasisParams(Fraction(3, 4), 1, 1), Fraction(-3, 4), 20, NumericMode.approx(256)))

###############################################################################
# Truncated sums lose to the [m/m] approximants built from the same terms
for m in (2, 5, 8, 10):
    direct = seq.partial_slopes[2 * m]
    pade = pade_at_one(seq.slope_per_order, m, cross_check=True)
    print(f"m={m:2d}  sum={float(direct):.6f} ({float(error_percent(direct, ref.slope)):.3f}%)"
          f"  pade={float(pade.value):.6f} ({float(error_percent(pade.value, ref.slope)):.3f}%)")

###############################################################################
# The trajectory itself, for comparison with the analytic partial sum
for x, u in ref.samples[::8]:
    print(f"x={x:5.2f}  u={u:.6f}")
