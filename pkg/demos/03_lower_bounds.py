"""Lower bounds of the reduced quadratic forms, computed.

On the truncated Hermite basis B_N (total degree <= N) the quadratic forms are
evaluated exactly, so the smallest Rayleigh quotient is an upper bound for the
true infimum that can only decrease as N grows. The argument via weights
predicts

    hypersurface, degree 1: >= 2     hypersurface, degree 0: >= 4
    2-pseudoconcave quadric, both degrees: >= 1
"""

from fractions import Fraction

from qcr import clifford_quadric, gap_scan, per_xi_proof_bound, split_hypersurface
from qcr.cli import sphere_points
from qcr.reports import spectral_csv

hyp = split_hypersurface()
reports = gap_scan(hyp, [[-1.0], [0.0], [0.5], [2.0]], [2, 3], [0, 1])
print(spectral_csv(reports, d=1, timing=False))

# The weight argument gives the constant directly; excluding index 3 and
# putting unit weight on indices 0 and 2 cancels xi.
for xi in (Fraction(-2), Fraction(1, 3)):
    print(f"weight bound at xi={xi}:", per_xi_proof_bound(hyp, [xi], 3, weights=[1, 0, 1, 0]))

cliff = clifford_quadric()
reports = gap_scan(cliff, sphere_points(2, 4), [2], [0, 1])
print("Clifford pair, N=2:", [round(r.lambda_min, 6) for r in reports],
      "bound", reports[0].paper_bound)
