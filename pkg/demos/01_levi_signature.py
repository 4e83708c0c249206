"""Levi forms of quadric CR submanifolds and their signatures.

A quadric is given by Hermitian forms H_1..H_d on C^n. For a conormal
direction xi the Levi matrix is h^xi = sum xi_l H_l, and the manifold is
q-pseudoconcave when every h^xi (xi on the unit sphere) has at least q
positive and q negative eigenvalues.
"""

import numpy as np

from qcr import (balancing_weights, certify_pseudoconcavity, clifford_quadric,
                 diagonal_quadric, function_weights, levi_spectrum, split_hypersurface)

# The hypersurface Im w = |z1|^2 + |z2|^2 - |z3|^2 - |z4|^2.
hyp = split_hypersurface()
for xi in (1, -1):
    s = levi_spectrum(hyp, [xi])
    print(f"hypersurface, xi={xi:+d}: eigenvalues {s.eigenvalues}, q = {s.q}")

# Sign counts at a single xi are not a proof; the certificate samples the
# sphere finely enough that a Lipschitz bound covers the gaps.
cert = certify_pseudoconcavity(hyp, 2)
print("hypersurface certified 2-pseudoconcave:", cert.certified)

# Codimension two: an anticommuting pair, so (h^xi)^2 = |xi|^2 Id and every
# direction has eigenvalues -1, -1, 1, 1.
cliff = clifford_quadric()
print("Clifford pair at xi=(3,4):", np.round(levi_spectrum(cliff, [3, 4]).eigenvalues, 12))
cert = certify_pseudoconcavity(cliff, 2, grid_spacing=0.01)
print(f"Clifford pair: {cert.n_samples} sphere samples, Lipschitz bound {cert.lipschitz_bound}, "
      f"certified = {cert.certified}")

# A form with only one negative direction is 1- but not 2-pseudoconcave.
print("diag(1,1,1,-1), q=2:", certify_pseudoconcavity(diagonal_quadric([1, 1, 1, -1]), 2).certified)

# Weights used in the lower-bound argument: convex combinations that balance
# the eigenvalues to zero, optionally avoiding one index.
lam = [-2, -1, 1, 3]
print("balancing weights avoiding index 1:", [str(a) for a in balancing_weights(lam, 1)])
print("function weights:", [str(c) for c in function_weights([-3, 0, 0, 1])])
