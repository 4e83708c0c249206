"""Minimal-norm solutions of dbar u = f at a fixed conormal.

For f = dbar g with g in the truncated space, least squares returns the
solution orthogonal to the kernel of dbar. The degree-0 bound
4||u||^2 <= ||dbar u||^2 then gives ||u|| <= ||f|| / 2 on the hypersurface.
"""

import numpy as np

from qcr import RangeError, TruncatedBasis, split_hypersurface, solve_dbar_min_norm
from qcr.spectral import apply_dbar

spec = split_hypersurface()
N = 4
basis, small = TruncatedBasis(4, N), TruncatedBasis(4, 3)
rng = np.random.default_rng(0)

g = np.zeros(basis.dim, dtype=complex)
g[: small.dim] = rng.standard_normal(small.dim) + 1j * rng.standard_normal(small.dim)
f = apply_dbar(spec, [1.0], N, g)
u, diag = solve_dbar_min_norm(spec, [1.0], N, f)
print(f"||f|| = {diag.norm_f:.4f}, ||u|| = {diag.norm_u:.4f}, ||f||/2 = {diag.norm_f / 2:.4f}")
print(f"residual {diag.residual:.2e}, smallest singular value squared {diag.lambda_min:.6f}")
print("u equals g (dbar is injective here):", np.allclose(u, g))

# A right-hand side outside the range is reported, not silently projected.
try:
    solve_dbar_min_norm(spec, [1.0], 2, rng.standard_normal(4 * TruncatedBasis(4, 3).dim))
except RangeError as exc:
    print("rejected:", exc)
