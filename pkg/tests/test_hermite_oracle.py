"""Independent check of the complex Hermite ladder rules by quadrature.

The polynomials are built symbolically from the closed form
``H_{p,q} = sum_k (-1)^k k! C(p,k) C(q,k) z^(p-k) zbar^(q-k)`` and integrated
against Gaussian weights with a 2D Gauss-Hermite rule, which is exact for the
polynomial degrees involved. The rules encoded in ``qcr.fock`` are then
compared with the quadrature values.
"""

from math import comb, factorial, pi

import numpy as np
import pytest
import sympy as sp

from qcr.fock import TruncatedBasis, _generator_entries, generator_matrix

z, zb = sp.symbols("z zbar")
x, y = sp.symbols("x y", real=True)
P_MAX = 4
NODES, WEIGHTS = np.polynomial.hermite.hermgauss(24)  # exact through degree 47


def hermite(p, q):
    return sp.expand(sum((-1) ** k * factorial(k) * comb(p, k) * comb(q, k)
                         * z ** (p - k) * zb ** (q - k) for k in range(min(p, q) + 1)))


def on_grid(expr):
    f = sp.lambdify((x, y), sp.expand(expr.subs({z: x + sp.I * y, zb: x - sp.I * y})), "numpy")
    X, Y = np.meshgrid(NODES, NODES, indexing="ij")
    return np.broadcast_to(np.asarray(f(X, Y), dtype=complex), X.shape)


W2 = np.outer(WEIGHTS, WEIGHTS)


def gauss_inner(f, g):
    """``int f conj(g) exp(-|z|^2) dA`` for polynomials or grid values."""
    f = f if isinstance(f, np.ndarray) else on_grid(f)
    g = g if isinstance(g, np.ndarray) else on_grid(g)
    return np.sum(W2 * f * np.conj(g))


INDEX = [(p, q) for p in range(P_MAX + 1) for q in range(P_MAX + 1)]
H = {pq: hermite(*pq) for pq in INDEX + [(p, q) for p in range(P_MAX + 2) for q in range(P_MAX + 2)]}
GRID = {pq: on_grid(h) for pq, h in H.items()}


def test_orthogonality_and_norms():
    for a in INDEX:
        for b in INDEX:
            val = gauss_inner(GRID[a], GRID[b])
            expected = pi * factorial(a[0]) * factorial(a[1]) if a == b else 0.0
            assert abs(val - expected) < 1e-9 * max(1.0, expected)


def v_space(op, pq):
    """Polynomial ``w`` with ``op(H_pq e^{-|z|^2}) = w e^{-|z|^2}``."""
    h = H[pq]
    if op == "dzbar":
        return sp.expand(sp.diff(h, zb) - z * h)
    if op == "dz":
        return sp.expand(sp.diff(h, z) - zb * h)
    if op == "z":
        return sp.expand(z * h)
    if op == "zbar":
        return sp.expand(zb * h)
    raise ValueError(op)


@pytest.mark.parametrize("op", ["dzbar", "dz", "z", "zbar"])
def test_ladder_rules_match_symbolic_expansion(op):
    for pq in INDEX:
        expected = sp.expand(sum(c * H[tgt] for tgt, c, _ in _generator_entries(op, 0, pq)))
        assert sp.expand(v_space(op, pq) - expected) == 0


@pytest.mark.parametrize("op", ["dzbar", "dz", "z", "zbar"])
def test_ladder_rules_match_quadrature(op):
    # coefficient of v_b in op v_a equals <op v_a, v_b> / ||v_b||^2 in L^2(exp(|z|^2))
    for a in INDEX:
        image = on_grid(v_space(op, a))
        coeffs = {tgt: c for tgt, c, _ in _generator_entries(op, 0, a)}
        for b in H:
            nb = pi * factorial(b[0]) * factorial(b[1])
            val = gauss_inner(image, GRID[b]) / nb
            assert abs(val - coeffs.get(b, 0)) < 1e-9


def test_orthonormal_matrices_adjoint_pairs():
    # in L^2(exp(|z|^2)): adj(dzbar) = -dz - zbar and adj(z) = zbar
    B, B1 = TruncatedBasis(1, 5), TruncatedBasis(1, 6)
    # compare on the block where no image is clipped
    Dzb = generator_matrix("dzbar", 0, B, B1).toarray()
    Dz = generator_matrix("dz", 0, B, B1).toarray()
    Zb = generator_matrix("zbar", 0, B, B1).toarray()
    Z = generator_matrix("z", 0, B, B1).toarray()
    inner = B.dim
    lhs = Dzb[:inner, :].conj().T
    rhs = (-Dz - Zb)[:inner, :]
    assert np.allclose(lhs, rhs, atol=1e-14)
    assert np.allclose(Z[:inner, :].conj().T, Zb[:inner, :], atol=1e-14)
