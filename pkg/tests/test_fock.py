from fractions import Fraction
from itertools import product
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcr import (ReductionError, TruncatedBasis, TruncationError, WeylAlgebra, adjointness_defect,
                 assemble, commutator_defect, diagonal_quadric, enumerate_basis, formal_adjoint,
                 levi_matrix, random_quadric, reduced_dbar, reduced_operator_matrices,
                 split_hypersurface)
from qcr.fock import basis_dimension, exact_apply, exact_norm2
from qcr.rational import QQi

HYP = split_hypersurface()


def brute_count(n, N):
    return sum(1 for t in product(range(N + 1), repeat=2 * n) if sum(t) <= N)


def test_basis_examples():
    B = enumerate_basis(1, 1)
    assert B.dim == 3 and B.index_list == ((0, 0), (1, 0), (0, 1))
    assert enumerate_basis(4, 4).dim == 495 == comb(12, 8) == brute_count(4, 4)
    assert enumerate_basis(4, 0).dim == 1


@given(st.integers(1, 3), st.integers(0, 4))
def test_basis_dimension_and_prefix(n, N):
    B, B1 = TruncatedBasis(n, N), TruncatedBasis(n, N + 1)
    assert B.dim == basis_dimension(n, N) == comb(N + 2 * n, 2 * n) == brute_count(n, N)
    assert B1.index_list[: B.dim] == B.index_list
    assert len(set(B.index_list)) == B.dim
    assert all(B.degree(i) <= B.degree(i + 1) for i in range(B.dim - 1))


def test_basis_cap_reports_requirement():
    with pytest.raises(TruncationError, match="at least 495"):
        TruncatedBasis(4, 4, max_dim=100)


def test_identity_assembles_to_identity():
    A = WeylAlgebra(2, 0)
    B = TruncatedBasis(2, 3)
    M = assemble(A.one(), B, codomain=B).to_dense()
    assert np.array_equal(M, np.eye(B.dim))
    E = assemble(A.one(), TruncatedBasis(2, 3, "exact"), codomain=TruncatedBasis(2, 3, "exact"))
    assert E.entries == {(i, i): QQi(1) for i in range(B.dim)}


def test_interior_commutator_n1():
    # dbar = dzbar at lambda = 0; its adjoint delta satisfies [delta, dbar] = +1
    A = WeylAlgebra(1, 0)
    B = TruncatedBasis(1, 6)
    M = assemble(A.dzbar(0), B, codomain=B, clip=True).to_dense()
    C = M.T @ M - M @ M.T
    inner = [i for i in range(B.dim) if B.degree(i) <= B.N - 1]
    assert np.allclose(C[np.ix_(inner, inner)], np.eye(len(inner)), atol=1e-13)


def test_assemble_rejections():
    A = WeylAlgebra(1, 1)
    B = TruncatedBasis(1, 2)
    with pytest.raises(TruncationError, match="more than 1"):
        assemble(A.z(0) * A.z(0), B)
    with pytest.raises(ReductionError):
        assemble(A.dx(0), B)
    with pytest.raises(ReductionError, match="xi"):
        assemble(A.xi(0) * A.z(0), B)
    with pytest.raises(TruncationError):
        assemble(A.z(0), B, codomain=B)


@pytest.mark.parametrize("xi", [0, 1, -2])
def test_adjointness_exact_and_float(xi):
    A = WeylAlgebra(4, 1)
    for j in range(4):
        db = reduced_dbar(HYP, j, None, A)
        de = formal_adjoint(db)
        assert adjointness_defect(db, de, 3, "exact", xi=[xi]) == 0
        assert adjointness_defect(db, de, 3, "float", xi=[xi]) <= 1e-12


def test_adjointness_detects_wrong_adjoint():
    A = WeylAlgebra(1, 1)
    db = A.dzbar(0) + A.xi(0) * A.z(0)
    wrong = -A.dz(0) + A.xi(0) * A.zbar(0)  # missing the weight term -zbar
    assert adjointness_defect(db, wrong, 2, "exact", xi=[1]) > 0


@pytest.mark.parametrize("mode", ["exact", "float"])
def test_commutator_matrix_level(mode):
    A = WeylAlgebra(4, 1)
    xi = Fraction(1, 2)
    for k in range(4):
        for j in range(4):
            db, de = reduced_dbar(HYP, k, None, A), formal_adjoint(reduced_dbar(HYP, j, None, A))
            eps = [1, 1, -1, -1][j]
            expected = A.scalar(QQi(-1 + 2 * eps * xi) if j == k else QQi(0))
            tol = 0 if mode == "exact" else 1e-12
            assert commutator_defect(db, de, expected, 2, mode, xi=[xi]) <= tol


def test_exact_matches_float():
    rng = np.random.default_rng(4)
    spec = random_quadric(2, 2, rng)
    xi = [Fraction(1, 3), Fraction(-2)]
    A = WeylAlgebra(2, 2)
    op = reduced_dbar(spec, 1, xi, A)
    E = assemble(op, TruncatedBasis(2, 3, "exact"))
    F = assemble(op, TruncatedBasis(2, 3))
    assert np.allclose(E.to_dense(), F.to_dense(), atol=1e-13)


@given(st.integers(0, 10_000))
def test_direct_ladder_route_matches_symbolic(seed):
    rng = np.random.default_rng(seed)
    spec = random_quadric(3, 2, rng)
    xi = [Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4))) for _ in range(2)]
    h = levi_matrix(spec, xi).to_numpy().astype(complex)
    B = TruncatedBasis(3, 2)
    dbar, delta = reduced_operator_matrices(h, B)
    A = WeylAlgebra(3, 2)
    for k in range(3):
        op = reduced_dbar(spec, k, xi, A)
        assert np.allclose(dbar[k].toarray(), assemble(op, B).to_dense(), atol=1e-12)
        assert np.allclose(delta[k].toarray(), assemble(formal_adjoint(op), B).to_dense(), atol=1e-12)


def test_exact_vector_helpers():
    A = WeylAlgebra(1, 0)
    B = TruncatedBasis(1, 2, "exact")
    M = assemble(A.dzbar(0), B)
    v = {B.index((1, 1)): QQi(2)}
    out = exact_apply(M, v)
    assert out == {M.codomain.index((2, 1)): QQi(-2)}
    assert exact_norm2(out, M.codomain) == 4 * 2  # |−2|^2 * 2!1!
    assert exact_norm2(v, B) == 4


def test_coordinate_text():
    A = WeylAlgebra(1, 0)
    M = assemble(A.z(0), TruncatedBasis(1, 1))
    lines = M.coordinate_text().splitlines()
    assert lines[0].startswith("#")
    rows = [tuple(l.split()) for l in lines[1:]]
    assert len(rows) == M.nnz
    r, c, re, im = rows[0]
    assert float(im) == 0.0 and int(r) >= 0 and int(c) >= 0
