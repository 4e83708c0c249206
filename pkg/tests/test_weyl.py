from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcr import (ReductionError, WeylAlgebra, check_integrability, clifford_quadric, commutator,
                 cr_field, diagonal_quadric, formal_adjoint, fourier_reduce, levi_matrix,
                 random_quadric, reduced_dbar, reduced_delta, split_hypersurface,
                 verify_paper_identities)
from qcr.rational import I, QQi
from qcr.weyl import FormOperator, WeylElement, fields_commute

GOLDEN = Path(__file__).parent / "golden" / "weyl_hypersurface.txt"
HYP = split_hypersurface()
EPS = diagonal_quadric([-1, -1, 1, 1])  # eps_1 = eps_2 = -1, eps_3 = eps_4 = 1
ZERO = diagonal_quadric([0, 0, 0, 0])


# -- products ---------------------------------------------------------------

def test_canonical_commutation():
    A = WeylAlgebra(1, 0)
    assert A.dzbar(0) * A.zbar(0) == A.zbar(0) * A.dzbar(0) + 1
    assert str(A.z(0) * A.dz(0)) == "z(0)*dz(0)"
    assert commutator(A.dzbar(0), A.zbar(0)) == A.one()
    assert commutator(A.dz(0), A.zbar(0)).is_zero()


def test_product_matches_distributed_expansion():
    A = WeylAlgebra(1, 1)
    dzb, dz, z, zb, xi = A.dzbar(0), A.dz(0), A.z(0), A.zbar(0), A.xi(0)
    product = (dzb + z * xi) * (-dz + zb * xi)
    # term by term, moving derivatives right by hand
    by_hand = -(dz * dzb) + xi * (zb * dzb + 1) - xi * z * dz + xi ** 2 * z * zb
    assert product == by_hand
    assert str(product) == ("xi(0) + (-1)*dz(0)*dzbar(0) + (-1)*xi(0)*z(0)*dz(0)"
                            " + xi(0)*zbar(0)*dzbar(0) + xi(0)^2*z(0)*zbar(0)")


def test_rejects_float_coefficients():
    A = WeylAlgebra(1, 0)
    with pytest.raises(TypeError):
        A.z(0) * 0.5
    with pytest.raises(TypeError):
        cr_field(HYP.to_float(), 0)


def random_element(A: WeylAlgebra, rng, terms=3, degree=2, names=("z", "zbar", "dz", "dzbar", "xi")):
    out = A.zero()
    for _ in range(terms):
        t = A.scalar(QQi(int(rng.integers(-3, 4)), int(rng.integers(-3, 4))))
        for _ in range(int(rng.integers(0, degree + 1))):
            name = names[int(rng.integers(len(names)))]
            size = A.d if name in ("x", "xi", "dx") else A.n
            t = t * A.gen(name, int(rng.integers(size)))
        out = out + t
    return out


@given(st.integers(0, 10_000))
def test_associativity_and_jacobi(seed):
    rng = np.random.default_rng(seed)
    A = WeylAlgebra(2, 1)
    names = ("z", "zbar", "dz", "dzbar", "x", "dx", "xi")
    a, b, c = (random_element(A, rng, names=names) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    jacobi = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) \
        + commutator(c, commutator(a, b))
    assert jacobi.is_zero()


# -- CR fields --------------------------------------------------------------

def test_cr_field_examples():
    A = WeylAlgebra(4, 1)
    assert cr_field(EPS, 0, algebra=A) == A.dzbar(0) + I * A.z(0) * A.dx(0)
    assert cr_field(EPS, 2, algebra=A) == A.dzbar(2) - I * A.z(2) * A.dx(0)
    # the split hypersurface diag(1,1,-1,-1) carries the opposite signs
    assert cr_field(HYP, 0, algebra=A) == A.dzbar(0) - I * A.z(0) * A.dx(0)
    for j in range(4):
        assert cr_field(ZERO, j, algebra=A) == A.dzbar(j)


def test_cr_fields_annihilate_defining_functions():
    # L w_l = 0 with w_l = x_l + i H_l(z): check on the symbols by applying to coordinates
    rng = np.random.default_rng(3)
    spec = random_quadric(3, 2, rng)
    A = WeylAlgebra(3, 2)
    forms = [H.entries for H in spec.forms]
    for l, h in enumerate(forms):
        H = A.zero()
        for i in range(3):
            for j in range(3):
                H = H + h[i, j] * (A.z(i) * A.zbar(j))
        w = A.x(l) + I * H
        for j in range(3):
            L = cr_field(spec, j, algebra=A)
            # L w as an operator equals w L + (L applied to w); the latter is the commutator
            assert commutator(L, w).is_zero()


def test_integrability():
    assert check_integrability(HYP)
    assert check_integrability(clifford_quadric())
    rng = np.random.default_rng(11)
    assert check_integrability(random_quadric(5, 3, rng))


def test_integrability_negative_control():
    # a zbar-dependent deformation of the flat fields does not commute
    A = WeylAlgebra(2, 1)
    fields = [A.dzbar(0) + A.zbar(1) * A.dx(0), A.dzbar(1)]
    assert not fields_commute(fields)


# -- reduction and adjoint --------------------------------------------------

def test_fourier_reduce_examples():
    A = WeylAlgebra(4, 1)
    assert fourier_reduce(cr_field(EPS, 0, algebra=A)) == A.dzbar(0) - A.xi(0) * A.z(0)
    assert fourier_reduce(A.dx(0)) == I * A.xi(0)
    with pytest.raises(ReductionError, match="x-dependent"):
        fourier_reduce(A.x(0) * A.dzbar(0))


@given(st.integers(0, 10_000))
def test_general_reduction_matches_levi_matrix(seed):
    rng = np.random.default_rng(seed)
    spec = random_quadric(3, 2, rng)
    xi = [Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for _ in range(2)]
    h = levi_matrix(spec, xi).entries
    A = WeylAlgebra(3, 2)
    for k in range(3):
        expected = A.dzbar(k)
        for m in range(3):
            expected = expected + h[m, k] * A.z(m)
        assert reduced_dbar(spec, k, xi, A) == expected


def test_fourier_reduction_respects_commutators():
    rng = np.random.default_rng(5)
    spec = random_quadric(3, 2, rng)
    A = WeylAlgebra(3, 2)
    L = [cr_field(spec, j, True, A) for j in range(3)]
    Lb = [cr_field(spec, j, False, A) for j in range(3)]
    for j in range(3):
        for k in range(3):
            lhs = fourier_reduce(commutator(L[k], Lb[j]))
            rhs = commutator(fourier_reduce(L[k]), fourier_reduce(Lb[j]))
            assert lhs == rhs


def test_adjoint_examples():
    A = WeylAlgebra(4, 1)
    delta = formal_adjoint(reduced_dbar(EPS, 0, None, A))
    assert delta == -A.dz(0) - A.xi(0) * A.zbar(0) - A.zbar(0)
    assert formal_adjoint(A.z(0)) == A.zbar(0)
    assert formal_adjoint(I * A.z(0)) == -I * A.zbar(0)
    with pytest.raises(ReductionError):
        formal_adjoint(A.dx(0))


@given(st.integers(0, 10_000))
def test_adjoint_involution_and_reversal(seed):
    rng = np.random.default_rng(seed)
    A = WeylAlgebra(2, 1)
    a, b = random_element(A, rng), random_element(A, rng)
    assert formal_adjoint(formal_adjoint(a)) == a
    assert formal_adjoint(a * b) == formal_adjoint(b) * formal_adjoint(a)


def test_fifty_round_trips():
    rng = np.random.default_rng(2024)
    A = WeylAlgebra(3, 1)
    for _ in range(50):
        a = random_element(A, rng, terms=4, degree=3)
        assert formal_adjoint(formal_adjoint(a)) == a


# -- identities -------------------------------------------------------------

def test_commutator_hypersurface_example():
    A = WeylAlgebra(4, 1)
    dbar = reduced_dbar(EPS, 0, None, A)
    delta = -A.dz(0) - A.zbar(0) * A.xi(0) - A.zbar(0)
    assert commutator(dbar, delta) == -1 + 2 * (-1) * A.xi(0)
    assert commutator(reduced_dbar(EPS, 1, None, A), reduced_delta(EPS, 0, None, A)).is_zero()


@pytest.mark.parametrize("spec", [HYP, EPS, ZERO, clifford_quadric()], ids=["hyp", "eps", "zero", "clifford"])
def test_verify_identities_pass(spec):
    rep = verify_paper_identities(spec)
    assert rep.passed
    assert all(c.passed for c in rep.checks)


def test_zero_forms_constant():
    rep = verify_paper_identities(ZERO)
    diag = [c for c in rep.checks if c.identity.startswith("[dbar_0, delta_0]")]
    assert diag and all(c.computed == "(-1)" for c in diag)


def test_symbolic_lambda_model():
    rep = verify_paper_identities(n=4)
    assert rep.passed and len(rep.checks) == 4 + 16
    d = rep.to_dict()
    assert set(d["checks"][0]) == {"identity", "expected", "computed", "pass"}


@given(st.integers(0, 10_000))
def test_identities_random_quadrics(seed):
    rng = np.random.default_rng(seed)
    spec = random_quadric(int(rng.integers(1, 4)), int(rng.integers(1, 3)), rng)
    assert verify_paper_identities(spec).passed


def test_form_operators_shapes():
    A = WeylAlgebra(3, 1)
    spec = diagonal_quadric([1, -1, 1])
    dbars = [reduced_dbar(spec, k, None, A) for k in range(3)]
    assert len(FormOperator.dbar0(dbars).components) == 3
    assert len(FormOperator.dbar1(dbars).components) == 3  # pairs k < j
    assert len(FormOperator.delta1([formal_adjoint(d) for d in dbars]).components) == 3


def golden_lines():
    A = WeylAlgebra(4, 1)
    lines = []
    for name, spec in [("eps", EPS), ("hyp", HYP)]:
        for j in range(4):
            db = reduced_dbar(spec, j, None, A)
            de = formal_adjoint(db)
            lines.append(f"{name} Lbar_{j} = {cr_field(spec, j, algebra=A)}")
            lines.append(f"{name} dbar_{j} = {db}")
            lines.append(f"{name} delta_{j} = {de}")
            lines.append(f"{name} [dbar_{j}, delta_{j}] = {commutator(db, de)}")
    return lines


def test_golden_strings():
    assert golden_lines() == GOLDEN.read_text().splitlines()
