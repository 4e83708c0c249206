from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qcr.rational import I, ONE, QQi, as_qqi, as_rational

fractions = st.fractions(max_denominator=50).filter(lambda f: abs(f) < 100)
gaussian = st.builds(QQi, fractions, fractions)


def test_basic_arithmetic():
    a = QQi(1, 2)
    assert a * a.conjugate() == 5
    assert a.abs2() == 5
    assert I * I == -1
    assert (ONE / QQi(0, 1)) == QQi(0, -1)
    assert QQi(Fraction(1, 2), Fraction(3, 4)) ** 2 == QQi(Fraction(1, 4) - Fraction(9, 16), Fraction(3, 4))


def test_rejects_floats():
    with pytest.raises(TypeError):
        QQi(0.5)
    with pytest.raises(TypeError):
        QQi(1) * 0.5
    assert as_qqi(0.5) == QQi(Fraction(1, 2))
    assert as_qqi(1 + 2j) == QQi(1, 2)


def test_as_rational_text():
    assert as_rational("1/3") == Fraction(1, 3)
    assert as_rational("0.7") == Fraction(7, 10)
    assert as_rational(-2) == -2


def test_str():
    assert str(I) == "i"
    assert str(QQi(Fraction(1, 2), Fraction(3, 4))) == "(1/2+3/4i)"


@given(gaussian, gaussian, gaussian)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    if b:
        assert (a / b) * b == a
    assert hash(a + b) == hash(b + a)


def test_numpy_scalars():
    import numpy as np
    assert as_rational(np.float64(0.25)) == Fraction(1, 4)
    assert as_rational(np.int64(-3)) == -3
