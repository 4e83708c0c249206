"""Exact normal-ordered differential operators with polynomial coefficients.

Elements of the Weyl algebra in the variables ``z_j, zbar_j`` (``j < n``) and
``x_l`` (``l < d``), with commuting real parameters ``xi_l`` (Fourier dual of
``x_l``) and ``lam_j`` (Levi eigenvalues). Every element is kept in normal
form: multiplication operators to the left of derivatives. Products are
normal-ordered with ``[d/dy, y] = 1``.

The module also builds the tangential Cauchy-Riemann fields of a quadric,
reduces them by the partial Fourier transform in ``x`` and takes formal
adjoints in ``L^2(C^n, exp(|z|^2))``. Coefficients are exact ``QQi``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, perm
from types import MappingProxyType

from .errors import DimensionMismatch, ReductionError
from .quadric import QuadricSpec
from .rational import QQi, as_rational

__all__ = [
    "WeylAlgebra", "WeylElement", "FormOperator", "commutator", "cr_field", "cr_fields",
    "check_integrability", "fields_commute", "fourier_reduce", "formal_adjoint",
    "reduced_dbar", "reduced_delta", "IdentityCheck", "IdentityReport",
    "verify_paper_identities",
]

ZERO = QQi(0)
ONE = QQi(1)
I = QQi(0, 1)


def _coeff(c) -> QQi:
    if isinstance(c, QQi):
        return c
    if isinstance(c, (float, complex)):
        raise TypeError("floating point coefficients are not accepted; convert explicitly")
    return QQi(c)


@dataclass(frozen=True)
class WeylAlgebra:
    """Shape of the algebra: ``n`` complex variables, ``d`` real variables.

    Monomial keys are integer tuples laid out as
    ``z | zbar | x | xi | lam || dz | dzbar | dx``.
    """

    n: int
    d: int

    def __post_init__(self):
        if self.n < 1 or self.d < 0:
            raise DimensionMismatch(f"invalid algebra shape n={self.n}, d={self.d}")

    # block offsets
    @property
    def n_mult(self) -> int:
        return 3 * self.n + 2 * self.d

    @property
    def n_pairs(self) -> int:
        return 2 * self.n + self.d

    @property
    def width(self) -> int:
        return self.n_mult + self.n_pairs

    def _blocks(self):
        n, d, M = self.n, self.d, self.n_mult
        return {
            "z": (0, n), "zbar": (n, n), "x": (2 * n, d), "xi": (2 * n + d, d),
            "lam": (2 * n + 2 * d, n), "dz": (M, n), "dzbar": (M + n, n), "dx": (M + 2 * n, d),
        }

    def gen(self, name: str, index: int) -> "WeylElement":
        start, size = self._blocks()[name]
        if not 0 <= index < size:
            raise IndexError(f"{name} index {index} out of range [0, {size})")
        key = [0] * self.width
        key[start + index] = 1
        return WeylElement(self, {tuple(key): ONE})

    def z(self, j): return self.gen("z", j)
    def zbar(self, j): return self.gen("zbar", j)
    def x(self, l): return self.gen("x", l)
    def xi(self, l): return self.gen("xi", l)
    def lam(self, j): return self.gen("lam", j)
    def dz(self, j): return self.gen("dz", j)
    def dzbar(self, j): return self.gen("dzbar", j)
    def dx(self, l): return self.gen("dx", l)

    def scalar(self, c) -> "WeylElement":
        c = _coeff(c)
        return WeylElement(self, {(0,) * self.width: c} if c else {})

    def one(self) -> "WeylElement":
        return self.scalar(1)

    def zero(self) -> "WeylElement":
        return WeylElement(self, {})

    def split(self, key):
        """Exponent blocks of a key as a dict name -> tuple."""
        return {name: key[s:s + size] for name, (s, size) in self._blocks().items()}

    def names(self):
        return [(name, s, size) for name, (s, size) in self._blocks().items()]


@lru_cache(maxsize=1 << 16)
def _mono_mul(k1: tuple, k2: tuple, M: int, P: int):
    """Normal-ordered product of two monomials as ``((key, int coeff), ...)``."""
    pairs = [(i, k1[M + i], k2[i]) for i in range(P) if k1[M + i] and k2[i]]
    base = [a + b for a, b in zip(k1, k2)]
    if not pairs:
        return ((tuple(base), 1),)
    out = []
    for ks in product(*[range(min(a, b) + 1) for _, a, b in pairs]):
        c = 1
        key = list(base)
        for (i, a, b), k in zip(pairs, ks):
            c *= comb(a, k) * perm(b, k)
            key[i] -= k
            key[M + i] -= k
        out.append((tuple(key), c))
    return tuple(out)


class WeylElement:
    """Immutable normal-ordered element of a :class:`WeylAlgebra`."""

    __slots__ = ("algebra", "_terms", "_hash")

    def __init__(self, algebra: WeylAlgebra, terms: dict):
        self.algebra = algebra
        clean = {}
        for k, c in terms.items():
            c = _coeff(c)
            if c:
                if len(k) != algebra.width:
                    raise DimensionMismatch("monomial key does not match the algebra")
                clean[tuple(k)] = c
        self._terms = clean
        self._hash = None

    @property
    def terms(self):
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def _lift(self, other) -> "WeylElement":
        if isinstance(other, WeylElement):
            if other.algebra != self.algebra:
                raise DimensionMismatch(f"algebras differ: {self.algebra} vs {other.algebra}")
            return other
        return self.algebra.scalar(other)

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self._terms)
        for k, c in other._terms.items():
            t[k] = t.get(k, ZERO) + c
        return WeylElement(self.algebra, t)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement(self.algebra, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, WeylElement):
            c = _coeff(other)
            return WeylElement(self.algebra, {k: v * c for k, v in self._terms.items()})
        other = self._lift(other)
        A = self.algebra
        M, P = A.n_mult, A.n_pairs
        t = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                c12 = c1 * c2
                for k, m in _mono_mul(k1, k2, M, P):
                    t[k] = t.get(k, ZERO) + c12 * m
        return WeylElement(A, t)

    def __rmul__(self, other):
        c = _coeff(other)
        return WeylElement(self.algebra, {k: c * v for k, v in self._terms.items()})

    def __pow__(self, e: int):
        out = self.algebra.one()
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, WeylElement):
            return self.algebra == other.algebra and self._terms == other._terms
        if isinstance(other, (int, Fraction, QQi)):
            return self == self.algebra.scalar(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.algebra, frozenset(self._terms.items())))
        return self._hash

    def conjugate_coefficients(self) -> "WeylElement":
        return WeylElement(self.algebra, {k: c.conjugate() for k, c in self._terms.items()})

    def z_order(self) -> int:
        """Largest number of ``z, zbar, dz, dzbar`` factors in a monomial."""
        A = self.algebra
        n, M = A.n, A.n_mult
        best = 0
        for k in self._terms:
            best = max(best, sum(k[:2 * n]) + sum(k[M:M + 2 * n]))
        return best

    def uses(self, name: str) -> bool:
        s, size = self.algebra._blocks()[name]
        return any(any(k[s:s + size]) for k in self._terms)

    def substitute(self, xi=None, lam=None) -> "WeylElement":
        """Replace the central parameters by exact rational values."""
        A = self.algebra
        s_xi, _ = A._blocks()["xi"]
        s_lam, _ = A._blocks()["lam"]
        vals = []
        if xi is not None:
            xi = [as_rational(v) for v in xi]
            if len(xi) != A.d:
                raise DimensionMismatch(f"need {A.d} xi values, got {len(xi)}")
            vals += [(s_xi + l, v) for l, v in enumerate(xi)]
        if lam is not None:
            lam = [as_rational(v) for v in lam]
            if len(lam) != A.n:
                raise DimensionMismatch(f"need {A.n} lam values, got {len(lam)}")
            vals += [(s_lam + j, v) for j, v in enumerate(lam)]
        t = {}
        for k, c in self._terms.items():
            key = list(k)
            for pos, v in vals:
                if key[pos]:
                    c = c * (v ** key[pos])
                    key[pos] = 0
            key = tuple(key)
            t[key] = t.get(key, ZERO) + c
        return WeylElement(A, t)

    def _sort_key(self, k):
        return (sum(k), tuple(-e for e in k))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        names = self.algebra.names()
        order = ["xi", "lam", "z", "zbar", "x", "dz", "dzbar", "dx"]
        by_name = {name: (s, size) for name, s, size in names}
        parts = []
        for k in sorted(self._terms, key=self._sort_key):
            c = self._terms[k]
            factors = []
            for name in order:
                s, size = by_name[name]
                for i in range(size):
                    e = k[s + i]
                    if e:
                        factors.append(f"{name}({i})" + (f"^{e}" if e > 1 else ""))
            mono = "*".join(factors)
            cs = str(c).strip("()")
            if not mono:
                parts.append(f"({cs})" if c != 1 else "1")
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"WeylElement({self})"


def commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    return a * b - b * a


# -- CR fields of a quadric ------------------------------------------------

def _exact_forms(spec: QuadricSpec):
    if not spec.is_exact:
        raise TypeError("symbolic operators need an exact quadric; floats are not accepted")
    return [H.entries for H in spec.forms]


def cr_field(spec: QuadricSpec, j: int, conjugate: bool = True,
             algebra: WeylAlgebra | None = None) -> WeylElement:
    """Tangential CR vector field of the quadric in coordinates ``(z, x)``.

    ``conjugate=True`` gives the (0,1) field
    ``dzbar_j - i sum_{l,k} h^l_{kj} z_k dx_l``; otherwise the (1,0) field
    ``dz_j + i sum_{l,k} h^l_{jk} zbar_k dx_l``. Both annihilate
    ``w_l = x_l + i H_l(z)``.
    """
    A = algebra or WeylAlgebra(spec.n, spec.d)
    if not 0 <= j < spec.n:
        raise IndexError(f"field index {j} out of range [0, {spec.n})")
    forms = _exact_forms(spec)
    if conjugate:
        out = A.dzbar(j)
        for l, h in enumerate(forms):
            for k in range(spec.n):
                if h[k, j]:
                    out = out - I * h[k, j] * (A.z(k) * A.dx(l))
    else:
        out = A.dz(j)
        for l, h in enumerate(forms):
            for k in range(spec.n):
                if h[j, k]:
                    out = out + I * h[j, k] * (A.zbar(k) * A.dx(l))
    return out


def cr_fields(spec: QuadricSpec, conjugate: bool = True):
    A = WeylAlgebra(spec.n, spec.d)
    return [cr_field(spec, j, conjugate, A) for j in range(spec.n)]


def fields_commute(fields) -> bool:
    return all(commutator(fields[j], fields[k]).is_zero()
               for j in range(len(fields)) for k in range(j + 1, len(fields)))


def check_integrability(spec: QuadricSpec) -> bool:
    """True iff all brackets of the (0,1) fields vanish identically."""
    return fields_commute(cr_fields(spec, conjugate=True))


# -- Fourier reduction and adjoints ----------------------------------------

def fourier_reduce(op: WeylElement) -> WeylElement:
    """Partial Fourier transform in ``x``: each ``dx_l`` becomes ``i xi_l``.

    Follows ``u~(z, xi) = int exp(-i<x, xi>) u(z, x) dx``. Operators whose
    coefficients depend on ``x`` are rejected.
    """
    A = op.algebra
    blocks = A._blocks()
    sx, d = blocks["x"]
    sxi, _ = blocks["xi"]
    sdx, _ = blocks["dx"]
    t = {}
    for k, c in op.terms.items():
        if any(k[sx:sx + d]):
            raise ReductionError("x-dependent coefficient not reducible")
        key = list(k)
        power = 0
        for l in range(d):
            e = key[sdx + l]
            if e:
                key[sxi + l] += e
                key[sdx + l] = 0
                power += e
        key = tuple(key)
        t[key] = t.get(key, ZERO) + c * (I ** power)
    return WeylElement(A, t)


def _adjoint_rules(A: WeylAlgebra):
    # integration by parts against exp(|z|^2); xi and lam are real parameters
    return {
        "z": lambda j: A.zbar(j),
        "zbar": lambda j: A.z(j),
        "xi": lambda l: A.xi(l),
        "lam": lambda j: A.lam(j),
        "dz": lambda j: -A.dzbar(j) - A.z(j),
        "dzbar": lambda j: -A.dz(j) - A.zbar(j),
    }


def formal_adjoint(op: WeylElement) -> WeylElement:
    """Formal adjoint under ``<u, v> = int u conj(v) exp(|z|^2)``.

    Antilinear on coefficients and product-reversing. Operators still
    carrying ``x`` or ``dx`` are rejected.
    """
    A = op.algebra
    if op.uses("x") or op.uses("dx"):
        raise ReductionError("adjoint is defined after Fourier reduction (no x or dx)")
    rules = _adjoint_rules(A)
    blocks = A._blocks()
    out = A.zero()
    for k, c in op.terms.items():
        deriv = A.one()
        for name in ("dz", "dzbar"):
            s, size = blocks[name]
            for j in range(size):
                for _ in range(k[s + j]):
                    deriv = rules[name](j) * deriv
        mult = A.one()
        for name in ("z", "zbar", "xi", "lam"):
            s, size = blocks[name]
            for j in range(size):
                for _ in range(k[s + j]):
                    mult = mult * rules[name](j)
        out = out + c.conjugate() * (deriv * mult)
    return out


def reduced_dbar(spec: QuadricSpec, k: int, xi=None, algebra: WeylAlgebra | None = None) -> WeylElement:
    """Fourier-reduced ``dbar_k = dzbar_k + sum_m h^xi_{mk} z_m``.

    ``xi`` stays symbolic unless rational values are given.
    """
    op = fourier_reduce(cr_field(spec, k, True, algebra))
    return op if xi is None else op.substitute(xi=xi)


def reduced_delta(spec: QuadricSpec, j: int, xi=None, algebra: WeylAlgebra | None = None) -> WeylElement:
    return formal_adjoint(reduced_dbar(spec, j, xi, algebra))


@dataclass(frozen=True)
class FormOperator:
    """Operator between scalar/(0,1)/(0,2) forms as an array of components.

    ``0 -> 1``: ``components[j]`` maps a function to its ``dzbar_j`` part.
    ``1 -> 2``: ``components[(k, j)]`` for ``k < j`` is the pair
    ``(dbar_k, dbar_j)``; the image coefficient is ``dbar_k v_j - dbar_j v_k``.
    ``1 -> 0``: ``components[j]`` acts on ``v_j`` and the results are summed.
    """

    degree_in: int
    degree_out: int
    components: tuple

    @classmethod
    def dbar0(cls, dbars):
        return cls(0, 1, tuple(dbars))

    @classmethod
    def dbar1(cls, dbars):
        n = len(dbars)
        return cls(1, 2, tuple(((k, j), (dbars[k], dbars[j])) for k in range(n)
                               for j in range(k + 1, n)))

    @classmethod
    def delta1(cls, deltas):
        return cls(1, 0, tuple(deltas))


# -- identity verification -------------------------------------------------

@dataclass(frozen=True)
class IdentityCheck:
    identity: str
    expected: str
    computed: str
    passed: bool

    def to_dict(self) -> dict:
        return {"identity": self.identity, "expected": self.expected,
                "computed": self.computed, "pass": self.passed}


@dataclass(frozen=True)
class IdentityReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"pass": self.passed, "checks": [c.to_dict() for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _check(out: list, identity: str, expected: WeylElement, computed: WeylElement):
    out.append(IdentityCheck(identity, str(expected), str(computed), expected == computed))


def verify_paper_identities(spec: QuadricSpec | None = None, xi=None, n: int | None = None) -> IdentityReport:
    """Check the commutator identities of the reduced operators exactly.

    Without a spec the diagonalized model is used with symbolic eigenvalues:
    ``dbar_k = dzbar_k + lam_k z_k`` and ``delta_j`` its formal adjoint, and
    ``[dbar_k, delta_j] = (-1 + 2 lam_j) [j == k]`` is checked for all pairs
    (``n`` variables, default 4).

    With a spec the operators come from the quadric's CR fields by Fourier
    reduction (``xi`` symbolic unless given) and the checked identity is
    ``[dbar_k, delta_j] = -[j == k] + 2 h^xi_{jk}``. For diagonal forms this is
    the Kronecker form with ``lam_j = h^xi_jj``; for a hypersurface with
    diagonal entries ``eps_j`` it reads ``-1 + 2 eps_j xi``.
    """
    checks: list[IdentityCheck] = []
    if spec is None:
        n = n or 4
        A = WeylAlgebra(n, 0)
        dbar = [A.dzbar(k) + A.lam(k) * A.z(k) for k in range(n)]
        delta = [formal_adjoint(op) for op in dbar]
        for j in range(n):
            _check(checks, f"delta_{j} = -dz_{j} + lam_{j} zbar_{j} - zbar_{j}",
                   -A.dz(j) + A.lam(j) * A.zbar(j) - A.zbar(j), delta[j])
        for k in range(n):
            for j in range(n):
                expected = (-1 + 2 * A.lam(j)) if j == k else A.zero()
                _check(checks, f"[dbar_{k}, delta_{j}] = (-1 + 2 lam_{j}) delta_{{{j},{k}}}",
                       expected, commutator(dbar[k], delta[j]))
        return IdentityReport(tuple(checks))

    A = WeylAlgebra(spec.n, spec.d)
    forms = _exact_forms(spec)
    dbar = [reduced_dbar(spec, k, xi, A) for k in range(spec.n)]
    delta = [formal_adjoint(op) for op in dbar]

    def h_xi(j, k):
        acc = A.zero()
        for l, h in enumerate(forms):
            acc = acc + h[j, k] * A.xi(l)
        return acc if xi is None else acc.substitute(xi=xi)

    diagonal = all(H.is_diagonal() for H in spec.forms)
    for k in range(spec.n):
        for j in range(spec.n):
            expected = 2 * h_xi(j, k) + (-1 if j == k else 0)
            if diagonal:
                label = (f"[dbar_{k}, delta_{j}] = -1 + 2 lam_{j}" if j == k
                         else f"[dbar_{k}, delta_{j}] = 0")
            else:
                label = f"[dbar_{k}, delta_{j}] = -[j==k] + 2 h^xi_{j}{k}"
            _check(checks, label, expected, commutator(dbar[k], delta[j]))
    if diagonal and spec.d == 1 and xi is None:
        for j in range(spec.n):
            eps = forms[0][j, j]
            _check(checks, f"[dbar_{j}, delta_{j}] = -1 + 2 eps_{j} xi  (eps_{j} = {eps})",
                   -1 + 2 * eps * A.xi(0), commutator(dbar[j], delta[j]))
    return IdentityReport(tuple(checks))
