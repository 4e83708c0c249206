"""Galerkin discretization on the weighted space ``L^2(C^n, exp(|z|^2))``.

Trial functions are ``v = H_{p,q}(z, zbar) exp(-|z|^2)`` (products over the
``n`` variables) with ``H_{p,q}`` the complex Hermite polynomials. They are
orthogonal with ``||v||^2 = pi^n prod_j p_j! q_j!``. On this family the
operators act by

    dzbar v_{p,q} = -v_{p+1,q}          dz v_{p,q} = -v_{p,q+1}
    z v_{p,q} = v_{p+1,q} + q v_{p,q-1}  zbar v_{p,q} = v_{p,q+1} + p v_{p-1,q}

so every first-order operator changes the total degree ``sum(p + q)`` by
exactly one and maps ``B_N`` into ``B_{N+1}``.

Float matrices are expressed in the orthonormal basis. Exact matrices keep
rational entries ``R`` in the orthogonal basis together with the weights
``w = prod p! q!``; the orthonormal entry is ``R[b, a] * sqrt(w_b / w_a)``.
The common factor ``pi^n`` is dropped everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod, sqrt

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, ReductionError, TruncationError
from .rational import QQi, as_rational
from .weyl import WeylElement

__all__ = [
    "TruncatedBasis", "OperatorMatrix", "enumerate_basis", "basis_dimension",
    "generator_matrix", "assemble", "reduced_operator_matrices", "exact_apply",
    "exact_norm2", "adjointness_defect", "commutator_defect", "MAX_DIM",
]

MAX_DIM = 2_000_000


def basis_dimension(n: int, N: int) -> int:
    """Number of ``2n``-tuples of nonnegative integers with sum at most ``N``."""
    return comb(N + 2 * n, 2 * n)


def _compositions(total: int, parts: int):
    # descending lexicographic order
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=64)
def _index_list(n: int, N: int) -> tuple:
    out = []
    for total in range(N + 1):
        out.extend(_compositions(total, 2 * n))
    return tuple(out)


class TruncatedBasis:
    """Multi-indices ``(p_0, q_0, ..., p_{n-1}, q_{n-1})`` of total degree ``<= N``.

    Ordered by total degree, then descending lexicographically, so ``B_N`` is
    a prefix of ``B_{N+1}``.
    """

    def __init__(self, n: int, N: int, mode: str = "float", max_dim: int = MAX_DIM):
        if n < 1 or N < 0:
            raise ValueError(f"need n >= 1 and N >= 0, got n={n}, N={N}")
        if mode not in ("float", "exact"):
            raise ValueError(f"mode must be 'float' or 'exact', not {mode!r}")
        dim = basis_dimension(n, N)
        if dim > max_dim:
            raise TruncationError(f"basis dimension {dim} exceeds the cap {max_dim}; "
                                  f"raise max_dim to at least {dim}")
        self.n, self.N, self.mode, self.max_dim = n, N, mode, max_dim
        self.index_list = _index_list(n, N)
        self._position = None

    @property
    def dim(self) -> int:
        return len(self.index_list)

    def __len__(self) -> int:
        return self.dim

    @property
    def position(self) -> dict:
        if self._position is None:
            self._position = {idx: i for i, idx in enumerate(self.index_list)}
        return self._position

    def index(self, multi_index) -> int:
        return self.position[tuple(multi_index)]

    def weights(self):
        """Squared norms ``prod p! q!`` (ints) without the ``pi^n`` factor."""
        return [prod(factorial(e) for e in idx) for idx in self.index_list]

    def degree(self, i: int) -> int:
        return sum(self.index_list[i])

    def grow(self, by: int = 1) -> "TruncatedBasis":
        return TruncatedBasis(self.n, self.N + by, self.mode, max(self.max_dim, MAX_DIM))

    def __eq__(self, other):
        return (isinstance(other, TruncatedBasis) and
                (self.n, self.N, self.mode) == (other.n, other.N, other.mode))

    def __hash__(self):
        return hash((self.n, self.N, self.mode))

    def __repr__(self):
        return f"TruncatedBasis(n={self.n}, N={self.N}, mode={self.mode!r}, dim={self.dim})"


def enumerate_basis(n: int, N: int, mode: str = "float", max_dim: int = MAX_DIM) -> TruncatedBasis:
    return TruncatedBasis(n, N, mode, max_dim)


# -- generator matrices ----------------------------------------------------

def _generator_entries(name: str, j: int, idx: tuple):
    """Images of one basis function as ``[(target, int coeff, norm ratio)]``.

    ``norm ratio`` is ``w_target / w_source`` as a Fraction.
    """
    p, q = idx[2 * j], idx[2 * j + 1]

    def shift(dp, dq):
        t = list(idx)
        t[2 * j] += dp
        t[2 * j + 1] += dq
        return tuple(t)

    if name == "dzbar":
        return [(shift(1, 0), -1, Fraction(p + 1))]
    if name == "dz":
        return [(shift(0, 1), -1, Fraction(q + 1))]
    if name == "z":
        out = [(shift(1, 0), 1, Fraction(p + 1))]
        if q:
            out.append((shift(0, -1), q, Fraction(1, q)))
        return out
    if name == "zbar":
        out = [(shift(0, 1), 1, Fraction(q + 1))]
        if p:
            out.append((shift(-1, 0), p, Fraction(1, p)))
        return out
    raise ValueError(f"unknown generator {name!r}")


@lru_cache(maxsize=256)
def _generator_coo(name: str, j: int, n: int, N_in: int, N_out: int):
    src = _index_list(n, N_in)
    pos = {idx: i for i, idx in enumerate(_index_list(n, N_out))}
    rows, cols, exact, scale = [], [], [], []
    for a, idx in enumerate(src):
        for tgt, c, ratio in _generator_entries(name, j, idx):
            b = pos.get(tgt)
            if b is None:
                continue
            rows.append(b)
            cols.append(a)
            exact.append(c)
            scale.append(c * sqrt(ratio))
    return (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64),
            tuple(exact), np.array(scale, dtype=float))


def generator_matrix(name: str, j: int, domain: TruncatedBasis, codomain: TruncatedBasis):
    """Orthonormal-basis float matrix of one generator, ``codomain x domain``."""
    rows, cols, _, vals = _generator_coo(name, j, domain.n, domain.N, codomain.N)
    return sp.csr_matrix((vals, (rows, cols)), shape=(codomain.dim, domain.dim))


# -- assembled operators ---------------------------------------------------

@dataclass
class OperatorMatrix:
    """Matrix of a reduced operator from ``domain`` to ``codomain``.

    Float mode: ``matrix`` is a scipy CSR matrix in the orthonormal basis.
    Exact mode: ``entries`` maps ``(row, col)`` to nonzero ``QQi`` in the
    orthogonal basis; see the module docstring for the normalization.
    """

    domain: TruncatedBasis
    codomain: TruncatedBasis
    matrix: sp.csr_matrix | None = None
    entries: dict | None = None
    label: str = ""
    xi: tuple | None = None
    lam: tuple | None = None

    @property
    def shape(self):
        return (self.codomain.dim, self.domain.dim)

    @property
    def is_exact(self) -> bool:
        return self.entries is not None

    @property
    def nnz(self) -> int:
        return len(self.entries) if self.is_exact else self.matrix.nnz

    def to_float(self) -> sp.csr_matrix:
        """Orthonormal-basis float matrix (exact entries get their surd factors)."""
        if not self.is_exact:
            return self.matrix
        w_in = self.domain.weights()
        w_out = self.codomain.weights()
        rows, cols, vals = [], [], []
        for (b, a), c in self.entries.items():
            rows.append(b)
            cols.append(a)
            vals.append(complex(c) * sqrt(w_out[b] / w_in[a]))
        return sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=self.shape)

    def to_dense(self) -> np.ndarray:
        return self.to_float().toarray()

    def coordinate_text(self) -> str:
        """``row col re im`` lines of the orthonormal-basis matrix."""
        m = self.to_float().tocoo()
        order = np.lexsort((m.col, m.row))
        lines = [f"# {self.label} shape {self.shape[0]} {self.shape[1]}"]
        for i in order:
            v = complex(m.data[i])
            lines.append(f"{m.row[i]} {m.col[i]} {v.real!r} {v.imag!r}")
        return "\n".join(lines) + "\n"


def _param_value(key, algebra, xi, lam, exact: bool):
    blocks = algebra._blocks()
    val = Fraction(1) if exact else 1.0
    for name, values in (("xi", xi), ("lam", lam)):
        s, size = blocks[name]
        exps = key[s:s + size]
        if any(exps):
            if values is None:
                raise ReductionError(f"operator depends on {name}; supply numeric values")
            for e, v in zip(exps, values):
                if e:
                    val = val * v ** e
    return val


def assemble(op: WeylElement, basis: TruncatedBasis, xi=None, lam=None,
             codomain: TruncatedBasis | None = None, label: str = "",
             clip: bool = False) -> OperatorMatrix:
    """Matrix of a Fourier-reduced first-order operator on ``basis``.

    ``xi`` and ``lam`` substitute the central parameters (rationals in exact
    mode, floats otherwise). The codomain defaults to ``B_{N+1}``; an operator
    with more than one ``z``-factor per monomial would need more and is
    rejected. ``clip=True`` allows a smaller codomain (images are truncated),
    e.g. for square ``B_N x B_N`` blocks.
    """
    A = op.algebra
    if A.n != basis.n:
        raise DimensionMismatch(f"operator has n={A.n} but basis has n={basis.n}")
    if op.uses("x") or op.uses("dx"):
        raise ReductionError("operator still depends on x; apply fourier_reduce first")
    if op.z_order() > 1:
        raise TruncationError("operator changes total degree by more than 1; "
                              "not representable with codomain B_{N+1}")
    exact = basis.mode == "exact"
    conv = as_rational if exact else float
    xi_v = None if xi is None else tuple(conv(v) for v in np.atleast_1d(np.asarray(xi, dtype=object)))
    lam_v = None if lam is None else tuple(conv(v) for v in lam)
    codomain = codomain or TruncatedBasis(basis.n, basis.N + 1, basis.mode)
    if not clip and codomain.N < basis.N + (1 if op.z_order() else 0):
        raise TruncationError("codomain too small for the operator's degree shift")

    blocks = A._blocks()
    gen_names = ("z", "zbar", "dz", "dzbar")
    terms = []
    for key, c in op.terms.items():
        coeff = c * _param_value(key, A, xi_v, lam_v, exact) if exact else \
            complex(c) * _param_value(key, A, xi_v, lam_v, exact)
        gen = None
        for name in gen_names:
            s, size = blocks[name]
            for j in range(size):
                if key[s + j]:
                    gen = (name, j)
        terms.append((gen, coeff))

    if exact:
        entries: dict = {}
        for gen, coeff in terms:
            if gen is None:
                for a in range(basis.dim):
                    entries[(a, a)] = entries.get((a, a), QQi(0)) + coeff
            else:
                rows, cols, ints, _ = _generator_coo(gen[0], gen[1], basis.n, basis.N, codomain.N)
                for b, a, m in zip(rows.tolist(), cols.tolist(), ints):
                    entries[(b, a)] = entries.get((b, a), QQi(0)) + coeff * m
        entries = {k: v for k, v in entries.items() if v}
        return OperatorMatrix(basis, codomain, entries=entries, label=label or str(op),
                              xi=xi_v, lam=lam_v)

    M = sp.csr_matrix((codomain.dim, basis.dim), dtype=complex)
    for gen, coeff in terms:
        if gen is None:
            M = M + coeff * sp.eye(codomain.dim, basis.dim, format="csr")
        else:
            M = M + coeff * generator_matrix(gen[0], gen[1], basis, codomain)
    M.eliminate_zeros()
    if not np.iscomplexobj(M.data) or np.all(M.data.imag == 0):
        M = M.real.astype(float).tocsr()
    return OperatorMatrix(basis, codomain, matrix=M.tocsr(), label=label or str(op),
                          xi=xi_v, lam=lam_v)


def reduced_operator_matrices(h: np.ndarray, domain: TruncatedBasis,
                              codomain: TruncatedBasis | None = None):
    """Float matrices of ``dbar_k`` and ``delta_j`` for a Levi matrix ``h``.

    ``dbar_k = dzbar_k + sum_m h_{mk} z_m`` and
    ``delta_j = -dz_j - zbar_j + sum_m h_{jm} zbar_m``, built directly from the
    ladder rules. Returns two lists of CSR matrices ``codomain x domain``.
    """
    h = np.asarray(h)
    n = domain.n
    if h.shape != (n, n):
        raise DimensionMismatch(f"Levi matrix must be {n}x{n}, got {h.shape}")
    codomain = codomain or TruncatedBasis(n, domain.N + 1)
    real = np.all(np.imag(h) == 0)
    h = np.real(h) if real else h.astype(complex)
    Z = [generator_matrix("z", m, domain, codomain) for m in range(n)]
    Zb = [generator_matrix("zbar", m, domain, codomain) for m in range(n)]
    dbar, delta = [], []
    for k in range(n):
        D = generator_matrix("dzbar", k, domain, codomain)
        for m in range(n):
            if h[m, k] != 0:
                D = D + h[m, k] * Z[m]
        dbar.append(D.tocsr())
    for j in range(n):
        D = -generator_matrix("dz", j, domain, codomain) - Zb[j]
        for m in range(n):
            if h[j, m] != 0:
                D = D + h[j, m] * Zb[m]
        delta.append(D.tocsr())
    return dbar, delta


# -- exact vector helpers --------------------------------------------------

def exact_apply(M: OperatorMatrix, v: dict) -> dict:
    """Apply an exact operator to ``{index: QQi}`` coefficients (orthogonal basis)."""
    if not M.is_exact:
        raise TypeError("exact_apply needs an exact OperatorMatrix")
    by_col: dict = {}
    for (b, a), c in M.entries.items():
        by_col.setdefault(a, []).append((b, c))
    out: dict = {}
    for a, x in v.items():
        if not x:
            continue
        for b, c in by_col.get(a, ()):
            out[b] = out.get(b, QQi(0)) + c * x
    return {k: x for k, x in out.items() if x}


def exact_norm2(v: dict, basis: TruncatedBasis) -> Fraction:
    """Squared norm (without ``pi^n``) of orthogonal-basis coefficients."""
    w = basis.weights()
    return sum((x.abs2() * w[i] for i, x in v.items()), Fraction(0))


def _exact_matmul(A: dict, B: dict) -> dict:
    by_row: dict = {}
    for (k, a), c in B.items():
        by_row.setdefault(k, []).append((a, c))
    out: dict = {}
    for (b, k), c in A.items():
        for a, d in by_row.get(k, ()):
            out[(b, a)] = out.get((b, a), QQi(0)) + c * d
    return {key: v for key, v in out.items() if v}


def _exact_sub(A: dict, B: dict) -> dict:
    out = dict(A)
    for k, v in B.items():
        out[k] = out.get(k, QQi(0)) - v
    return {k: v for k, v in out.items() if v}


# -- matrix-level identities -----------------------------------------------

def adjointness_defect(dbar: WeylElement, delta: WeylElement, N: int, mode: str = "exact",
                       xi=None, lam=None):
    """Compare the ``delta`` matrix with the conjugate transpose of ``dbar``.

    ``dbar`` is assembled on ``B_N -> B_{N+1}`` and ``delta`` on
    ``B_{N+1} -> B_{N+2}`` restricted to rows in ``B_N``, so both blocks are
    complete. Exact mode returns the number of mismatching entries (0 means
    equal); float mode the largest entrywise difference relative to the
    largest entry.
    """
    n = dbar.algebra.n
    B0 = TruncatedBasis(n, N, mode)
    B1 = TruncatedBasis(n, N + 1, mode)
    P = assemble(dbar, B0, xi=xi, lam=lam)
    Q = assemble(delta, B1, xi=xi, lam=lam)
    if mode == "exact":
        w0, w1 = B0.weights(), B1.weights()
        keys = {(a, b) for (b, a) in P.entries} | {(a, b) for (a, b) in Q.entries if a < B0.dim}
        bad = 0
        for a, b in keys:
            lhs = Q.entries.get((a, b), QQi(0)) * w0[a]
            rhs = P.entries.get((b, a), QQi(0)).conjugate() * w1[b]
            bad += lhs != rhs
        return bad
    Pm = P.to_float()
    Qm = Q.to_float()[: B0.dim, :]
    diff = abs(Qm - Pm.conj().T)
    scale = max(abs(Pm).max(), 1.0)
    return float(diff.max() / scale) if diff.nnz else 0.0


def commutator_defect(a: WeylElement, b: WeylElement, expected: WeylElement, N: int,
                      mode: str = "exact", xi=None, lam=None):
    """Check ``[a, b] == expected`` on ``B_N`` at the matrix level.

    Products are formed through ``B_{N+1}`` into ``B_{N+2}`` so nothing is
    clipped. Returns a mismatch count (exact) or max abs difference (float).
    """
    n = a.algebra.n
    B0 = TruncatedBasis(n, N, mode)
    B1 = TruncatedBasis(n, N + 1, mode)
    B2 = TruncatedBasis(n, N + 2, mode)
    a0, b0 = assemble(a, B0, xi, lam), assemble(b, B0, xi, lam)
    a1, b1 = assemble(a, B1, xi, lam), assemble(b, B1, xi, lam)
    e = assemble(expected, B0, xi, lam, codomain=B2)
    if mode == "exact":
        comm = _exact_sub(_exact_matmul(a1.entries, b0.entries), _exact_matmul(b1.entries, a0.entries))
        return len(_exact_sub(comm, e.entries))
    comm = a1.to_float() @ b0.to_float() - b1.to_float() @ a0.to_float()
    diff = abs(comm - e.to_float())
    return float(diff.max()) if diff.nnz else 0.0
