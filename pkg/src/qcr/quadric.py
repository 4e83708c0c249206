"""Quadric CR submanifolds and their Levi forms.

A quadric of type ``(n, d)`` is the real submanifold of ``C^{n+d}``

    M = { (z, w) : Im w_l = H_l(z),  l = 0..d-1 },   H_l(z) = sum_{i,j} h^l_{ij} z_i conj(z_j)

given by ``d`` Hermitian ``n x n`` matrices. For a conormal direction
``xi in R^d`` the Levi matrix is ``h^xi = sum_l xi_l H_l``; its signature decides
q-pseudoconcavity.

Indices are 0-based throughout. Forms can be held exactly (``QQi`` entries)
or in double precision; eigenvalue problems are always solved in double
precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EigensolverError, NotHermitianError, SignatureError
from .rational import QQi, as_qqi, as_rational

__all__ = [
    "HermitianMatrix", "QuadricSpec", "LeviSpectrum", "PseudoconcavityCertificate",
    "diagonal_quadric", "split_hypersurface", "clifford_quadric", "random_quadric",
    "levi_matrix", "levi_spectrum", "pseudoconcavity_at", "certify_pseudoconcavity",
    "diagonalize_levi", "balancing_weights", "function_weights", "membership",
    "lipschitz_bound", "sphere_grid", "load_spec", "parse_spec", "dump_spec",
]

HERMITIAN_RTOL = 1e-14


class HermitianMatrix:
    """An ``n x n`` Hermitian matrix, exact or floating.

    Exact matrices hold ``QQi`` entries in an object array; floating ones a
    ``complex128`` array. The array is read-only.
    """

    __slots__ = ("entries",)

    def __init__(self, entries: np.ndarray, *, check: bool = True):
        a = np.array(entries, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
        if a.dtype != object:
            a = a.astype(np.complex128)
        a.setflags(write=False)
        self.entries = a
        if check:
            bad = self.first_non_hermitian()
            if bad is not None:
                raise NotHermitianError(*bad)

    @classmethod
    def exact(cls, rows, *, check: bool = True) -> "HermitianMatrix":
        """Build an exact matrix; every entry goes through :func:`as_qqi`."""
        rows = [list(r) for r in rows]
        n = len(rows)
        a = np.empty((n, len(rows[0]) if rows else 0), dtype=object)
        for j, r in enumerate(rows):
            if len(r) != a.shape[1]:
                raise DimensionMismatch(f"row {j} has length {len(r)}, expected {a.shape[1]}")
            for k, x in enumerate(r):
                a[j, k] = as_qqi(x)
        return cls(a, check=check)

    @classmethod
    def floating(cls, array, *, check: bool = True) -> "HermitianMatrix":
        return cls(np.asarray(array, dtype=np.complex128), check=check)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def is_exact(self) -> bool:
        return self.entries.dtype == object

    def first_non_hermitian(self):
        a = self.entries
        n = a.shape[0]
        if self.is_exact:
            for j in range(n):
                for k in range(j, n):
                    if a[j, k] != a[k, j].conjugate():
                        return (j, k)
            return None
        scale = max(float(np.max(np.abs(a))), 1.0)
        diff = np.abs(a - a.conj().T)
        for j, k in zip(*np.nonzero(diff > HERMITIAN_RTOL * scale)):
            if j <= k:
                return (int(j), int(k))
        return None

    def to_numpy(self) -> np.ndarray:
        if self.is_exact:
            return np.array([[complex(x) for x in row] for row in self.entries],
                            dtype=np.complex128)
        return np.array(self.entries)

    def to_float(self) -> "HermitianMatrix":
        return HermitianMatrix(self.to_numpy(), check=False)

    def is_diagonal(self) -> bool:
        a = self.entries
        n = a.shape[0]
        return all(not a[j, k] for j in range(n) for k in range(n) if j != k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HermitianMatrix) or other.dim != self.dim:
            return NotImplemented
        if self.is_exact and other.is_exact:
            return bool(np.all(self.entries == other.entries))
        return bool(np.allclose(self.to_numpy(), other.to_numpy(), rtol=0, atol=0))

    def __repr__(self) -> str:
        kind = "exact" if self.is_exact else "float"
        return f"HermitianMatrix({kind}, dim={self.dim})"


@dataclass(frozen=True)
class QuadricSpec:
    """Type-``(n, d)`` quadric given by ``d`` Hermitian forms on ``C^n``."""

    n: int
    d: int
    forms: tuple

    def __post_init__(self):
        object.__setattr__(self, "forms", tuple(self.forms))
        if self.n < 1 or self.d < 1:
            raise DimensionMismatch(f"need n >= 1 and d >= 1, got n={self.n}, d={self.d}")
        if len(self.forms) != self.d:
            raise DimensionMismatch(f"expected {self.d} forms, got {len(self.forms)}")
        for l, H in enumerate(self.forms):
            if not isinstance(H, HermitianMatrix):
                raise TypeError(f"form {l} is not a HermitianMatrix")
            if H.dim != self.n:
                raise DimensionMismatch(f"form {l} has dim {H.dim}, expected n={self.n}")

    @property
    def is_exact(self) -> bool:
        return all(H.is_exact for H in self.forms)

    def to_float(self) -> "QuadricSpec":
        return QuadricSpec(self.n, self.d, tuple(H.to_float() for H in self.forms))

    def arrays(self) -> np.ndarray:
        """Forms stacked as a complex array of shape ``(d, n, n)``."""
        return np.stack([H.to_numpy() for H in self.forms])

    def conjugated(self, U: np.ndarray) -> "QuadricSpec":
        """Forms replaced by ``U* H U`` (float)."""
        U = np.asarray(U, dtype=np.complex128)
        forms = []
        for H in self.forms:
            a = U.conj().T @ H.to_numpy() @ U
            forms.append(HermitianMatrix((a + a.conj().T) / 2))
        return QuadricSpec(self.n, self.d, tuple(forms))

    def to_dict(self) -> dict:
        def part(H, attr):
            if H.is_exact:
                return [[_json_number(getattr(x, attr)) for x in row] for row in H.entries]
            return [[float(getattr(x, attr)) for x in row] for row in H.to_numpy()]

        forms = []
        for H in self.forms:
            entry = {"re": part(H, "real" if not H.is_exact else "re")}
            im = part(H, "imag" if not H.is_exact else "im")
            if any(v != 0 for row in im for v in row):
                entry["im"] = im
            forms.append(entry)
        return {"n": self.n, "d": self.d, "forms": forms}


def _json_number(x: Fraction):
    if x.denominator == 1:
        return int(x)
    return str(x)


def diagonal_quadric(*signature: Sequence) -> QuadricSpec:
    """Quadric with diagonal forms; ``diagonal_quadric((1, 1, -1, -1))`` is a hypersurface."""
    n = len(signature[0])
    forms = []
    for diag in signature:
        if len(diag) != n:
            raise DimensionMismatch("all diagonals must have the same length")
        forms.append(HermitianMatrix.exact([[diag[j] if j == k else 0 for k in range(n)]
                                            for j in range(n)]))
    return QuadricSpec(n, len(forms), tuple(forms))


def split_hypersurface() -> QuadricSpec:
    """The hypersurface ``y = |z1|^2 + |z2|^2 - |z3|^2 - |z4|^2`` in ``C^5``."""
    return diagonal_quadric((1, 1, -1, -1))


def clifford_quadric() -> QuadricSpec:
    """Codimension-two quadric in ``C^6`` with anticommuting forms.

    ``H_0 = diag(1, 1, -1, -1)`` and ``H_1 = [[0, I], [I, 0]]``, so
    ``(h^xi)^2 = |xi|^2 Id`` and every nonzero conormal has signature (2, 2).
    """
    H0 = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]]
    H1 = [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
    return QuadricSpec(4, 2, (HermitianMatrix.exact(H0), HermitianMatrix.exact(H1)))


def random_quadric(n: int, d: int, rng: np.random.Generator, *, bound: int = 5,
                   denominator: int = 3, complex_entries: bool = True) -> QuadricSpec:
    """Exact quadric with random rational Hermitian forms."""
    def rnd():
        return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, denominator + 1)))

    forms = []
    for _ in range(d):
        a = np.empty((n, n), dtype=object)
        for j in range(n):
            a[j, j] = QQi(rnd())
            for k in range(j + 1, n):
                x = QQi(rnd(), rnd() if complex_entries else 0)
                a[j, k] = x
                a[k, j] = x.conjugate()
        forms.append(HermitianMatrix(a))
    return QuadricSpec(n, d, tuple(forms))


# -- file format -----------------------------------------------------------

def parse_spec(data: dict, *, exact: bool = True) -> QuadricSpec:
    """Build a spec from the JSON object ``{"n", "d", "forms": [{"re", "im"}]}``.

    Numbers may be JSON ints, decimals, or strings such as ``"1/3"``. In exact
    mode decimals are read through their decimal text. Non-Hermitian input is
    rejected with the first offending ``(j, k)``.
    """
    try:
        n, d, raw = int(data["n"]), int(data["d"]), data["forms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DimensionMismatch(f"spec must provide integer 'n', 'd' and a 'forms' list: {exc}")
    if len(raw) != d:
        raise DimensionMismatch(f"'d' is {d} but {len(raw)} forms were given")
    forms = []
    for l, f in enumerate(raw):
        re = f.get("re")
        im = f.get("im")
        if re is None:
            raise DimensionMismatch(f"form {l} is missing 're'")
        if len(re) != n or any(len(r) != n for r in re):
            raise DimensionMismatch(f"form {l} 're' is not {n}x{n}")
        if im is not None and (len(im) != n or any(len(r) != n for r in im)):
            raise DimensionMismatch(f"form {l} 'im' is not {n}x{n}")
        if exact:
            a = np.empty((n, n), dtype=object)
            for j, k in product(range(n), range(n)):
                a[j, k] = QQi(as_rational(re[j][k]), as_rational(im[j][k]) if im else 0)
        else:
            a = np.array(re, dtype=float) + (1j * np.array(im, dtype=float) if im else 0)
        H = HermitianMatrix(a, check=False)
        bad = H.first_non_hermitian()
        if bad is not None:
            raise NotHermitianError(*bad, form=l)
        forms.append(H)
    return QuadricSpec(n, d, tuple(forms))


def load_spec(path, *, exact: bool = True) -> QuadricSpec:
    with open(path) as fh:
        return parse_spec(json.load(fh), exact=exact)


def dump_spec(spec: QuadricSpec, path) -> None:
    Path(path).write_text(json.dumps(spec.to_dict(), indent=2) + "\n")


# -- Levi form -------------------------------------------------------------

def _check_xi(spec: QuadricSpec, xi) -> tuple:
    xi = tuple(np.atleast_1d(np.asarray(xi, dtype=object)).tolist())
    if len(xi) != spec.d:
        raise DimensionMismatch(f"conormal has length {len(xi)} but the quadric has d={spec.d}")
    return xi


def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction, QQi)) and not isinstance(x, bool)


def levi_matrix(spec: QuadricSpec, xi) -> HermitianMatrix:
    """Levi matrix ``h^xi = sum_l xi_l H_l``.

    The result is exact when the spec is exact and every ``xi_l`` is an int or
    ``Fraction``; otherwise it is computed in double precision.
    """
    xi = _check_xi(spec, xi)
    if spec.is_exact and all(_is_rational(x) for x in xi):
        acc = np.full((spec.n, spec.n), QQi(0), dtype=object)
        for x, H in zip(xi, spec.forms):
            if x:
                acc = acc + H.entries * x
        return HermitianMatrix(acc, check=False)
    acc = np.tensordot(np.asarray(xi, dtype=float), spec.arrays(), axes=1)
    return HermitianMatrix(acc, check=False)


def lipschitz_bound(spec: QuadricSpec) -> float:
    """``sum_l ||H_l||_2``; eigenvalues of ``h^xi`` are Lipschitz in ``xi`` with this constant."""
    return float(sum(np.linalg.norm(H.to_numpy(), 2) for H in spec.forms))


@dataclass(frozen=True)
class LeviSpectrum:
    eigenvalues: np.ndarray
    n_pos: int
    n_zero: int
    n_neg: int
    zero_tolerance: float

    @property
    def q(self) -> int:
        return min(self.n_pos, self.n_neg)


def _eigvalsh(a: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError("Hermitian eigensolver did not converge",
                               {"shape": a.shape, "lapack": str(exc)}) from exc


def _spectrum(w: np.ndarray, zero_tolerance: float | None) -> LeviSpectrum:
    if zero_tolerance is None:
        zero_tolerance = 1e-10 * float(np.max(np.abs(w))) if w.size else 0.0
    n_pos = int(np.sum(w > zero_tolerance))
    n_neg = int(np.sum(w < -zero_tolerance))
    w = np.array(w, dtype=float)
    w.setflags(write=False)
    return LeviSpectrum(w, n_pos, w.size - n_pos - n_neg, n_neg, float(zero_tolerance))


def levi_spectrum(spec: QuadricSpec, xi, zero_tolerance: float | None = None) -> LeviSpectrum:
    """Sorted eigenvalues of ``h^xi`` with sign counts.

    ``zero_tolerance`` defaults to ``1e-10 * ||h^xi||_2``.
    """
    h = levi_matrix(spec, xi).to_numpy()
    return _spectrum(_eigvalsh(h), zero_tolerance)


def pseudoconcavity_at(spec: QuadricSpec, xi, zero_tolerance: float | None = None) -> int:
    """``min(n_pos, n_neg)`` of the Levi matrix at ``xi``."""
    return levi_spectrum(spec, xi, zero_tolerance).q


def diagonalize_levi(spec: QuadricSpec, xi, zero_tolerance: float | None = None):
    """Unitary ``U`` with ``U* h^xi U = diag(lambda)``, ``lambda`` ascending.

    Returns ``(U, LeviSpectrum)``. A matrix that is already diagonal is only
    permuted (stable sort), so ascending diagonal input gives ``U = Id``.
    """
    H = levi_matrix(spec, xi)
    h = H.to_numpy()
    if H.is_diagonal():
        diag = np.real(np.diag(h))
        order = np.argsort(diag, kind="stable")
        U = np.eye(spec.n, dtype=np.complex128)[:, order]
        w = diag[order]
    else:
        try:
            w, U = np.linalg.eigh(h)
        except np.linalg.LinAlgError as exc:
            raise EigensolverError("Hermitian eigensolver did not converge",
                                   {"shape": h.shape, "lapack": str(exc)}) from exc
    scale = max(float(np.linalg.norm(h, 2)), 1.0)
    resid = float(np.linalg.norm(U.conj().T @ h @ U - np.diag(w), 2))
    orth = float(np.linalg.norm(U.conj().T @ U - np.eye(spec.n), 2))
    if resid > 1e-12 * scale or orth > 1e-12:
        raise EigensolverError("diagonalization residual too large",
                               {"residual": resid, "orthogonality": orth})
    return U, _spectrum(w, zero_tolerance)


# -- sphere certification --------------------------------------------------

def sphere_grid(d: int, spacing: float):
    """Points on the unit sphere in ``R^d`` with covering radius at most ``spacing``.

    For ``d == 1`` this is ``{-1, +1}``. Otherwise a regular grid is laid on each
    face of the cube ``[-1, 1]^d`` and projected radially; projection from
    outside the ball is 1-Lipschitz, so a face grid of step
    ``t = 2 * spacing / sqrt(d - 1)`` suffices. Order is deterministic.
    """
    if spacing <= 0:
        raise ValueError("grid spacing must be positive")
    if d == 1:
        return np.array([[-1.0], [1.0]])
    t = 2.0 * spacing / math.sqrt(d - 1)
    m = int(math.ceil(2.0 / t)) + 1
    ticks = np.linspace(-1.0, 1.0, m)
    face = np.array(list(product(ticks, repeat=d - 1)))
    pts = []
    for axis in range(d):
        for sign in (-1.0, 1.0):
            p = np.insert(face, axis, sign, axis=1)
            pts.append(p)
    pts = np.concatenate(pts)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


@dataclass(frozen=True)
class PseudoconcavityCertificate:
    q: int
    grid_spacing: float
    lipschitz_bound: float
    certified: bool
    witnesses: tuple = ()
    n_samples: int = 0
    n_failed: int = 0
    min_margin: float = math.inf
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "q": self.q, "grid_spacing": self.grid_spacing,
            "lipschitz_bound": self.lipschitz_bound, "certified": self.certified,
            "witnesses": [list(map(float, w)) for w in self.witnesses],
            "n_samples": self.n_samples, "n_failed": self.n_failed,
            "min_margin": None if math.isinf(self.min_margin) else self.min_margin,
            "reason": self.reason,
        }


def certify_pseudoconcavity(spec: QuadricSpec, q: int, grid_spacing: float = 0.05, *,
                            max_witnesses: int = 32, chunk: int = 65536) -> PseudoconcavityCertificate:
    """Prove ``min(n_pos, n_neg) >= q`` at every unit conormal.

    At each grid point the ``q``-th most negative and ``q``-th most positive
    eigenvalue must exceed ``L * grid_spacing`` in magnitude, ``L`` being
    :func:`lipschitz_bound`. Since eigenvalues move by at most ``L |xi - eta|``
    and every unit vector is within ``grid_spacing`` of a sample, success is a
    proof for the whole sphere. For ``d == 1`` the sphere is ``{-1, 1}`` and only
    the sign counts are checked. Failing samples are returned in grid order.
    """
    n, d = spec.n, spec.d
    L = lipschitz_bound(spec)
    if q < 0:
        raise ValueError("q must be nonnegative")
    if grid_spacing <= 0:
        raise ValueError("grid_spacing must be positive")
    if q > n // 2:
        return PseudoconcavityCertificate(q, grid_spacing, L, False,
                                          reason=f"q={q} exceeds floor(n/2)={n // 2}")
    if q == 0:
        return PseudoconcavityCertificate(q, grid_spacing, L, True, reason="q=0 holds trivially")

    pts = sphere_grid(d, grid_spacing)
    forms = spec.arrays()
    witnesses, n_failed, min_margin = [], 0, math.inf
    for start in range(0, len(pts), chunk):
        block = pts[start:start + chunk]
        w = np.linalg.eigvalsh(np.tensordot(block, forms, axes=1))
        neg = -w[:, q - 1]
        pos = w[:, n - q]
        if d == 1:
            tol = 1e-10 * np.max(np.abs(w), axis=1)
            margin = np.minimum(neg, pos) - tol
        else:
            margin = np.minimum(neg, pos) - L * grid_spacing
        min_margin = min(min_margin, float(margin.min()))
        bad = np.nonzero(margin <= 0)[0]
        n_failed += len(bad)
        for i in bad[: max(0, max_witnesses - len(witnesses))]:
            witnesses.append(tuple(float(x) for x in block[i]))
    ok = n_failed == 0
    reason = "all samples clear the Lipschitz margin" if ok else \
        f"{n_failed} of {len(pts)} samples fail the margin"
    return PseudoconcavityCertificate(q, grid_spacing, L, ok, tuple(witnesses), len(pts),
                                      n_failed, min_margin, reason)


# -- weights ---------------------------------------------------------------

def _as_weights_input(lam):
    lam = list(lam)
    exact = all(_is_rational(x) for x in lam)
    return ([Fraction(x) for x in lam] if exact else [float(x) for x in lam]), exact


def balancing_weights(lam, k: int | None = None):
    """Weights ``a`` with ``a_k = 0``, ``sum a = 1`` and ``sum a_j lam_j = 0``.

    ``r`` (resp. ``s``) is the smallest index other than ``k`` with a negative
    (resp. positive) eigenvalue; then ``a_r = lam_s / (lam_s - lam_r)``,
    ``a_s = -lam_r / (lam_s - lam_r)`` and all other weights vanish. ``k=None``
    excludes nothing. Rational input gives ``Fraction`` output.
    """
    lam, exact = _as_weights_input(lam)
    idx = [j for j in range(len(lam)) if j != k]
    r = next((j for j in idx if lam[j] < 0), None)
    s = next((j for j in idx if lam[j] > 0), None)
    if r is None or s is None:
        raise SignatureError(f"insufficient signature excluding k={k}")
    zero = Fraction(0) if exact else 0.0
    a = [zero] * len(lam)
    gap = lam[s] - lam[r]
    a[r] = lam[s] / gap
    a[s] = -lam[r] / gap
    return tuple(a)


def function_weights(lam):
    """Weights ``c`` on the extreme indices: ``c_0 = lam_{n-1} / (lam_{n-1} - lam_0)``."""
    lam, exact = _as_weights_input(lam)
    if len(lam) < 2 or not (lam[0] < 0 < lam[-1]):
        raise SignatureError("Levi form not indefinite")
    zero = Fraction(0) if exact else 0.0
    c = [zero] * len(lam)
    gap = lam[-1] - lam[0]
    c[0] = lam[-1] / gap
    c[-1] = -lam[0] / gap
    return tuple(c)


def membership(spec: QuadricSpec, z, w, tol: float = 1e-12) -> bool:
    """Whether ``(z, w)`` lies on the quadric: ``Im w_l == sum_ij h^l_ij z_i conj(z_j)``."""
    z = np.asarray(z, dtype=np.complex128).reshape(-1)
    w = np.asarray(w, dtype=np.complex128).reshape(-1)
    if z.size != spec.n or w.size != spec.d:
        raise DimensionMismatch(f"expected z of length {spec.n} and w of length {spec.d}, "
                                f"got {z.size} and {w.size}")
    values = np.einsum("i,lij,j->l", z, spec.arrays(), z.conj())
    scale = max(1.0, float(np.max(np.abs(values), initial=0.0)))
    return bool(np.all(np.abs(w.imag - values.real) <= tol * scale))
