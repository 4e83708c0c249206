"""Lower bounds for the reduced Cauchy-Riemann operators at fixed ``xi``.

For a conormal ``xi`` the Fourier-reduced operators are

    dbar_k  = dzbar_k + sum_m h^xi_{mk} z_m
    delta_j = -dz_j - zbar_j + sum_m h^xi_{jm} zbar_m

and the quadratic forms studied are

    degree 0:  Q(v) = sum_k ||dbar_k v||^2
    degree 1:  Q(v) = sum_{k<j} ||dbar_k v_j - dbar_j v_k||^2 + ||sum_j delta_j v_j||^2

(``{dzbar_j}`` and ``{dzbar_k ^ dzbar_j, k < j}`` orthonormal). On ``B_N`` the
form is evaluated exactly through ``B_{N+1}``, so the minimum Rayleigh quotient
is an upper bound for the true infimum that decreases as ``N`` grows.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from random import Random

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .errors import EigensolverError, QCRError, RangeError, SignatureError
from .fock import (TruncatedBasis, assemble, exact_apply, exact_norm2,
                   reduced_operator_matrices)
from .quadric import (QuadricSpec, balancing_weights, certify_pseudoconcavity,
                      diagonalize_levi, levi_matrix)
from .rational import QQi, as_rational
from .weyl import WeylAlgebra, formal_adjoint, reduced_dbar

__all__ = [
    "SpectralReport", "reference_bounds", "levi_data", "form_operator", "gram_matrix",
    "smallest_eigenpair", "quadratic_form_min", "gap_scan", "is_monotone",
    "per_xi_proof_bound", "NormIdentityReport", "verify_identity_38",
    "SolveDiagnostics", "solve_dbar_min_norm", "apply_dbar", "random_coefficients",
    "DENSE_LIMIT", "PASS_TOLERANCE",
]

DENSE_LIMIT = 4000
PASS_TOLERANCE = 1e-9
EIG_RESIDUAL_TOL = 1e-11


def _xi_tuple(xi, d: int | None = None) -> tuple:
    xi = tuple(np.atleast_1d(np.asarray(xi, dtype=object)).tolist())
    if d is not None and len(xi) != d:
        raise ValueError(f"conormal has length {len(xi)}, expected {d}")
    return xi


def reference_bounds(spec: QuadricSpec, grid_spacing: float = 0.02):
    """Lower bounds ``{1: degree-1, 0: degree-0}`` the weight argument proves.

    A hypersurface with diagonal form of ``n/2`` entries ``+1`` and ``n/2``
    entries ``-1`` (``n >= 4``) gets ``{1: 2, 0: n}``: for degree 1 a ``+1/-1``
    pair avoiding the excluded index carries unit weights, for degree 0 all
    indices do. A certified 2-pseudoconcave quadric gets ``{1: 1, 0: 1}``.
    Anything else returns ``None`` (no bound applies).
    """
    if spec.d == 1 and all(H.is_diagonal() for H in spec.forms):
        diag = [complex(spec.forms[0].entries[j, j]).real for j in range(spec.n)]
        if spec.n >= 4 and sorted(diag) == [-1.0] * (spec.n // 2) + [1.0] * (spec.n - spec.n // 2) \
                and spec.n % 2 == 0:
            return {1: 2.0, 0: float(spec.n)}
    cert = certify_pseudoconcavity(spec, 2, grid_spacing)
    if cert.certified:
        return {1: 1.0, 0: 1.0}
    return None


def levi_data(spec: QuadricSpec, xi, diagonalize: bool = True):
    """Levi matrix used to build the reduced operators, and its eigenvalues.

    A matrix that is already diagonal is used as is (coordinate order).
    Otherwise, with ``diagonalize=True`` it is replaced by ``diag(lambda)``
    with ``lambda`` ascending; with ``diagonalize=False`` the full ``h^xi`` is
    kept. Returns ``(h, lam)`` as float arrays.
    """
    H = levi_matrix(spec, xi)
    h = H.to_numpy()
    if H.is_diagonal():
        lam = np.real(np.diag(h)).copy()
        return np.diag(lam), lam
    _, spectrum = diagonalize_levi(spec, [float(x) for x in _xi_tuple(xi)])
    lam = np.array(spectrum.eigenvalues)
    return (np.diag(lam) if diagonalize else h), lam


def form_operator(h: np.ndarray, N: int, degree: int) -> sp.csr_matrix:
    """Operator ``T`` with ``Q(v) = ||T v||^2`` on ``B_N`` (or ``B_N^n``)."""
    n = h.shape[0]
    domain = TruncatedBasis(n, N)
    codomain = TruncatedBasis(n, N + 1)
    dbar, delta = reduced_operator_matrices(h, domain, codomain)
    if degree == 0:
        return sp.vstack(dbar).tocsr()
    if degree != 1:
        raise ValueError("degree must be 0 or 1")
    blocks = []
    for k in range(n):
        for j in range(k + 1, n):
            row = [None] * n
            row[j] = dbar[k]
            row[k] = -dbar[j]
            blocks.append(row)
    blocks.append(list(delta))
    return sp.bmat(blocks, format="csr")


def gram_matrix(h: np.ndarray, N: int, degree: int):
    T = form_operator(h, N, degree)
    G = (T.conj().T @ T)
    return G, T


def smallest_eigenpair(G, dense_limit: int = DENSE_LIMIT):
    """Smallest eigenpair of a Hermitian PSD matrix with solver statistics."""
    dim = G.shape[0]
    stats = {"dim": dim}
    if dim <= dense_limit:
        M = G.toarray() if sp.issparse(G) else np.asarray(G)
        try:
            w, V = sla.eigh(M, subset_by_index=[0, 0])
        except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
            raise EigensolverError("dense eigensolver failed", {"dim": dim, "lapack": str(exc)}) from exc
        lam, x = float(w[0]), V[:, 0]
        stats["solver"] = "dense"
        scale = max(float(np.max(np.abs(M))), 1.0)
    else:
        v0 = np.ones(dim) / math.sqrt(dim)
        try:
            w, V = eigsh(G, k=1, which="SA", v0=v0, tol=1e-13, maxiter=20 * dim)
        except Exception as exc:  # ArpackNoConvergence carries partial results
            raise EigensolverError("iterative eigensolver did not converge",
                                   {"dim": dim, "error": str(exc)}) from exc
        lam, x = float(w[0]), V[:, 0]
        stats["solver"] = "lanczos"
        scale = max(float(abs(G).max()), 1.0)
    resid = float(np.linalg.norm(G @ x - lam * x))
    stats["residual"] = resid
    if resid > EIG_RESIDUAL_TOL * scale * math.sqrt(dim):
        raise EigensolverError("eigenpair residual above tolerance", stats)
    return lam, x, stats


@dataclass
class SpectralReport:
    xi: tuple
    N: int
    degree: int
    lambda_min: float
    paper_bound: float | None
    tolerance: float = PASS_TOLERANCE
    dim: int = 0
    lam: tuple = ()
    solver: str = ""
    residual: float = 0.0
    wall_ms: float = 0.0
    error: str = ""

    @property
    def margin(self) -> float | None:
        if self.paper_bound is None or self.error:
            return None
        return self.lambda_min - self.paper_bound

    @property
    def passed(self) -> bool | None:
        if self.error:
            return False
        if self.paper_bound is None:
            return None
        return self.lambda_min >= self.paper_bound - self.tolerance

    def to_dict(self) -> dict:
        out = asdict(self)
        out["xi"] = [float(x) for x in self.xi]
        out["lam"] = [float(x) for x in self.lam]
        out["margin"] = self.margin
        out["pass"] = self.passed
        return out


def quadratic_form_min(spec: QuadricSpec, xi, N: int, degree: int, *, diagonalize: bool = True,
                       bounds="auto", tolerance: float = PASS_TOLERANCE,
                       dense_limit: int = DENSE_LIMIT) -> SpectralReport:
    """Minimum Rayleigh quotient of the degree-0 or degree-1 form on ``B_N``.

    ``bounds`` is the output of :func:`reference_bounds` (computed when
    ``"auto"``) or ``None`` to skip the comparison.
    """
    t0 = time.perf_counter()
    xi = _xi_tuple(xi, spec.d)
    if bounds == "auto":
        bounds = reference_bounds(spec)
    h, lam = levi_data(spec, xi, diagonalize)
    G, _ = gram_matrix(h, N, degree)
    value, _, stats = smallest_eigenpair(G, dense_limit)
    return SpectralReport(
        xi=tuple(float(x) for x in xi), N=N, degree=degree, lambda_min=value,
        paper_bound=None if bounds is None else bounds[degree], tolerance=tolerance,
        dim=G.shape[0], lam=tuple(float(x) for x in lam), solver=stats["solver"],
        residual=stats["residual"], wall_ms=1e3 * (time.perf_counter() - t0))


def gap_scan(spec: QuadricSpec, xi_grid, N_list, degrees=(0, 1), *, threads: int | None = None,
             diagonalize: bool = True, bounds="auto") -> list[SpectralReport]:
    """Reports for every ``(xi, N, degree)`` cell, ordered grid-major.

    Cells run on a thread pool (``threads`` defaults to ``QCR_THREADS`` or 1);
    a failing cell yields a report with ``error`` set instead of aborting.
    """
    if bounds == "auto":
        bounds = reference_bounds(spec)
    cells = [(xi, N, deg) for xi in xi_grid for N in N_list for deg in degrees]
    if threads is None:
        threads = int(os.environ.get("QCR_THREADS", "1") or 1)

    def run(cell):
        xi, N, deg = cell
        try:
            return quadratic_form_min(spec, xi, N, deg, diagonalize=diagonalize, bounds=bounds)
        except QCRError as exc:
            return SpectralReport(xi=tuple(float(x) for x in _xi_tuple(xi)), N=N, degree=deg,
                                  lambda_min=math.nan,
                                  paper_bound=None if bounds is None else bounds[deg],
                                  error=str(exc))

    if threads > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, cells))
    return [run(c) for c in cells]


def is_monotone(reports, slack: float = 1e-10) -> bool:
    """Whether ``lambda_min`` is nonincreasing in ``N`` for each ``(xi, degree)``."""
    groups: dict = {}
    for r in reports:
        groups.setdefault((r.xi, r.degree), []).append((r.N, r.lambda_min))
    for values in groups.values():
        values.sort()
        for (_, a), (_, b) in zip(values, values[1:]):
            if b > a + slack * max(1.0, abs(a)):
                return False
    return True


# -- the weight argument ---------------------------------------------------

def _proof_eigenvalues(spec: QuadricSpec, xi):
    H = levi_matrix(spec, xi)
    if H.is_diagonal():
        diag = [H.entries[j, j] for j in range(spec.n)]
        if H.is_exact:
            return [x.re for x in diag], True
        return [float(np.real(x)) for x in diag], False
    _, spectrum = diagonalize_levi(spec, [float(x) for x in _xi_tuple(xi)])
    return [float(x) for x in spectrum.eigenvalues], False


def per_xi_proof_bound(spec: QuadricSpec, xi, k: int | None, weights=None):
    """Constant ``sum_j a_j (1 - 2 lam_j)`` delivered by the weight argument.

    For ``sum_{j != k} ||dbar_j v||^2`` the commutator identity gives
    ``||dbar_j v||^2 = ||delta_j v||^2 + (1 - 2 lam_j)||v||^2``, so any weights
    ``0 <= a_j <= 1`` with ``a_k = 0`` and ``sum a_j lam_j = 0`` bound the sum
    below by ``sum_j a_j (1 - 2 lam_j) ||v||^2 = sum_j a_j ||v||^2``.

    ``weights=None`` uses :func:`balancing_weights` (bound 1). Explicit weights
    are validated first. ``lam`` is the diagonal of ``h^xi`` in coordinate
    order when that matrix is diagonal, else the ascending eigenvalues. Exact
    input returns a ``Fraction``.
    """
    lam, exact = _proof_eigenvalues(spec, xi)
    if weights is None:
        a = list(balancing_weights(lam, k))
    else:
        a = [as_rational(x) for x in weights] if exact else [float(x) for x in weights]
        if len(a) != len(lam):
            raise ValueError(f"need {len(lam)} weights, got {len(a)}")
        if any(x < 0 or x > 1 for x in a):
            raise SignatureError("weights must lie in [0, 1]")
        if k is not None and a[k] != 0:
            raise SignatureError(f"weight at the excluded index {k} must vanish")
        balance = sum(x * l for x, l in zip(a, lam))
        if (balance != 0) if exact else abs(balance) > 1e-12 * max(1.0, max(map(abs, lam))):
            raise SignatureError(f"weights do not balance the eigenvalues (sum a*lam = {balance})")
    return sum(x * (1 - 2 * l) for x, l in zip(a, lam))


# -- identity on random vectors --------------------------------------------

def random_coefficients(basis: TruncatedBasis, rng: Random, bound: int = 4) -> dict:
    """Random Gaussian-integer coefficients on every element of ``basis``."""
    v = {}
    for i in range(basis.dim):
        c = QQi(rng.randint(-bound, bound), rng.randint(-bound, bound))
        if c:
            v[i] = c
    if not v:
        v[0] = QQi(1)
    return v


@dataclass
class NormIdentityReport:
    j: int
    xi: tuple
    N: int
    mode: str
    constant: object
    trials: int
    failures: int
    max_relative_error: float
    samples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {"j": self.j, "xi": [str(x) for x in self.xi], "N": self.N, "mode": self.mode,
                "constant": str(self.constant), "trials": self.trials, "failures": self.failures,
                "max_relative_error": self.max_relative_error, "pass": self.passed}


def verify_identity_38(spec: QuadricSpec, xi, j: int, trials: int = 100, N: int = 3, *,
                       mode: str = "exact", seed: int = 0, vectors=None,
                       rtol: float = 1e-10) -> NormIdentityReport:
    """Check ``||delta_j v||^2 - ||dbar_j v||^2 == (-1 + 2 lam_j) ||v||^2``.

    The operators come from the quadric's CR fields through Fourier reduction
    and the formal adjoint, then :func:`assemble`. Exact mode needs a diagonal
    rational ``h^xi`` and compares exact rationals; float mode compares to
    ``rtol``. ``vectors`` (orthogonal-basis coefficient dicts in exact mode,
    orthonormal arrays in float mode) replaces the random trials.
    """
    xi_t = _xi_tuple(xi, spec.d)
    rng = Random(seed)
    A = WeylAlgebra(spec.n, spec.d)
    basis = TruncatedBasis(spec.n, N, mode)
    if mode == "exact":
        xi_q = [as_rational(x) for x in xi_t]
        H = levi_matrix(spec, xi_q)
        if not H.is_diagonal():
            raise ValueError("exact mode needs a diagonal Levi matrix; use mode='float'")
        lam_j = H.entries[j, j].re
        db = reduced_dbar(spec, j, xi_q, A)
        de = formal_adjoint(db)
        D = assemble(db, basis)
        E = assemble(de, basis)
        out_basis = D.codomain
        constant = -1 + 2 * lam_j
        vs = vectors if vectors is not None else [random_coefficients(basis, rng) for _ in range(trials)]
        failures, samples = 0, []
        for v in vs:
            lhs = exact_norm2(exact_apply(E, v), out_basis) - exact_norm2(exact_apply(D, v), out_basis)
            rhs = constant * exact_norm2(v, basis)
            failures += lhs != rhs
            samples.append((lhs, rhs))
        return NormIdentityReport(j, tuple(xi_q), N, mode, constant, len(vs), failures,
                                0.0 if not failures else math.inf, samples)

    h, lam = levi_data(spec, [float(x) for x in xi_t], diagonalize=True)
    dbar, delta = reduced_operator_matrices(h, basis, TruncatedBasis(spec.n, N + 1))
    constant = -1 + 2 * float(lam[j])
    nrng = np.random.default_rng(seed)
    vs = vectors if vectors is not None else [
        nrng.standard_normal(basis.dim) + 1j * nrng.standard_normal(basis.dim) for _ in range(trials)]
    failures, worst, samples = 0, 0.0, []
    for v in vs:
        v = np.asarray(v)
        lhs = np.linalg.norm(delta[j] @ v) ** 2 - np.linalg.norm(dbar[j] @ v) ** 2
        rhs = constant * np.linalg.norm(v) ** 2
        scale = max(np.linalg.norm(dbar[j] @ v) ** 2, np.linalg.norm(v) ** 2)
        err = abs(lhs - rhs) / scale
        worst = max(worst, err)
        failures += err > rtol
        samples.append((lhs, rhs))
    return NormIdentityReport(j, tuple(float(x) for x in xi_t), N, mode, constant, len(vs),
                            failures, worst, samples)


# -- minimal-norm solver ---------------------------------------------------

@dataclass
class SolveDiagnostics:
    residual: float
    norm_f: float
    norm_u: float
    lambda_min: float
    bound: float
    margin: float
    rank: int
    dim_domain: int
    dim_codomain: int

    def to_dict(self) -> dict:
        return asdict(self)


def _dbar0(spec: QuadricSpec, xi, N: int):
    h, _ = levi_data(spec, xi, diagonalize=False)
    return form_operator(h, N, 0)


def apply_dbar(spec: QuadricSpec, xi, N: int, g) -> np.ndarray:
    """``(dbar_0 g, ..., dbar_{n-1} g)`` stacked, for ``g`` on ``B_N`` (orthonormal)."""
    return _dbar0(spec, _xi_tuple(xi, spec.d), N) @ np.asarray(g)


def solve_dbar_min_norm(spec: QuadricSpec, xi, N: int, f, *, rtol: float = 1e-10):
    """Minimal-norm ``u`` on ``B_N`` with ``dbar u = f``.

    ``f`` holds the ``n`` components of a (0,1)-form on ``B_{N+1}`` (orthonormal
    coordinates, stacked). The least-squares solution of minimal norm is
    orthogonal to the kernel of ``dbar`` on ``B_N``. Raises
    :class:`RangeError` when ``||dbar u - f|| > rtol ||f||``. Operators are
    built in the original coordinates of the quadric.
    """
    xi = _xi_tuple(xi, spec.d)
    T = _dbar0(spec, xi, N).toarray()
    f = np.asarray(f)
    if f.shape != (T.shape[0],):
        raise ValueError(f"f must have length {T.shape[0]} (n * dim B_{{N+1}}), got {f.shape}")
    u, _, rank, s = sla.lstsq(T, f, lapack_driver="gelsd")
    norm_f = float(np.linalg.norm(f))
    residual = float(np.linalg.norm(T @ u - f))
    if residual > rtol * norm_f:
        raise RangeError(residual, rtol * norm_f)
    lam_min = float(s[-1] ** 2) if rank == T.shape[1] else 0.0
    norm_u = float(np.linalg.norm(u))
    bound = norm_f / math.sqrt(lam_min) if lam_min > 0 else math.inf
    return u, SolveDiagnostics(residual, norm_f, norm_u, lam_min, bound, bound - norm_u,
                               int(rank), T.shape[1], T.shape[0])
