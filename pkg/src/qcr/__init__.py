"""Verification toolkit for quadric CR submanifolds.

Modules
-------
quadric
    Hermitian forms, Levi matrices, pseudoconcavity certificates and weights.
weyl
    Exact Weyl-algebra model of the CR fields, Fourier reduction and adjoints.
fock
    Complex Hermite basis, operator assembly and matrix-level identity checks.
spectral
    Lower bounds of the reduced quadratic forms and the minimal-norm solver.
cli
    The ``qcr`` command.
"""

__version__ = "0.1.0"

from .errors import (DimensionMismatch, EigensolverError, NotHermitianError, QCRError,
                     RangeError, ReductionError, SignatureError, TruncationError)
from .fock import (OperatorMatrix, TruncatedBasis, adjointness_defect, assemble,
                   commutator_defect, enumerate_basis, reduced_operator_matrices)
from .quadric import (HermitianMatrix, LeviSpectrum, PseudoconcavityCertificate, QuadricSpec,
                      balancing_weights, certify_pseudoconcavity, clifford_quadric,
                      diagonal_quadric, diagonalize_levi, dump_spec, function_weights,
                      levi_matrix, levi_spectrum, load_spec, membership, parse_spec,
                      pseudoconcavity_at, random_quadric, split_hypersurface)
from .rational import QQi
from .spectral import (SpectralReport, gap_scan, reference_bounds, per_xi_proof_bound,
                       quadratic_form_min, solve_dbar_min_norm, verify_identity_38)
from .weyl import (WeylAlgebra, WeylElement, check_integrability, commutator, cr_field,
                   formal_adjoint, fourier_reduce, reduced_dbar, reduced_delta,
                   verify_paper_identities)
