"""Numerical laboratory for embedding-based adjoints on rigged Banach spaces."""

from .rigging import (BanachNorm, Functional, HilbertNorm, Rigging, RiggingError,
                      check_embedding, identity_rigging, j_inverse, j_map,
                      make_rigging, norm, pairing, random_diagonal_rigging,
                      special_duality, wiener_rigging)
from .matfun import (MatFunError, OpNorm, expm, expm_eig, opnorm, pinv,
                     resolvent, sqrt_psd_like)
from .adjoint import (Operator, adjoint, check_h2_bound, check_lax,
                      check_orthogonality, check_vonneumann, gram,
                      is_orthogonal, star_residual)
from .approx import (ConvergenceTable, PolarData, bounded_transform,
                     check_metric, check_polar, check_yosida_identities,
                     operator_metric, polar_factors, semigroup_experiment,
                     yosida_classical, yosida_general)
from .basis import MBasis, check_basis, markushevich
from .report import PropertyReport

__version__ = "0.1.0"
