"""Boundary quasimetrics of ``R x_M R^n`` and numerical checks of their rigidity."""

from .action import HeightRespectingMap, first_contact_consistency, induced_boundary_constants
from .boundary import (BoundaryDistanceResult, dM, dM_coordinate, dm_batch, dm_value,
                       euclid_cygan, quasi_triangle_audit)
from .errors import ContractViolation, DomainError, PrecisionError, SpecError
from .length import (ChainBound, Classification, chain_lower_bound, chain_upper_bound,
                     classify_triangle, eta)
from .maps import (AffineQSim, LeafwiseAffine, Linear, NotFound, Pass, Sampled, Triangular,
                   UnipotentShear, Witness, apply, bilip_constant_estimate,
                   cocycle_iterate_check, dilation, foliation_check, identity, level_rotation,
                   map_from_json, map_to_json, nonbilip_witness_via_triangle,
                   rotation_blowup_experiment, shear_bound_experiment, translation,
                   xi_modulus_curve, xi_recursive_bound)
from .report import CheckResult, SuiteReport, emit
from .sampling import Sampler
from .space import SpacePoint, d_L, first_contact_height, level_metric, vertical_geodesic
from .spectral import (JordanSpec, OrderedBasis, build_basis, compare_levels, exp_tA,
                       leaf_level_of_difference, standard_dilation)
from .suite import ExperimentConfig, run_suite

__version__ = "0.1.0"
