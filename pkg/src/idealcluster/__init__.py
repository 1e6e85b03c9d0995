"""Finite-scale ideal convergence.

Ideals on the positive integers, point sequences, dyadic encodings of
subsequences, and estimators for ordinary limit points, I-cluster points and
I-limit points.
"""

from .ideals import (ConfigError, DensityAlpha, ErdosUlam, Fin, GeneralizedDensity,
                     MembershipConfig, MembershipVerdict, Summable, Verdict,
                     alpha_equivalence_probe, alpha_weight_ratio, erdos_ulam_phi,
                     exh_tail_value, gdi_block_value, limsup_estimate, membership,
                     natural_density_gdi, parse_ideal)
from .indexset import DomainError, IndexSet
from .limitset import (NeighborhoodSchedule, brute_force_lambda_oracle, compare_sets,
                       estimate_Gamma, estimate_L, estimate_Lambda, estimate_Lambda_gdi,
                       extract_lambda_witness, v_ell_statistic)
from .omega import (OmegaPrefix, decode, dyadic_value, encode, generic_witness,
                    sample_uniform, splice, subsequence)
from .sequences import SequencePrefix, generate
from .submeasures import InvariantViolation
from .zoo import ZOO_NAMES, zoo

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DensityAlpha", "ErdosUlam", "Fin", "GeneralizedDensity", "MembershipConfig",
    "MembershipVerdict", "Summable", "Verdict", "alpha_equivalence_probe", "alpha_weight_ratio",
    "erdos_ulam_phi", "exh_tail_value", "gdi_block_value", "limsup_estimate", "membership",
    "natural_density_gdi", "parse_ideal", "DomainError", "IndexSet", "NeighborhoodSchedule",
    "brute_force_lambda_oracle", "compare_sets", "estimate_Gamma", "estimate_L", "estimate_Lambda",
    "estimate_Lambda_gdi", "extract_lambda_witness", "v_ell_statistic", "OmegaPrefix", "decode",
    "dyadic_value", "encode", "generic_witness", "sample_uniform", "splice", "subsequence",
    "SequencePrefix", "generate", "InvariantViolation", "ZOO_NAMES", "zoo", "__version__",
]
