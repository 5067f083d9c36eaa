"""Exact verification toolkit for nested dependent random choice on tree-degenerate graphs."""

from .blocks import (BlockRepresentation, MainTheoremConstants, constants, format_block_spec,
                     parse_block_spec, realize, rt_blowup)
from .embedder import EmbeddingTrace, estimate_success, staged_sample
from .errors import (DRCError, InputError, ParameterError, ParseError, ResourceError,
                     ValidationError)
from .goodness import (GoodnessParams, GoodnessTable, bad_mass_check, classify, compute_alpha,
                       distinct_goodness_check, nested_goodness_check, total_sequence_check)
from .graph import (Graph, common_neighborhood, generate, power_mean, r_norm_density,
                    star_hom_count, tensor_product)
from .homomorphism import (HomCounts, hom_count_blockdp, hom_count_brute, main_theorem_check,
                           sidorenko_gap, tensor_multiplicativity_check)
from .report import Check, Report

__version__ = "0.1.0"
