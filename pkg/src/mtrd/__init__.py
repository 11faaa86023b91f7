"""Rate-region bounds for two separately encoded correlated sources.

Library layout:

- ``probability``: named-axis tensors, conditionals, i.i.d. extensions,
  information measures in bits
- ``spectral``: marginal-normalized joint matrices, singular spectra, the
  chain singular-value inequality
- ``feasibility``: membership tests for the candidate-channel sets
- ``regions``: weighted-rate search, region tracing, nesting comparison
- ``oracles``: brute-force and constructive cross-checks
- ``cli``: the ``mtrd`` command
"""

__version__ = "0.1.0"

from ._core import HAVE_COMPILED, backend_name
from .feasibility import (
    AuxChannel,
    MembershipReport,
    in_intersection,
    in_s_in,
    in_s_out1,
    in_s_out3,
    markov_defect,
    membership,
    product_channel,
)
from .probability import (
    Kernel,
    ProbTensor,
    SourceModel,
    conditional,
    conditional_entropy,
    dsbs,
    entropy,
    hamming,
    iid_extend,
    join,
    marginal,
    mutual_information,
    source_from_config,
    source_to_config,
    tensor_from_config,
    tensor_to_config,
)
from .regions import (
    OperatingPoint,
    RegionBoundary,
    compare_regions,
    minimize_weighted_rate,
    optimal_decoders,
    rate_vertices,
    sample_channel,
    trace_region,
)
from .spectral import (
    Spectrum,
    TildeMatrix,
    dpi_check,
    joint_spectrum,
    kronecker_tilde,
    maximal_correlation,
    singular_spectrum,
    tilde,
)

__all__ = [
    "__version__",
    "HAVE_COMPILED",
    "backend_name",
    "AuxChannel",
    "MembershipReport",
    "in_intersection",
    "in_s_in",
    "in_s_out1",
    "in_s_out3",
    "markov_defect",
    "membership",
    "product_channel",
    "Kernel",
    "ProbTensor",
    "SourceModel",
    "conditional",
    "conditional_entropy",
    "dsbs",
    "entropy",
    "hamming",
    "iid_extend",
    "join",
    "marginal",
    "mutual_information",
    "source_from_config",
    "source_to_config",
    "tensor_from_config",
    "tensor_to_config",
    "OperatingPoint",
    "RegionBoundary",
    "compare_regions",
    "minimize_weighted_rate",
    "optimal_decoders",
    "rate_vertices",
    "sample_channel",
    "trace_region",
    "Spectrum",
    "TildeMatrix",
    "dpi_check",
    "joint_spectrum",
    "kronecker_tilde",
    "maximal_correlation",
    "singular_spectrum",
    "tilde",
]
