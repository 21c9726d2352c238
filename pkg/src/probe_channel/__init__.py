"""Predict the action of a quantum channel on any input from one tomographed probe state."""

from .bases import WeylBasis, weyl_basis, weyl_unitary
from .channels import (
    KrausChannel,
    apply,
    apply_one_sided,
    apply_two_sided,
    random_channel,
    random_subchannel,
    standard_channel,
)
from .errors import (
    DegenerateEstimateError,
    DimensionError,
    HermiticityError,
    IncompleteSettingsError,
    ParamError,
    ProbeChannelError,
    RankError,
    UnitarityError,
    ZeroProbabilityError,
)
from .linalg import (
    DensityMatrix,
    matrix_to_vec,
    partial_trace,
    project_psd,
    swap_operator,
    tensor,
    trace_distance,
    vec_to_matrix,
)
from .probe import ProbeState, maximally_entangled_probe, probe_from_matrix, probe_vector, random_probe
from .reconstruct import (
    NormalizationReport,
    ProbeOutput,
    Source,
    apply_choi,
    choi_from_probe_output,
    eq4_literal,
    exact_probe_output,
    reconstruct_bipartite,
    reconstruct_composite,
    reconstruct_single,
)
from .tomography import TomographyEstimate, linear_inversion, measurement_settings, sample_expectations, tomograph

__version__ = "0.1.0"
