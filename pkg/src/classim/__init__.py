"""Classical invasive descriptions of two-time measurement-and-prepare statistics."""

from .classicality import (
    CONDITIONS,
    Classification,
    HiddenReconstruction,
    TwoTimeStatistics,
    Verdict,
    check_conditions,
    imm_from_preparation_data,
    reconstruct_hidden,
)
from .errors import (
    ClassimError,
    ConstructionRefusedError,
    InternalInconsistencyError,
    MalformedInputError,
    NotInformationallyCompleteError,
    SamplingError,
    SingularFrameError,
    UsageError,
)
from .model import (
    ContextualJoint,
    EmpiricalStatistics,
    OpenSystemModel,
    build_contextual_joint,
    construct_model,
    evaluate_model,
    sample_trajectories,
)
from .tensors import CondTable, ImmMatrix, ProbVector, invert_imm, marginalize, validate_distribution

__version__ = "0.1.0"
