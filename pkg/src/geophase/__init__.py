"""Diagonal and off-diagonal geometric phase factors of parallel-transported eigenstates."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ComputationError,
    ConfigError,
    DegenerateOnPath,
    DegenerateSpectrum,
    GeophaseError,
    IndexOutOfRange,
    InvariantViolation,
    LostTrack,
    NoConvergence,
    NonHermitianInput,
    OrthogonalLink,
    UndefinedConstituent,
)
from .pathspace import FunctionPath, ParameterPath, Reparametrization, SampledPath, reparametrize, sample  # noqa: E402
from .permutation import (  # noqa: E402
    Permutation,
    classify,
    count_real_cases_oracle,
    detect_permutation,
    symmetry_permutation,
    table_for_n,
)
from .phases import (  # noqa: E402
    IndexCycle,
    PhaseFactor,
    decompose_indexes,
    gamma_cycle,
    gamma_diag,
    independence_rank,
    independent_set,
    reduce_to_independent,
    sigma,
    verify_identities,
)
from .spectral import EigenFrame, eigen_sorted, min_gap  # noqa: E402
from .transport import (  # noqa: E402
    TransportResult,
    TransportSettings,
    pancharatnam_product,
    parallel_transport,
    transport_adaptive,
)
