"""Second-quantized simulation of identical bosons and fermions in linear optics."""

from .dynamics import (
    CoarseGraining,
    DensityMatrix,
    FixedPointReport,
    ProbabilityVector,
    TransferMatrix,
    competing_channel_fixed_point,
    convergence_trace,
    dephase,
    derive_transfer_matrix,
    iterate_map,
    measurement_collapse,
    mixing_profile,
    same_vs_different,
    steady_state,
)
from .errors import (
    DimensionMismatchError,
    FockStatError,
    IncompletePartitionError,
    InvalidArgumentError,
    NonUniqueSteadyStateError,
    NonUnitaryError,
    NumericalContractError,
    PauliExclusionError,
    TotalMismatchError,
    UndefinedRatioError,
)
from .fock import (
    FockVector,
    OccupationVector,
    ParticleKind,
    enumerate_basis,
    fock_from_single_modes,
    inner_product,
)
from .kernels import amplitude_submatrix, determinant, permanent
from .optics import (
    BeamsplitterSpec,
    SingleParticleUnitary,
    beamsplitter,
    bunching_enhancement,
    evolve,
    fourier_unitary,
    hom_distribution,
    lifted_matrix,
    pauli_amplitude_is_zero,
    phase_unitary,
    random_unitary,
    transition_amplitude,
)

__version__ = "0.1.0"
