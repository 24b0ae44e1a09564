"""Parity-time and rotation-time symmetry of driven gain/loss bosonic pairs."""
from ._accel import USE_NUMBA, backend_name
from .fock import (
    FockSpace,
    Operator,
    SpaceMismatchError,
    annihilation_op,
    creation_op,
    identity_op,
    make_space,
    number_op,
)
from .hamiltonians import (
    Detuning,
    DriveH1,
    DrivePhased,
    GainLoss,
    HamiltonianSpec,
    LinearCoupling,
    TableTerm,
    assemble,
    build_h1,
    build_h2,
    build_h3,
    build_table_term,
)
from .spectral import (
    SpectrumClass,
    analytic_spectrum,
    classify_spectrum,
    coalescence_measure,
    eigenspectrum,
    locate_ep,
    splitting_law,
)
from .symmetry import (
    AntiunitarySpec,
    antiunitary_transform,
    classify_state_symmetry,
    exchange_op,
    find_rt_angle,
    is_symmetric,
    parity_op,
    pt_spec,
    rotation_op,
    rt_spec,
)

__version__ = "0.1.0"
