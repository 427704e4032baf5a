"""Selected CI driven by simulated stochastic Hamiltonian time evolution.

Pipeline: FCIDUMP integrals -> fermion-to-qubit mapping -> randomized
product-formula circuits on a statevector backend -> measured orbital
occupancies steering symmetry-preserved configuration sampling ->
sparse diagonalization, second-order correction, and zero-correction
extrapolation, with exact/heatbath/perturbative-selection baselines.
"""

from .determinants import (
    ALPHA,
    BETA,
    Determinant,
    ExcitationInfo,
    apply_excitation,
    enumerate_connected,
    enumerate_sector,
    excitation_between,
    from_bitstring,
    hartree_fock,
    sector_dimension,
    to_bitstring,
)
from .eigensolver import EigenResult, davidson_lowest
from .errors import (
    BitstringFormatError,
    CapabilityError,
    CheckpointError,
    ConvergenceError,
    DimensionError,
    FcidumpParseError,
    InvalidExcitationError,
    QsciError,
)
from .evolution_sim import (
    MeasurementSet,
    QDriftCircuit,
    apply_pauli_rotation,
    evolve_and_measure,
    measure_indices,
    prepare_reference,
    qdrift_length,
    run_circuit,
    sample_qdrift,
)
from .integrals import IntegralStore, dump_fcidump, load_fcidump, parse_fcidump, write_fcidump
from .baselines import BaselineResult, cipsi_run, dim_at_threshold, fci_solve, hci_run
from .pt2 import ExtrapolationResult, Pt2Result, epstein_nesbet_pt2, extrapolate_pt2
from .pipeline import RunConfig, pec_scan, run_pipeline
from .qubit_hamiltonian import (
    PauliSum,
    PauliTerm,
    expectation,
    jordan_wigner,
    l1_norm,
    sector_matrix,
)
from .sampler import (
    OccupancyDistribution,
    SamplerConfig,
    SubspaceState,
    expand_round,
    harvest_valid,
    occupancy_distribution,
    propose_candidates,
    run_qsci,
    screen_candidates,
)
from .slater_condon import (
    InteractionMatrix,
    build_interaction_matrix,
    diagonal_element,
    extend_interaction_matrix,
    matrix_element,
)

__version__ = "0.1.0"
