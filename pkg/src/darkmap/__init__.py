"""Dark states of multilevel systems by dressing and coupling-matrix rank analysis."""

from .catalog import (
    CatalogEntry,
    DspParams,
    ExpectedDark,
    analytic_lambda_chain_dark,
    dsp_coupling_matrix,
    dsp_dark_polariton,
    gen_dsp,
    gen_five_level,
    gen_four_level,
    gen_nlevel,
    gen_three_level,
)
from .darkstate import (
    BlockAnalysis,
    DarkStateReport,
    ProportionalColumns,
    analyze,
    null_space,
    recursive_bright_dark,
    subspace_distance,
    to_bare_basis,
)
from .dressing import DressedSystem, Tolerances, dress, group_degenerate, hermitian_eigendecompose
from .partition import BlockHamiltonian, Partition, assemble_full, partition
from .pipeline import Analysis, run, run_entry
from .system_model import (
    RotatingHamiltonian,
    SystemSpec,
    Transition,
    parse_system,
    to_rotating_frame,
    validate_loop_resonance,
)
from .verifier import VerificationResult, decoupling_residual, evolve, leakage_scan, verify

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
