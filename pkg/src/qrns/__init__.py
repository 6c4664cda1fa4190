"""Reversible modulo-adder synthesis, residue-set selection, and
distributed noisy simulation of carry-free quantum addition."""

__version__ = "0.1.0"

from .adders import (
    AdderFamily,
    AdderInstance,
    Dim1Value,
    adder_instance,
    build_adder,
    build_for_modulus,
    build_full_adder,
    build_mod_pow2,
    build_mod_pow2_minus1,
    build_qdma,
    classical_mod_add,
    dim1_decode,
    dim1_encode,
    family_for_modulus,
    make_adder,
)
from .circuit import (
    Circuit,
    CircuitValidationError,
    Gate,
    GateKind,
    Register,
    apply_permutation,
    assert_valid,
    ccx,
    cx,
    from_text,
    to_text,
    validate,
    x,
)
from .distributed import (
    ComparisonRow,
    DistributedSum,
    JobResult,
    RangeOverflowError,
    ResidueJob,
    aggregate,
    distributed_add,
    execute_jobs,
    gain_report,
    plan_jobs,
)
from .noise import (
    DEFAULT_NOISE,
    CalibrationResult,
    NoiseModel,
    ProbabilityEstimate,
    RunSpec,
    calibrate_noise,
    derive_seed,
    output_probability,
    run_exact,
    run_shots,
)
from .resources import ResourceReport, resource_report
from .rns import (
    ResidueVector,
    RnsSet,
    crt_reconstruct,
    encode_residues,
    is_pairwise_coprime,
    rns_efficiency,
    rns_range,
)
from .select import (
    DepthSource,
    SelectionError,
    SelectionTrace,
    SelectorConfig,
    explain_selection,
    moduli_pool,
    select_rns,
    toffoli_depth_of,
)
