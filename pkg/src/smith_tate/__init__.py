"""Exact Z/pZ-equivariant cohomology of filtered cochain complexes over F_p.

The package computes, with no floating point anywhere: group and Tate
cohomology of finite equivariant complexes, the p-power map into the
p-fold tensor power, Jordan block structure of order-p operators and the
fixed-point dimension chain, action and algebraic spectral sequences,
persistence barcodes with the single-vs-p-th-iterate comparison and
torsion detection, and the local Morse constants.  The cli module exposes
all of it as the smith-tate command.
"""

from .complexes import (
    ActionWindow,
    ChainComplex,
    EquivariantComplex,
    FilteredComplex,
    Generator,
    ValidationReport,
    complex_from_json,
    complex_to_json,
    invariants_coinvariants,
    tensor_power,
    window_truncate,
)
from .errors import (
    EmptyBarcode,
    FiltrationViolation,
    InadmissibleWindow,
    InvalidComplex,
    MalformedInput,
    NotChainMap,
    NotEquivariant,
    NotNilpotent,
    NotOrderP,
    NotPrime,
    NotSquareZero,
    SmithTateError,
    SpectralEndpoint,
    UnknownCommand,
    UnknownProperty,
)
from .fp_core import (
    FpMatrix,
    FpScalar,
    RrefResult,
    check_prime,
    is_prime,
    kernel_basis,
    nilpotent_partition,
    rank,
    rref,
    solve,
    solve_in_span,
)
from .module_decomp import (
    ChainReport,
    ModuleDecomposition,
    decompose,
    smith_chain_check,
    tate_and_invariant_dims,
)
from .morse_bzp import (
    CriticalPoint,
    EulerConstant,
    enumerate_critical_points,
    local_euler_constant,
    resolution_homology,
    wilson_constant,
)
from .persistence import (
    Bar,
    Barcode,
    BarStats,
    SmithBarcodeReport,
    bar_stats,
    barcode_from_filtered,
    barcode_from_json,
    barcode_to_json,
    finite_bar_count_at,
    gamma_beta_check,
    generate_iterated_barcode,
    scale_barcode,
    smith_barcode_check,
    torsion_witness,
    window_dim,
)
from .ratfun import RatFun, bareiss_rank, poly_matrix_rank, poly_matrix_ranks, ratfun_rank
from .spectral import (
    AlgebraicSSPages,
    EquivariantFloerModel,
    PageData,
    SpectralSequencePages,
    action_ss_pages,
    algebraic_ss_pages,
    model_from_json,
    model_to_json,
)
from .tate import (
    AdditivityCertificate,
    QuasiFrobeniusResult,
    RpElement,
    TateComplexView,
    group_cohomology_dims,
    mapping_cone,
    quasi_frobenius,
    tate_cohomology_dims,
)

__all__ = [
    "ActionWindow",
    "AdditivityCertificate",
    "AlgebraicSSPages",
    "Bar",
    "Barcode",
    "BarStats",
    "ChainComplex",
    "ChainReport",
    "CriticalPoint",
    "EmptyBarcode",
    "EquivariantComplex",
    "EquivariantFloerModel",
    "EulerConstant",
    "FilteredComplex",
    "FiltrationViolation",
    "FpMatrix",
    "FpScalar",
    "Generator",
    "InadmissibleWindow",
    "InvalidComplex",
    "MalformedInput",
    "ModuleDecomposition",
    "NotChainMap",
    "NotEquivariant",
    "NotNilpotent",
    "NotOrderP",
    "NotPrime",
    "NotSquareZero",
    "PageData",
    "QuasiFrobeniusResult",
    "RatFun",
    "RpElement",
    "RrefResult",
    "SmithBarcodeReport",
    "SmithTateError",
    "SpectralEndpoint",
    "SpectralSequencePages",
    "TateComplexView",
    "UnknownCommand",
    "UnknownProperty",
    "ValidationReport",
    "action_ss_pages",
    "algebraic_ss_pages",
    "bar_stats",
    "barcode_from_filtered",
    "barcode_from_json",
    "barcode_to_json",
    "bareiss_rank",
    "check_prime",
    "complex_from_json",
    "complex_to_json",
    "decompose",
    "enumerate_critical_points",
    "finite_bar_count_at",
    "gamma_beta_check",
    "generate_iterated_barcode",
    "group_cohomology_dims",
    "invariants_coinvariants",
    "is_prime",
    "kernel_basis",
    "local_euler_constant",
    "mapping_cone",
    "model_from_json",
    "model_to_json",
    "nilpotent_partition",
    "poly_matrix_rank",
    "poly_matrix_ranks",
    "quasi_frobenius",
    "rank",
    "ratfun_rank",
    "resolution_homology",
    "rref",
    "scale_barcode",
    "smith_barcode_check",
    "smith_chain_check",
    "solve",
    "solve_in_span",
    "tate_and_invariant_dims",
    "tate_cohomology_dims",
    "tensor_power",
    "torsion_witness",
    "wilson_constant",
    "window_dim",
    "window_truncate",
]
