"""MSR array codes with simultaneous multi-node repair and Byzantine-helper correction."""

from .errors import (
    DecodingAmbiguityError,
    FieldError,
    IntegrityError,
    MSRError,
    ParameterError,
    SingularMatrixError,
)
from .factory import build_code, default_field
from .gf import GF, FieldElement, binary_field, field_new, parse_field, prime_field, primitive_element
from .harness import AdversaryPolicy, Cluster, audit_bounds, compare_table, corrupt_helpers, simulate_repair
from .linop import StructuredOperator, apply, block_vandermonde_solve, diff_solve, power
from .mdscore import ArrayCode, CodeParams, validate
from .msr_diag import DiagCode, build_diag
from .msr_perm import PermCode, build_perm, gamma_set
from .transcript import RepairTranscript

__version__ = "0.1.0"

__all__ = [
    "AdversaryPolicy",
    "ArrayCode",
    "Cluster",
    "CodeParams",
    "DecodingAmbiguityError",
    "DiagCode",
    "FieldElement",
    "FieldError",
    "GF",
    "IntegrityError",
    "MSRError",
    "ParameterError",
    "PermCode",
    "RepairTranscript",
    "SingularMatrixError",
    "StructuredOperator",
    "apply",
    "audit_bounds",
    "binary_field",
    "block_vandermonde_solve",
    "build_code",
    "build_diag",
    "build_perm",
    "compare_table",
    "corrupt_helpers",
    "default_field",
    "diff_solve",
    "field_new",
    "gamma_set",
    "parse_field",
    "power",
    "prime_field",
    "primitive_element",
    "simulate_repair",
    "validate",
]
