"""Multi-time measurement statistics of bounded-memory classical and quantum
systems: probability engines, model constructions, channel reductions and a
gradient-ascent optimizer, served over HTTP with a thin CLI client."""

from .models import (
    DEFAULT_TOL,
    ClassicalModel,
    ConstraintCheck,
    DataIntegrityError,
    DegenerateParamsError,
    EBChannel,
    Instrument,
    NonCommutingError,
    QuantumModel,
    ResourceLimitError,
    StructureError,
    ValidationReport,
    choi_matrix,
    validate_channel,
    validate_classical,
    validate_quantum,
)
from .engine import (
    Distribution,
    apply_channel,
    classical_sequence_prob,
    effective_classical_model,
    full_distribution,
    quantum_sequence_prob,
)
from .constructions import (
    ETFFrame,
    cyclic_deterministic,
    deterministic_complexity,
    diagonal_quantum_from_classical,
    etf_quantum_model,
    etf_states,
    one_tick,
    one_way_classical,
)
from .classicality import (
    ReductionResult,
    commute_check,
    reduce_channel,
    reduce_commuting_povm,
    reduce_commuting_states,
    simultaneous_eigenbasis,
)
from .optimize import (
    AdamConfig,
    ClassicalOptResult,
    ClassicalParams,
    QuantumOptResult,
    QuantumParams,
    adam_maximize,
    ci_config,
    classical_maximize,
    decode_classical,
    decode_quantum,
    gradient,
    objective,
    run_log_csv,
)
from .builtin_models import BuiltinModel, BuiltinReport, load_builtin, verify_builtin
from .serialize import load_model, model_from_dict, model_to_dict, save_model

__version__ = "0.1.0"

__all__ = [
    "AdamConfig",
    "BuiltinModel",
    "BuiltinReport",
    "ClassicalModel",
    "ClassicalOptResult",
    "ClassicalParams",
    "ConstraintCheck",
    "DataIntegrityError",
    "DEFAULT_TOL",
    "DegenerateParamsError",
    "Distribution",
    "EBChannel",
    "ETFFrame",
    "Instrument",
    "NonCommutingError",
    "QuantumModel",
    "QuantumOptResult",
    "QuantumParams",
    "ReductionResult",
    "ResourceLimitError",
    "StructureError",
    "ValidationReport",
    "adam_maximize",
    "apply_channel",
    "choi_matrix",
    "ci_config",
    "classical_maximize",
    "classical_sequence_prob",
    "commute_check",
    "cyclic_deterministic",
    "decode_classical",
    "decode_quantum",
    "deterministic_complexity",
    "diagonal_quantum_from_classical",
    "effective_classical_model",
    "etf_quantum_model",
    "etf_states",
    "full_distribution",
    "gradient",
    "load_builtin",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "objective",
    "one_tick",
    "one_way_classical",
    "quantum_sequence_prob",
    "reduce_channel",
    "reduce_commuting_povm",
    "reduce_commuting_states",
    "run_log_csv",
    "save_model",
    "simultaneous_eigenbasis",
    "validate_channel",
    "validate_classical",
    "validate_quantum",
    "verify_builtin",
]
