"""Hierarchical oscillator-network gait engine and deterministic
master/slave trajectory-streaming simulator for modular robots."""

__version__ = "0.1.0"

from .angles import (
    JOINT_COUNT,
    JOINT_LIMIT,
    clamp_joints,
    format_angle,
    parse_angle,
    wrap_angle,
    wrap_array,
)
from .coordination import (
    DEFAULT_GAMMA,
    PhaseMatrix,
    ResidualReport,
    SystemConfig,
    SystemState,
    assemble_phase_matrix,
    constraint_residuals,
    initial_system_state,
    random_system_state,
    residual_maxima,
    step_high_level,
    step_system,
)
from .errors import (
    BridgeError,
    CatalogError,
    DimensionError,
    ModbotError,
    NumericDivergenceError,
    ParameterError,
    PresetNotFoundError,
    RoutingError,
    WireFormatError,
)
from .gaits import (
    GaitPreset,
    ModuleGait,
    get_preset,
    list_presets,
    load_catalog,
    module_params,
    parse_catalog,
    scale_period,
    serialize_catalog,
    system_config,
    validate,
)
from .oscillators import (
    DEFAULT_A,
    DEFAULT_MU,
    CouplingOperators,
    NetworkState,
    OscillatorNetworkParams,
    PhasePull,
    amplitude_closed_form,
    build_coupling,
    build_difference_matrix,
    build_psi_map,
    compute_psi,
    coupling_operators,
    gap_residual,
    initial_state,
    network_potential,
    output,
    output_clamped,
    phase_rates,
    potential,
    random_state,
    step,
)
from .simulation import (
    NetworkedSimulation,
    RunConfig,
    RunResult,
    run,
    run_direct,
    run_networked,
)

__all__ = [
    "JOINT_COUNT",
    "JOINT_LIMIT",
    "DEFAULT_A",
    "DEFAULT_GAMMA",
    "DEFAULT_MU",
    "BridgeError",
    "CatalogError",
    "CouplingOperators",
    "DimensionError",
    "GaitPreset",
    "ModbotError",
    "ModuleGait",
    "NetworkState",
    "NetworkedSimulation",
    "NumericDivergenceError",
    "OscillatorNetworkParams",
    "ParameterError",
    "PhaseMatrix",
    "PhasePull",
    "PresetNotFoundError",
    "ResidualReport",
    "RoutingError",
    "RunConfig",
    "RunResult",
    "SystemConfig",
    "SystemState",
    "WireFormatError",
    "amplitude_closed_form",
    "assemble_phase_matrix",
    "build_coupling",
    "build_difference_matrix",
    "build_psi_map",
    "clamp_joints",
    "compute_psi",
    "constraint_residuals",
    "coupling_operators",
    "format_angle",
    "gap_residual",
    "get_preset",
    "initial_state",
    "initial_system_state",
    "list_presets",
    "load_catalog",
    "module_params",
    "network_potential",
    "output",
    "output_clamped",
    "parse_angle",
    "parse_catalog",
    "phase_rates",
    "potential",
    "random_state",
    "random_system_state",
    "residual_maxima",
    "run",
    "run_direct",
    "run_networked",
    "scale_period",
    "serialize_catalog",
    "step",
    "step_high_level",
    "step_system",
    "system_config",
    "validate",
    "wrap_angle",
    "wrap_array",
]
