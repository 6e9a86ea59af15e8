"""Network simulation: register math, topologies, ansatzes, noise, execution."""

from .ansatz import (
    GateKind,
    GateSpec,
    MeasurementSpec,
    NetworkAnsatz,
    PreparationSpec,
    build_ansatz,
    gate_unitary,
    hardware_ansatz,
    optimal_settings,
    partially_classical_settings,
)
from .behavior import (
    Behavior,
    CorrelatorTable,
    NetworkSimulator,
    behavior_matrix,
    correlators,
    sample_shots,
)
from .channels import NoiseChannel, NoiseLocation, NoiseModel
from .network import Network, SettingsLayout, SettingsVector, build_network

__all__ = [
    "Behavior",
    "CorrelatorTable",
    "GateKind",
    "GateSpec",
    "MeasurementSpec",
    "Network",
    "NetworkAnsatz",
    "NetworkSimulator",
    "NoiseChannel",
    "NoiseLocation",
    "NoiseModel",
    "PreparationSpec",
    "SettingsLayout",
    "SettingsVector",
    "behavior_matrix",
    "build_ansatz",
    "build_network",
    "correlators",
    "gate_unitary",
    "hardware_ansatz",
    "optimal_settings",
    "partially_classical_settings",
    "sample_shots",
]
