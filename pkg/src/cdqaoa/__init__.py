"""cdqaoa: counterdiabatic-QAOA vs QAOA simulation and benchmarking toolkit."""

__version__ = "0.1.0"

from .pauli import PauliString, PauliSum, OperatorPool, multiply, commutator, agp_pool, to_dense
from .models import (
    IsingChain, MaxCut, SK, PSpin, ModelTriple, CdOperator, GroundEnergy,
    build, classical_energy, cut_value, ground_energy, random_instance,
    random_maxcut_3_regular, random_sk,
    default_cd_operator, make_cd_operator, lfim, tfim, ghz_chain,
)
from .sim import StateVector, init_plus, apply_pauli_rotation, apply_diagonal_phase, expectation, probabilities
from .ansatz import AnsatzSpec, ParameterVector, run, depth, parameter_count
from .opt import OptimizerConfig, Trajectory, cost, approximation_ratio, gradient, optimize

__all__ = [
    "PauliString", "PauliSum", "OperatorPool", "multiply", "commutator",
    "agp_pool", "to_dense",
    "IsingChain", "MaxCut", "SK", "PSpin", "ModelTriple", "CdOperator",
    "GroundEnergy", "build", "classical_energy", "cut_value", "ground_energy",
    "random_instance", "random_maxcut_3_regular", "random_sk",
    "default_cd_operator", "make_cd_operator", "lfim", "tfim", "ghz_chain",
    "StateVector", "init_plus", "apply_pauli_rotation", "apply_diagonal_phase",
    "expectation", "probabilities",
    "AnsatzSpec", "ParameterVector", "run", "depth", "parameter_count",
    "OptimizerConfig", "Trajectory", "cost", "approximation_ratio",
    "gradient", "optimize",
]
