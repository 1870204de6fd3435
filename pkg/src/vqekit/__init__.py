"""vqekit: molecular VQE toolkit with dense and MPS simulation backends."""

from .circuit import (
    Circuit,
    Gate,
    bind,
    count_resources,
    hardware_efficient_ansatz,
    pauli_evolution,
    to_qasm,
    uccsd_ansatz,
)
from .engine import (
    MPSBackend,
    StateVectorBackend,
    adapt_vqe,
    expectation_parallel,
    parameter_shift_gradient,
    plan_partition,
    uccsd_pool,
    vqd_excited,
    vqe_minimize,
)
from .fermion import (
    FermionSum,
    MolecularIntegrals,
    build_hamiltonian,
    hf_reference,
    jordan_wigner,
    load_fcidump,
    rotate_orbitals,
)
from .pauli import PauliString, PauliSum, PauliTerm, commutes, multiply

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "Gate",
    "bind",
    "count_resources",
    "hardware_efficient_ansatz",
    "pauli_evolution",
    "to_qasm",
    "uccsd_ansatz",
    "MPSBackend",
    "StateVectorBackend",
    "adapt_vqe",
    "expectation_parallel",
    "parameter_shift_gradient",
    "plan_partition",
    "uccsd_pool",
    "vqd_excited",
    "vqe_minimize",
    "FermionSum",
    "MolecularIntegrals",
    "build_hamiltonian",
    "hf_reference",
    "jordan_wigner",
    "load_fcidump",
    "rotate_orbitals",
    "PauliString",
    "PauliSum",
    "PauliTerm",
    "commutes",
    "multiply",
    "__version__",
]
