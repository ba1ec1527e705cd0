"""State-vector quantum circuit simulator with in-place parallel
kernels, pluggable backends, a circuit-text frontend, Hamiltonian
time evolution, and variational algorithm drivers.

Conventions used throughout: qubit 0 is the most significant bit of
the basis index, rotations are exp(-i*theta/2 * P), global phase is
not tracked, and measurement never collapses the stored state.
"""

from . import backends, errors, kernels
from .backends import (
    Backend,
    DenseLift,
    KernelBackend,
    ReferenceBackend,
    active,
    apply_via_dense,
    backend,
    backend_names,
    lift_gate,
    register_backend,
    set_active,
    using,
)
from .circuit import Circuit, ExecutionResult, execute, sample
from .errors import ParseError, QsimError
from .evolution import (
    Schedule,
    adiabatic_evolve,
    exact_evolve,
    interpolated,
    optimize_schedule,
    pauli_term_gate,
    polynomial_schedule,
    time_evolve,
    trotter_circuit,
)
from .gates import (
    CATALOG,
    CNOT,
    CU1,
    CZ,
    GateSpec,
    H,
    I,
    RX,
    RY,
    RZ,
    S,
    SWAP,
    T,
    TOFFOLI,
    U1,
    U2,
    U3,
    Unitary,
    X,
    Y,
    Z,
    dagger,
    matrix_of,
    validate_unitary,
)
from .hamiltonians import (
    DenseHamiltonian,
    LocalHamiltonian,
    dense_from_local,
    expectation,
    from_text,
    maxcut,
    pauli_field,
    precoded,
    tfim,
    xxz,
)
from .kernels import set_worker_count, worker_count
from .models import (
    AavqeResult,
    AnsatzSpec,
    FalqonResult,
    QaoaResult,
    VqeResult,
    aavqe,
    falqon,
    grover,
    qaoa_circuit,
    qaoa_optimize,
    qft_circuit,
    success_probability,
    vqe,
)
from .optimizers import (
    MinimizeResult,
    OptimizerSpec,
    minimize,
    parameter_shift_gradient,
)
from .qasm import parse, serialize
from .state import (
    StateVector,
    allocation_count,
    from_amplitudes,
    load_state,
    max_qubits,
    overlap,
    plus_state,
    probabilities,
    random_state,
    reset_allocation_count,
    set_max_qubits,
    zero_state,
)

__version__ = "0.1.0"

__all__ = [
    "AavqeResult",
    "AnsatzSpec",
    "Backend",
    "CATALOG",
    "CNOT",
    "CU1",
    "CZ",
    "Circuit",
    "DenseHamiltonian",
    "DenseLift",
    "ExecutionResult",
    "FalqonResult",
    "GateSpec",
    "H",
    "I",
    "KernelBackend",
    "LocalHamiltonian",
    "MinimizeResult",
    "OptimizerSpec",
    "ParseError",
    "QaoaResult",
    "QsimError",
    "RX",
    "RY",
    "RZ",
    "ReferenceBackend",
    "S",
    "SWAP",
    "Schedule",
    "StateVector",
    "T",
    "TOFFOLI",
    "U1",
    "U2",
    "U3",
    "Unitary",
    "VqeResult",
    "X",
    "Y",
    "Z",
    "aavqe",
    "active",
    "adiabatic_evolve",
    "allocation_count",
    "apply_via_dense",
    "backend",
    "backend_names",
    "backends",
    "dagger",
    "dense_from_local",
    "errors",
    "exact_evolve",
    "execute",
    "expectation",
    "falqon",
    "from_amplitudes",
    "from_text",
    "grover",
    "interpolated",
    "kernels",
    "lift_gate",
    "load_state",
    "matrix_of",
    "max_qubits",
    "maxcut",
    "minimize",
    "optimize_schedule",
    "overlap",
    "parameter_shift_gradient",
    "parse",
    "pauli_field",
    "pauli_term_gate",
    "plus_state",
    "polynomial_schedule",
    "precoded",
    "probabilities",
    "qaoa_circuit",
    "qaoa_optimize",
    "qft_circuit",
    "random_state",
    "register_backend",
    "reset_allocation_count",
    "sample",
    "serialize",
    "set_active",
    "set_max_qubits",
    "set_worker_count",
    "success_probability",
    "tfim",
    "time_evolve",
    "trotter_circuit",
    "using",
    "validate_unitary",
    "vqe",
    "worker_count",
    "xxz",
    "zero_state",
]
