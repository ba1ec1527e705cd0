"""Backend abstraction: a registry plus two implementations.

* "reference": dense full-matrix contraction. Builds the 2^n x 2^n lift
  of every gate and multiplies. Deliberately not in place, capped at 12
  qubits; exists as the correctness oracle, not for scale.
* "kernel": the in-place parallel kernels; the default.

Both expose the same minimal method set (initial state, gate
application, probabilities, sampling, expectation) so everything above
this layer is backend-agnostic.
"""

from __future__ import annotations

import contextlib
import os
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    BackendConflictError,
    BackendNotFoundError,
    CapacityError,
)
from .state import StateVector, zero_state

# dense lifts above this size would need > 256 MiB per gate
REFERENCE_MAX_QUBITS = 12


@dataclass(frozen=True)
class DenseLift:
    """Full-space matrix form of one gate."""

    n: int
    matrix: np.ndarray


def lift_gate(g, n):
    """Build the 2^n x 2^n matrix acting as g.matrix on g.targets,
    identity elsewhere, with controls folded in as block identity."""
    if n > REFERENCE_MAX_QUBITS:
        raise CapacityError(
            f"dense lift limited to {REFERENCE_MAX_QUBITS} qubits, got {n}"
        )
    g.on_range(n)
    dim = 1 << n
    m = len(g.targets)
    tpos = [n - 1 - q for q in g.targets]  # bit position per target
    cmask = 0
    for q in g.controls:
        cmask |= 1 << (n - 1 - q)
    tmask = 0
    for p in tpos:
        tmask |= 1 << p
    out = np.zeros((dim, dim), dtype=np.complex128)
    gm = g.matrix
    for col in range(dim):
        if (col & cmask) != cmask:
            out[col, col] = 1.0
            continue
        tau = 0
        for j, p in enumerate(tpos):
            tau |= ((col >> p) & 1) << (m - 1 - j)
        base = col & ~tmask
        for tau2 in range(1 << m):
            row = base
            for j, p in enumerate(tpos):
                row |= ((tau2 >> (m - 1 - j)) & 1) << p
            out[row, col] = gm[tau2, tau]
    return DenseLift(n, out)


def apply_via_dense(state, g):
    """Reference-semantics gate application: returns a new state equal
    to lift_gate(g, n).matrix @ state."""
    lift = lift_gate(g, state.n_qubits)
    return StateVector(state.n_qubits, lift.matrix @ state.amplitudes)


class Backend(ABC):
    """Minimal backend method set; capability flags, not subclasses,
    distinguish the implementations."""

    name: str
    supports_parallel: bool = False
    is_reference: bool = False

    @abstractmethod
    def zero_state(self, n):
        """Fresh |0...0> the backend can evolve."""

    @abstractmethod
    def apply_gate(self, state, gate):
        """Apply one GateSpec; returns the evolved state (which may or
        may not be the same object as the input)."""

    def probabilities(self, state, qubits=None):
        return state.probabilities(qubits)

    def sample(self, probs, nshots, seed=None):
        from .circuit import sample

        return sample(probs, nshots, seed)

    @abstractmethod
    def expectation(self, state, observable):
        """Real <state| observable |state>."""

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r}>"


class ReferenceBackend(Backend):
    """Dense-contraction oracle; ≤ 12 qubits, allocates per gate."""

    name = "reference"
    supports_parallel = False
    is_reference = True

    def zero_state(self, n):
        if n > REFERENCE_MAX_QUBITS:
            raise CapacityError(
                f"reference backend limited to {REFERENCE_MAX_QUBITS} "
                f"qubits, got {n}"
            )
        return zero_state(n)

    def apply_gate(self, state, gate):
        return apply_via_dense(state, gate)

    def expectation(self, state, observable):
        from .hamiltonians import dense_matrix_of

        m = dense_matrix_of(observable, state.n_qubits)
        val = complex(np.vdot(state.amplitudes, m @ state.amplitudes))
        return float(val.real)


class KernelBackend(Backend):
    """In-place parallel kernels; the production path."""

    name = "kernel"
    supports_parallel = True
    is_reference = False

    def zero_state(self, n):
        return zero_state(n)

    def apply_gate(self, state, gate):
        return kernels.apply_gate_spec(state, gate)

    def expectation(self, state, observable):
        from .hamiltonians import expectation

        return expectation(state, observable)


_registry = {}
_lock = threading.Lock()
_active_name = None  # resolved lazily so the environment override is honored

ENV_VAR = "QSIM_BACKEND"
DEFAULT_BACKEND = "kernel"


def register_backend(backend):
    with _lock:
        if backend.name in _registry:
            raise BackendConflictError(
                f"backend {backend.name!r} is already registered"
            )
        _registry[backend.name] = backend
    return backend


def backend(name):
    try:
        return _registry[name]
    except KeyError:
        known = ", ".join(sorted(_registry))
        raise BackendNotFoundError(
            f"no backend named {name!r} (known: {known})"
        ) from None


def backend_names():
    return sorted(_registry)


def set_active(name):
    global _active_name
    b = backend(name)
    with _lock:
        _active_name = name
    return b


def active():
    """The active backend; first call resolves QSIM_BACKEND (default
    "kernel")."""
    global _active_name
    if _active_name is None:
        set_active(os.environ.get(ENV_VAR, DEFAULT_BACKEND))
    return _registry[_active_name]


@contextlib.contextmanager
def using(name):
    """Scoped backend override (tests, cross-checks)."""
    previous = active().name
    set_active(name)
    try:
        yield _registry[name]
    finally:
        set_active(previous)


register_backend(ReferenceBackend())
register_backend(KernelBackend())
