"""Precoded circuits and algorithms: QFT, Grover, variational layers,
VQE, QAOA, FALQON, AAVQE."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .circuit import Circuit
from .errors import (
    ArityError,
    DimensionError,
    InvalidSizeError,
    InvalidOracleError,
    MonotonicityWarning,
    NumericalError,
    StepSizeError,
)
from .evolution import pauli_term_gate
from .gates import CU1, CZ, H, RX, RY, SWAP, X, Z
from .hamiltonians import (
    DenseHamiltonian,
    LocalHamiltonian,
    dense_matrix_of,
    expectation,
    pauli_field,
)
from .state import plus_state


def qft_circuit(n, with_swaps=True):
    """Quantum Fourier transform: H plus CU1(pi/2^k) cascades, then the
    bit-reversal swap network, giving <j|QFT|k> = e^{2 pi i jk/2^n}/2^{n/2}."""
    circuit = Circuit(n)
    for j in range(n):
        circuit.add(H(j))
        for k in range(j + 1, n):
            circuit.add(CU1(k, j, np.pi / float(2 ** (k - j))))
    if with_swaps:
        for j in range(n // 2):
            circuit.add(SWAP(j, n - 1 - j))
    return circuit


def _phase_flip_on(circuit, n, index):
    # flip the sign of exactly one basis state: conjugate a fully
    # controlled Z by X on the zero bits of the index
    zero_bits = [q for q in range(n) if not (index >> (n - 1 - q)) & 1]
    for q in zero_bits:
        circuit.add(X(q))
    if n == 1:
        circuit.add(Z(0))
    else:
        circuit.add(Z(n - 1).controlled_by(*range(n - 1)))
    for q in zero_bits:
        circuit.add(X(q))


def grover(n, marked, iterations=None):
    """Amplitude amplification toward ``marked`` basis indices.

    Returns (circuit, predicted success probability) with the phase
    oracle built directly from the marked list and the diffusion step
    as H^n X^n (controlled-Z) X^n H^n. Default iteration count is
    floor((pi/4) sqrt(N/M)); the prediction is sin^2((2r+1) asin
    sqrt(M/N)).
    """
    size = 1 << n
    marked = sorted({int(m) for m in marked})
    if not marked or len(marked) >= size:
        raise InvalidOracleError(
            f"marked set must be a proper nonempty subset of [0, {size})"
        )
    for m in marked:
        if not 0 <= m < size:
            raise InvalidOracleError(
                f"marked index {m} out of range for {n} qubits"
            )
    theta = float(np.arcsin(np.sqrt(len(marked) / size)))
    if iterations is None:
        iterations = int(np.floor(np.pi / 4.0 * np.sqrt(size / len(marked))))
    iterations = int(iterations)
    if iterations < 0:
        raise InvalidOracleError(f"iteration count {iterations} is negative")
    predicted = float(np.sin((2 * iterations + 1) * theta) ** 2)
    circuit = Circuit(n)
    for q in range(n):
        circuit.add(H(q))
    for _ in range(iterations):
        for m in marked:
            _phase_flip_on(circuit, n, m)
        for q in range(n):
            circuit.add(H(q))
        _phase_flip_on(circuit, n, 0)
        for q in range(n):
            circuit.add(H(q))
    return circuit, predicted


def success_probability(result, marked):
    """Total probability of the marked indices in an execution result."""
    probs = result.probabilities
    return float(sum(probs[m] for m in marked))


@dataclass(frozen=True)
class AnsatzSpec:
    """Hardware-style layered ansatz: per layer, RY on every qubit then
    a brickwork slice of the nearest-neighbor CZ ring (even bonds on
    even layers, odd bonds — including the n-1..0 wrap for n > 2 — on
    odd layers), with one extra RY layer at the end; n*(depth+1)
    parameters. Alternating the bond pattern matters: applying every
    ring bond in every layer leaves the circuit unable to reach some
    real ground states regardless of depth.
    """

    n_qubits: int
    depth: int

    def __post_init__(self):
        if self.n_qubits < 1 or self.depth < 1:
            raise InvalidSizeError(
                f"ansatz needs n_qubits >= 1 and depth >= 1, got "
                f"({self.n_qubits}, {self.depth})"
            )

    @property
    def n_parameters(self):
        return self.n_qubits * (self.depth + 1)

    def entangling_bonds(self, layer):
        n = self.n_qubits
        if n < 2:
            return []
        if n == 2:
            return [(0, 1)]
        return [
            (q, (q + 1) % n) for q in range(n) if q % 2 == layer % 2
        ]

    def circuit(self, params=None):
        n = self.n_qubits
        c = Circuit(n)
        for layer in range(self.depth):
            for q in range(n):
                c.add(RY(q, 0.0))
            for a, b in self.entangling_bonds(layer):
                c.add(CZ(a, b))
        for q in range(n):
            c.add(RY(q, 0.0))
        if params is not None:
            c.set_parameters(params)
        return c


class VqeResult(NamedTuple):
    energy: float
    params: np.ndarray
    evaluations: int
    converged: bool


def vqe(h, ansatz, spec=None, theta0=None):
    """Minimize <psi(theta)|H|psi(theta)> over the ansatz parameters."""
    from .optimizers import OptimizerSpec, minimize

    if spec is None:
        spec = OptimizerSpec()
    circuit = ansatz.circuit()
    if theta0 is None:
        rng = np.random.Generator(
            np.random.PCG64(0 if spec.seed is None else spec.seed)
        )
        # full-period spread: angle parameters have no preferred origin
        theta0 = rng.uniform(-np.pi, np.pi, ansatz.n_parameters)
    theta0 = np.asarray(theta0, dtype=np.float64).ravel()
    if theta0.size != ansatz.n_parameters:
        raise ArityError(
            f"ansatz takes {ansatz.n_parameters} parameters, "
            f"theta0 has {theta0.size}"
        )

    def objective(theta):
        circuit.set_parameters(theta)
        result = circuit.execute()
        return expectation(result.final_state, h)

    res = minimize(objective, theta0, spec)
    return VqeResult(res.fun, res.x, res.evaluations, res.converged)


def _mixer_gates(mixer, beta):
    gates = []
    for index, (coeff, string) in enumerate(mixer.terms):
        support = mixer.support(index)
        if len(support) == 1 and string[support[0]] == "X":
            gates.append(RX(support[0], 2.0 * beta * coeff))
        else:
            gates.append(pauli_term_gate(coeff * beta, string, support))
    return gates


def qaoa_circuit(h_problem, p, params, mixer=None):
    """|+...+> followed by p alternating layers exp(-i gamma_k H_p) then
    exp(-i beta_k H_m); params interleave as [g1, b1, ..., gp, bp].

    Problem-term exponentials are exact (diagonal terms commute); the
    default mixer sum-of-X turns into RX(2 beta) rotations.
    """
    if p < 1:
        raise InvalidSizeError(f"layer count must be >= 1, got {p}")
    params = [float(v) for v in params]
    if len(params) != 2 * p:
        raise ArityError(
            f"{p}-layer circuit takes {2 * p} parameters, got {len(params)}"
        )
    n = h_problem.n_qubits
    if mixer is None:
        mixer = pauli_field("x", n, 1.0)
    if mixer.n_qubits != n:
        raise DimensionError(
            f"{mixer.n_qubits}-qubit mixer vs {n}-qubit problem"
        )
    circuit = Circuit(n)
    for q in range(n):
        circuit.add(H(q))
    for k in range(p):
        gamma, beta = params[2 * k], params[2 * k + 1]
        for index, (coeff, string) in enumerate(h_problem.terms):
            support = h_problem.support(index)
            circuit.add(pauli_term_gate(coeff * gamma, string, support))
        for gate in _mixer_gates(mixer, beta):
            circuit.add(gate)
    return circuit


class QaoaResult(NamedTuple):
    energy: float
    params: np.ndarray
    evaluations: int
    converged: bool


def qaoa_optimize(h_problem, p, spec=None, mixer=None, x0=None):
    """Optimize the 2p QAOA parameters against <H_p>."""
    from .optimizers import OptimizerSpec, minimize

    if spec is None:
        spec = OptimizerSpec(budget=2000)

    def objective(params):
        circuit = qaoa_circuit(h_problem, p, params, mixer=mixer)
        result = circuit.execute()
        return expectation(result.final_state, h_problem)

    if x0 is None:
        rng = np.random.Generator(
            np.random.PCG64(0 if spec.seed is None else spec.seed)
        )
        x0 = rng.uniform(0.1, 0.7, 2 * p)
    res = minimize(objective, x0, spec)
    return QaoaResult(res.fun, res.x, res.evaluations, res.converged)


class FalqonResult(NamedTuple):
    betas: np.ndarray
    energies: np.ndarray
    final_state: object


def falqon(h_p, h_m, dt, steps):
    """Feedback-based optimization: evolve with exp(-i H_p dt) then
    exp(-i beta_k H_m dt) and set the next mixer weight from the
    commutator expectation (beta_1 = 0), which drives <H_p> downhill
    for small dt. No classical optimizer is involved.

    Returns (betas applied per step, energy trace including the initial
    state, final state); a trace increase beyond 1e-6 warns.
    """
    if dt <= 0:
        raise StepSizeError(f"dt must be positive, got {dt}")
    steps = int(steps)
    if steps < 1:
        raise InvalidSizeError(f"need at least 1 step, got {steps}")
    if h_p.n_qubits != h_m.n_qubits:
        raise DimensionError(
            f"{h_p.n_qubits}-qubit problem vs {h_m.n_qubits}-qubit mixer"
        )
    n = h_p.n_qubits
    mp = dense_matrix_of(h_p, n)
    mm = dense_matrix_of(h_m, n)
    feedback = 1j * (mp @ mm - mm @ mp)  # Hermitian observable i[Hp, Hm]
    wp, vp = np.linalg.eigh(mp)
    wm, vm = np.linalg.eigh(mm)
    phase_p = np.exp(-1j * wp * dt)
    state = plus_state(n)
    amps = state.amplitudes
    betas = [0.0]
    energies = [float(np.vdot(amps, mp @ amps).real)]
    for k in range(steps):
        beta = betas[k]
        amps = vp @ (phase_p * (vp.conj().T @ amps))
        amps = vm @ (np.exp(-1j * beta * wm * dt) * (vm.conj().T @ amps))
        energies.append(float(np.vdot(amps, mp @ amps).real))
        a_val = complex(np.vdot(amps, feedback @ amps))
        if abs(a_val.imag) > 1e-8:
            raise NumericalError(
                f"commutator expectation has imaginary residue "
                f"{a_val.imag:.3g}"
            )
        betas.append(a_val.real)
    state.amplitudes[:] = amps
    energies = np.array(energies)
    rises = np.diff(energies)
    if np.any(rises > 1e-6):
        warnings.warn(
            f"energy trace increased by up to {float(rises.max()):.3g}; "
            "dt is too large for the feedback law",
            MonotonicityWarning,
            stacklevel=2,
        )
    return FalqonResult(np.array(betas[:steps]), energies, state)


class AavqeResult(NamedTuple):
    energies: np.ndarray
    params: np.ndarray


def aavqe(h0, h1, steps, ansatz, spec=None, theta0=None):
    """VQE chain along H_j = (1-s_j)H0 + s_j H1, s_j = j/(S-1), each
    stage warm-started from the previous optimum."""
    steps = int(steps)
    if steps < 2:
        raise InvalidSizeError(f"need at least 2 stages, got {steps}")
    if h0.n_qubits != h1.n_qubits:
        raise DimensionError(
            f"cannot interpolate {h0.n_qubits}- and "
            f"{h1.n_qubits}-qubit Hamiltonians"
        )
    local = isinstance(h0, LocalHamiltonian) and isinstance(
        h1, LocalHamiltonian
    )
    if not local:
        m0 = dense_matrix_of(h0, h0.n_qubits)
        m1 = dense_matrix_of(h1, h1.n_qubits)
    theta = theta0
    energies = []
    for j in range(steps):
        s = j / (steps - 1)
        if local:
            h_j = h0.scaled(1.0 - s) + h1.scaled(s)
        else:
            h_j = DenseHamiltonian(
                (1.0 - s) * m0 + s * m1, validate=False
            )
        stage = vqe(h_j, ansatz, spec, theta0=theta)
        theta = stage.params
        energies.append(stage.energy)
    return AavqeResult(np.array(energies), theta)
