"""Shared test utilities: an independent dense simulator used as an
oracle, a seeded random circuit generator covering the whole gate
catalog, and a corpus of malformed circuit sources.

The oracle builds every gate matrix from scratch and applies it by
tensor contraction, so it shares no code with the package kernels.
"""

import numpy as np

from qsim import Circuit
from qsim.gates import GateSpec

SQ2 = 1.0 / np.sqrt(2.0)


def _u3(theta, phi, lam):
    ct, st = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [
            [ct, -np.exp(1j * lam) * st],
            [np.exp(1j * phi) * st, np.exp(1j * (phi + lam)) * ct],
        ]
    )


def oracle_matrix(name, params):
    """Gate matrices written out independently of the package."""
    p = params
    if name == "i":
        return np.eye(2, dtype=complex)
    if name == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if name == "y":
        return np.array([[0, -1j], [1j, 0]])
    if name == "z":
        return np.diag([1.0, -1.0]).astype(complex)
    if name == "h":
        return SQ2 * np.array([[1, 1], [1, -1]], dtype=complex)
    if name == "s":
        return np.diag([1.0, 1j])
    if name == "t":
        return np.diag([1.0, np.exp(1j * np.pi / 4)])
    if name == "rx":
        c, s = np.cos(p[0] / 2), np.sin(p[0] / 2)
        return np.array([[c, -1j * s], [-1j * s, c]])
    if name == "ry":
        c, s = np.cos(p[0] / 2), np.sin(p[0] / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if name == "rz":
        return np.diag([np.exp(-0.5j * p[0]), np.exp(0.5j * p[0])])
    if name == "u1":
        return np.diag([1.0, np.exp(1j * p[0])])
    if name == "u2":
        return _u3(np.pi / 2, p[0], p[1])
    if name == "u3":
        return _u3(p[0], p[1], p[2])
    if name == "cnot":
        out = np.eye(4, dtype=complex)
        out[2, 2] = out[3, 3] = 0
        out[2, 3] = out[3, 2] = 1
        return out
    if name == "cz":
        return np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    if name == "cu1":
        return np.diag([1.0, 1.0, 1.0, np.exp(1j * p[0])])
    if name == "swap":
        out = np.zeros((4, 4), dtype=complex)
        out[0, 0] = out[3, 3] = 1
        out[1, 2] = out[2, 1] = 1
        return out
    if name == "toffoli":
        out = np.eye(8, dtype=complex)
        out[6, 6] = out[7, 7] = 0
        out[6, 7] = out[7, 6] = 1
        return out
    raise KeyError(name)


def oracle_apply(psi, gate, n):
    """Apply one GateSpec to a flat state by tensor contraction.

    Controls are folded in by promoting the matrix to a block identity
    over (controls + targets), qubit 0 = most significant axis.
    """
    if gate.name == "unitary":
        mat = np.array(gate.matrix, dtype=complex)
    else:
        mat = oracle_matrix(gate.name, gate.params)
    qubits = list(gate.controls) + list(gate.targets)
    m_tar = len(gate.targets)
    m = len(qubits)
    if len(gate.controls) > 0:
        d = 1 << m
        dt = 1 << m_tar
        full = np.eye(d, dtype=complex)
        full[d - dt:, d - dt:] = mat
        mat = full
    mat = mat.reshape((2,) * (2 * m))
    psi = psi.reshape((2,) * n)
    psi = np.tensordot(mat, psi, axes=(list(range(m, 2 * m)), qubits))
    psi = np.moveaxis(psi, list(range(m)), qubits)
    return psi.reshape(-1)


def oracle_run(circuit, initial=None):
    n = circuit.n_qubits
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    if initial is not None:
        psi = np.array(initial, dtype=complex)
    for gate in circuit.queue:
        psi = oracle_apply(psi, gate, n)
    return psi


_SIMPLE = ("i", "x", "y", "z", "h", "s", "t")
_ROTATIONS = ("rx", "ry", "rz", "u1")


def random_circuit(rng, n_qubits=None, depth=None, allow_controls=True):
    """Seeded random circuit over the full catalog, optionally with
    extra controls attached to single-qubit gates."""
    n = int(n_qubits if n_qubits is not None else rng.integers(2, 9))
    d = int(depth if depth is not None else rng.integers(1, 21))
    circuit = Circuit(n)
    for _ in range(d):
        kind = int(rng.integers(0, 7))
        order = rng.permutation(n)
        if kind == 0:
            name = _SIMPLE[rng.integers(len(_SIMPLE))]
            gate = GateSpec(name, (int(order[0]),))
        elif kind == 1:
            name = _ROTATIONS[rng.integers(len(_ROTATIONS))]
            gate = GateSpec(
                name, (int(order[0]),),
                params=(float(rng.uniform(0, 2 * np.pi)),),
            )
        elif kind == 2:
            gate = GateSpec(
                "u3", (int(order[0]),),
                params=tuple(float(a) for a in rng.uniform(0, np.pi, 3)),
            )
        elif kind == 3 and n >= 2:
            name = ("cnot", "cz", "swap")[rng.integers(3)]
            gate = GateSpec(name, (int(order[0]), int(order[1])))
        elif kind == 4 and n >= 2:
            gate = GateSpec(
                "cu1", (int(order[0]), int(order[1])),
                params=(float(rng.uniform(0, 2 * np.pi)),),
            )
        elif kind == 5 and n >= 3:
            gate = GateSpec(
                "toffoli", (int(order[0]), int(order[1]), int(order[2]))
            )
        else:
            name = _ROTATIONS[rng.integers(len(_ROTATIONS))]
            gate = GateSpec(
                name, (int(order[0]),),
                params=(float(rng.uniform(0, 2 * np.pi)),),
            )
            if allow_controls and n >= 2:
                n_controls = int(rng.integers(1, min(3, n)))
                gate = gate.controlled_by(
                    *(int(q) for q in order[1:1 + n_controls])
                )
        circuit.add(gate)
    return circuit


# each entry: (source, expected line, expected column prefix of the error)
MALFORMED_SOURCES = [
    ("", 1, 1),
    ("qreg q[2];", 1, 1),
    ("OPENQASM 1.0;\nqreg q[2];", 1, 10),
    ("OPENQASM 2.0\nqreg q[2];", 2, 1),
    ("OPENQASM 2.0;\nqreg q[0];", 2, 8),
    ("OPENQASM 2.0;\nqreg q[2];\nqreg r[2];", 3, 1),
    ("OPENQASM 2.0;\nqreg q[2];\nbell q[0];", 3, 1),
    ("OPENQASM 2.0;\nqreg q[2];\nh q[2];", 3, 5),
    ("OPENQASM 2.0;\nqreg q[2];\nh r[0];", 3, 3),
    ("OPENQASM 2.0;\nqreg q[2];\nh q[0]", 3, 7),
    ("OPENQASM 2.0;\nqreg q[2];\ncx q[0];", 3, 1),
    ("OPENQASM 2.0;\nqreg q[2];\ncx q[0], q[0];", 3, 6),
    ("OPENQASM 2.0;\nqreg q[2];\nrx q[0];", 3, 1),
    ("OPENQASM 2.0;\nqreg q[2];\nrx(1.0, 2.0) q[0];", 3, 1),
    ("OPENQASM 2.0;\nqreg q[2];\nrx(1.0/0.0) q[0];", 3, 7),
    ("OPENQASM 2.0;\nqreg q[2];\nrx(*) q[0];", 3, 4),
    ("OPENQASM 2.0;\nqreg q[2];\nh q[x];", 3, 5),
    ("OPENQASM 2.0;\nqreg q[2];\nmeasure q[0] -> c[0];", 3, 17),
    ("OPENQASM 2.0;\nqreg q[2];\ncreg c[1];\nmeasure q -> c;", 4, 14),
    ("OPENQASM 2.0;\nqreg q[2];\ncreg c[2];\nmeasure q[3] -> c[0];", 4, 11),
    ("OPENQASM 2.0;\nqreg q[2];\ncreg c[2];\nmeasure q[0] <- c[0];", 4, 14),
    ("OPENQASM 2.0;\nqreg q[2];\nh 3;", 3, 3),
    ("OPENQASM 2.0;\nqreg q[2];\n$ q[0];", 3, 1),
    ("OPENQASM 2.0;\nqreg q[2];\nu3(0.1 0.2, 0.3) q[0];", 3, 8),
    ("OPENQASM 2.0;\nqreg q[999999999];", 2, 8),
]
