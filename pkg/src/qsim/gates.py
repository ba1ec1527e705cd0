"""Gate catalog: names, unitary matrices, adjoints, and GateSpec values.

Rotation sign convention: R_sigma(theta) = exp(-i * theta * sigma / 2).
Global phase is not tracked. Matrices act on the gate's targets only,
with targets[0] the most significant bit of the local index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ArityError,
    QubitIndexError,
    ShapeError,
    UnknownGateError,
)

_SQRT2_INV = 1.0 / np.sqrt(2.0)


def _m(rows):
    return np.array(rows, dtype=np.complex128)


def _mat_i(_):
    return np.eye(2, dtype=np.complex128)


def _mat_x(_):
    return _m([[0, 1], [1, 0]])


def _mat_y(_):
    return _m([[0, -1j], [1j, 0]])


def _mat_z(_):
    return _m([[1, 0], [0, -1]])


def _mat_h(_):
    return _m([[_SQRT2_INV, _SQRT2_INV], [_SQRT2_INV, -_SQRT2_INV]])


def _mat_s(_):
    return _m([[1, 0], [0, 1j]])


def _mat_t(_):
    return _m([[1, 0], [0, np.exp(1j * np.pi / 4)]])


def _mat_rx(p):
    c, s = np.cos(p[0] / 2), np.sin(p[0] / 2)
    return _m([[c, -1j * s], [-1j * s, c]])


def _mat_ry(p):
    c, s = np.cos(p[0] / 2), np.sin(p[0] / 2)
    return _m([[c, -s], [s, c]])


def _mat_rz(p):
    e = np.exp(0.5j * p[0])
    return _m([[np.conj(e), 0], [0, e]])


def _mat_u1(p):
    return _m([[1, 0], [0, np.exp(1j * p[0])]])


def _mat_u2(p):
    phi, lam = p
    return _SQRT2_INV * _m(
        [
            [1, -np.exp(1j * lam)],
            [np.exp(1j * phi), np.exp(1j * (phi + lam))],
        ]
    )


def _mat_u3(p):
    theta, phi, lam = p
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return _m(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ]
    )


def _mat_cnot(_):
    # qubit order (control, target); control = MSB of the local index
    return _m(
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 0, 1],
            [0, 0, 1, 0],
        ]
    )


def _mat_cz(_):
    return np.diag([1, 1, 1, -1]).astype(np.complex128)


def _mat_cu1(p):
    return np.diag([1, 1, 1, np.exp(1j * p[0])]).astype(np.complex128)


def _mat_swap(_):
    return _m(
        [
            [1, 0, 0, 0],
            [0, 0, 1, 0],
            [0, 1, 0, 0],
            [0, 0, 0, 1],
        ]
    )


def _mat_toffoli(_):
    m = np.eye(8, dtype=np.complex128)
    m[6, 6] = m[7, 7] = 0
    m[6, 7] = m[7, 6] = 1
    return m


# name -> (target count, angle count, matrix builder)
CATALOG = {
    "i": (1, 0, _mat_i),
    "x": (1, 0, _mat_x),
    "y": (1, 0, _mat_y),
    "z": (1, 0, _mat_z),
    "h": (1, 0, _mat_h),
    "s": (1, 0, _mat_s),
    "t": (1, 0, _mat_t),
    "rx": (1, 1, _mat_rx),
    "ry": (1, 1, _mat_ry),
    "rz": (1, 1, _mat_rz),
    "u1": (1, 1, _mat_u1),
    "u2": (1, 2, _mat_u2),
    "u3": (1, 3, _mat_u3),
    "cnot": (2, 0, _mat_cnot),
    "cz": (2, 0, _mat_cz),
    "cu1": (2, 1, _mat_cu1),
    "swap": (2, 0, _mat_swap),
    "toffoli": (3, 0, _mat_toffoli),
}


def matrix_of(name, params=()):
    """Unitary matrix of a catalog gate by lowercase name."""
    try:
        _, n_params, builder = CATALOG[name]
    except KeyError:
        raise UnknownGateError(f"unknown gate {name!r}") from None
    params = tuple(float(p) for p in params)
    if len(params) != n_params:
        raise ArityError(
            f"gate {name!r} takes {n_params} angle(s), got {len(params)}"
        )
    return builder(params)


def validate_unitary(m):
    """True iff m is square with power-of-two size and ||m m+ - I||_max < 1e-10."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"matrix must be square, got shape {m.shape}")
    d = m.shape[0]
    if d < 2 or (d & (d - 1)) != 0:
        raise ShapeError(f"matrix size must be a power of two >= 2, got {d}")
    return bool(np.max(np.abs(m @ m.conj().T - np.eye(d))) < 1e-10)


@dataclass(frozen=True)
class GateSpec:
    """One gate application: catalog name (or "unitary"), target qubits,
    extra control qubits, angles, and the matrix over the targets.

    targets[0] is the most significant bit of the matrix's local index.
    Immutable; shareable across threads.
    """

    name: str
    targets: tuple
    controls: tuple = ()
    params: tuple = ()
    matrix: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        targets = tuple(int(q) for q in self.targets)
        controls = tuple(int(q) for q in self.controls)
        params = tuple(float(p) for p in self.params)
        if len(set(targets)) != len(targets):
            raise QubitIndexError(f"duplicate target in {targets}")
        if set(targets) & set(controls):
            raise QubitIndexError(
                f"targets {targets} and controls {controls} overlap"
            )
        if len(set(controls)) != len(controls):
            raise QubitIndexError(f"duplicate control in {controls}")
        if any(q < 0 for q in targets + controls):
            raise QubitIndexError(f"negative qubit in {targets + controls}")
        matrix = self.matrix
        if matrix is None:
            matrix = matrix_of(self.name, params)
        matrix = np.ascontiguousarray(matrix, dtype=np.complex128)
        d = 1 << len(targets)
        if matrix.shape != (d, d):
            raise ShapeError(
                f"{len(targets)}-target gate needs a {d}x{d} matrix, "
                f"got {matrix.shape}"
            )
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "matrix", matrix)

    @property
    def qubits(self):
        """All qubits touched, controls first."""
        return self.controls + self.targets

    def on_range(self, n):
        for q in self.qubits:
            if q >= n:
                raise QubitIndexError(
                    f"qubit {q} out of range for {n}-qubit circuit"
                )
        return self

    def controlled_by(self, *controls):
        """Same gate with extra control qubits prepended."""
        return GateSpec(
            self.name,
            self.targets,
            tuple(controls) + self.controls,
            self.params,
            self.matrix,
        )


# self-adjoint names, and the parameter rewrites that realize the adjoint
# for the rest; anything else falls back to a custom-unitary dagger
_SELF_ADJOINT = {"i", "x", "y", "z", "h", "cnot", "cz", "swap", "toffoli"}
_NEGATE_PARAMS = {"rx", "ry", "rz", "u1", "cu1"}


def dagger(g):
    """Adjoint of a gate, with the same targets and controls.

    Catalog gates stay catalog gates (parameters rewritten) so that the
    name keeps matching the matrix; anything else becomes a custom
    unitary holding the conjugate transpose.
    """
    if g.name in _SELF_ADJOINT:
        return g
    if g.name in _NEGATE_PARAMS:
        params = tuple(-p for p in g.params)
        return GateSpec(g.name, g.targets, g.controls, params)
    if g.name == "s":
        return GateSpec("u1", g.targets, g.controls, (-np.pi / 2,))
    if g.name == "t":
        return GateSpec("u1", g.targets, g.controls, (-np.pi / 4,))
    if g.name == "u2":
        phi, lam = g.params
        return GateSpec(
            "u3", g.targets, g.controls, (-np.pi / 2, -lam, -phi)
        )
    if g.name == "u3":
        theta, phi, lam = g.params
        return GateSpec("u3", g.targets, g.controls, (-theta, -lam, -phi))
    return GateSpec(
        "unitary", g.targets, g.controls, (), g.matrix.conj().T
    )


def _gate(name):
    n_targets, n_params, _ = CATALOG[name]

    def factory(*args):
        if len(args) != n_targets + n_params:
            raise ArityError(
                f"{name} takes {n_targets} qubit(s) and {n_params} "
                f"angle(s), got {len(args)} argument(s)"
            )
        qubits, params = args[:n_targets], args[n_targets:]
        return GateSpec(name, qubits, (), params)

    factory.__name__ = name.upper()
    factory.__qualname__ = name.upper()
    factory.__doc__ = f"GateSpec for {name} on explicit qubits" + (
        " with trailing angle(s)." if n_params else "."
    )
    return factory


I = _gate("i")  # noqa: E741 - gate name
X = _gate("x")
Y = _gate("y")
Z = _gate("z")
H = _gate("h")
S = _gate("s")
T = _gate("t")
RX = _gate("rx")
RY = _gate("ry")
RZ = _gate("rz")
U1 = _gate("u1")
U2 = _gate("u2")
U3 = _gate("u3")
CNOT = _gate("cnot")
CZ = _gate("cz")
CU1 = _gate("cu1")
SWAP = _gate("swap")
TOFFOLI = _gate("toffoli")


def Unitary(matrix, *targets):
    """Custom gate from an explicit unitary over ``targets``."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if not validate_unitary(matrix):
        raise ShapeError("matrix is not unitary within 1e-10")
    d = matrix.shape[0]
    if d != 1 << len(targets):
        raise ShapeError(
            f"{d}x{d} matrix does not fit {len(targets)} target(s)"
        )
    return GateSpec("unitary", targets, (), (), matrix)
