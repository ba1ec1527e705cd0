"""Hamiltonians: dense matrices, local Pauli-term sums, precoded models.

Sign conventions fixed here (and relied on by the tests):
  tfim(n, h)   = -sum_i Z_i Z_{i+1} - h * sum_i X_i, periodic wrap when n > 2
  xxz(n, d)    = sum_i (X_i X_{i+1} + Y_i Y_{i+1} + d * Z_i Z_{i+1}), same wrap
  pauli_field  = c * sum_i sigma_i   (c defaults to +1; pass -1 for -sum X)
  maxcut(E)    = -sum_{(i,j) in E} (1 - Z_i Z_j)/2, so ground energy = -maxcut

Expectation values run through two independent paths: dense (vector-
matrix-vector) and local (term-by-term kernel applications, never
densifying); they must agree and the tests hold them to that.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import (
    CapacityError,
    DimensionError,
    HermiticityError,
    NumericalError,
    QubitIndexError,
    SerializationError,
)
from .state import StateVector

DENSE_MAX_QUBITS = 12

_PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


class DenseHamiltonian:
    """Hermitian 2^n x 2^n matrix with a cached eigendecomposition."""

    def __init__(self, matrix, validate=True):
        m = np.ascontiguousarray(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"matrix must be square, got {m.shape}")
        dim = m.shape[0]
        if dim < 2 or (dim & (dim - 1)) != 0:
            raise DimensionError(
                f"matrix size must be a power of two >= 2, got {dim}"
            )
        if validate:
            residue = float(np.max(np.abs(m - m.conj().T)))
            if residue > 1e-12:
                raise HermiticityError(
                    f"matrix is not Hermitian (max |H - H+| = {residue:.3g})"
                )
        self.n_qubits = dim.bit_length() - 1
        self.matrix = m
        self._eig = None

    @property
    def dim(self):
        return self.matrix.shape[0]

    def eig(self):
        """(eigenvalues ascending, eigenvector columns), cached."""
        if self._eig is None:
            try:
                w, v = np.linalg.eigh(self.matrix)
            except np.linalg.LinAlgError as exc:
                raise NumericalError(
                    f"eigendecomposition failed: {exc}"
                ) from exc
            self._eig = (w, v)
        return self._eig

    def ground_energy(self):
        return float(self.eig()[0][0])

    def ground_state(self):
        _, v = self.eig()
        return StateVector(self.n_qubits, v[:, 0].copy())

    def expectation(self, state):
        return expectation(state, self)

    def __add__(self, other):
        if isinstance(other, DenseHamiltonian):
            return DenseHamiltonian(
                self.matrix + other.matrix, validate=False
            )
        return NotImplemented

    def __mul__(self, factor):
        if isinstance(factor, (int, float)):
            return DenseHamiltonian(
                float(factor) * self.matrix, validate=False
            )
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        return f"DenseHamiltonian(n_qubits={self.n_qubits})"


class LocalHamiltonian:
    """Weighted sum of Pauli strings: terms are (coeff, string) with the
    string over IXYZ, character k acting on qubit k."""

    def __init__(self, n_qubits, terms):
        n = int(n_qubits)
        if n < 1:
            raise DimensionError(f"need at least 1 qubit, got {n}")
        cleaned = []
        for coeff, string in terms:
            coeff = float(coeff)
            if not np.isfinite(coeff):
                raise DimensionError(f"non-finite coefficient {coeff!r}")
            string = str(string).upper()
            if len(string) != n:
                raise DimensionError(
                    f"pauli string {string!r} has length {len(string)}, "
                    f"expected {n}"
                )
            bad = set(string) - set("IXYZ")
            if bad:
                raise DimensionError(
                    f"pauli string {string!r} has invalid symbol(s) {bad}"
                )
            cleaned.append((coeff, string))
        self.n_qubits = n
        self.terms = tuple(cleaned)

    def support(self, index):
        """Qubits where term ``index`` acts non-trivially."""
        _, string = self.terms[index]
        return tuple(q for q, ch in enumerate(string) if ch != "I")

    def scaled(self, factor):
        factor = float(factor)
        return LocalHamiltonian(
            self.n_qubits, [(factor * c, s) for c, s in self.terms]
        )

    def __add__(self, other):
        if isinstance(other, LocalHamiltonian):
            if other.n_qubits != self.n_qubits:
                raise DimensionError(
                    f"cannot add {self.n_qubits}- and "
                    f"{other.n_qubits}-qubit Hamiltonians"
                )
            return LocalHamiltonian(
                self.n_qubits, self.terms + other.terms
            )
        return NotImplemented

    def __mul__(self, factor):
        if isinstance(factor, (int, float)):
            return self.scaled(factor)
        return NotImplemented

    __rmul__ = __mul__

    def dense(self):
        return dense_from_local(self)

    def expectation(self, state):
        return expectation(state, self)

    def to_text(self):
        return "".join(f"{c!r} {s}\n" for c, s in self.terms)

    def __repr__(self):
        return (
            f"LocalHamiltonian(n_qubits={self.n_qubits}, "
            f"terms={len(self.terms)})"
        )


def from_text(text):
    """Parse the line format "coeff pauli_string" (blank lines and
    ``#`` comments ignored)."""
    terms = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SerializationError(
                f"line {lineno}: expected 'coeff pauli_string', got {raw!r}"
            )
        try:
            coeff = float(parts[0].replace("−", "-"))
        except ValueError:
            raise SerializationError(
                f"line {lineno}: bad coefficient {parts[0]!r}"
            ) from None
        string = parts[1].upper()
        if n is None:
            n = len(string)
        elif len(string) != n:
            raise SerializationError(
                f"line {lineno}: string length {len(string)} != {n}"
            )
        terms.append((coeff, string))
    if not terms:
        raise SerializationError("no terms found")
    return LocalHamiltonian(n, terms)


def dense_from_local(h):
    """Kronecker expansion (qubit 0 = leftmost factor = MSB)."""
    if h.n_qubits > DENSE_MAX_QUBITS:
        raise CapacityError(
            f"dense form limited to {DENSE_MAX_QUBITS} qubits, "
            f"got {h.n_qubits}"
        )
    dim = 1 << h.n_qubits
    total = np.zeros((dim, dim), dtype=np.complex128)
    for coeff, string in h.terms:
        term = np.array([[coeff]], dtype=np.complex128)
        for ch in string:
            term = np.kron(term, _PAULI[ch])
        total += term
    return DenseHamiltonian(total)


def dense_matrix_of(observable, n):
    """Dense ndarray form of any observable argument (matrix,
    DenseHamiltonian, or LocalHamiltonian)."""
    if isinstance(observable, LocalHamiltonian):
        observable = dense_from_local(observable)
    if isinstance(observable, DenseHamiltonian):
        m = observable.matrix
    else:
        m = np.asarray(observable, dtype=np.complex128)
    if m.shape != (1 << n, 1 << n):
        raise DimensionError(
            f"observable shape {m.shape} does not match {n} qubits"
        )
    return m


_Y_MATRIX = _PAULI["Y"]


def _local_expectation(state, h):
    # term-by-term kernel path; one reusable scratch buffer, no dense form
    total = 0.0 + 0.0j
    scratch = None
    for index, (coeff, string) in enumerate(h.terms):
        support = h.support(index)
        if not support:
            total += coeff
            continue
        if scratch is None:
            scratch = state.copy()
        else:
            scratch.amplitudes[:] = state.amplitudes
        for q in support:
            ch = string[q]
            if ch == "X":
                kernels.apply_diagonal_or_permutation(scratch, "pauli-x", (q,))
            elif ch == "Z":
                kernels.apply_diagonal_or_permutation(scratch, "pauli-z", (q,))
            else:
                kernels.apply_one_qubit(scratch, _Y_MATRIX, q)
        total += coeff * np.vdot(state.amplitudes, scratch.amplitudes)
    return total


def expectation(state, observable):
    """Real <state|H|state>; local forms go term-by-term through the
    kernels, dense forms contract directly."""
    if isinstance(observable, LocalHamiltonian):
        if observable.n_qubits != state.n_qubits:
            raise DimensionError(
                f"{observable.n_qubits}-qubit observable vs "
                f"{state.n_qubits}-qubit state"
            )
        value = _local_expectation(state, observable)
    else:
        m = dense_matrix_of(observable, state.n_qubits)
        value = complex(np.vdot(state.amplitudes, m @ state.amplitudes))
    if abs(value.imag) > 1e-10:
        raise HermiticityError(
            f"expectation has imaginary residue {value.imag:.3g}"
        )
    return float(value.real)


def _bonds(n):
    pairs = [(i, i + 1) for i in range(n - 1)]
    if n > 2:
        pairs.append((n - 1, 0))
    return pairs


def _two_site(n, i, j, a, b):
    chars = ["I"] * n
    chars[i] = a
    chars[j] = b
    return "".join(chars)


def _one_site(n, i, a):
    chars = ["I"] * n
    chars[i] = a
    return "".join(chars)


def pauli_field(axis, n, coefficient=1.0):
    """c * sum_i sigma_i for sigma in {X, Y, Z}."""
    axis = axis.upper()
    if axis not in ("X", "Y", "Z"):
        raise DimensionError(f"axis must be X, Y, or Z, got {axis!r}")
    return LocalHamiltonian(
        n, [(coefficient, _one_site(n, i, axis)) for i in range(n)]
    )


def tfim(n, h=1.0):
    """Transverse-field Ising chain; wrap bond only when n > 2 (at
    n = 2 the wrap would duplicate the single bond)."""
    if n < 2:
        raise DimensionError(f"tfim needs n >= 2, got {n}")
    terms = [(-1.0, _two_site(n, i, j, "Z", "Z")) for i, j in _bonds(n)]
    terms += [(-float(h), _one_site(n, i, "X")) for i in range(n)]
    return LocalHamiltonian(n, terms)


def xxz(n, delta=0.5):
    """Heisenberg XXZ chain, same wrap rule as tfim."""
    if n < 2:
        raise DimensionError(f"xxz needs n >= 2, got {n}")
    terms = []
    for i, j in _bonds(n):
        terms.append((1.0, _two_site(n, i, j, "X", "X")))
        terms.append((1.0, _two_site(n, i, j, "Y", "Y")))
        terms.append((float(delta), _two_site(n, i, j, "Z", "Z")))
    return LocalHamiltonian(n, terms)


def maxcut(edges, n=None):
    """-sum_{(i,j)} (1 - Z_i Z_j)/2: each cut edge lowers the energy by
    one, so the ground energy is minus the maximum cut."""
    edges = [(int(i), int(j)) for i, j in edges]
    if not edges:
        raise DimensionError("maxcut needs at least one edge")
    if n is None:
        n = 1 + max(max(i, j) for i, j in edges)
    for i, j in edges:
        if i == j:
            raise QubitIndexError(f"self-loop edge ({i}, {j})")
        if not (0 <= i < n and 0 <= j < n):
            raise QubitIndexError(f"edge ({i}, {j}) out of range for n={n}")
    terms = []
    for i, j in edges:
        terms.append((-0.5, "I" * n))
        terms.append((0.5, _two_site(n, i, j, "Z", "Z")))
    return LocalHamiltonian(n, terms)


_PRECODED = {
    "pauli-field-x": lambda n, **kw: pauli_field("X", n, **kw),
    "pauli-field-y": lambda n, **kw: pauli_field("Y", n, **kw),
    "pauli-field-z": lambda n, **kw: pauli_field("Z", n, **kw),
    "tfim": lambda n, **kw: tfim(n, **kw),
    "xxz": lambda n, **kw: xxz(n, **kw),
    "maxcut": lambda n, **kw: maxcut(n=n, **kw),
}


def precoded(name, n, **params):
    """Model registry entry point: pauli-field-x|y|z, tfim, xxz, maxcut
    (maxcut takes edges=... and n may be None)."""
    try:
        builder = _PRECODED[name]
    except KeyError:
        known = ", ".join(sorted(_PRECODED))
        raise DimensionError(
            f"unknown model {name!r} (known: {known})"
        ) from None
    return builder(n, **params)
