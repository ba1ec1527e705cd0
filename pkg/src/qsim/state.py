"""State-vector representation, basis conventions, and state-level measures.

Conventions used everywhere in this package:

* qubit 0 is the most significant bit of a basis index, so for ``n``
  qubits the index of bitstring ``b0 b1 ... b(n-1)`` is
  ``sum(b_k * 2**(n-1-k))``;
* amplitudes are double-precision complex numbers in one contiguous
  buffer, which is what the in-place kernels mutate.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import (
    DimensionError,
    InvalidSizeError,
    NormalizationError,
    QubitIndexError,
)

DEFAULT_MAX_QUBITS = 30

_max_qubits = DEFAULT_MAX_QUBITS

# Counts every allocation of a full 2^n amplitude buffer (state creation,
# copies, backends that duplicate the state). In-place kernels never bump
# it; the benchmark CLI and the in-place tests read it.
_allocations = 0


def max_qubits():
    return _max_qubits


def set_max_qubits(n):
    """Set the allocation guard on state size (default 30, ~16 GiB)."""
    global _max_qubits
    if n < 1:
        raise InvalidSizeError(f"maximum qubit count must be >= 1, got {n}")
    _max_qubits = int(n)


def allocation_count():
    """Number of full-size amplitude buffers allocated so far."""
    return _allocations


def reset_allocation_count():
    global _allocations
    _allocations = 0


def _check_size(n):
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise InvalidSizeError(f"qubit count must be an integer, got {n!r}")
    if n < 1 or n > _max_qubits:
        raise InvalidSizeError(
            f"qubit count must be in [1, {_max_qubits}], got {n}"
        )
    return int(n)


class StateVector:
    """2^n complex amplitudes over the computational basis.

    Wraps exactly one contiguous complex128 buffer. Construction counts
    as one state allocation; kernels mutate the buffer in place.
    """

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits, amplitudes):
        global _allocations
        n = _check_size(n_qubits)
        amps = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if amps.shape != (1 << n,):
            raise DimensionError(
                f"expected {1 << n} amplitudes for {n} qubits, "
                f"got shape {amps.shape}"
            )
        self.n_qubits = n
        self.amplitudes = amps
        _allocations += 1

    @property
    def dim(self):
        return 1 << self.n_qubits

    def copy(self):
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self, qubits=None):
        return probabilities(self, qubits)

    def save(self, path):
        """Write the little-endian binary format: 8-byte unsigned qubit
        count, then interleaved (real, imag) doubles."""
        with open(path, "wb") as fh:
            fh.write(struct.pack("<Q", self.n_qubits))
            fh.write(self.amplitudes.astype("<c16", copy=False).tobytes())

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits}, dim={self.dim})"


def zero_state(n):
    """|00...0> on ``n`` qubits."""
    _check_size(n)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps)


def plus_state(n):
    """|++...+>: every amplitude equal to 2**(-n/2)."""
    _check_size(n)
    amps = np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128)
    return StateVector(n, amps)


def random_state(n, seed=None):
    """Haar-like random state: normalized complex gaussian amplitudes."""
    _check_size(n)
    rng = np.random.Generator(np.random.PCG64(seed))
    amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    amps /= np.linalg.norm(amps)
    return StateVector(n, amps)


def from_amplitudes(amplitudes, copy=True):
    """Wrap an explicit amplitude vector; must be normalized within 1e-8."""
    amps = np.array(amplitudes, dtype=np.complex128, copy=copy)
    size = amps.shape[0] if amps.ndim == 1 else 0
    n = size.bit_length() - 1
    if size < 2 or (size & (size - 1)) != 0:
        raise DimensionError(
            f"amplitude count must be a power of two >= 2, got {size}"
        )
    nrm = np.linalg.norm(amps)
    if abs(nrm - 1.0) > 1e-8:
        raise NormalizationError(f"state norm is {nrm!r}, expected 1")
    return StateVector(n, amps)


def load_state(path):
    """Read the binary format written by :meth:`StateVector.save`."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 8:
        raise DimensionError("state file shorter than its 8-byte header")
    n = struct.unpack("<Q", data[:8])[0]
    _check_size(n)
    expected = 8 + 16 * (1 << n)
    if len(data) != expected:
        raise DimensionError(
            f"state file holds {len(data)} bytes, expected {expected} "
            f"for {n} qubits"
        )
    amps = np.frombuffer(data[8:], dtype="<c16").astype(np.complex128)
    nrm = np.linalg.norm(amps)
    if abs(nrm - 1.0) > 1e-8:
        raise NormalizationError(f"stored state norm is {nrm!r}, expected 1")
    return StateVector(n, amps)


def overlap(a, b):
    """<a|b> as a complex scalar."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(
            f"overlap of {a.n_qubits}- and {b.n_qubits}-qubit states"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _check_qubits(n, qubits):
    qs = tuple(int(q) for q in qubits)
    for q in qs:
        if q < 0 or q >= n:
            raise QubitIndexError(f"qubit {q} out of range for {n} qubits")
    if len(set(qs)) != len(qs):
        raise QubitIndexError(f"duplicate qubit in {qs}")
    return qs


def probabilities(state, qubits=None):
    """Marginal distribution over ``qubits`` (in the given order).

    ``qubits[0]`` is the most significant bit of the returned index, so
    the entry at index ``k`` is the total probability of all basis
    states whose selected bits spell ``k``.
    """
    n = state.n_qubits
    if qubits is None:
        qubits = tuple(range(n))
    qs = _check_qubits(n, qubits)
    probs = np.abs(state.amplitudes) ** 2
    if qs == tuple(range(n)):
        return probs
    kept = list(qs)
    dropped = [a for a in range(n) if a not in set(kept)]
    tensor = probs.reshape((2,) * n)
    marginal = tensor.transpose(kept + dropped).reshape(1 << len(kept), -1)
    return marginal.sum(axis=1)
