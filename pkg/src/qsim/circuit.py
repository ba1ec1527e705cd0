"""Circuit construction, execution, measurement sampling.

Measurement never collapses the retained state: execute applies the
queue, then sampling draws i.i.d. from the probabilities of the
measured qubits with a seeded, platform-independent generator (PCG64
uniforms inverted through the cumulative distribution by binary
search). nshots=0 skips sampling entirely.
"""

from __future__ import annotations

import time

import numpy as np

from . import backends
from .errors import (
    ArityError,
    DimensionError,
    DistributionError,
    QubitIndexError,
)
from .gates import CATALOG, GateSpec, dagger
from .state import _check_size, probabilities as state_probabilities


def sample(probs, nshots, seed=None):
    """Draw ``nshots`` basis indices from ``probs``; returns a map from
    MSB-first bitstring to count (zero counts omitted).

    Identical (probs, nshots, seed) give identical counts on any
    platform and worker count: the generator is PCG64 and each uniform
    is inverted through the cumulative array with binary search.
    """
    p = np.asarray(probs, dtype=np.float64)
    size = p.shape[0] if p.ndim == 1 else 0
    if size < 2 or (size & (size - 1)) != 0:
        raise DistributionError(
            f"probability vector length must be a power of two >= 2, "
            f"got shape {p.shape}"
        )
    if p.min() < -1e-12:
        raise DistributionError(
            f"negative probability {p.min()!r} beyond tolerance"
        )
    total = p.sum()
    if abs(total - 1.0) > 1e-8:
        raise DistributionError(f"probabilities sum to {total!r}, not 1")
    nshots = int(nshots)
    if nshots < 0:
        raise DistributionError(f"nshots must be >= 0, got {nshots}")
    if nshots == 0:
        return {}
    p = np.clip(p, 0.0, None)
    cumulative = np.cumsum(p / p.sum())
    cumulative[-1] = 1.0  # guard against roundoff at the top end
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.random(nshots)
    indices = np.searchsorted(cumulative, draws, side="right")
    counts = np.bincount(indices, minlength=size)
    width = size.bit_length() - 1
    return {
        format(i, f"0{width}b"): int(c)
        for i, c in enumerate(counts)
        if c > 0
    }


class ExecutionResult:
    """Final state, lazy probabilities over the measured qubits, and
    sampled counts."""

    def __init__(self, final_state, measured_qubits, counts, elapsed_s,
                 nshots, seed):
        self.final_state = final_state
        self.measured_qubits = tuple(measured_qubits)
        self.counts = counts
        self.elapsed_s = elapsed_s
        self.nshots = nshots
        self.seed = seed
        self._probabilities = None

    @property
    def n_qubits(self):
        return self.final_state.n_qubits

    @property
    def probabilities(self):
        if self._probabilities is None:
            self._probabilities = state_probabilities(
                self.final_state, self.measured_qubits
            )
        return self._probabilities

    def to_dict(self, include_elapsed=True):
        out = {
            "nqubits": self.n_qubits,
            "counts": dict(self.counts),
            "probabilities": [float(p) for p in self.probabilities],
        }
        if include_elapsed:
            out["elapsed_s"] = self.elapsed_s
        return out

    def __repr__(self):
        return (
            f"ExecutionResult(n_qubits={self.n_qubits}, "
            f"nshots={self.nshots}, elapsed_s={self.elapsed_s:.3g})"
        )


class Circuit:
    """Ordered gate queue over a fixed qubit count.

    param_slots lists (gate_index, angle_position) pairs in queue order,
    one per angle of every parameterized catalog gate; set_parameters
    rebinds them in that order.
    """

    def __init__(self, n_qubits):
        if n_qubits < 1:
            raise DimensionError(
                f"circuit needs at least 1 qubit, got {n_qubits}"
            )
        # executing would allocate 2^n amplitudes, so apply the same cap
        # as state construction up front
        _check_size(int(n_qubits))
        self.n_qubits = int(n_qubits)
        self.queue = []
        self.param_slots = []
        self._measured = []

    def add(self, gate):
        gate.on_range(self.n_qubits)
        index = len(self.queue)
        self.queue.append(gate)
        if gate.name in CATALOG:
            n_angles = CATALOG[gate.name][1]
            for pos in range(n_angles):
                self.param_slots.append((index, pos))
        return self

    def extend(self, gates):
        for g in gates:
            self.add(g)
        return self

    def measure(self, *qubits):
        """Mark qubits for sampling (no collapse). No arguments marks
        every qubit in index order."""
        if not qubits:
            qubits = tuple(range(self.n_qubits))
        for q in qubits:
            q = int(q)
            if not 0 <= q < self.n_qubits:
                raise QubitIndexError(
                    f"qubit {q} out of range for {self.n_qubits} qubits"
                )
            if q in self._measured:
                raise QubitIndexError(f"qubit {q} measured twice")
            self._measured.append(q)
        return self

    @property
    def measured_qubits(self):
        """Measured subset, or every qubit when none was marked."""
        if self._measured:
            return tuple(self._measured)
        return tuple(range(self.n_qubits))

    @property
    def depth(self):
        return len(self.queue)

    @property
    def parameters(self):
        return tuple(
            self.queue[i].params[pos] for i, pos in self.param_slots
        )

    def set_parameters(self, values):
        values = [float(v) for v in values]
        if len(values) != len(self.param_slots):
            raise ArityError(
                f"circuit has {len(self.param_slots)} parameter slot(s), "
                f"got {len(values)} value(s)"
            )
        per_gate = {}
        for (index, pos), value in zip(self.param_slots, values):
            per_gate.setdefault(index, {})[pos] = value
        for index, updates in per_gate.items():
            g = self.queue[index]
            params = list(g.params)
            for pos, value in updates.items():
                params[pos] = value
            self.queue[index] = GateSpec(
                g.name, g.targets, g.controls, tuple(params)
            )
        return self

    def inverse(self):
        """Adjoint circuit: reversed queue of daggered gates."""
        inv = Circuit(self.n_qubits)
        for g in reversed(self.queue):
            inv.add(dagger(g))
        return inv

    def __iter__(self):
        return iter(self.queue)

    def __len__(self):
        return len(self.queue)

    def __repr__(self):
        return (
            f"Circuit(n_qubits={self.n_qubits}, depth={self.depth}, "
            f"params={len(self.param_slots)})"
        )

    def execute(self, initial=None, nshots=0, seed=None):
        """Run the queue on the active backend.

        ``initial`` defaults to |0...0>; a supplied state is copied, not
        mutated. With nshots > 0, counts are drawn from the measured
        qubits' probabilities; the final state is never collapsed.
        """
        b = backends.active()
        if initial is None:
            state = b.zero_state(self.n_qubits)
        else:
            if initial.n_qubits != self.n_qubits:
                raise DimensionError(
                    f"initial state has {initial.n_qubits} qubits, "
                    f"circuit has {self.n_qubits}"
                )
            state = initial.copy()
        start = time.perf_counter()
        for g in self.queue:
            state = b.apply_gate(state, g)
        elapsed = time.perf_counter() - start
        result = ExecutionResult(
            final_state=state,
            measured_qubits=self.measured_qubits,
            counts={},
            elapsed_s=elapsed,
            nshots=int(nshots),
            seed=seed,
        )
        if nshots:
            result.counts = b.sample(result.probabilities, nshots, seed)
        return result


def execute(circuit, initial=None, nshots=0, seed=None):
    return circuit.execute(initial=initial, nshots=nshots, seed=seed)
