"""In-place gate kernels with on-the-fly binary index generation.

Each kernel walks groups of amplitudes that share their non-special
bits and rewrites every group in place; no 2^n scratch buffer exists
anywhere here. Group indices are built from the loop counter by
inserting the target/control bits one at a time:

    insert bit b at position p:   i -> ((i >> p) << (p + 1)) + (i & ((1 << p) - 1)) + (b << p)

Worked example (n = 3, control at bit position 0, target at position 2,
so positions sorted ascending = [0, 2] with values [1, 1]): counter
g = 1 -> insert 1 at 0 gives 0b11 -> insert 1 at 2 gives 0b111. The
pair is then (0b111 - 0b100, 0b111) = (3, 7): the two basis states
with control bit set that differ only in the target bit.

Every loop body is compiled twice from the same source: a parallel
variant (prange over groups, disjoint writes, so results are bitwise
identical for any worker count) and a serial variant used below
PARALLEL_THRESHOLD amplitudes, where parallel overhead dominates.
"""

from __future__ import annotations

import os

# The worker pool is sized before numba is imported; without this the
# pool is pinned to the machine's core count and small containers could
# never exercise multi-worker determinism.
os.environ.setdefault("NUMBA_NUM_THREADS", str(max(8, os.cpu_count() or 1)))

import numba  # noqa: E402
import numpy as np  # noqa: E402
from numba import njit, prange  # noqa: E402

from .errors import QubitIndexError, UnsupportedSizeError  # noqa: E402

# below this many amplitudes the serial variants run
PARALLEL_THRESHOLD = 1 << 14

# largest custom-gate target count the dense per-group multiply supports
MAX_TARGETS = 6

_MAX_WORKERS = int(numba.config.NUMBA_NUM_THREADS)
_workers = _MAX_WORKERS


def worker_count():
    return _workers


def max_worker_count():
    return _MAX_WORKERS


def set_worker_count(w):
    """Set the parallel worker count (clamped to the pool size)."""
    global _workers
    w = max(1, min(int(w), _MAX_WORKERS))
    numba.set_num_threads(w)
    _workers = w
    return w


def _dual(body):
    """Compile one loop body into (parallel, serial) variants."""
    return (
        njit(parallel=True, cache=True)(body),
        njit(cache=True)(body),
    )


def _insert_ones(i, positions):
    # free function bodies below inline this pattern; kept here only as
    # documentation of the insertion order (ascending positions)
    for p in positions:
        i = ((i >> p) << (p + 1)) + (i & ((1 << p) - 1)) + (1 << p)
    return i


def _body_one_qubit(amps, g00, g01, g10, g11, positions, tk, n_groups):
    for g in prange(n_groups):
        i1 = np.int64(g)
        for j in range(positions.shape[0]):
            p = positions[j]
            i1 = ((i1 >> p) << (p + 1)) + (i1 & ((1 << p) - 1)) + (1 << p)
        i0 = i1 - tk
        a0 = amps[i0]
        a1 = amps[i1]
        amps[i0] = g00 * a0 + g01 * a1
        amps[i1] = g10 * a0 + g11 * a1


def _body_pauli_x(amps, positions, tk, n_groups):
    for g in prange(n_groups):
        i1 = np.int64(g)
        for j in range(positions.shape[0]):
            p = positions[j]
            i1 = ((i1 >> p) << (p + 1)) + (i1 & ((1 << p) - 1)) + (1 << p)
        i0 = i1 - tk
        a0 = amps[i0]
        amps[i0] = amps[i1]
        amps[i1] = a0


def _body_phase(amps, phase, positions, n_groups):
    # multiplies the amplitudes whose listed bits are all 1
    for g in prange(n_groups):
        i = np.int64(g)
        for j in range(positions.shape[0]):
            p = positions[j]
            i = ((i >> p) << (p + 1)) + (i & ((1 << p) - 1)) + (1 << p)
        amps[i] *= phase


def _body_swap(amps, positions, ua, ub, n_groups):
    for g in prange(n_groups):
        i = np.int64(g)
        for j in range(positions.shape[0]):
            p = positions[j]
            i = ((i >> p) << (p + 1)) + (i & ((1 << p) - 1)) + (1 << p)
        ia = i - ua  # bit at ua cleared: |0..1..>
        ib = i - ub
        a = amps[ia]
        amps[ia] = amps[ib]
        amps[ib] = a


def _body_two_qubit(amps, mat, positions, u0, u1, n_groups):
    # u0 belongs to targets[0] (most significant bit of the local index)
    for g in prange(n_groups):
        i3 = np.int64(g)
        for j in range(positions.shape[0]):
            p = positions[j]
            i3 = ((i3 >> p) << (p + 1)) + (i3 & ((1 << p) - 1)) + (1 << p)
        i0 = i3 - u0 - u1
        i1 = i3 - u0
        i2 = i3 - u1
        a0 = amps[i0]
        a1 = amps[i1]
        a2 = amps[i2]
        a3 = amps[i3]
        amps[i0] = mat[0, 0] * a0 + mat[0, 1] * a1 + mat[0, 2] * a2 + mat[0, 3] * a3
        amps[i1] = mat[1, 0] * a0 + mat[1, 1] * a1 + mat[1, 2] * a2 + mat[1, 3] * a3
        amps[i2] = mat[2, 0] * a0 + mat[2, 1] * a1 + mat[2, 2] * a2 + mat[2, 3] * a3
        amps[i3] = mat[3, 0] * a0 + mat[3, 1] * a1 + mat[3, 2] * a2 + mat[3, 3] * a3


def _body_multi_qubit(amps, mat, positions, values, offsets, n_groups):
    # generic gather/apply/scatter for m targets; offsets[t] is the sum
    # of target units selected by local index t (targets[0] = MSB)
    dim = offsets.shape[0]
    for g in prange(n_groups):
        i = np.int64(g)
        for j in range(positions.shape[0]):
            p = positions[j]
            i = ((i >> p) << (p + 1)) + (i & ((1 << p) - 1)) + (values[j] << p)
        buf = np.empty(dim, dtype=np.complex128)
        for t in range(dim):
            buf[t] = amps[i + offsets[t]]
        for t in range(dim):
            acc = complex(0.0, 0.0)
            for c in range(dim):
                acc += mat[t, c] * buf[c]
            amps[i + offsets[t]] = acc


_one_qubit_par, _one_qubit_ser = _dual(_body_one_qubit)
_pauli_x_par, _pauli_x_ser = _dual(_body_pauli_x)
_phase_par, _phase_ser = _dual(_body_phase)
_swap_par, _swap_ser = _dual(_body_swap)
_two_qubit_par, _two_qubit_ser = _dual(_body_two_qubit)
_multi_qubit_par, _multi_qubit_ser = _dual(_body_multi_qubit)


def _pick(par, ser, dim):
    return par if dim >= PARALLEL_THRESHOLD else ser


class IndexPlan:
    """Bit positions and masks steering one kernel call.

    ``positions`` lists the special bit positions ascending; entry j is
    inserted into the loop counter with bit value ``values[j]`` (1 for
    control bits and set target bits, 0 for free target bits). The
    enumeration of 2^(n - len(positions)) counters then yields every
    control-satisfying group exactly once.
    """

    __slots__ = ("n", "positions", "values", "n_groups")

    def __init__(self, n, targets, controls, target_values=1):
        for q in tuple(targets) + tuple(controls):
            if not 0 <= q < n:
                raise QubitIndexError(
                    f"qubit {q} out of range for {n} qubits"
                )
        tset, cset = set(targets), set(controls)
        if len(tset) != len(targets):
            raise QubitIndexError(f"duplicate target in {tuple(targets)}")
        if len(cset) != len(controls):
            raise QubitIndexError(f"duplicate control in {tuple(controls)}")
        if tset & cset:
            raise QubitIndexError(
                f"targets {tuple(targets)} and controls {tuple(controls)} overlap"
            )
        pairs = [(n - 1 - q, target_values) for q in targets]
        pairs += [(n - 1 - q, 1) for q in controls]
        pairs.sort()
        self.n = n
        self.positions = np.array([p for p, _ in pairs], dtype=np.int64)
        self.values = np.array([v for _, v in pairs], dtype=np.int64)
        self.n_groups = 1 << (n - len(pairs))

    def indices(self):
        """Every generated base index (test/debug helper, serial)."""
        out = np.empty(self.n_groups, dtype=np.int64)
        for g in range(self.n_groups):
            i = np.int64(g)
            for p, v in zip(self.positions, self.values):
                i = ((i >> p) << (p + 1)) + (i & ((1 << p) - 1)) + (v << p)
            out[g] = i
        return out


def _ones_plan(state, targets, controls):
    # plan that sets every special bit to 1 (pair/group top index)
    return IndexPlan(state.n_qubits, targets, controls, target_values=1)


def apply_one_qubit(state, matrix, target, controls=()):
    """In-place 2x2 update on ``target``, restricted by ``controls``."""
    plan = _ones_plan(state, (target,), tuple(controls))
    mat = np.ascontiguousarray(matrix, dtype=np.complex128)
    tk = 1 << (state.n_qubits - 1 - target)
    fn = _pick(_one_qubit_par, _one_qubit_ser, state.dim)
    fn(
        state.amplitudes,
        mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1],
        plan.positions, tk, plan.n_groups,
    )
    return state


def apply_multi_qubit(state, matrix, targets, controls=()):
    """In-place 2^m x 2^m update on ``targets`` (targets[0] = MSB of the
    local index), restricted by ``controls``."""
    targets = tuple(targets)
    controls = tuple(controls)
    m = len(targets)
    if m == 0:
        raise QubitIndexError("gate needs at least one target")
    if m > MAX_TARGETS:
        raise UnsupportedSizeError(
            f"{m}-target gates exceed the kernel limit of {MAX_TARGETS}; "
            "decompose the unitary first"
        )
    if m == 1:
        return apply_one_qubit(state, matrix, targets[0], controls)
    mat = np.ascontiguousarray(matrix, dtype=np.complex128)
    d = 1 << m
    if mat.shape != (d, d):
        raise UnsupportedSizeError(
            f"{m}-target gate needs a {d}x{d} matrix, got {mat.shape}"
        )
    n = state.n_qubits
    if m == 2:
        plan = _ones_plan(state, targets, controls)
        u0 = 1 << (n - 1 - targets[0])
        u1 = 1 << (n - 1 - targets[1])
        fn = _pick(_two_qubit_par, _two_qubit_ser, state.dim)
        fn(state.amplitudes, mat, plan.positions, u0, u1, plan.n_groups)
        return state
    plan = IndexPlan(n, targets, controls, target_values=0)
    units = [1 << (n - 1 - t) for t in targets]
    offsets = np.array(
        [
            sum(units[j] for j in range(m) if (t >> (m - 1 - j)) & 1)
            for t in range(d)
        ],
        dtype=np.int64,
    )
    fn = _pick(_multi_qubit_par, _multi_qubit_ser, state.dim)
    fn(state.amplitudes, mat, plan.positions, plan.values, offsets, plan.n_groups)
    return state


def apply_controlled(state, matrix, targets, controls):
    """In-place controlled update: identity wherever a control bit is 0."""
    return apply_multi_qubit(state, matrix, targets, controls)


def apply_diagonal_or_permutation(state, kind, qubits, param=None):
    """Specialized elementwise kernels.

    kind "pauli-x": bit flip on qubits[-1], controls = qubits[:-1].
    kind "pauli-z": sign flip where all ``qubits`` are 1.
    kind "phase":   multiply by exp(i*param) where all ``qubits`` are 1.
    kind "swap":    exchange the last two qubits, controls = the rest.
    """
    qubits = tuple(qubits)
    if kind == "pauli-x":
        plan = _ones_plan(state, qubits[-1:], qubits[:-1])
        tk = 1 << (state.n_qubits - 1 - qubits[-1])
        fn = _pick(_pauli_x_par, _pauli_x_ser, state.dim)
        fn(state.amplitudes, plan.positions, tk, plan.n_groups)
        return state
    if kind in ("pauli-z", "phase"):
        phase = -1.0 + 0.0j if kind == "pauli-z" else np.exp(1j * float(param))
        plan = _ones_plan(state, qubits[-1:], qubits[:-1])
        fn = _pick(_phase_par, _phase_ser, state.dim)
        fn(state.amplitudes, phase, plan.positions, plan.n_groups)
        return state
    if kind == "swap":
        ta, tb = qubits[-2], qubits[-1]
        plan = _ones_plan(state, (ta, tb), qubits[:-2])
        ua = 1 << (state.n_qubits - 1 - ta)
        ub = 1 << (state.n_qubits - 1 - tb)
        fn = _pick(_swap_par, _swap_ser, state.dim)
        fn(state.amplitudes, plan.positions, ua, ub, plan.n_groups)
        return state
    raise ValueError(f"unknown specialized kind {kind!r}")


# catalog names that reduce to a pure bit flip / phase; the listed
# leading targets act as extra controls
_X_LIKE = {"x": 0, "cnot": 1, "toffoli": 2}
_PHASE_OF = {
    "z": lambda p: np.pi,
    "cz": lambda p: np.pi,
    "s": lambda p: np.pi / 2,
    "t": lambda p: np.pi / 4,
    "u1": lambda p: p[0],
    "cu1": lambda p: p[0],
}


def apply_gate_spec(state, g):
    """Route one GateSpec to its fastest kernel, in place."""
    g.on_range(state.n_qubits)
    name = g.name
    if name == "i":
        return state
    if name in _X_LIKE:
        n_extra = _X_LIKE[name]
        qubits = g.controls + g.targets[:n_extra] + g.targets[n_extra:]
        return apply_diagonal_or_permutation(state, "pauli-x", qubits)
    if name in _PHASE_OF:
        angle = _PHASE_OF[name](g.params)
        return apply_diagonal_or_permutation(
            state, "phase", g.controls + g.targets, angle
        )
    if name == "swap":
        return apply_diagonal_or_permutation(
            state, "swap", g.controls + g.targets
        )
    return apply_multi_qubit(state, g.matrix, g.targets, g.controls)


def warmup():
    """Compile every kernel variant on a tiny buffer (first-call cost)."""
    amps = np.zeros(8, dtype=np.complex128)
    amps[0] = 1.0
    eye2 = np.eye(2, dtype=np.complex128)
    eye4 = np.eye(4, dtype=np.complex128)
    eye8 = np.eye(8, dtype=np.complex128)
    pos0 = np.array([2], dtype=np.int64)
    pos01 = np.array([1, 2], dtype=np.int64)
    pos012 = np.array([0, 1, 2], dtype=np.int64)
    zeros3 = np.zeros(3, dtype=np.int64)
    offsets = np.array([0, 1, 2, 3, 4, 5, 6, 7], dtype=np.int64)
    for one_q, x_k, ph, sw, two_q, multi in (
        (_one_qubit_par, _pauli_x_par, _phase_par, _swap_par,
         _two_qubit_par, _multi_qubit_par),
        (_one_qubit_ser, _pauli_x_ser, _phase_ser, _swap_ser,
         _two_qubit_ser, _multi_qubit_ser),
    ):
        one_q(amps, 1 + 0j, 0j, 0j, 1 + 0j, pos0, 4, 4)
        x_k(amps, pos0, 4, 4)
        ph(amps, 1 + 0j, pos0, 4)
        sw(amps, pos01, 4, 2, 2)
        two_q(amps, eye4, pos01, 4, 2, 2)
        multi(amps, eye8, pos012, zeros3, offsets, 1)
