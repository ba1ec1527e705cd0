"""Command line: run circuits from text files, benchmark backends,
launch model demos. Everything machine-readable goes to stdout as
JSON; diagnostics and timings go to stderr.

Exit codes: 0 success, 1 usage/config error, 2 circuit parse error,
3 execution error.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys

import numpy as np

from . import backends, kernels, qasm
from .circuit import Circuit
from .errors import ParseError, QsimError
from .evolution import Schedule, adiabatic_evolve, polynomial_schedule
from .gates import CZ, RX, RY, RZ
from .hamiltonians import (
    dense_from_local,
    expectation,
    maxcut,
    pauli_field,
    precoded,
    tfim,
    xxz,
)
from .models import (
    AnsatzSpec,
    falqon,
    grover,
    qaoa_optimize,
    qft_circuit,
    success_probability,
    vqe,
)
from .optimizers import OptimizerSpec
from .state import (
    allocation_count,
    load_state,
    reset_allocation_count,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_EXEC = 3

BENCH_FAMILIES = ("qft", "random-layered")
DEMOS = ("vqe", "qaoa", "adiabatic", "falqon", "grover")


class _CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which collides with the
    # circuit-parse exit code; route usage problems to 1 instead
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser():
    parser = _Parser(
        prog="qsim",
        description="State-vector circuit simulator: run, bench, demo.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[], help="execute a circuit file")
    run.add_argument("circuit", help="circuit source file")
    run.add_argument("--backend", help="backend name (overrides QSIM_BACKEND)")
    run.add_argument("--nshots", type=int, default=0)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--init-state", help="binary state file to start from")
    run.add_argument("--save-state", help="write the final state here")
    run.add_argument(
        "--json",
        action="store_true",
        help="compact single-line JSON output",
    )

    bench = sub.add_parser("bench", help="time circuit families")
    bench.add_argument("--family", choices=BENCH_FAMILIES, default="qft")
    bench.add_argument(
        "--qubits", type=int, nargs="+", required=True, metavar="N"
    )
    bench.add_argument("--backends", nargs="+", default=None, metavar="NAME")
    bench.add_argument("--repeats", type=int, default=3)
    bench.add_argument("--depth", type=int, default=10,
                       help="layers for the random-layered family")
    bench.add_argument("--seed", type=int, default=1234)
    bench.add_argument("--out", help="report file (default: stdout)")

    demo = sub.add_parser("demo", help="run a packaged model demo")
    demo.add_argument("name", choices=DEMOS)
    demo.add_argument("--config", required=True, help="JSON config file")
    demo.add_argument("--backend", help="backend name")
    return parser


def _set_backend(name):
    try:
        if name:
            backends.set_active(name)
        else:
            backends.active()  # resolves QSIM_BACKEND / default
    except QsimError as exc:
        raise _CliError(EXIT_USAGE, str(exc)) from exc


# run ------------------------------------------------------------------


def cmd_run(args):
    _set_backend(args.backend)
    try:
        with open(args.circuit, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _CliError(
            EXIT_USAGE, f"cannot read {args.circuit}: {exc}"
        ) from exc
    except UnicodeDecodeError as exc:
        raise _CliError(
            EXIT_PARSE, f"{args.circuit}: not a text file: {exc}"
        ) from exc
    try:
        circuit = qasm.parse(text)
    except ParseError as exc:
        raise _CliError(EXIT_PARSE, f"{args.circuit}:{exc}") from exc
    initial = None
    if args.init_state:
        try:
            initial = load_state(args.init_state)
        except OSError as exc:
            raise _CliError(
                EXIT_USAGE, f"cannot read {args.init_state}: {exc}"
            ) from exc
        except QsimError as exc:
            raise _CliError(
                EXIT_EXEC, f"bad state file {args.init_state}: {exc}"
            ) from exc
    if args.nshots < 0:
        raise _CliError(EXIT_USAGE, f"--nshots must be >= 0, got {args.nshots}")
    try:
        result = circuit.execute(
            initial=initial, nshots=args.nshots, seed=args.seed
        )
    except QsimError as exc:
        raise _CliError(EXIT_EXEC, str(exc)) from exc
    if args.save_state:
        try:
            result.final_state.save(args.save_state)
        except OSError as exc:
            raise _CliError(
                EXIT_EXEC, f"cannot write {args.save_state}: {exc}"
            ) from exc
    # timing to stderr keeps stdout byte-identical for identical seeds
    payload = result.to_dict(include_elapsed=False)
    if args.json:
        print(json.dumps(payload, separators=(",", ":")))
    else:
        print(json.dumps(payload, indent=2))
    print(f"elapsed_s {result.elapsed_s:.6f}", file=sys.stderr)
    return EXIT_OK


# bench ----------------------------------------------------------------


def random_layered_circuit(n, depth, seed):
    """Benchmark family: per layer one seeded random rotation per qubit
    plus a CZ ladder; identical across machines for a given seed."""
    rng = np.random.Generator(np.random.PCG64(seed))
    rotations = (RX, RY, RZ)
    circuit = Circuit(n)
    for _ in range(depth):
        for q in range(n):
            gate = rotations[int(rng.integers(3))]
            circuit.add(gate(q, float(rng.uniform(0.0, 2.0 * np.pi))))
        for q in range(n - 1):
            circuit.add(CZ(q, q + 1))
    return circuit


def _bench_circuit(family, n, depth, seed):
    if family == "qft":
        return qft_circuit(n)
    return random_layered_circuit(n, depth, seed)


def _amplitudes_on(backend_name, circuit):
    with backends.using(backend_name):
        return circuit.execute().final_state.amplitudes


def cmd_bench(args):
    names = args.backends or ["kernel", "reference"]
    for name in names:
        if name not in backends.backend_names():
            raise _CliError(
                EXIT_USAGE,
                f"unknown backend {name!r} "
                f"(known: {', '.join(backends.backend_names())})",
            )
    repeats = max(3, args.repeats)
    rows = []
    for n in args.qubits:
        if n < 1:
            raise _CliError(EXIT_USAGE, f"qubit count must be >= 1, got {n}")
        circuit = _bench_circuit(args.family, n, args.depth, args.seed)
        reference_amps = None
        if n <= 10:
            reference_amps = _amplitudes_on("reference", circuit)
        for name in names:
            row = {
                "backend": name,
                "family": args.family,
                "n_qubits": n,
            }
            rows.append(row)
            if backends.backend(name).is_reference and n > backends.REFERENCE_MAX_QUBITS:
                row["skipped"] = "capacity"
                continue
            with backends.using(name):
                if reference_amps is not None:
                    amps = circuit.execute().final_state.amplitudes
                    error = float(np.max(np.abs(amps - reference_amps)))
                    row["correct"] = bool(error < 1e-10)
                    if not row["correct"]:
                        row["max_error"] = error
                        continue
                else:
                    row["correct"] = None
                reset_allocation_count()
                warmup = circuit.execute()
                row["allocations"] = allocation_count()
                del warmup
                times = [circuit.execute().elapsed_s for _ in range(repeats)]
            row["seconds_median"] = statistics.median(times)
    report = {
        "repeats": repeats,
        "worker_count": kernels.worker_count(),
        "rows": rows,
    }
    text = json.dumps(report, indent=2)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise _CliError(
                EXIT_EXEC, f"cannot write {args.out}: {exc}"
            ) from exc
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        print(text)
    return EXIT_OK


# demo -----------------------------------------------------------------


def _load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise _CliError(EXIT_USAGE, f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _CliError(EXIT_USAGE, f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise _CliError(EXIT_USAGE, f"{path}: config must be a JSON object")
    return config


def _field(config, name, types, demo, default=None, required=False):
    if name not in config:
        if required:
            raise _CliError(
                EXIT_USAGE,
                f"demo {demo}: config missing required field {name!r}",
            )
        return default
    value = config[name]
    if types is not None and not isinstance(value, types):
        type_names = (
            "/".join(t.__name__ for t in types)
            if isinstance(types, tuple)
            else types.__name__
        )
        raise _CliError(
            EXIT_USAGE,
            f"demo {demo}: field {name!r} must be {type_names}, "
            f"got {type(value).__name__}",
        )
    return value


def _hamiltonian_from_config(config, demo):
    spec = _field(config, "hamiltonian", dict, demo, required=True)
    model = _field(spec, "model", str, demo, required=True)
    if model == "maxcut":
        edges = _field(spec, "edges", list, demo, required=True)
        try:
            return maxcut(edges, n=_field(spec, "n", int, demo))
        except (QsimError, TypeError, ValueError) as exc:
            raise _CliError(
                EXIT_USAGE, f"demo {demo}: field 'edges': {exc}"
            ) from exc
    n = _field(spec, "n", int, demo, required=True)
    try:
        if model == "tfim":
            return tfim(n, _field(spec, "h", (int, float), demo, default=1.0))
        if model == "xxz":
            return xxz(
                n, _field(spec, "delta", (int, float), demo, default=0.5)
            )
        if model.startswith("pauli-field-"):
            return precoded(
                model,
                n,
                coefficient=_field(
                    spec, "coefficient", (int, float), demo, default=1.0
                ),
            )
    except QsimError as exc:
        raise _CliError(EXIT_USAGE, f"demo {demo}: {exc}") from exc
    raise _CliError(
        EXIT_USAGE, f"demo {demo}: unknown hamiltonian model {model!r}"
    )


def _optimizer_from_config(config, demo, default_budget):
    method = _field(config, "method", str, demo, default="simplex")
    budget = _field(config, "budget", int, demo, default=default_budget)
    seed = _field(config, "seed", int, demo, default=1234)
    try:
        return OptimizerSpec(method=method, budget=budget, seed=seed)
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, f"demo {demo}: {exc}") from exc


def _demo_grover(config):
    n = _field(config, "n", int, "grover", required=True)
    marked = _field(config, "marked", list, "grover", required=True)
    iterations = _field(config, "iterations", int, "grover")
    nshots = _field(config, "nshots", int, "grover", default=10000)
    seed = _field(config, "seed", int, "grover", default=1234)
    try:
        circuit, predicted = grover(n, marked, iterations=iterations)
    except QsimError as exc:
        raise _CliError(EXIT_USAGE, f"demo grover: {exc}") from exc
    if iterations is None:
        iterations = int(np.floor(np.pi / 4.0 * np.sqrt(2**n / len(set(marked)))))
    result = circuit.execute(nshots=nshots, seed=seed)
    out = {
        "iterations": iterations,
        "predicted": predicted,
        "simulated": success_probability(result, marked),
    }
    if nshots:
        hits = sum(
            count
            for bits, count in result.counts.items()
            if int(bits, 2) in set(marked)
        )
        empirical = hits / nshots
        sigma = float(np.sqrt(predicted * (1.0 - predicted) / nshots))
        out["empirical"] = empirical
        out["sigma"] = sigma
        out["within_3_sigma"] = bool(
            abs(empirical - predicted) <= 3.0 * sigma + 1e-12
        )
    return out


def _demo_vqe(config):
    h = _hamiltonian_from_config(config, "vqe")
    depth = _field(config, "depth", int, "vqe", required=True)
    spec = _optimizer_from_config(config, "vqe", default_budget=5000)
    try:
        ansatz = AnsatzSpec(h.n_qubits, depth)
    except QsimError as exc:
        raise _CliError(EXIT_USAGE, f"demo vqe: {exc}") from exc
    result = vqe(h, ansatz, spec)
    out = {
        "energy": result.energy,
        "evaluations": result.evaluations,
        "params": [float(v) for v in result.params],
    }
    if h.n_qubits <= 12:
        ground = dense_from_local(h).ground_energy()
        out["ground_energy"] = ground
        out["error"] = result.energy - ground
    return out


def _demo_qaoa(config):
    h = _hamiltonian_from_config(config, "qaoa")
    p = _field(config, "p", int, "qaoa", required=True)
    spec = _optimizer_from_config(config, "qaoa", default_budget=2000)
    try:
        result = qaoa_optimize(h, p, spec)
    except QsimError as exc:
        raise _CliError(EXIT_USAGE, f"demo qaoa: {exc}") from exc
    out = {
        "energy": result.energy,
        "evaluations": result.evaluations,
        "params": [float(v) for v in result.params],
    }
    if h.n_qubits <= 12:
        out["ground_energy"] = dense_from_local(h).ground_energy()
    return out


def _demo_adiabatic(config):
    h1 = _hamiltonian_from_config(config, "adiabatic")
    total_time = _field(
        config, "T", (int, float), "adiabatic", required=True
    )
    dt = _field(config, "dt", (int, float), "adiabatic", required=True)
    coeffs = _field(config, "schedule", list, "adiabatic", default=[])
    solver = _field(
        config, "solver", str, "adiabatic", default="exact-stepwise"
    )
    h0 = pauli_field("x", h1.n_qubits, -1.0)
    try:
        schedule = Schedule(polynomial_schedule(coeffs), total_time)
        final, energies = adiabatic_evolve(
            h0, h1, schedule, dt, solver=solver
        )
    except QsimError as exc:
        raise _CliError(EXIT_USAGE, f"demo adiabatic: {exc}") from exc
    dense = dense_from_local(h1)
    ground = dense.ground_state()
    fidelity = float(
        np.abs(np.vdot(ground.amplitudes, final.amplitudes)) ** 2
    )
    return {
        "fidelity": fidelity,
        "final_energy": float(energies[-1]),
        "ground_energy": dense.ground_energy(),
        "steps": len(energies) - 1,
    }


def _demo_falqon(config):
    h = _hamiltonian_from_config(config, "falqon")
    dt = _field(config, "dt", (int, float), "falqon", required=True)
    steps = _field(config, "steps", int, "falqon", required=True)
    mixer = pauli_field("x", h.n_qubits, 1.0)
    try:
        result = falqon(h, mixer, dt, steps)
    except QsimError as exc:
        raise _CliError(EXIT_USAGE, f"demo falqon: {exc}") from exc
    energies = result.energies
    rises = np.diff(energies)
    return {
        "final_energy": float(energies[-1]),
        "min_energy": float(energies.min()),
        "monotone": bool(np.all(rises <= 1e-6)),
        "ground_energy": dense_from_local(h).ground_energy(),
    }


_DEMO_RUNNERS = {
    "grover": _demo_grover,
    "vqe": _demo_vqe,
    "qaoa": _demo_qaoa,
    "adiabatic": _demo_adiabatic,
    "falqon": _demo_falqon,
}


def cmd_demo(args):
    _set_backend(args.backend)
    config = _load_config(args.config)
    try:
        result = _DEMO_RUNNERS[args.name](config)
    except QsimError as exc:
        raise _CliError(EXIT_EXEC, str(exc)) from exc
    print(json.dumps(
        {"demo": args.name, "config": config, "result": result}, indent=2
    ))
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "bench":
            return cmd_bench(args)
        return cmd_demo(args)
    except _CliError as exc:
        print(f"qsim: {exc}", file=sys.stderr)
        return exc.code
    except QsimError as exc:
        print(f"qsim: {exc}", file=sys.stderr)
        return EXIT_EXEC


if __name__ == "__main__":
    sys.exit(main())
