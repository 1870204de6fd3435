"""Command-line interface: transform, resources, run-vqe, scan, exact, gradcheck.

Configuration comes from an optional JSON file plus flag overrides (flags
win). Outputs are machine readable (JSON / CSV) and deterministic for a fixed
config and seed, except for wall_time fields.

Exit codes: 0 success, 2 usage/config/format error, 3 resource limit,
4 numerical failure.
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import click
import numpy as np

from . import circuit as circ
from . import engine, fermion, mps, statevector as sv
from .errors import ConsistencyError, FormatError, NumericalError, ResourceLimitError
from .pauli import PauliSum, read_pauli_sum, write_pauli_sum

SCHEMA_VERSION = 1

EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_NUMERICAL = 4


@dataclass
class RunConfig:
    fcidump_path: str = ""
    ansatz: str = "uccsd"  # uccsd | uccgsd | hea
    hea_layers: int = 2
    hea_entangler: str = "CNOT"  # CNOT | CU3
    backend: str = "sv"  # sv | mps
    max_bond: int = 64
    svd_threshold: float = 1e-12
    optimizer: str = "gradient"  # gradient | simplex
    tol_e: float = 1e-8
    tol_g: float = 1e-6
    max_iter: int = 300
    workers: int | None = None
    seed: int = 0
    output_path: str = ""

    def validate(self) -> None:
        if self.ansatz not in ("uccsd", "uccgsd", "hea"):
            raise FormatError(f"unknown ansatz {self.ansatz!r}")
        if self.backend not in ("sv", "mps"):
            raise FormatError(f"unknown backend {self.backend!r}")
        if self.optimizer not in ("gradient", "simplex"):
            raise FormatError(f"unknown optimizer {self.optimizer!r}")
        if self.hea_entangler not in ("CNOT", "CU3"):
            raise FormatError(f"unknown entangler {self.hea_entangler!r}")
        if self.hea_layers < 0 or self.max_bond < 1 or self.max_iter < 1:
            raise FormatError("hea_layers, max_bond and max_iter must be positive")


def load_config(path: str | None, overrides: dict) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    data: dict = {}
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise FormatError(f"cannot read config {path}: {exc}") from None
        unknown = set(data) - known
        if unknown:
            raise FormatError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    config = RunConfig(**data)
    config.validate()
    return config


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    """Map exception classes onto the documented exit codes."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ResourceLimitError as exc:
            _fail(EXIT_RESOURCE, str(exc))
        except NumericalError as exc:
            _fail(EXIT_NUMERICAL, str(exc))
        except (FormatError, ConsistencyError, ValueError, OSError) as exc:
            _fail(EXIT_USAGE, str(exc))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _write_output(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _load_problem(config: RunConfig):
    if not config.fcidump_path:
        raise FormatError("config requires fcidump_path")
    with open(config.fcidump_path) as fh:
        integrals = fermion.load_fcidump(fh)
    hamiltonian = fermion.jordan_wigner(fermion.build_hamiltonian(integrals))
    reference = fermion.hf_reference(integrals.n_electrons, integrals.n_qubits)
    return integrals, hamiltonian, reference


def _build_ansatz(config: RunConfig, integrals) -> circ.Circuit:
    if config.ansatz in ("uccsd", "uccgsd"):
        return circ.uccsd_ansatz(
            integrals.n_spatial,
            integrals.n_electrons,
            generalized=(config.ansatz == "uccgsd"),
        )
    return circ.hardware_efficient_ansatz(
        integrals.n_qubits, config.hea_layers, config.hea_entangler
    )


def _make_backend(config: RunConfig):
    if config.backend == "mps":
        return engine.MPSBackend(config.max_bond, config.svd_threshold)
    return engine.StateVectorBackend()


def _json_dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


@click.group()
def main() -> None:
    """Molecular VQE toolkit: qubit Hamiltonians, ansatz circuits, and two
    interchangeable simulation backends."""


@main.command()
@click.argument("fcidump", type=click.Path(exists=True, dir_okay=False))
@click.option("--output", "-o", type=click.Path(), default=None, help="Pauli-sum text file.")
@_guarded
def transform(fcidump: str, output: str | None) -> None:
    """Build the qubit Hamiltonian from an FCIDUMP file."""
    with open(fcidump) as fh:
        integrals = fermion.load_fcidump(fh)
    hamiltonian = fermion.jordan_wigner(fermion.build_hamiltonian(integrals))
    import io

    buf = io.StringIO()
    write_pauli_sum(hamiltonian, buf)
    _write_output(buf.getvalue(), output)
    click.echo(
        f"qubits: {integrals.n_qubits}  terms: {len(hamiltonian)}", err=True
    )


@main.command()
@click.option("--config", "-c", type=click.Path(exists=True), default=None)
@click.option("--fcidump", "fcidump_path", type=click.Path(exists=True), default=None)
@click.option("--ansatz", type=click.Choice(["uccsd", "uccgsd", "hea"]), default=None)
@click.option("--hea-layers", type=int, default=None)
@click.option("--output", "-o", type=click.Path(), default=None)
@_guarded
def resources(config, fcidump_path, ansatz, hea_layers, output) -> None:
    """Qubit/parameter/CNOT counts for the configured ansatz."""
    cfg = load_config(
        config,
        {"fcidump_path": fcidump_path, "ansatz": ansatz, "hea_layers": hea_layers},
    )
    integrals, _, _ = _load_problem(cfg)
    ansatz_circuit = _build_ansatz(cfg, integrals)
    counts = circ.count_resources(ansatz_circuit)
    table = (
        f"{'ansatz':>10} {'qubits':>7} {'params':>7} {'cnots':>7} {'gates':>7} {'depth':>7}\n"
        f"{cfg.ansatz:>10} {counts.n_qubits:>7} {counts.n_params:>7} "
        f"{counts.n_cnot:>7} {counts.n_gates:>7} {counts.depth:>7}\n"
    )
    click.echo(table, nl=False)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "ansatz": cfg.ansatz,
        "n_qubits": counts.n_qubits,
        "n_params": counts.n_params,
        "n_cnot": counts.n_cnot,
        "n_gates": counts.n_gates,
        "depth": counts.depth,
    }
    if output:
        Path(output).write_text(_json_dumps(payload))


def _run_single_vqe(cfg: RunConfig):
    integrals, hamiltonian, reference = _load_problem(cfg)
    ansatz_circuit = _build_ansatz(cfg, integrals)
    backend = _make_backend(cfg)
    options = engine.OptimizerOptions(
        method=cfg.optimizer, tol_e=cfg.tol_e, tol_g=cfg.tol_g, max_iter=cfg.max_iter
    )
    if cfg.ansatz == "hea":
        rng = np.random.default_rng(cfg.seed)
        theta0 = rng.uniform(-0.1, 0.1, size=ansatz_circuit.n_params)
    else:
        theta0 = np.zeros(ansatz_circuit.n_params)
    workers = engine.resolve_workers(cfg.workers)
    start = time.perf_counter()
    result = engine.vqe_minimize(
        hamiltonian,
        ansatz_circuit,
        reference,
        backend,
        options,
        theta0=theta0,
        workers=workers,
    )
    wall = time.perf_counter() - start
    payload = {
        "schema_version": SCHEMA_VERSION,
        "energy": result.energy,
        "theta": [float(v) for v in result.theta],
        "iterations": result.n_iterations,
        "history": [
            {"iteration": it, "energy": e, "gradient_norm": g} for it, e, g in result.history
        ],
        "converged": result.converged,
        "backend": cfg.backend,
        "wall_time_s": wall,
    }
    if cfg.backend == "mps":
        state0 = backend.prepare(reference)
        final_state = backend.evolve(state0, circ.bind(ansatz_circuit, result.theta))
        payload["truncation_log"] = mps.bond_profile(final_state)["truncation_log"]
    return payload


@main.command("run-vqe")
@click.option("--config", "-c", type=click.Path(exists=True), default=None)
@click.option("--fcidump", "fcidump_path", type=click.Path(exists=True), default=None)
@click.option("--ansatz", type=click.Choice(["uccsd", "uccgsd", "hea"]), default=None)
@click.option("--backend", type=click.Choice(["sv", "mps"]), default=None)
@click.option("--max-bond", type=int, default=None)
@click.option("--optimizer", type=click.Choice(["gradient", "simplex"]), default=None)
@click.option("--workers", "-w", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--output", "-o", type=click.Path(), default=None)
@_guarded
def run_vqe(config, output, **overrides) -> None:
    """Optimize the ansatz and report the ground-state energy as JSON."""
    cfg = load_config(config, overrides)
    payload = _run_single_vqe(cfg)
    _write_output(_json_dumps(payload), output or cfg.output_path or None)


@main.command()
@click.argument("fcidumps", nargs=-1, type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "-c", type=click.Path(exists=True), default=None)
@click.option("--backend", type=click.Choice(["sv", "mps"]), default=None)
@click.option("--workers", "-w", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--output", "-o", type=click.Path(), default=None)
@_guarded
def scan(fcidumps, config, output, **overrides) -> None:
    """VQE energies over a list of FCIDUMP files -> CSV with exact references."""
    if not fcidumps:
        raise FormatError("scan requires at least one FCIDUMP file")
    cfg = load_config(config, overrides)
    rows = ["# schema_version=1", "label,energy,reference_energy"]
    for path in fcidumps:
        point_cfg = RunConfig(**{**asdict(cfg), "fcidump_path": path})
        payload = _run_single_vqe(point_cfg)
        with open(path) as fh:
            integrals = fermion.load_fcidump(fh)
        hamiltonian = fermion.jordan_wigner(fermion.build_hamiltonian(integrals))
        dense = hamiltonian.to_dense_matrix(integrals.n_qubits)
        exact_energy = float(np.linalg.eigvalsh(dense)[0])
        rows.append(f"{Path(path).stem},{payload['energy']!r},{exact_energy!r}")
    text = "\n".join(rows) + "\n"
    _write_output(text, output or cfg.output_path or None)


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.option("--k", type=int, default=4, help="Number of lowest eigenvalues.")
@click.option("--output", "-o", type=click.Path(), default=None)
@_guarded
def exact(source: str, k: int, output: str | None) -> None:
    """Lowest eigenvalues of a qubit Hamiltonian (Pauli text or FCIDUMP)."""
    text = Path(source).read_text()
    first = next((line for line in text.splitlines() if line.strip()), "")
    import io

    if first.lstrip().startswith("&"):
        integrals = fermion.load_fcidump(io.StringIO(text))
        hamiltonian = fermion.jordan_wigner(fermion.build_hamiltonian(integrals))
        n_qubits = integrals.n_qubits
    else:
        hamiltonian = read_pauli_sum(io.StringIO(text))
        n_qubits = max(1, hamiltonian.n_qubits())
    dense = hamiltonian.to_dense_matrix(n_qubits)
    eigenvalues = np.linalg.eigvalsh(dense)
    k = max(1, min(k, eigenvalues.size))
    payload = {
        "schema_version": SCHEMA_VERSION,
        "n_qubits": n_qubits,
        "eigenvalues": [float(v) for v in eigenvalues[:k]],
    }
    _write_output(_json_dumps(payload), output)


@main.command()
@click.option("--config", "-c", type=click.Path(exists=True), default=None)
@click.option("--fcidump", "fcidump_path", type=click.Path(exists=True), default=None)
@click.option("--ansatz", type=click.Choice(["uccsd", "uccgsd", "hea"]), default=None)
@click.option("--backend", type=click.Choice(["sv", "mps"]), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--output", "-o", type=click.Path(), default=None)
@_guarded
def gradcheck(config, output, **overrides) -> None:
    """Compare gradient routes (reverse mode, parameter shift, differences)."""
    cfg = load_config(config, overrides)
    integrals, hamiltonian, reference = _load_problem(cfg)
    ansatz_circuit = _build_ansatz(cfg, integrals)
    backend = _make_backend(cfg)
    rng = np.random.default_rng(cfg.seed)
    theta = rng.uniform(-0.4, 0.4, size=ansatz_circuit.n_params)

    payload = {
        "schema_version": SCHEMA_VERSION,
        "backend": cfg.backend,
        "n_params": ansatz_circuit.n_params,
    }
    if ansatz_circuit.n_params == 0:
        payload["note"] = "circuit has no parameters"
        _write_output(_json_dumps(payload), output)
        return

    def energy_at(values: np.ndarray) -> float:
        state = backend.evolve(backend.prepare(reference), circ.bind(ansatz_circuit, values))
        return backend.expectation(state, hamiltonian)

    fd = np.zeros(ansatz_circuit.n_params)
    step = 1e-5
    for i in range(ansatz_circuit.n_params):
        up, down = theta.copy(), theta.copy()
        up[i] += step
        down[i] -= step
        fd[i] = (energy_at(up) - energy_at(down)) / (2 * step)

    shift = engine.parameter_shift_gradient(
        ansatz_circuit, theta, hamiltonian, backend, reference
    )
    payload["max_shift_vs_fd"] = float(np.max(np.abs(shift.values - fd)))
    payload["fd_fallback_params"] = list(shift.fd_param_indices)

    if backend.supports_reverse_gradient:
        reverse = sv.reverse_gradient(
            ansatz_circuit, theta, hamiltonian, backend.prepare(reference)
        )
        payload["max_reverse_vs_fd"] = float(np.max(np.abs(reverse - fd)))
        payload["max_reverse_vs_shift"] = float(np.max(np.abs(reverse - shift.values)))
    _write_output(_json_dumps(payload), output)


if __name__ == "__main__":
    main()
