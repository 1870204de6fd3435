"""VQE drivers: partitioned parallel expectation evaluation, self-contained
optimizers, and the ground/excited-state algorithms (VQE, ADAPT-VQE, VQD).

Parallel expectations split the Hamiltonian's terms across workers (cost =
Pauli weight, greedy longest-processing-time assignment). Workers are forked
processes sharing the evolved state read-only; partial sums reduce in
ascending worker order, so results are reproducible for any worker count.
"""

from __future__ import annotations

import math
import multiprocessing
import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import mps as mps_mod
from . import statevector as sv_mod
from .circuit import (
    Affine,
    Circuit,
    Constant,
    Gate,
    bind,
    generator_evolution_gates,
    uccsd_excitations,
)
from .errors import NumericalError
from .fermion import FermionSum
from .mps import MPSState
from .pauli import PauliSum
from .statevector import StateVector

SHIFT = math.pi / 2
FD_STEP = 1e-6

# Forking pays off only when there is real work to split.
_PARALLEL_MIN_TERMS = 256


def resolve_workers(workers: int | None = None) -> int:
    """Explicit count > VQE_WORKERS environment variable > machine cores."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("VQE_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------


class StateVectorBackend:
    """Dense backend adapter; gradients come from the reverse-mode sweep."""

    name = "sv"
    supports_reverse_gradient = True

    def prepare(self, bitstring: str) -> StateVector:
        return sv_mod.init_state(bitstring)

    def evolve(self, state: StateVector, bound: Circuit) -> StateVector:
        return sv_mod.evolve(state, bound)

    def expectation(self, state: StateVector, h: PauliSum) -> float:
        return sv_mod.expectation(state, h)

    def overlap(self, a: StateVector, b: StateVector) -> complex:
        return complex(np.vdot(a.amplitudes, b.amplitudes))


class MPSBackend:
    """Tensor-network backend adapter; gradients come from parameter shifts."""

    name = "mps"
    supports_reverse_gradient = False

    def __init__(self, max_bond: int = 64, svd_threshold: float = 1e-12):
        self.max_bond = max_bond
        self.svd_threshold = svd_threshold

    def prepare(self, bitstring: str) -> MPSState:
        return mps_mod.init(bitstring, self.max_bond, self.svd_threshold)

    def evolve(self, state: MPSState, bound: Circuit) -> MPSState:
        return mps_mod.evolve(state, bound)

    def expectation(self, state: MPSState, h: PauliSum) -> float:
        return mps_mod.expectation(state, h)

    def overlap(self, a: MPSState, b: MPSState) -> complex:
        return mps_mod.overlap(a, b)


# ---------------------------------------------------------------------------
# Hamiltonian partitioning and parallel expectation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpectationPlan:
    """LPT assignment of term indices to workers. Cost model: Pauli weight."""

    n_workers: int
    partitions: tuple[tuple[int, ...], ...]
    costs: tuple[int, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for part in self.partitions:
            for idx in part:
                if idx in seen:
                    raise ValueError("partitions overlap")
                seen.add(idx)
        if seen != set(range(len(self.costs))):
            raise ValueError("partitions do not cover all terms")
        if self.costs:
            total = sum(self.costs)
            bound = total / self.n_workers + max(self.costs)
            worst = max(sum(self.costs[i] for i in part) for part in self.partitions)
            if worst > bound + 1e-9:
                raise ValueError("partition exceeds the LPT balance bound")


def plan_partition(h: PauliSum, workers: int) -> ExpectationPlan:
    """Greedy longest-processing-time split; deterministic (ties by index)."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    costs = tuple(t.string.weight for t in h.terms)
    order = sorted(range(len(costs)), key=lambda i: (-costs[i], i))
    loads = [0] * workers
    parts: list[list[int]] = [[] for _ in range(workers)]
    for idx in order:
        w = min(range(workers), key=lambda j: (loads[j], j))
        parts[w].append(idx)
        loads[w] += costs[idx]
    return ExpectationPlan(
        n_workers=workers,
        partitions=tuple(tuple(sorted(p)) for p in parts),
        costs=costs,
    )


def _partition_value(state, h: PauliSum, indices: Sequence[int]) -> float:
    """Partial expectation over one partition, summed in ascending term order."""
    acc = 0.0
    if isinstance(state, StateVector):
        scratch = np.empty_like(state.amplitudes)
        for i in indices:
            term = h.terms[i]
            xm, ym, zm = sv_mod._string_masks(term.string, state.n_qubits)
            sv_mod.kernels.apply_pauli(state.amplitudes, xm, ym, zm, scratch)
            acc += complex(term.coefficient).real * np.vdot(state.amplitudes, scratch).real
    else:
        mats = state._site_matrices()
        for i in indices:
            term = h.terms[i]
            val = mps_mod._string_expectation(state, mats, term.string)
            acc += complex(term.coefficient).real * val.real
    return acc


_POOL_CTX: tuple | None = None


def _pool_task(part_index: int) -> float:
    state, h, partitions = _POOL_CTX  # type: ignore[misc]
    return _partition_value(state, h, partitions[part_index])


def expectation_parallel(state, h: PauliSum, plan: ExpectationPlan) -> float:
    """Partition sums reduced in ascending worker order.

    The ansatz state is evolved once by the caller; workers only measure.
    Small Hamiltonians are summed in-process (same arithmetic, same result).
    """
    global _POOL_CTX
    if not h.is_hermitian():
        raise ValueError("expectation requires a Hermitian operator")
    if not h.terms:
        return 0.0
    use_pool = plan.n_workers > 1 and len(h.terms) >= _PARALLEL_MIN_TERMS
    if use_pool:
        ctx = multiprocessing.get_context("fork")
        _POOL_CTX = (state, h, plan.partitions)
        try:
            with ctx.Pool(plan.n_workers) as pool:
                partials = pool.map(_pool_task, range(len(plan.partitions)))
        finally:
            _POOL_CTX = None
    else:
        partials = [_partition_value(state, h, part) for part in plan.partitions]
    return float(sum(partials))


# ---------------------------------------------------------------------------
# Gradients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShiftGradient:
    """Parameter-shift gradient; parameters that had to fall back to central
    finite differences (U3/CU3 feeds) are listed in ``fd_param_indices``."""

    values: np.ndarray
    fd_param_indices: tuple[int, ...] = ()


def _shift_gradient_general(
    ansatz: Circuit,
    theta: np.ndarray,
    value_of_bound: Callable[[Circuit], float],
) -> ShiftGradient:
    theta = np.asarray(theta, dtype=float)
    bound_gates = list(bind(ansatz, theta).gates)
    grad = np.zeros(ansatz.n_params)
    fd_params: set[int] = set()
    for pos, gate in enumerate(ansatz.gates):
        for slot, expr in enumerate(gate.params):
            if not isinstance(expr, Affine):
                continue
            if gate.kind not in ("RZ", "RY"):
                fd_params.add(expr.index)
                continue
            base = bound_gates[pos].params[slot].value  # type: ignore[union-attr]
            for sign in (1.0, -1.0):
                shifted = Gate(gate.kind, gate.qubits, (Constant(base + sign * SHIFT),))
                gates = bound_gates.copy()
                gates[pos] = shifted
                value = value_of_bound(Circuit(ansatz.n_qubits, tuple(gates), 0))
                grad[expr.index] += expr.scale * sign * value / 2.0
    for index in sorted(fd_params):
        for sign in (1.0, -1.0):
            shifted_theta = theta.copy()
            shifted_theta[index] += sign * FD_STEP
            value = value_of_bound(bind(ansatz, shifted_theta))
            grad[index] += sign * value / (2.0 * FD_STEP)
    return ShiftGradient(grad, tuple(sorted(fd_params)))


def parameter_shift_gradient(
    ansatz: Circuit,
    theta: Sequence[float],
    h: PauliSum,
    backend,
    reference: str,
) -> ShiftGradient:
    """Exact shift-rule gradient of the energy, one gate occurrence at a time.

    Shared parameters accumulate over all their gate occurrences. Parameters
    feeding U3/CU3 gates fall back to central finite differences (step 1e-6)
    and are flagged in the result.
    """
    state0 = backend.prepare(reference)

    def value_of_bound(bound: Circuit) -> float:
        return backend.expectation(backend.evolve(state0, bound), h)

    return _shift_gradient_general(ansatz, np.asarray(theta, dtype=float), value_of_bound)


# ---------------------------------------------------------------------------
# Optimizers (self-contained: quasi-Newton with curvature memory + simplex)
# ---------------------------------------------------------------------------


@dataclass
class OptimizerOptions:
    method: str = "gradient"  # "gradient" | "simplex"
    tol_e: float = 1e-8
    tol_g: float = 1e-6
    max_iter: int = 300
    memory: int = 10


@dataclass
class VqeResult:
    energy: float
    theta: np.ndarray
    n_iterations: int
    history: list[tuple[int, float, float | None]]
    converged: bool


def _lbfgs_direction(grad, s_list, y_list):
    q = grad.copy()
    alphas = []
    for s, y in zip(reversed(s_list), reversed(y_list)):
        rho = 1.0 / float(y @ s)
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    if y_list:
        y = y_list[-1]
        s = s_list[-1]
        q *= float(s @ y) / float(y @ y)
    for (s, y), a in zip(zip(s_list, y_list), reversed(alphas)):
        rho = 1.0 / float(y @ s)
        b = rho * float(y @ q)
        q += (a - b) * s
    return -q


def _minimize_lbfgs(fun, grad_fun, x0, opts: OptimizerOptions):
    x = np.asarray(x0, dtype=float).copy()
    f = fun(x)
    g = grad_fun(x)
    history: list[tuple[int, float, float | None]] = []
    s_list: list[np.ndarray] = []
    y_list: list[np.ndarray] = []
    flat_count = 0
    converged = False
    iteration = 0
    for iteration in range(1, opts.max_iter + 1):
        gnorm = float(np.max(np.abs(g))) if g.size else 0.0
        history.append((iteration, f, gnorm))
        if gnorm < opts.tol_g:
            converged = True
            break
        d = _lbfgs_direction(g, s_list, y_list)
        if float(g @ d) >= 0.0:
            d = -g
        step = 1.0
        gd = float(g @ d)
        f_new = f
        x_new = x
        for _ in range(40):
            x_try = x + step * d
            f_try = fun(x_try)
            if f_try <= f + 1e-4 * step * gd:
                f_new, x_new = f_try, x_try
                break
            step *= 0.5
        else:
            converged = True  # no descent left at double precision
            break
        # Accepted steps never increase the energy.
        assert f_new <= f + 1e-12, "line search accepted an ascent step"
        g_new = grad_fun(x_new)
        s = x_new - x
        y = g_new - g
        if float(s @ y) > 1e-12:
            s_list.append(s)
            y_list.append(y)
            if len(s_list) > opts.memory:
                s_list.pop(0)
                y_list.pop(0)
        delta = abs(f - f_new)
        x, f, g = x_new, f_new, g_new
        if delta < opts.tol_e:
            flat_count += 1
            if flat_count >= 3:
                converged = True
                break
        else:
            flat_count = 0
    return x, f, iteration, history, converged


def _minimize_simplex(fun, x0, opts: OptimizerOptions):
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    if n == 0:
        f = fun(x0)
        return x0, f, 0, [(0, f, None)], True
    spread = 0.1
    simplex = [x0.copy()] + [x0 + spread * np.eye(n)[i] for i in range(n)]
    values = [fun(p) for p in simplex]
    history: list[tuple[int, float, float | None]] = []
    flat_count = 0
    converged = False
    best_prev = min(values)
    iteration = 0
    for iteration in range(1, opts.max_iter + 1):
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        history.append((iteration, values[0], None))
        if abs(best_prev - values[0]) < opts.tol_e:
            flat_count += 1
            if flat_count >= 3:
                converged = True
                break
        else:
            flat_count = 0
        best_prev = values[0]
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        reflected = centroid + (centroid - worst)
        f_r = fun(reflected)
        if f_r < values[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            f_e = fun(expanded)
            if f_e < f_r:
                simplex[-1], values[-1] = expanded, f_e
            else:
                simplex[-1], values[-1] = reflected, f_r
        elif f_r < values[-2]:
            simplex[-1], values[-1] = reflected, f_r
        else:
            contracted = centroid + 0.5 * (worst - centroid)
            f_c = fun(contracted)
            if f_c < values[-1]:
                simplex[-1], values[-1] = contracted, f_c
            else:
                simplex = [simplex[0]] + [
                    simplex[0] + 0.5 * (p - simplex[0]) for p in simplex[1:]
                ]
                values = [values[0]] + [fun(p) for p in simplex[1:]]
    order = np.argsort(values, kind="stable")
    best = simplex[order[0]]
    return best, values[order[0]], iteration, history, converged


# ---------------------------------------------------------------------------
# VQE driver
# ---------------------------------------------------------------------------


def _check_finite(value: float) -> float:
    if not math.isfinite(value):
        raise NumericalError(f"non-finite energy {value!r} during optimization")
    return value


def vqe_minimize(
    h: PauliSum,
    ansatz: Circuit,
    reference: str,
    backend,
    options: OptimizerOptions | None = None,
    theta0: Sequence[float] | None = None,
    workers: int = 1,
) -> VqeResult:
    """Variational ground-state search.

    The gradient method uses the reverse-mode sweep on the dense backend and
    parameter shifts on the MPS backend; the simplex method needs no
    gradients at all.
    """
    if not h.is_hermitian():
        raise ValueError("Hamiltonian must be Hermitian")
    if ansatz.n_qubits != len(reference):
        raise ValueError("ansatz qubit count does not match the reference state")
    opts = options or OptimizerOptions()
    state0 = backend.prepare(reference)
    plan = plan_partition(h, workers) if workers > 1 else None

    def energy(theta: np.ndarray) -> float:
        state = backend.evolve(state0, bind(ansatz, theta))
        if plan is not None:
            return _check_finite(expectation_parallel(state, h, plan))
        return _check_finite(backend.expectation(state, h))

    def gradient(theta: np.ndarray) -> np.ndarray:
        if backend.supports_reverse_gradient:
            return sv_mod.reverse_gradient(ansatz, theta, h, state0)
        return parameter_shift_gradient(ansatz, theta, h, backend, reference).values

    x0 = np.zeros(ansatz.n_params) if theta0 is None else np.asarray(theta0, dtype=float)
    if x0.shape != (ansatz.n_params,):
        raise ValueError("theta0 length does not match ansatz parameter count")

    if opts.method == "simplex":
        x, _, iters, history, converged = _minimize_simplex(energy, x0, opts)
    elif opts.method == "gradient":
        x, _, iters, history, converged = _minimize_lbfgs(energy, gradient, x0, opts)
    else:
        raise ValueError(f"unknown optimizer method {opts.method!r}")

    final = energy(x)  # recomputed so the reported pair (energy, theta) matches
    return VqeResult(
        energy=final, theta=x, n_iterations=iters, history=history, converged=converged
    )


# ---------------------------------------------------------------------------
# ADAPT-VQE
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorPool:
    """Anti-Hermitian generators (T - T^dag) with their qubit-space images."""

    generators: tuple[tuple[FermionSum, PauliSum], ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.generators) != len(self.labels):
            raise ValueError("labels and generators differ in length")
        for _, image in self.generators:
            for term in image.terms:
                if abs(complex(term.coefficient).real) > 1e-10:
                    raise ValueError("pool image is not anti-Hermitian")

    def __len__(self) -> int:
        return len(self.generators)


def uccsd_pool(n_spatial: int, n_electrons: int, generalized: bool = False) -> OperatorPool:
    excs = uccsd_excitations(n_spatial, n_electrons, generalized)
    return OperatorPool(
        generators=tuple((e.generator, e.image) for e in excs),
        labels=tuple(e.label for e in excs),
    )


@dataclass
class AdaptResult:
    result: VqeResult
    selected_labels: list[str]
    selection_gradients: list[float]
    circuit: Circuit


def adapt_vqe(
    h: PauliSum,
    pool: OperatorPool,
    reference: str,
    backend,
    grad_eps: float = 1e-3,
    max_ops: int = 20,
    options: OptimizerOptions | None = None,
) -> AdaptResult:
    """Grow the ansatz one pool operator at a time by commutator gradient.

    Selection gradient for candidate A is |<psi|[H, A]|psi>|, the exact
    derivative of the energy along exp(theta A) at theta = 0. The operator
    with the largest gradient (ties to the lowest index) is appended with a
    fresh parameter at 0 and all parameters are re-optimized.
    """
    if len(pool) == 0:
        raise ValueError("empty operator pool")
    if not h.is_hermitian():
        raise ValueError("Hamiltonian must be Hermitian")
    n_qubits = len(reference)
    commutators = [
        ((h @ image) + (-1.0) * (image @ h)).simplify() for _, image in pool.generators
    ]
    state0 = backend.prepare(reference)

    circuit = Circuit(n_qubits, (), 0)
    theta = np.zeros(0)
    selected: list[str] = []
    sel_grads: list[float] = []
    result = VqeResult(
        energy=backend.expectation(state0, h),
        theta=theta,
        n_iterations=0,
        history=[],
        converged=True,
    )
    for _ in range(max_ops):
        state = backend.evolve(state0, bind(circuit, theta))
        grads = np.array([abs(backend.expectation(state, c)) for c in commutators])
        best = int(np.argmax(grads))
        if grads[best] < grad_eps:
            break
        selected.append(pool.labels[best])
        sel_grads.append(float(grads[best]))
        circuit = circuit.extended(
            generator_evolution_gates(pool.generators[best][1], circuit.n_params, n_qubits),
            extra_params=1,
        )
        theta = np.concatenate([theta, [0.0]])
        result = vqe_minimize(h, circuit, reference, backend, options, theta0=theta)
        theta = result.theta
    return AdaptResult(result, selected, sel_grads, circuit)


# ---------------------------------------------------------------------------
# VQD excited states
# ---------------------------------------------------------------------------


@dataclass
class DeflationSet:
    """Penalty states and weights defining the deflated objective."""

    states: list = field(default_factory=list)
    alphas: list[float] = field(default_factory=list)

    def add(self, state, alpha: float) -> None:
        if alpha <= 0:
            raise ValueError("deflation weight must be positive")
        self.states.append(state)
        self.alphas.append(alpha)


@dataclass
class VqdResult:
    energies: list[float]
    thetas: list[np.ndarray]
    results: list[VqeResult]
    states: list
    non_ascending: bool


def vqd_excited(
    h: PauliSum,
    ansatz: Circuit,
    reference: str,
    backend,
    k: int,
    alpha: float = 3.0,
    options: OptimizerOptions | None = None,
    seed: int = 0,
    restarts: int = 3,
) -> VqdResult:
    """Deflation sweep: state i minimizes E(theta) + sum_j alpha |<psi_j|psi>|^2.

    Overlaps are exact simulator inner products. Each level restarts from a
    few seeded random points and keeps the best objective. alpha must exceed
    the spectral gaps of interest (default 3 hartree). Returns k+1 energies in
    level order; a non-ascending sequence sets the warning flag.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    opts = options or OptimizerOptions()
    state0 = backend.prepare(reference)
    deflation = DeflationSet()
    rng = np.random.default_rng(seed)

    energies: list[float] = []
    thetas: list[np.ndarray] = []
    results: list[VqeResult] = []
    states: list = []

    for level in range(k + 1):
        def objective_state(state) -> float:
            value = backend.expectation(state, h)
            for prev, a in zip(deflation.states, deflation.alphas):
                value += a * abs(backend.overlap(prev, state)) ** 2
            return _check_finite(value)

        def objective(theta: np.ndarray) -> float:
            return objective_state(backend.evolve(state0, bind(ansatz, theta)))

        def gradient(theta: np.ndarray) -> np.ndarray:
            if backend.supports_reverse_gradient:
                def apply_h(state: StateVector) -> StateVector:
                    out = sv_mod.apply_operator(state, h).amplitudes
                    for prev, a in zip(deflation.states, deflation.alphas):
                        out = out + a * np.vdot(prev.amplitudes, state.amplitudes) * prev.amplitudes
                    return StateVector(state.n_qubits, out)

                return sv_mod.reverse_gradient_general(ansatz, theta, apply_h, state0)
            return _shift_gradient_general(
                ansatz,
                np.asarray(theta, dtype=float),
                lambda bound: objective_state(backend.evolve(state0, bound)),
            ).values

        best = None
        for attempt in range(max(1, restarts)):
            if level == 0 and attempt == 0:
                theta0 = np.zeros(ansatz.n_params)
            else:
                theta0 = rng.uniform(-0.5, 0.5, size=ansatz.n_params)
            if opts.method == "simplex":
                x, f, iters, history, converged = _minimize_simplex(objective, theta0, opts)
            else:
                x, f, iters, history, converged = _minimize_lbfgs(
                    objective, gradient, theta0, opts
                )
            if best is None or f < best[1]:
                best = (x, f, iters, history, converged)
        x, _, iters, history, converged = best
        state = backend.evolve(state0, bind(ansatz, x))
        bare_energy = backend.expectation(state, h)
        energies.append(bare_energy)
        thetas.append(x)
        results.append(VqeResult(bare_energy, x, iters, history, converged))
        states.append(state)
        if alpha > 0 and level < k:
            deflation.add(state, alpha)

    non_ascending = any(energies[i + 1] < energies[i] - 1e-9 for i in range(len(energies) - 1))
    return VqdResult(energies, thetas, results, states, non_ascending)
