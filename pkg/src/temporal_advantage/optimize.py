"""Gradient-ascent maximization of sequence probabilities.

Quantum models are searched through an unconstrained parametrization: raw
complex blocks are squared into PSD operators, preparation states are
trace-normalized, and POVM/instrument blocks are divided by the largest
eigenvalue of their sum, so every raw vector decodes to a feasible model
with ``Σ E_i <= 1`` and ``Σ K†K <= 1``.  Ascent then pushes both sums to
the identity, where the probability is largest.

Gradients are central finite differences evaluated in one batched pass;
restarts are independent trials with per-trial RNG streams, so results do
not depend on scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from multiprocessing import get_context

import numpy as np

from .models import (
    ClassicalModel,
    DegenerateParamsError,
    EBChannel,
    Instrument,
    QuantumModel,
    StructureError,
    dagger,
    sequence_outcomes,
    spectral_norm,
)

THREADS_ENV = "TEMPORAL_ADVANTAGE_THREADS"
PLATEAU_SLACK = 1e-9


@dataclass(frozen=True)
class AdamConfig:
    """Optimizer settings; defaults match the full desk-scale profile."""

    iterations: int = 50_000
    lr_start: float = 0.07
    lr_end: float = 1e-12
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    trials: int = 64
    seed: int = 0
    mode: str = "rank1"  # "rank1" or "full"
    kraus_per_outcome: int = 1
    commuting_preps: bool = False
    fd_step: float = 1e-6
    workers: int | None = None

    def learning_rate(self, t: float) -> float:
        """Exponential decay from ``lr_start`` at t=0 to ``lr_end`` at t=iterations."""
        return self.lr_start * (self.lr_end / self.lr_start) ** (t / self.iterations)


def ci_config(**overrides) -> AdamConfig:
    """Reduced profile for continuous integration: 5000 iterations, 16 trials.

    The schedule stays inside the productive step-size band (3e-2 down to
    1e-3) instead of decaying all the way to 1e-12: basin-finding happens at
    large steps, and squeezing the full decay into 5000 iterations leaves the
    search frozen long before it can move between basins.
    """
    base = AdamConfig(iterations=5_000, lr_start=0.03, lr_end=1e-3, trials=16)
    return replace(base, **overrides)


# ---------------------------------------------------------------------------
# Parametrizations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuantumParams:
    """Layout of the flat real parameter vector of a quantum model.

    rank1 mode stores one complex d-vector per preparation and per effect;
    full mode stores d x d complex matrices.  The instrument always uses
    ``kraus_per_outcome`` complex d x d matrices per outcome.  With
    ``commuting_preps`` the preparations are real diagonal distributions,
    restricting the search to channels with commuting states.
    """

    d: int
    m: int
    mode: str = "rank1"
    kraus_per_outcome: int = 1
    commuting_preps: bool = False

    def __post_init__(self):
        if self.mode not in ("rank1", "full"):
            raise StructureError(f"unknown mode {self.mode!r}")
        if self.d < 2 or self.m < 1 or self.kraus_per_outcome < 1:
            raise StructureError("need d >= 2, m >= 1, kraus_per_outcome >= 1")

    @property
    def prep_size(self) -> int:
        if self.commuting_preps:
            return self.m * self.d
        per = self.d if self.mode == "rank1" else self.d * self.d
        return 2 * self.m * per

    @property
    def effect_size(self) -> int:
        per = self.d if self.mode == "rank1" else self.d * self.d
        return 2 * self.m * per

    @property
    def kraus_size(self) -> int:
        return 2 * 2 * self.kraus_per_outcome * self.d * self.d

    @property
    def size(self) -> int:
        return self.prep_size + self.effect_size + self.kraus_size

    def random(self, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(self.size)


def _to_complex(block: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    pairs = block.reshape(*shape, 2)
    return pairs[..., 0] + 1j * pairs[..., 1]


def _decode_quantum_batch(xs: np.ndarray, p: QuantumParams):
    """Raw batch (B, size) -> (sigma (B,m,d,d), effects (B,m,d,d), kraus (B,2,k,d,d))."""
    if xs.ndim != 2 or xs.shape[1] != p.size:
        raise StructureError(f"expected parameter vectors of size {p.size}")
    b, (d, m, k) = xs.shape[0], (p.d, p.m, p.kraus_per_outcome)
    at = 0

    if p.commuting_preps:
        w = xs[:, at : at + p.prep_size].reshape(b, m, d)
        weight = w * w
        norm = weight.sum(-1)
        if np.any(norm == 0.0):
            raise DegenerateParamsError("all-zero preparation block")
        sigma = np.zeros((b, m, d, d), dtype=complex)
        diag = weight / norm[..., None]
        sigma[:, :, np.arange(d), np.arange(d)] = diag
    elif p.mode == "rank1":
        a = _to_complex(xs[:, at : at + p.prep_size], (b, m, d))
        norm = (a.real**2 + a.imag**2).sum(-1)
        if np.any(norm == 0.0):
            raise DegenerateParamsError("all-zero preparation block")
        sigma = a[..., :, None] * a.conj()[..., None, :] / norm[..., None, None]
    else:
        a = _to_complex(xs[:, at : at + p.prep_size], (b, m, d, d))
        gram = np.matmul(a.conj().swapaxes(-1, -2), a)
        norm = np.einsum("bmii->bm", gram).real
        if np.any(norm == 0.0):
            raise DegenerateParamsError("all-zero preparation block")
        sigma = gram / norm[..., None, None]
    at += p.prep_size

    if p.mode == "rank1":
        v = _to_complex(xs[:, at : at + p.effect_size], (b, m, d))
        raw = v[..., :, None] * v.conj()[..., None, :]
    else:
        v = _to_complex(xs[:, at : at + p.effect_size], (b, m, d, d))
        raw = np.matmul(v.conj().swapaxes(-1, -2), v)
    top = np.linalg.eigvalsh(raw.sum(axis=1))[:, -1]
    if np.any(top == 0.0):
        raise DegenerateParamsError("all-zero effect block")
    effects = raw / top[:, None, None, None]
    at += p.effect_size

    c = _to_complex(xs[:, at:], (b, 2, k, d, d))
    gram = np.matmul(c.conj().swapaxes(-1, -2), c).sum(axis=(1, 2))
    top = np.linalg.eigvalsh(gram)[:, -1]
    if np.any(top == 0.0):
        raise DegenerateParamsError("all-zero instrument block")
    kraus = c / np.sqrt(top)[:, None, None, None, None]
    return sigma, effects, kraus


def decode_quantum(x: np.ndarray, params: QuantumParams) -> QuantumModel:
    """Decode one raw vector into a model with ``rho0 = |0><0|``."""
    sigma, effects, kraus = _decode_quantum_batch(np.asarray(x, float)[None], params)
    rho0 = np.zeros((params.d, params.d), dtype=complex)
    rho0[0, 0] = 1.0
    return QuantumModel(
        rho0=rho0,
        channel=EBChannel(effects=list(effects[0]), preps=list(sigma[0])),
        instrument=Instrument(kraus0=list(kraus[0, 0]), kraus1=list(kraus[0, 1])),
    )


def _chain_prob(pi, ts, tau, outcomes) -> np.ndarray:
    """Batched protocol probability from branch statistics.

    The last step contributes the full trace of the moved state rather than
    another branch readout, which keeps the value exact even while the POVM
    sum is still below the identity.
    """
    v = pi
    for a in outcomes[:-1]:
        v = np.matmul(ts[:, a], v[..., None])[..., 0]
    return (tau[:, outcomes[-1], :] * v).sum(-1)


def _quantum_objective_batch(xs: np.ndarray, p: QuantumParams, outcomes) -> np.ndarray:
    sigma, effects, kraus = _decode_quantum_batch(xs, p)
    b, d, m = xs.shape[0], p.d, p.m
    # moved[b,a,i] = Σ_k K σ_i K† for outcome a
    moved = np.zeros((b, 2, m, d, d), dtype=complex)
    for a in (0, 1):
        for kk in range(p.kraus_per_outcome):
            k_op = kraus[:, a, kk]
            moved[:, a] += np.matmul(
                np.matmul(k_op[:, None], sigma), k_op.conj().swapaxes(-1, -2)[:, None]
            )
    moved_flat = moved.reshape(b, 2, m, d * d)
    effects_flat = effects.swapaxes(-1, -2).reshape(b, m, d * d)
    # ts[b,a,j,i] = Tr(moved[b,a,i] @ effects[b,j])
    ts = np.matmul(moved_flat, effects_flat[:, None].swapaxes(-1, -2)).real
    ts = ts.swapaxes(-1, -2)
    tau = moved[:, :, :, np.arange(d), np.arange(d)].sum(-1).real
    pi = effects[:, :, 0, 0].real  # Tr(|0><0| E_i)
    return _chain_prob(pi, ts, tau, outcomes)


def objective(x: np.ndarray, params: QuantumParams, seq: str) -> float:
    """Protocol probability of ``seq`` for the decoded model; equals
    ``quantum_sequence_prob(decode_quantum(x, params), seq)``."""
    outcomes = sequence_outcomes(seq)
    return float(_quantum_objective_batch(np.asarray(x, float)[None], params, outcomes)[0])


@dataclass(frozen=True)
class ClassicalParams:
    """Flat layout for a d-state machine: pi block plus the stacked columns
    of (t0; t1), each squared and normalized per column."""

    d: int

    @property
    def size(self) -> int:
        return self.d + 2 * self.d * self.d

    def random(self, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal(self.size)


def _decode_classical_batch(xs: np.ndarray, p: ClassicalParams):
    if xs.ndim != 2 or xs.shape[1] != p.size:
        raise StructureError(f"expected parameter vectors of size {p.size}")
    d = p.d
    w = xs[:, :d] ** 2
    total = w.sum(-1, keepdims=True)
    if np.any(total == 0.0):
        raise DegenerateParamsError("all-zero pi block")
    pi = w / total
    cols = xs[:, d:].reshape(-1, 2 * d, d) ** 2
    colsum = cols.sum(axis=1, keepdims=True)
    if np.any(colsum == 0.0):
        raise DegenerateParamsError("all-zero transition column")
    cols = cols / colsum
    return pi, cols[:, :d, :], cols[:, d:, :]


def decode_classical(x: np.ndarray, params: ClassicalParams) -> ClassicalModel:
    pi, t0, t1 = _decode_classical_batch(np.asarray(x, float)[None], params)
    return ClassicalModel(pi=pi[0], t0=t0[0], t1=t1[0])


def _classical_objective_batch(xs: np.ndarray, p: ClassicalParams, outcomes) -> np.ndarray:
    pi, t0, t1 = _decode_classical_batch(xs, p)
    ts = (t0, t1)
    v = pi
    for a in outcomes:
        v = np.matmul(ts[a], v[..., None])[..., 0]
    return v.sum(-1)


def classical_objective(x: np.ndarray, params: ClassicalParams, seq: str) -> float:
    outcomes = sequence_outcomes(seq)
    return float(_classical_objective_batch(np.asarray(x, float)[None], params, outcomes)[0])


# ---------------------------------------------------------------------------
# Finite differences and the Adam loop
# ---------------------------------------------------------------------------

def _fd_gradient(f_batch, x: np.ndarray, steps: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    probes = np.broadcast_to(x, (2 * n, n)).copy()
    idx = np.arange(n)
    probes[2 * idx, idx] += steps
    probes[2 * idx + 1, idx] -= steps
    f = f_batch(probes)
    return (f[0::2] - f[1::2]) / (2 * steps)


def gradient(x: np.ndarray, params: QuantumParams, seq: str, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient of the quantum objective at fixed step ``h``."""
    outcomes = sequence_outcomes(seq)
    x = np.asarray(x, float)
    return _fd_gradient(
        lambda xs: _quantum_objective_batch(xs, params, outcomes),
        x,
        np.full(x.shape[0], float(h)),
    )


@dataclass(frozen=True)
class TrialResult:
    trial: int
    objective: float
    plateau_iteration: int
    envelope: tuple[tuple[int, float], ...]  # (iteration, best-so-far) at improvements


def _ascend_group(f_batch, n: int, config: AdamConfig, trials):
    """Run several independent Adam trials in lockstep.

    Each trial draws its start from its own RNG stream ``(seed, trial)``
    and evolves independently; vectorizing them into one array simply
    amortizes the per-call cost of the batched objective.  One probe batch
    per iteration covers every trial's finite-difference stencil plus its
    base point.
    """
    r = len(trials)
    xs = np.stack(
        [np.random.default_rng([config.seed, trial]).standard_normal(n) for trial in trials]
    )
    m1 = np.zeros((r, n))
    m2 = np.zeros((r, n))
    best = np.full(r, -np.inf)
    best_x = xs.copy()
    improvements: list[list[tuple[int, float]]] = [[] for _ in range(r)]
    idx = np.arange(n)
    probes = np.empty((r, 2 * n + 1, n))
    for t in range(config.iterations):
        steps = config.fd_step * np.maximum(1.0, np.abs(xs))
        probes[:] = xs[:, None, :]
        probes[:, 1 + 2 * idx, idx] += steps
        probes[:, 2 + 2 * idx, idx] -= steps
        f = f_batch(probes.reshape(-1, n)).reshape(r, 2 * n + 1)
        f0 = f[:, 0]
        improved = f0 > best
        if improved.any():
            best_x[improved] = xs[improved]
            best[improved] = f0[improved]
            for i in np.flatnonzero(improved):
                improvements[i].append((t, float(f0[i])))
        g = (f[:, 1::2] - f[:, 2::2]) / (2 * steps)
        m1 = config.beta1 * m1 + (1 - config.beta1) * g
        m2 = config.beta2 * m2 + (1 - config.beta2) * (g * g)
        corr1 = 1 - config.beta1 ** (t + 1)
        corr2 = 1 - config.beta2 ** (t + 1)
        xs = xs + config.learning_rate(t) * (m1 / corr1) / (np.sqrt(m2 / corr2) + config.epsilon)
    out = []
    for i, trial in enumerate(trials):
        final = float(best[i])
        out.append(
            (
                TrialResult(
                    trial=trial,
                    objective=final,
                    plateau_iteration=_plateau_iteration(improvements[i], final),
                    envelope=tuple(improvements[i]),
                ),
                best_x[i],
            )
        )
    return out


def _plateau_iteration(improvements, final_best: float) -> int:
    for t, value in improvements:
        if value >= final_best - PLATEAU_SLACK:
            return t
    return 0


def _quantum_group(args):
    config, seq, layout, trials = args
    outcomes = sequence_outcomes(seq)
    return _ascend_group(
        lambda xs: _quantum_objective_batch(xs, layout, outcomes),
        layout.size,
        config,
        trials,
    )


def _classical_group(args):
    config, seq, layout, trials = args
    outcomes = sequence_outcomes(seq)
    return _ascend_group(
        lambda xs: _classical_objective_batch(xs, layout, outcomes),
        layout.size,
        config,
        trials,
    )


def _resolve_workers(config: AdamConfig) -> int:
    cap = os.environ.get(THREADS_ENV)
    workers = config.workers if config.workers else (os.cpu_count() or 1)
    if cap:
        workers = min(workers, max(1, int(cap)))
    return max(1, min(workers, config.trials))


def _pool_context():
    # fork avoids re-importing the parent's __main__, so trials can be
    # launched from scripts, REPLs and server workers alike; workers only
    # run numpy compute.  Non-POSIX platforms fall back to spawn.
    try:
        return get_context("fork")
    except ValueError:
        return get_context("spawn")


def _run_trials(worker, config: AdamConfig, seq: str, layout):
    """Distribute trials over worker processes; every trial's result is
    independent of the grouping because each one owns its RNG stream and
    its slice of the vectorized arithmetic."""
    workers = _resolve_workers(config)
    groups = [
        tuple(int(i) for i in g)
        for g in np.array_split(np.arange(config.trials), workers)
        if len(g)
    ]
    tasks = [(config, seq, layout, group) for group in groups]
    if len(tasks) == 1:
        completed = [worker(tasks[0])]
    else:
        with ProcessPoolExecutor(max_workers=workers, mp_context=_pool_context()) as pool:
            completed = list(pool.map(worker, tasks))
    flat = [item for group in completed for item in group]
    flat.sort(key=lambda pair: pair[0].trial)
    return flat


@dataclass(frozen=True)
class QuantumOptResult:
    model: QuantumModel
    probability: float
    params: np.ndarray
    trials: tuple[TrialResult, ...]
    best_trial: int
    povm_residual: float
    instrument_residual: float


@dataclass(frozen=True)
class ClassicalOptResult:
    model: ClassicalModel
    probability: float
    params: np.ndarray
    trials: tuple[TrialResult, ...]
    best_trial: int


def adam_maximize(config: AdamConfig, seq: str, d: int, m: int) -> QuantumOptResult:
    """Maximize the protocol probability of ``seq`` over d-dimensional models
    with m channel branches, over ``config.trials`` random restarts."""
    layout = QuantumParams(
        d=d,
        m=m,
        mode=config.mode,
        kraus_per_outcome=config.kraus_per_outcome,
        commuting_preps=config.commuting_preps,
    )
    completed = _run_trials(_quantum_group, config, seq, layout)
    best_idx = max(range(len(completed)), key=lambda i: (completed[i][0].objective, -i))
    best_result, best_x = completed[best_idx]
    model = decode_quantum(best_x, layout)
    povm_gap = sum(model.channel.effects) - np.eye(d)
    kraus_gap = model.instrument.kraus_sum() - np.eye(d)
    return QuantumOptResult(
        model=model,
        probability=best_result.objective,
        params=best_x,
        trials=tuple(r for r, _ in completed),
        best_trial=best_result.trial,
        povm_residual=spectral_norm(povm_gap),
        instrument_residual=spectral_norm(kraus_gap),
    )


def classical_maximize(config: AdamConfig, seq: str, d: int) -> ClassicalOptResult:
    """Maximize the sequence probability over d-state classical machines."""
    layout = ClassicalParams(d=d)
    completed = _run_trials(_classical_group, config, seq, layout)
    best_idx = max(range(len(completed)), key=lambda i: (completed[i][0].objective, -i))
    best_result, best_x = completed[best_idx]
    return ClassicalOptResult(
        model=decode_classical(best_x, layout),
        probability=best_result.objective,
        params=best_x,
        trials=tuple(r for r, _ in completed),
        best_trial=best_result.trial,
    )


def run_log_csv(trials) -> str:
    lines = ["trial,objective,plateau_iteration"]
    for t in trials:
        lines.append(f"{t.trial},{t.objective:.17g},{t.plateau_iteration}")
    return "\n".join(lines) + "\n"
