"""Explicit model families: one-way and cyclic machines, the harmonic-frame
quantum construction, diagonal embeddings of classical models, and a
brute-force minimum-dimension search for deterministic generation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import (
    ClassicalModel,
    EBChannel,
    Instrument,
    QuantumModel,
    ResourceLimitError,
    StructureError,
    check_sequence,
)

DC_LENGTH_LIMIT = 12
DC_DIM_LIMIT = 8


def one_tick(length: int) -> str:
    """The outcome string ``0...01`` of the given length."""
    if length < 1:
        raise StructureError("one-tick sequences need length >= 1")
    return "0" * (length - 1) + "1"


def one_way_classical(length: int) -> ClassicalModel:
    """The (length-1)-state machine maximizing the one-tick probability.

    Every state self-loops on outcome 0 with probability ``1/length``; the
    walk otherwise advances one state per outcome 0 and emits the single 1
    from the terminal state, giving ``p(one_tick) = (1 - 1/length)^length``.
    """
    if length < 2:
        raise StructureError("one-way models need length >= 2")
    d = length - 1
    stay = 1.0 / length
    move = 1.0 - stay
    t0 = np.diag(np.full(d, stay))
    for i in range(d - 1):
        t0[i, i + 1] = move  # state i+1 -> state i on outcome 0
    t1 = np.zeros((d, d))
    t1[d - 1, 0] = move  # state 0 -> state d-1 on outcome 1
    pi = np.zeros(d)
    pi[d - 1] = 1.0
    return ClassicalModel(pi=pi, t0=t0, t1=t1)


def cyclic_deterministic(states: int) -> ClassicalModel:
    """Deterministic cycle over ``states`` states emitting ``0...01`` repeatedly."""
    if states < 2:
        raise StructureError("cyclic models need at least 2 states")
    t0 = np.zeros((states, states))
    for i in range(states - 1):
        t0[i + 1, i] = 1.0
    t1 = np.zeros((states, states))
    t1[0, states - 1] = 1.0
    pi = np.zeros(states)
    pi[0] = 1.0
    return ClassicalModel(pi=pi, t0=t0, t1=t1)


# ---------------------------------------------------------------------------
# Harmonic equiangular tight frame and the quantum construction built on it
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ETFFrame:
    """``d`` unit vectors in the subspace orthogonal to ``|0>`` with constant
    pairwise overlap ``-1/(d-1)``.

    ``degenerate`` flags the d = 2 case, where the two "frame" vectors are
    antipodal copies of ``|1>`` rather than a genuine frame.
    """

    d: int
    vectors: tuple[np.ndarray, ...]
    degenerate: bool = False

    @property
    def size(self) -> int:
        return len(self.vectors)


def etf_states(d: int) -> ETFFrame:
    """Harmonic frame: ``ψ_n = (1/√(d-1)) Σ_{k=1}^{d-1} ζ^{nk} |k>`` with
    ``ζ = exp(2πi/d)`` and ``n = 1..d``."""
    if d < 2:
        raise StructureError("frame construction needs dimension >= 2")
    zeta = np.exp(2j * np.pi / d)
    vectors = []
    for n in range(1, d + 1):
        v = np.zeros(d, dtype=complex)
        for k in range(1, d):
            v[k] = zeta ** (n * k)
        v /= np.sqrt(d - 1)
        v.setflags(write=False)
        vectors.append(v)
    return ETFFrame(d=d, vectors=tuple(vectors), degenerate=(d == 2))


def _projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def etf_quantum_model(d: int, tick_index: int = 0) -> QuantumModel:
    """Quantum model emulating a (d+1)-state cycle with a d-level system.

    The channel walks ``|0> -> ψ_1 -> ... -> ψ_d -> |0>``: branch 1 measures
    ``|0><0|`` and prepares ``ψ_1``, branch n+1 measures ``(d-1)/d ψ_n`` and
    prepares the next frame vector (the last branch closes the cycle on
    ``|0>``).  The instrument emits outcome 1 on the population of basis
    state ``tick_index`` (``K1 = |t><t|``, ``K0 = 1 - K1``).

    ``tick_index = 0`` reproduces the one-tick violations of the classical
    bounds at d = 3 and 4; ``tick_index = d-1`` is the alternate convention
    with the outcome-1 projector on the last basis state, which does not.
    d = 2 is allowed but uses the degenerate frame and shows no violation.
    """
    if d < 2:
        raise StructureError("construction needs dimension >= 2")
    if not 0 <= tick_index < d:
        raise StructureError(f"tick_index must be in [0, {d})")
    frame = etf_states(d)
    ket0 = np.zeros(d, dtype=complex)
    ket0[0] = 1.0
    effects = [_projector(ket0)]
    effects.extend((d - 1) / d * _projector(v) for v in frame.vectors)
    preps = [_projector(v) for v in frame.vectors]
    preps.append(_projector(ket0))
    k1 = np.zeros((d, d), dtype=complex)
    k1[tick_index, tick_index] = 1.0
    k0 = np.eye(d, dtype=complex) - k1
    return QuantumModel(
        rho0=_projector(ket0),
        channel=EBChannel(effects=effects, preps=preps),
        instrument=Instrument(kraus0=[k0], kraus1=[k1]),
    )


def diagonal_quantum_from_classical(model: ClassicalModel) -> QuantumModel:
    """Embed a classical machine as a quantum model with identical statistics.

    Channel branches measure and re-prepare the computational basis states
    (a completely dephasing channel), and each nonzero transition entry
    becomes one Kraus operator ``√(T_a[j,i]) |j><i|``.
    """
    d = model.d
    basis = np.eye(d, dtype=complex)
    projectors = [_projector(basis[i]) for i in range(d)]
    kraus: list[list[np.ndarray]] = [[], []]
    for a in (0, 1):
        t = model.transition(a)
        for i in range(d):
            for j in range(d):
                if t[j, i] > 0.0:
                    k = np.zeros((d, d), dtype=complex)
                    k[j, i] = np.sqrt(t[j, i])
                    kraus[a].append(k)
        if not kraus[a]:
            kraus[a].append(np.zeros((d, d), dtype=complex))
    return QuantumModel(
        rho0=np.diag(model.pi).astype(complex),
        channel=EBChannel(effects=projectors, preps=projectors),
        instrument=Instrument(kraus0=kraus[0], kraus1=kraus[1]),
    )


# ---------------------------------------------------------------------------
# Deterministic complexity
# ---------------------------------------------------------------------------

def deterministic_complexity(seq: str, d_max: int = DC_DIM_LIMIT) -> int | None:
    """Smallest number of states of a deterministic machine emitting ``seq``
    as a prefix with probability one, or None if it exceeds ``d_max``.

    A deterministic machine assigns each state a single emitted outcome and
    a single successor; the search enumerates state-label assignments along
    the sequence with first-occurrence canonical labeling.
    """
    bits = [int(c) for c in check_sequence(seq)]
    if len(bits) > DC_LENGTH_LIMIT:
        raise ResourceLimitError(f"search supports length <= {DC_LENGTH_LIMIT}")
    if d_max > DC_DIM_LIMIT:
        raise ResourceLimitError(f"search supports d_max <= {DC_DIM_LIMIT}")
    if d_max < 1:
        raise StructureError("d_max must be >= 1")
    for d in range(1, d_max + 1):
        if _deterministic_machine_exists(bits, d):
            return d
    return None


def _deterministic_machine_exists(bits: list[int], d: int) -> bool:
    n = len(bits)
    emit = {0: bits[0]}  # label -> outcome, label 0 is the start state
    succ: dict[int, int] = {}  # label -> label

    def extend(t: int, label: int, used: int) -> bool:
        if t == n - 1:
            return True
        want = bits[t + 1]
        forced = succ.get(label)
        if forced is not None:
            return emit[forced] == want and extend(t + 1, forced, used)
        for nxt in range(used + 1):
            if nxt == used:
                if used == d:
                    break
                emit[nxt] = want
                succ[label] = nxt
                if extend(t + 1, nxt, used + 1):
                    return True
                del emit[nxt], succ[label]
            elif emit[nxt] == want:
                succ[label] = nxt
                if extend(t + 1, nxt, used):
                    return True
                del succ[label]
        return False

    return extend(0, 0, 1)
