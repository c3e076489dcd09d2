"""Sequence-probability engines for classical and quantum models.

The quantum protocol interleaves a fixed measure-and-prepare channel with a
repeated two-outcome instrument: the channel acts before every measurement,
including the first.  Collecting the branch statistics of the channel into
an m-state stochastic model reproduces the protocol's distribution exactly;
``effective_classical_model`` performs that extraction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import (
    ClassicalModel,
    EBChannel,
    QuantumModel,
    ResourceLimitError,
    StructureError,
    dagger,
    sequence_outcomes,
)

CLASSICAL_LENGTH_LIMIT = 20
QUANTUM_LENGTH_LIMIT = 12


def apply_channel(channel: EBChannel, rho: np.ndarray) -> np.ndarray:
    """One measure-and-prepare pass: ``Σ_i Tr(rho E_i) σ_i``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (channel.d, channel.d):
        raise StructureError(
            f"state has shape {rho.shape}, channel dimension is {channel.d}"
        )
    out = np.zeros_like(rho)
    for e, s in zip(channel.effects, channel.preps):
        out += np.trace(rho @ e).real * s
    return out


def classical_sequence_prob(model: ClassicalModel, seq: str) -> float:
    """Probability that the machine emits ``seq`` as its first outcomes."""
    v = model.pi.copy()
    for a in sequence_outcomes(seq):
        v = model.transition(a) @ v
    return float(v.sum())


def quantum_sequence_prob(model: QuantumModel, seq: str, use_channel: bool = True) -> float:
    """Probability of ``seq`` under repeated measurement of the system.

    With ``use_channel`` the fixed channel acts before every instrument
    application (including the first); without it the instrument alone is
    iterated.
    """
    rho = model.rho0.astype(complex)
    for a in sequence_outcomes(seq):
        if use_channel:
            rho = apply_channel(model.channel, rho)
        rho = model.instrument.apply(a, rho)
    return float(np.trace(rho).real)


def effective_classical_model(model: QuantumModel) -> ClassicalModel:
    """The m-state stochastic model reproducing the channel protocol exactly.

    ``T_a[j, i] = Tr(I_a(σ_i) E_j)`` and ``pi[i] = Tr(rho0 E_i)``; the branch
    label of the channel is the classical state.
    """
    channel = model.channel
    m = channel.m
    pi = np.array([np.trace(model.rho0 @ e).real for e in channel.effects])
    ts = np.zeros((2, m, m))
    for a in (0, 1):
        for i, s in enumerate(channel.preps):
            moved = model.instrument.apply(a, s)
            for j, e in enumerate(channel.effects):
                ts[a, j, i] = np.trace(moved @ e).real
    return ClassicalModel(pi=pi, t0=ts[0], t1=ts[1])


# ---------------------------------------------------------------------------
# Full distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Distribution:
    """Probabilities of all ``2^length`` outcome strings of one length.

    Entries are stored densely, indexed by the integer value of the outcome
    string, which coincides with lexicographic order.
    """

    length: int
    probs: np.ndarray

    def __getitem__(self, seq: str) -> float:
        if len(seq) != self.length:
            raise KeyError(seq)
        return float(self.probs[int(seq, 2)])

    def items(self):
        for k in range(2 ** self.length):
            yield format(k, f"0{self.length}b"), float(self.probs[k])

    def total(self) -> float:
        return float(self.probs.sum())

    def to_csv(self) -> str:
        lines = ["sequence,probability"]
        for seq, p in self.items():
            lines.append(f"{seq},{p:.17g}")
        return "\n".join(lines) + "\n"


def full_distribution(model: ClassicalModel | QuantumModel, length: int) -> Distribution:
    """Exhaustive distribution over all outcome strings of ``length``."""
    if length < 1:
        raise StructureError("length must be >= 1")
    if isinstance(model, ClassicalModel):
        if length > CLASSICAL_LENGTH_LIMIT:
            raise ResourceLimitError(
                f"classical distributions support length <= {CLASSICAL_LENGTH_LIMIT}"
            )
        return _classical_distribution(model, length)
    if isinstance(model, QuantumModel):
        if length > QUANTUM_LENGTH_LIMIT:
            raise ResourceLimitError(
                f"quantum distributions support length <= {QUANTUM_LENGTH_LIMIT}"
            )
        return _quantum_distribution(model, length)
    raise StructureError(f"unsupported model type {type(model).__name__}")


def _classical_distribution(model: ClassicalModel, length: int) -> Distribution:
    out = np.empty(2 ** length)

    def walk(v: np.ndarray, depth: int, code: int):
        if depth == length:
            out[code] = v.sum()
            return
        for a in (0, 1):
            walk(model.transition(a) @ v, depth + 1, (code << 1) | a)

    walk(model.pi, 0, 0)
    return Distribution(length=length, probs=out)


def _quantum_distribution(model: QuantumModel, length: int) -> Distribution:
    out = np.empty(2 ** length)

    def walk(rho: np.ndarray, depth: int, code: int):
        if depth == length:
            out[code] = np.trace(rho).real
            return
        mixed = apply_channel(model.channel, rho)
        for a in (0, 1):
            walk(model.instrument.apply(a, mixed), depth + 1, (code << 1) | a)

    walk(model.rho0.astype(complex), 0, 0)
    return Distribution(length=length, probs=out)
