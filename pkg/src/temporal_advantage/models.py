"""Domain types for bounded-memory classical and quantum sequence generators.

Conventions used throughout the package:

* Transition matrices are column convention: ``T[j, i]`` is the probability
  of moving from state ``i`` to state ``j`` while emitting the outcome the
  matrix belongs to.  Matrices therefore act on probability vectors from
  the left, ``v' = T @ v``.
* Complex operators are dense ``numpy`` arrays of dtype complex128.
* Outcome sequences are strings over the alphabet ``{"0", "1"}``, e.g.
  ``"0001"``; the leftmost character is the first outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class StructureError(ValueError):
    """Shapes or dimensions of a model's pieces do not fit together."""


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds the supported size guards."""


class DataIntegrityError(RuntimeError):
    """Bundled model data fails its checksum or physicality budget."""


class NonCommutingError(ValueError):
    """A reduction was requested for operators that do not commute."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class DegenerateParamsError(ValueError):
    """Raw optimizer parameters contain an all-zero block and cannot be decoded."""


# ---------------------------------------------------------------------------
# Matrix predicates
# ---------------------------------------------------------------------------

def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def hermiticity_residual(a: np.ndarray) -> float:
    """Largest absolute entry of ``a - a†``."""
    return float(np.abs(a - dagger(a)).max())


def is_hermitian(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return hermiticity_residual(a) <= tol


def min_eigenvalue(a: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part ``(a + a†)/2``.

    Symmetrizing first absorbs round-off so that near-Hermitian inputs can
    be tested for positivity without a separate cleanup step.
    """
    return float(np.linalg.eigvalsh((a + dagger(a)) / 2)[0])


def psd_residual(a: np.ndarray) -> float:
    """How far ``a`` is from positive semidefinite: ``max(0, -λ_min)``."""
    return max(0.0, -min_eigenvalue(a))


def is_psd(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return psd_residual(a) <= tol


def trace_of(a: np.ndarray) -> complex:
    return complex(np.trace(a))


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(a, 2))


def _as_complex_square(a, what: str) -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise StructureError(f"{what} must be a square matrix, got shape {arr.shape}")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------

def check_sequence(seq: str) -> str:
    """Validate an outcome string: non-empty, characters in {0, 1}."""
    if not isinstance(seq, str):
        raise StructureError(f"sequence must be a string of 0/1, got {type(seq).__name__}")
    if len(seq) == 0:
        raise StructureError("sequence must be non-empty")
    if set(seq) - {"0", "1"}:
        raise StructureError(f"sequence may only contain 0 and 1, got {seq!r}")
    return seq


def sequence_outcomes(seq: str) -> tuple[int, ...]:
    """Outcome labels of a validated sequence as integers."""
    return tuple(int(c) for c in check_sequence(seq))


def all_sequences(length: int) -> list[str]:
    """All binary outcome strings of the given length in lexicographic order."""
    if length < 1:
        raise StructureError("sequence length must be >= 1")
    return [format(k, f"0{length}b") for k in range(2 ** length)]


# ---------------------------------------------------------------------------
# Classical models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassicalModel:
    """Finite-state machine: initial distribution plus per-outcome transitions.

    ``t0 + t1`` must be column stochastic for the model to be valid; each
    ``ta[j, i]`` is the probability of the move ``i -> j`` emitting ``a``.
    """

    pi: np.ndarray
    t0: np.ndarray
    t1: np.ndarray

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float).reshape(-1)
        t0 = np.asarray(self.t0, dtype=float)
        t1 = np.asarray(self.t1, dtype=float)
        d = pi.shape[0]
        if d == 0:
            raise StructureError("classical model needs at least one state")
        for name, t in (("t0", t0), ("t1", t1)):
            if t.shape != (d, d):
                raise StructureError(
                    f"{name} must be {d}x{d} to match pi, got shape {t.shape}"
                )
        object.__setattr__(self, "pi", _frozen(pi))
        object.__setattr__(self, "t0", _frozen(t0))
        object.__setattr__(self, "t1", _frozen(t1))

    @property
    def d(self) -> int:
        return self.pi.shape[0]

    def transition(self, outcome: int) -> np.ndarray:
        return self.t0 if outcome == 0 else self.t1


# ---------------------------------------------------------------------------
# Quantum models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EBChannel:
    """Measure-and-prepare channel: POVM effects paired with prepared states.

    Branch ``i`` fires with probability ``Tr(rho @ effects[i])`` and emits
    ``preps[i]``.
    """

    effects: tuple[np.ndarray, ...]
    preps: tuple[np.ndarray, ...]

    def __init__(self, effects: Iterable[np.ndarray], preps: Iterable[np.ndarray]):
        effects = tuple(_frozen(_as_complex_square(e, "effect")) for e in effects)
        preps = tuple(_frozen(_as_complex_square(s, "prep")) for s in preps)
        if not effects:
            raise StructureError("channel needs at least one branch")
        if len(effects) != len(preps):
            raise StructureError(
                f"channel has {len(effects)} effects but {len(preps)} preps"
            )
        d = effects[0].shape[0]
        for a in (*effects, *preps):
            if a.shape != (d, d):
                raise StructureError("all channel operators must share one dimension")
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "preps", preps)

    @property
    def d(self) -> int:
        return self.effects[0].shape[0]

    @property
    def m(self) -> int:
        return len(self.effects)


@dataclass(frozen=True)
class Instrument:
    """Two-outcome quantum instrument given by Kraus operator lists."""

    kraus0: tuple[np.ndarray, ...]
    kraus1: tuple[np.ndarray, ...]

    def __init__(self, kraus0: Iterable[np.ndarray], kraus1: Iterable[np.ndarray]):
        kraus0 = tuple(_frozen(_as_complex_square(k, "kraus operator")) for k in kraus0)
        kraus1 = tuple(_frozen(_as_complex_square(k, "kraus operator")) for k in kraus1)
        if not kraus0 or not kraus1:
            raise StructureError("each outcome needs at least one Kraus operator")
        d = kraus0[0].shape[0]
        for k in (*kraus0, *kraus1):
            if k.shape != (d, d):
                raise StructureError("all Kraus operators must share one dimension")
        object.__setattr__(self, "kraus0", kraus0)
        object.__setattr__(self, "kraus1", kraus1)

    @property
    def d(self) -> int:
        return self.kraus0[0].shape[0]

    def kraus(self, outcome: int) -> tuple[np.ndarray, ...]:
        return self.kraus0 if outcome == 0 else self.kraus1

    def kraus_sum(self) -> np.ndarray:
        """``Σ_{a,k} K† K`` over both outcomes; identity for valid instruments."""
        return sum(dagger(k) @ k for k in (*self.kraus0, *self.kraus1))

    def apply(self, outcome: int, rho: np.ndarray) -> np.ndarray:
        """Sub-normalized post-measurement state ``Σ_k K rho K†`` for one outcome."""
        ks = self.kraus(outcome)
        out = np.zeros_like(rho)
        for k in ks:
            out += k @ rho @ dagger(k)
        return out


@dataclass(frozen=True)
class QuantumModel:
    """Initial state, measure-and-prepare channel and repeated instrument."""

    rho0: np.ndarray
    channel: EBChannel
    instrument: Instrument

    def __post_init__(self):
        rho0 = _frozen(_as_complex_square(self.rho0, "rho0"))
        object.__setattr__(self, "rho0", rho0)
        d = rho0.shape[0]
        if self.channel.d != d or self.instrument.d != d:
            raise StructureError(
                f"dimension mismatch: rho0 is {d}, channel is {self.channel.d}, "
                f"instrument is {self.instrument.d}"
            )

    @property
    def d(self) -> int:
        return self.rho0.shape[0]

    @property
    def m(self) -> int:
        return self.channel.m


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    residual: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    """Residuals of every physicality constraint of a model.

    A constraint is violated when its residual exceeds ``tol``; the report
    is valid iff no constraint is violated.
    """

    tol: float
    checks: tuple[ConstraintCheck, ...] = field(default_factory=tuple)

    @property
    def violations(self) -> tuple[ConstraintCheck, ...]:
        return tuple(c for c in self.checks if c.residual > self.tol)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def max_residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    def summary(self) -> str:
        if self.ok:
            return f"valid (max residual {self.max_residual:.3e}, tol {self.tol:.1e})"
        lines = [f"invalid at tol {self.tol:.1e}:"]
        for c in self.violations:
            detail = f" ({c.detail})" if c.detail else ""
            lines.append(f"  {c.name}: residual {c.residual:.6g}{detail}")
        return "\n".join(lines)


def validate_classical(model: ClassicalModel, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check non-negativity, normalization of pi and column stochasticity."""
    checks = []
    neg_pi = max(0.0, -float(model.pi.min()))
    checks.append(ConstraintCheck("pi_nonnegative", neg_pi))
    s = float(model.pi.sum())
    checks.append(ConstraintCheck("pi_sum", abs(s - 1.0), f"pi sums to {s:.6g}"))
    for name, t in (("t0", model.t0), ("t1", model.t1)):
        checks.append(ConstraintCheck(f"{name}_nonnegative", max(0.0, -float(t.min()))))
    col_sums = (model.t0 + model.t1).sum(axis=0)
    worst = int(np.abs(col_sums - 1.0).argmax())
    checks.append(
        ConstraintCheck(
            "column_stochastic",
            float(np.abs(col_sums - 1.0).max()),
            f"column {worst} of t0+t1 sums to {col_sums[worst]:.6g}",
        )
    )
    return ValidationReport(tol=tol, checks=tuple(checks))


def channel_checks(channel: EBChannel) -> list[ConstraintCheck]:
    """Physicality residuals of a measure-and-prepare channel alone."""
    checks = []
    for i, e in enumerate(channel.effects):
        checks.append(ConstraintCheck(f"effect[{i}]_hermitian", hermiticity_residual(e)))
        checks.append(ConstraintCheck(f"effect[{i}]_psd", psd_residual(e)))
    povm_gap = sum(channel.effects) - np.eye(channel.d)
    checks.append(
        ConstraintCheck(
            "povm_sum", spectral_norm(povm_gap), "spectral norm of sum(effects) - identity"
        )
    )
    for i, s in enumerate(channel.preps):
        checks.append(ConstraintCheck(f"prep[{i}]_hermitian", hermiticity_residual(s)))
        checks.append(ConstraintCheck(f"prep[{i}]_psd", psd_residual(s)))
        checks.append(
            ConstraintCheck(f"prep[{i}]_trace", abs(trace_of(s).real - 1.0))
        )
    return checks


def validate_channel(channel: EBChannel, tol: float = DEFAULT_TOL) -> ValidationReport:
    return ValidationReport(tol=tol, checks=tuple(channel_checks(channel)))


def validate_quantum(model: QuantumModel, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check rho0, every channel branch and the instrument's trace preservation."""
    checks = [
        ConstraintCheck("rho0_hermitian", hermiticity_residual(model.rho0)),
        ConstraintCheck("rho0_psd", psd_residual(model.rho0)),
        ConstraintCheck("rho0_trace", abs(trace_of(model.rho0).real - 1.0)),
    ]
    checks.extend(channel_checks(model.channel))
    kraus_gap = model.instrument.kraus_sum() - np.eye(model.d)
    checks.append(
        ConstraintCheck(
            "kraus_sum", spectral_norm(kraus_gap), "spectral norm of sum(K†K) - identity"
        )
    )
    return ValidationReport(tol=tol, checks=tuple(checks))


def choi_matrix(channel: EBChannel) -> np.ndarray:
    """Choi state of the channel: ``(1/d) Σ_i preps[i] ⊗ effects[i]ᵀ``.

    PSD with unit trace for any valid channel; its separability is what
    distinguishes measure-and-prepare channels among all channels (not
    certified here).
    """
    d = channel.d
    out = np.zeros((d * d, d * d), dtype=complex)
    for e, s in zip(channel.effects, channel.preps):
        out += np.kron(s, e.T)
    return out / d
