"""Rewriting a measure-and-prepare channel with only d branches when its
preparation states or its POVM elements commute.

Either condition certifies that the channel protocol is simulable by a
classical machine with as many states as the Hilbert-space dimension: the
rewritten channel has d branches, and any d-branch channel embeds diagonally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import (
    DEFAULT_TOL,
    EBChannel,
    NonCommutingError,
    StructureError,
    dagger,
    spectral_norm,
)

SIMDIAG_RETRIES = 5


def commute_check(ops, tol: float = DEFAULT_TOL) -> float:
    """Largest pairwise commutator norm ``max ‖AB - BA‖`` (spectral norm).

    Values at or below ``tol`` count as commuting for the reductions below.
    """
    ops = [np.asarray(a, complex) for a in ops]
    d = ops[0].shape[0]
    for a in ops:
        if a.shape != (d, d):
            raise StructureError("commutator check needs equal square matrices")
    worst = 0.0
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            worst = max(worst, spectral_norm(ops[i] @ ops[j] - ops[j] @ ops[i]))
    return worst


def simultaneous_eigenbasis(ops, tol: float = DEFAULT_TOL, seed: int = 0) -> np.ndarray:
    """Unitary whose columns diagonalize every matrix of a commuting family.

    Diagonalizes a randomly weighted sum of the family; generic weights
    split degeneracies almost surely, so a few retries with fresh weights
    suffice.  The candidate basis is accepted only if every member is
    diagonal in it within ``tol`` (largest off-diagonal magnitude).
    """
    ops = [np.asarray(a, complex) for a in ops]
    rng = np.random.default_rng(seed)
    best_residual = np.inf
    for _ in range(SIMDIAG_RETRIES):
        weights = rng.standard_normal(len(ops))
        mix = sum(w * (a + dagger(a)) / 2 for w, a in zip(weights, ops))
        _, basis = np.linalg.eigh(mix)
        residual = 0.0
        for a in ops:
            rotated = dagger(basis) @ a @ basis
            off = rotated - np.diag(np.diag(rotated))
            residual = max(residual, float(np.abs(off).max()))
        if residual <= tol:
            return basis
        best_residual = min(best_residual, residual)
    raise NonCommutingError(
        f"no common eigenbasis found (best off-diagonal residual {best_residual:.3e})",
        best_residual,
    )


def probe_states(d: int, n_random: int = 20, seed: int = 0) -> list[np.ndarray]:
    """Tomographically complete probes: basis states, pairwise real and
    imaginary superpositions, plus random density matrices."""
    rng = np.random.default_rng(seed)
    probes = []
    eye = np.eye(d, dtype=complex)
    for k in range(d):
        probes.append(np.outer(eye[k], eye[k].conj()))
    for k in range(d):
        for l in range(k + 1, d):
            for phase in (1.0, 1.0j):
                v = (eye[k] + phase * eye[l]) / np.sqrt(2)
                probes.append(np.outer(v, v.conj()))
    for _ in range(n_random):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        rho = g @ dagger(g)
        probes.append(rho / np.trace(rho).real)
    return probes


@dataclass(frozen=True)
class ReductionResult:
    """A d-branch rewrite of a channel, the eigenbasis used, and the largest
    deviation of the rewritten channel's action over the probe set."""

    reduced: EBChannel
    basis: np.ndarray
    route: str
    max_residual: float


def _action_residual(original: EBChannel, reduced: EBChannel, seed: int = 0) -> float:
    from .engine import apply_channel  # local import avoids a cycle

    worst = 0.0
    for rho in probe_states(original.d, seed=seed):
        gap = apply_channel(original, rho) - apply_channel(reduced, rho)
        worst = max(worst, float(np.linalg.norm(gap)))
    return worst


def reduce_commuting_states(channel: EBChannel, tol: float = DEFAULT_TOL) -> ReductionResult:
    """Rewrite a channel with commuting preparation states using d branches.

    In the common eigenbasis each prep is ``σ_i = diag(s_i)``; collecting
    ``F_l = Σ_i s_i[l] E_i`` yields a valid POVM, and the channel becomes
    "measure F, prepare an eigenbasis state".
    """
    residual = commute_check(channel.preps)
    if residual > tol:
        raise NonCommutingError(
            f"preps do not commute (max commutator norm {residual:.3e})", residual
        )
    basis = simultaneous_eigenbasis(channel.preps, tol=tol)
    d = channel.d
    weights = np.stack(
        [np.diag(dagger(basis) @ s @ basis).real for s in channel.preps]
    )  # weights[i, l] = s_i[l]
    effects = []
    preps = []
    for l in range(d):
        f = np.zeros((d, d), dtype=complex)
        for i, e in enumerate(channel.effects):
            f += weights[i, l] * e
        effects.append(f)
        preps.append(np.outer(basis[:, l], basis[:, l].conj()))
    reduced = EBChannel(effects=effects, preps=preps)
    return ReductionResult(
        reduced=reduced,
        basis=basis,
        route="commuting-states",
        max_residual=_action_residual(channel, reduced),
    )


def reduce_commuting_povm(channel: EBChannel, tol: float = DEFAULT_TOL) -> ReductionResult:
    """Rewrite a channel with commuting POVM elements using d branches.

    In the common eigenbasis each effect is ``E_i = Σ_l e_i[l] |l><l|``; the
    reduced channel measures the eigenbasis and prepares the mixtures
    ``σ̃_l = Σ_i e_i[l] σ_i``.
    """
    residual = commute_check(channel.effects)
    if residual > tol:
        raise NonCommutingError(
            f"effects do not commute (max commutator norm {residual:.3e})", residual
        )
    basis = simultaneous_eigenbasis(channel.effects, tol=tol)
    d = channel.d
    weights = np.stack(
        [np.diag(dagger(basis) @ e @ basis).real for e in channel.effects]
    )  # weights[i, l] = e_i[l]
    effects = []
    preps = []
    for l in range(d):
        effects.append(np.outer(basis[:, l], basis[:, l].conj()))
        mixed = np.zeros((d, d), dtype=complex)
        for i, s in enumerate(channel.preps):
            mixed += weights[i, l] * s
        preps.append(mixed)
    reduced = EBChannel(effects=effects, preps=preps)
    return ReductionResult(
        reduced=reduced,
        basis=basis,
        route="commuting-povm",
        max_residual=_action_residual(channel, reduced),
    )


def reduce_channel(channel: EBChannel, route: str = "auto", tol: float = DEFAULT_TOL) -> ReductionResult:
    """Dispatch to whichever reduction applies; ``route`` may pin one."""
    if route == "states":
        return reduce_commuting_states(channel, tol=tol)
    if route == "povm":
        return reduce_commuting_povm(channel, tol=tol)
    if route != "auto":
        raise StructureError(f"unknown route {route!r}")
    if commute_check(channel.preps) <= tol:
        return reduce_commuting_states(channel, tol=tol)
    if commute_check(channel.effects) <= tol:
        return reduce_commuting_povm(channel, tol=tol)
    raise NonCommutingError(
        "neither preps nor effects commute; channel admits no reduction",
        min(commute_check(channel.preps), commute_check(channel.effects)),
    )
