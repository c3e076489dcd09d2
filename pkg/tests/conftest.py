import numpy as np
import pytest

from temporal_advantage import ClassicalModel, EBChannel, Instrument, QuantumModel


def random_classical(rng, d):
    pi = rng.dirichlet(np.ones(d))
    stacked = rng.dirichlet(np.ones(2 * d), size=d).T  # columns sum to 1
    return ClassicalModel(pi=pi, t0=stacked[:d], t1=stacked[d:])


def random_density(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_povm(rng, d, m):
    raw = [None] * m
    for i in range(m):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        raw[i] = g @ g.conj().T
    total = sum(raw)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.conj().T
    return [inv_sqrt @ e @ inv_sqrt for e in raw]


def random_channel(rng, d, m):
    return EBChannel(
        effects=random_povm(rng, d, m),
        preps=[random_density(rng, d) for _ in range(m)],
    )


def random_instrument(rng, d, kraus_per_outcome=1):
    raw = rng.standard_normal((2, kraus_per_outcome, d, d)) + 1j * rng.standard_normal(
        (2, kraus_per_outcome, d, d)
    )
    total = sum(k.conj().T @ k for k in raw.reshape(-1, d, d))
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.conj().T
    normalized = raw @ inv_sqrt
    return Instrument(kraus0=list(normalized[0]), kraus1=list(normalized[1]))


def random_quantum(rng, d, m, kraus_per_outcome=1):
    return QuantumModel(
        rho0=random_density(rng, d),
        channel=random_channel(rng, d, m),
        instrument=random_instrument(rng, d, kraus_per_outcome),
    )


def random_commuting_preps_channel(rng, d, m):
    """Channel whose preps share a random eigenbasis (commuting states)."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    basis, _ = np.linalg.qr(g)
    preps = [
        basis @ np.diag(rng.dirichlet(np.ones(d))) @ basis.conj().T for _ in range(m)
    ]
    return EBChannel(effects=random_povm(rng, d, m), preps=preps)


def random_commuting_povm_channel(rng, d, m):
    """Channel whose effects share a random eigenbasis (commuting POVM)."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    basis, _ = np.linalg.qr(g)
    weights = rng.dirichlet(np.ones(m), size=d).T  # weights[i, l], sum_i = 1
    effects = [basis @ np.diag(weights[i]) @ basis.conj().T for i in range(m)]
    return EBChannel(effects=effects, preps=[random_density(rng, d) for _ in range(m)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
