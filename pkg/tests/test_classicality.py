import numpy as np
import pytest

from temporal_advantage import (
    EBChannel,
    NonCommutingError,
    apply_channel,
    choi_matrix,
    commute_check,
    etf_quantum_model,
    reduce_channel,
    reduce_commuting_povm,
    reduce_commuting_states,
    simultaneous_eigenbasis,
    validate_channel,
)
from temporal_advantage.classicality import probe_states

from conftest import (
    random_commuting_povm_channel,
    random_commuting_preps_channel,
    random_density,
    random_povm,
)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def dephasing_channel(d):
    projectors = [np.diag([1.0 if k == i else 0.0 for k in range(d)]).astype(complex) for i in range(d)]
    return EBChannel(effects=projectors, preps=projectors)


def action_gap(a: EBChannel, b: EBChannel, rng) -> float:
    worst = 0.0
    for rho in probe_states(a.d, seed=int(rng.integers(1 << 30))):
        worst = max(worst, np.linalg.norm(apply_channel(a, rho) - apply_channel(b, rho)))
    return worst


def test_commute_check_diagonal_is_zero(rng):
    mats = [np.diag(rng.standard_normal(3)).astype(complex) for _ in range(4)]
    assert commute_check(mats) == 0.0


def test_commute_check_pauli_pair():
    assert commute_check([PAULI_X, PAULI_Z]) == pytest.approx(2.0, abs=1e-12)


def test_frame_channel_states_do_not_commute():
    channel = etf_quantum_model(3).channel
    assert commute_check(channel.preps) > 0.1
    assert commute_check(channel.effects) > 0.1


def test_commute_check_rejects_mixed_dims():
    with pytest.raises(Exception):
        commute_check([np.eye(2), np.eye(3)])


def test_simultaneous_eigenbasis_handles_degenerate_spectra(rng):
    # projectors with heavily degenerate eigenvalues in one shared basis
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    basis, _ = np.linalg.qr(g)
    mats = [
        basis @ np.diag([1.0, 1.0, 0.0, 0.0]) @ basis.conj().T,
        basis @ np.diag([0.0, 1.0, 1.0, 0.0]) @ basis.conj().T,
        basis @ np.diag([2.0, 2.0, 2.0, 1.0]) @ basis.conj().T,
    ]
    found = simultaneous_eigenbasis(mats, tol=1e-9)
    for mat in mats:
        rotated = found.conj().T @ mat @ found
        off = rotated - np.diag(np.diag(rotated))
        assert np.abs(off).max() < 1e-9


def test_simultaneous_eigenbasis_refuses_noncommuting():
    with pytest.raises(NonCommutingError):
        simultaneous_eigenbasis([PAULI_X, PAULI_Z], tol=1e-9)


def test_dephasing_channel_reduces_to_itself(rng):
    channel = dephasing_channel(3)
    result = reduce_commuting_states(channel, tol=1e-9)
    assert result.route == "commuting-states"
    assert result.reduced.m == 3
    assert action_gap(channel, result.reduced, rng) < 1e-12
    # effects of the reduced channel are a permutation of the originals
    for f in result.reduced.effects:
        assert any(np.allclose(f, e, atol=1e-9) for e in channel.effects)


def test_reduce_commuting_states_preserves_action(rng):
    for _ in range(10):
        channel = random_commuting_preps_channel(rng, 3, 5)
        result = reduce_commuting_states(channel, tol=1e-9)
        assert result.reduced.m == 3
        assert result.max_residual < 1e-10
        assert action_gap(channel, result.reduced, rng) < 1e-10
        assert validate_channel(result.reduced, tol=1e-9).ok


def test_reduce_commuting_povm_preserves_action(rng):
    for _ in range(10):
        channel = random_commuting_povm_channel(rng, 3, 5)
        result = reduce_commuting_povm(channel, tol=1e-9)
        assert result.reduced.m == 3
        assert result.max_residual < 1e-10
        assert action_gap(channel, result.reduced, rng) < 1e-10
        assert validate_channel(result.reduced, tol=1e-9).ok


def test_projective_povm_reduction_keeps_preps(rng):
    preps = [random_density(rng, 3) for _ in range(3)]
    projectors = [np.diag([1.0 if k == i else 0.0 for k in range(3)]).astype(complex) for i in range(3)]
    channel = EBChannel(effects=projectors, preps=preps)
    result = reduce_commuting_povm(channel, tol=1e-9)
    # the eigenbasis may permute branches; match each reduced prep to one original
    for prep in result.reduced.preps:
        assert any(np.allclose(prep, s, atol=1e-9) for s in preps)


def test_frame_channel_is_refused(rng):
    channel = etf_quantum_model(3).channel
    with pytest.raises(NonCommutingError) as states_err:
        reduce_commuting_states(channel, tol=1e-9)
    assert states_err.value.residual > 0.1
    with pytest.raises(NonCommutingError):
        reduce_commuting_povm(channel, tol=1e-9)
    with pytest.raises(NonCommutingError):
        reduce_channel(channel, route="auto", tol=1e-9)


def test_reduction_preserves_choi(rng):
    for _ in range(5):
        channel = random_commuting_preps_channel(rng, 3, 5)
        result = reduce_commuting_states(channel, tol=1e-9)
        gap = np.linalg.norm(choi_matrix(channel) - choi_matrix(result.reduced))
        assert gap < 1e-8  # 10x the reduction tolerance


def test_reduce_channel_dispatch(rng):
    states_side = reduce_channel(random_commuting_preps_channel(rng, 3, 5), tol=1e-9)
    assert states_side.route == "commuting-states"
    povm_side = reduce_channel(random_commuting_povm_channel(rng, 3, 5), tol=1e-9)
    assert povm_side.route == "commuting-povm"


def test_near_commuting_inputs_are_refused(rng):
    channel = random_commuting_preps_channel(rng, 3, 4)
    bumped = [p.copy() for p in channel.preps]
    bumped[0] = bumped[0] + 1e-6 * PAULI_X_3()
    noisy = EBChannel(effects=channel.effects, preps=bumped)
    with pytest.raises(NonCommutingError):
        reduce_commuting_states(noisy, tol=1e-9)


def PAULI_X_3():
    x = np.zeros((3, 3), complex)
    x[0, 1] = x[1, 0] = 1.0
    return x


@pytest.mark.slow
def test_commuting_preps_cap_the_one_tick_probability():
    # channels restricted to commuting states cannot beat the 3-state
    # classical optimum, whatever the optimizer does
    from temporal_advantage import AdamConfig, adam_maximize

    config = AdamConfig(
        iterations=2000, lr_start=0.03, lr_end=1e-3, trials=8, seed=11, commuting_preps=True
    )
    result = adam_maximize(config, "0001", d=3, m=5)
    assert result.probability <= 0.31640625 + 1e-4
