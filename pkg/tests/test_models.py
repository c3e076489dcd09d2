import numpy as np
import pytest

from temporal_advantage import (
    ClassicalModel,
    EBChannel,
    Instrument,
    QuantumModel,
    StructureError,
    choi_matrix,
    etf_quantum_model,
    load_builtin,
    one_way_classical,
    validate_channel,
    validate_classical,
    validate_quantum,
)
from temporal_advantage.models import all_sequences, check_sequence, is_psd

from conftest import random_channel, random_classical, random_quantum


def test_one_way_model_is_exactly_stochastic():
    report = validate_classical(one_way_classical(4), tol=1e-15)
    assert report.ok
    assert report.max_residual == 0.0


def test_uniform_split_model_is_valid():
    model = ClassicalModel(pi=[1.0, 0.0], t0=0.5 * np.eye(2), t1=0.5 * np.eye(2))
    assert validate_classical(model).ok


def test_unnormalized_pi_reports_sum():
    model = ClassicalModel(pi=[0.5, 0.6], t0=0.5 * np.eye(2), t1=0.5 * np.eye(2))
    report = validate_classical(model)
    assert not report.ok
    (violation,) = [c for c in report.violations if c.name == "pi_sum"]
    assert violation.residual == pytest.approx(0.1)
    assert "pi sums to 1.1" in violation.detail


def test_negative_entries_flagged():
    model = ClassicalModel(pi=[1.0, 0.0], t0=[[1.0, 0.0], [0.0, 1.1]], t1=[[0.0, 0.0], [0.0, -0.1]])
    report = validate_classical(model)
    names = {c.name for c in report.violations}
    assert "t1_nonnegative" in names


def test_dimension_mismatch_is_structural():
    with pytest.raises(StructureError):
        ClassicalModel(pi=[1.0, 0.0], t0=np.eye(3), t1=np.zeros((3, 3)))


def test_validation_is_pure(rng):
    model = random_classical(rng, 3)
    first = validate_classical(model)
    second = validate_classical(model)
    assert first == second


def test_random_models_pass_validation(rng):
    for _ in range(25):
        assert validate_classical(random_classical(rng, int(rng.integers(1, 6)))).ok
    for _ in range(25):
        d = int(rng.integers(2, 5))
        m = int(rng.integers(1, 7))
        assert validate_quantum(random_quantum(rng, d, m), tol=1e-9).ok


def test_etf_model_validates_tightly():
    report = validate_quantum(etf_quantum_model(3), tol=1e-12)
    assert report.ok


def test_builtin_model_validates_at_print_precision():
    model = load_builtin("L4").model
    assert not validate_quantum(model, tol=1e-9).ok  # 5-digit data is not that clean
    assert validate_quantum(model, tol=1e-3).ok


def test_oversized_effect_reports_povm_residual():
    channel = EBChannel(effects=[2.0 * np.eye(2)], preps=[np.diag([1.0, 0.0])])
    report = validate_channel(channel)
    (violation,) = [c for c in report.violations if c.name == "povm_sum"]
    assert violation.residual == pytest.approx(1.0)


def test_quantum_shape_mismatch_is_structural():
    channel = EBChannel(effects=[np.eye(2)], preps=[np.diag([1.0, 0.0])])
    instrument = Instrument(kraus0=[np.eye(3)], kraus1=[np.zeros((3, 3))])
    with pytest.raises(StructureError):
        QuantumModel(rho0=np.diag([1.0, 0.0]).astype(complex), channel=channel, instrument=instrument)


def test_models_are_frozen(rng):
    model = random_quantum(rng, 2, 2)
    with pytest.raises(ValueError):
        model.rho0[0, 0] = 0.0
    classical = random_classical(rng, 2)
    with pytest.raises(ValueError):
        classical.pi[0] = 2.0


# ---------------------------------------------------------------------------
# Choi matrices
# ---------------------------------------------------------------------------

def test_choi_of_constant_preparation_channel():
    ket0 = np.zeros(2, complex)
    ket0[0] = 1.0
    channel = EBChannel(effects=[np.eye(2)], preps=[np.outer(ket0, ket0)])
    expected = np.kron(np.outer(ket0, ket0), np.eye(2)) / 2
    assert np.allclose(choi_matrix(channel), expected, atol=1e-15)


def test_choi_of_dephasing_channel():
    projectors = [np.diag([1.0, 0.0]).astype(complex), np.diag([0.0, 1.0]).astype(complex)]
    channel = EBChannel(effects=projectors, preps=projectors)
    assert np.allclose(choi_matrix(channel), np.diag([0.5, 0.0, 0.0, 0.5]), atol=1e-15)


def test_choi_of_frame_channel_has_rank_at_least_d():
    choi = choi_matrix(etf_quantum_model(3).channel)
    eigenvalues = np.linalg.eigvalsh((choi + choi.conj().T) / 2)
    assert np.trace(choi).real == pytest.approx(1.0, abs=1e-12)
    assert eigenvalues[0] >= -1e-10
    assert int((eigenvalues > 1e-12).sum()) >= 3


def test_choi_psd_unit_trace_for_random_channels(rng):
    for _ in range(20):
        d = int(rng.integers(2, 5))
        m = int(rng.integers(1, 7))
        choi = choi_matrix(random_channel(rng, d, m))
        assert is_psd(choi, tol=1e-10)
        assert abs(np.trace(choi).real - 1.0) < 1e-12


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------

def test_sequence_validation():
    assert check_sequence("0001") == "0001"
    with pytest.raises(StructureError):
        check_sequence("")
    with pytest.raises(StructureError):
        check_sequence("012")
    with pytest.raises(StructureError):
        check_sequence([0, 1])


def test_all_sequences_lexicographic():
    assert all_sequences(2) == ["00", "01", "10", "11"]
