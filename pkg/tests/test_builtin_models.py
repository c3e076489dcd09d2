import json

import numpy as np
import pytest

from temporal_advantage import (
    DataIntegrityError,
    EBChannel,
    QuantumModel,
    classical_sequence_prob,
    effective_classical_model,
    load_builtin,
    quantum_sequence_prob,
    validate_classical,
    verify_builtin,
)
from temporal_advantage.builtin_models import (
    BUILTIN_LABELS,
    check_builtin_model,
    _parse_data,
    _raw_data,
)
from temporal_advantage.builtin_models import BuiltinModel


def test_labels():
    assert BUILTIN_LABELS == ("L4", "L5")
    with pytest.raises(KeyError):
        load_builtin("L6")


def test_l4_shape():
    builtin = load_builtin("L4")
    model = builtin.model
    assert model.d == 3
    assert model.m == 4
    assert builtin.sequence == "0001"
    e1 = np.zeros((3, 3))
    e1[0, 0] = 1.0
    assert np.array_equal(model.channel.effects[0], e1)
    # instrument entries exactly zero or one
    for k in (model.instrument.kraus0[0], model.instrument.kraus1[0]):
        assert set(np.unique(np.abs(k))) <= {0.0, 1.0}


def test_l5_shape():
    builtin = load_builtin("L5")
    model = builtin.model
    assert model.d == 4
    assert model.m == 5
    phi5 = np.zeros((4, 4))
    phi5[0, 0] = 1.0
    assert np.array_equal(model.channel.preps[-1], phi5)
    assert np.array_equal(model.rho0, phi5)


@pytest.mark.parametrize("label,expected,bound", [("L4", 0.359523, 0.31640625), ("L5", 0.368445, 0.32768)])
def test_verification(label, expected, bound):
    report = verify_builtin(label)
    assert report.ok
    assert report.probability == pytest.approx(expected, abs=2e-3)
    assert report.margin > 0.04
    assert all(v <= 1e-3 for v in report.residuals.values())


def test_ratios_match_recorded_values():
    for label, expected_ratio in (("L4", 1.136270), ("L5", 1.124405)):
        report = verify_builtin(label)
        assert report.ratio >= expected_ratio - 1e-2
        assert report.ratio == pytest.approx(expected_ratio, abs=1e-2)


def test_effective_models_of_builtins():
    for label in BUILTIN_LABELS:
        builtin = load_builtin(label)
        effective = effective_classical_model(builtin.model)
        # printed 5-digit data leaves per-mille stochasticity residuals
        assert validate_classical(effective, tol=1e-3).ok
        # the chain identity itself is exact for whatever operators are loaded
        gap = abs(
            quantum_sequence_prob(builtin.model, builtin.sequence)
            - classical_sequence_prob(effective, builtin.sequence)
        )
        assert gap < 1e-12


def test_perturbed_vector_fails_verification():
    builtin = load_builtin("L4")
    effects = [e.copy() for e in builtin.model.channel.effects]
    effects[1][1, 1] += 0.1
    damaged = BuiltinModel(
        label=builtin.label,
        model=QuantumModel(
            rho0=builtin.model.rho0,
            channel=EBChannel(effects=effects, preps=builtin.model.channel.preps),
            instrument=builtin.model.instrument,
        ),
        sequence=builtin.sequence,
        expected_probability=builtin.expected_probability,
        classical_bound=builtin.classical_bound,
        expected_ratio=builtin.expected_ratio,
        print_precision=builtin.print_precision,
    )
    report = check_builtin_model(damaged)
    assert not report.ok
    assert "FAILED" in report.text()


def test_tampered_data_file_is_rejected():
    from importlib import resources

    text = resources.files("temporal_advantage").joinpath("data", "optimized_models.json").read_text()
    doc = json.loads(text)
    doc["models"]["L4"]["prep_vectors"][0][1][0] += 0.05
    with pytest.raises(DataIntegrityError):
        _parse_data(json.dumps(doc))
    # untouched data parses fine
    assert set(_raw_data()) == set(BUILTIN_LABELS)
