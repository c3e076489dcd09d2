"""Bundled pre-optimized quantum models beating the classical one-tick bounds.

The models for the length-4 and length-5 one-tick sequences were found by
high-accuracy numerical optimization and are stored as printed, with 5
significant digits per vector entry and no re-normalization; physicality
residuals of order 1e-5 are therefore expected and budgeted.  A checksum
over the data file guards against transcription damage.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .models import (
    DataIntegrityError,
    EBChannel,
    Instrument,
    QuantumModel,
    spectral_norm,
)

DATA_RESOURCE = "optimized_models.json"
RESIDUAL_BUDGET = 1e-3
PROBABILITY_BUDGET = 2e-3

BUILTIN_LABELS = ("L4", "L5")


@dataclass(frozen=True)
class BuiltinModel:
    label: str
    model: QuantumModel
    sequence: str
    expected_probability: float
    classical_bound: float
    expected_ratio: float
    print_precision: int


@dataclass(frozen=True)
class BuiltinReport:
    label: str
    probability: float
    expected_probability: float
    classical_bound: float
    margin: float  # probability minus the classical bound
    ratio: float
    residuals: dict[str, float]
    ok: bool

    def text(self) -> str:
        lines = [
            f"model {self.label}:",
            f"  one-tick probability  {self.probability:.9f}"
            f"  (recorded {self.expected_probability})",
            f"  classical bound       {self.classical_bound:.9f}",
            f"  margin                {self.margin:+.6f}",
            f"  quantum/classical     {self.ratio:.6f}",
        ]
        for name, value in self.residuals.items():
            lines.append(f"  residual {name:<13} {value:.3e}")
        lines.append(f"  status                {'ok' if self.ok else 'FAILED'}")
        return "\n".join(lines)


def _parse_data(text: str) -> dict:
    doc = json.loads(text)
    canonical = json.dumps(doc["models"], sort_keys=True, separators=(",", ":"))
    digest = hashlib.sha256(canonical.encode()).hexdigest()
    if digest != doc["checksum"]:
        raise DataIntegrityError(
            f"builtin model data is corrupted: checksum {digest} != {doc['checksum']}"
        )
    return doc["models"]


def _raw_data() -> dict:
    return _parse_data(
        resources.files(__package__).joinpath("data", DATA_RESOURCE).read_text()
    )


def _vector(entries) -> np.ndarray:
    arr = np.asarray(entries, dtype=float)
    return arr[:, 0] + 1j * arr[:, 1]


def load_builtin(label: str) -> BuiltinModel:
    """Load one bundled model (labels ``L4`` and ``L5``) with its metadata."""
    data = _raw_data()
    if label not in data:
        raise KeyError(f"unknown builtin label {label!r}; have {sorted(data)}")
    entry = data[label]
    d = entry["d"]
    effects = [np.outer(v, v.conj()) for v in map(_vector, entry["effect_vectors"])]
    preps = [np.outer(v, v.conj()) for v in map(_vector, entry["prep_vectors"])]
    rho0 = np.zeros((d, d), dtype=complex)
    rho0[0, 0] = 1.0
    model = QuantumModel(
        rho0=rho0,
        channel=EBChannel(effects=effects, preps=preps),
        instrument=Instrument(
            kraus0=[np.diag(entry["kraus0_diag"]).astype(complex)],
            kraus1=[np.diag(entry["kraus1_diag"]).astype(complex)],
        ),
    )
    return BuiltinModel(
        label=label,
        model=model,
        sequence=entry["sequence"],
        expected_probability=entry["expected_probability"],
        classical_bound=entry["classical_bound"],
        expected_ratio=entry["expected_ratio"],
        print_precision=entry["print_precision"],
    )


def check_builtin_model(builtin: BuiltinModel, tol: float = RESIDUAL_BUDGET) -> BuiltinReport:
    """Physicality residuals and the one-tick probability of a loaded model."""
    from .engine import quantum_sequence_prob

    model = builtin.model
    d = model.d
    residuals = {
        "povm_sum": spectral_norm(sum(model.channel.effects) - np.eye(d)),
        "prep_traces": max(
            abs(np.trace(s).real - 1.0) for s in model.channel.preps
        ),
        "kraus_sum": spectral_norm(model.instrument.kraus_sum() - np.eye(d)),
    }
    probability = quantum_sequence_prob(model, builtin.sequence)
    ok = (
        all(v <= tol for v in residuals.values())
        and abs(probability - builtin.expected_probability) <= PROBABILITY_BUDGET
        and probability > builtin.classical_bound
    )
    return BuiltinReport(
        label=builtin.label,
        probability=probability,
        expected_probability=builtin.expected_probability,
        classical_bound=builtin.classical_bound,
        margin=probability - builtin.classical_bound,
        ratio=probability / builtin.classical_bound,
        residuals=residuals,
        ok=ok,
    )


def verify_builtin(label: str, tol: float = RESIDUAL_BUDGET) -> BuiltinReport:
    """Verify a bundled model; raises DataIntegrityError when it misses its
    budgets, which would signal damaged data rather than a physics failure."""
    report = check_builtin_model(load_builtin(label), tol=tol)
    if not report.ok:
        raise DataIntegrityError(
            f"builtin {label} failed verification:\n{report.text()}"
        )
    return report
