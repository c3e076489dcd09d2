"""JSON (de)serialization of models.

Schema: complex entries are two-element arrays ``[re, im]``, matrices are
row-major nested lists, and a document carries exactly one of the top-level
keys ``"classical"``, ``"quantum"`` or ``"channel"`` plus an optional
``"tol"``.  Floats survive a round trip exactly (json uses repr).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .models import ClassicalModel, EBChannel, Instrument, QuantumModel, StructureError

Model = ClassicalModel | QuantumModel


def complex_matrix_to_json(a: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(a, complex)]


def complex_matrix_from_json(data, what: str = "matrix") -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StructureError(f"{what}: malformed complex matrix") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise StructureError(
            f"{what}: complex matrix entries must be [re, im] pairs, got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def real_matrix_to_json(a: np.ndarray) -> list:
    return [[float(x) for x in row] for row in np.asarray(a, float)]


def channel_to_dict(channel: EBChannel) -> dict:
    return {
        "effects": [complex_matrix_to_json(e) for e in channel.effects],
        "preps": [complex_matrix_to_json(s) for s in channel.preps],
    }


def channel_from_dict(data: dict) -> EBChannel:
    try:
        effects = data["effects"]
        preps = data["preps"]
    except (KeyError, TypeError) as exc:
        raise StructureError("channel needs 'effects' and 'preps'") from exc
    return EBChannel(
        effects=[complex_matrix_from_json(e, "effect") for e in effects],
        preps=[complex_matrix_from_json(s, "prep") for s in preps],
    )


def instrument_to_dict(instrument: Instrument) -> dict:
    return {
        "kraus0": [complex_matrix_to_json(k) for k in instrument.kraus0],
        "kraus1": [complex_matrix_to_json(k) for k in instrument.kraus1],
    }


def instrument_from_dict(data: dict) -> Instrument:
    try:
        k0 = data["kraus0"]
        k1 = data["kraus1"]
    except (KeyError, TypeError) as exc:
        raise StructureError("instrument needs 'kraus0' and 'kraus1'") from exc
    return Instrument(
        kraus0=[complex_matrix_from_json(k, "kraus0") for k in k0],
        kraus1=[complex_matrix_from_json(k, "kraus1") for k in k1],
    )


def model_to_dict(model: Model, tol: float | None = None) -> dict:
    if isinstance(model, ClassicalModel):
        doc: dict[str, Any] = {
            "classical": {
                "pi": [float(x) for x in model.pi],
                "t0": real_matrix_to_json(model.t0),
                "t1": real_matrix_to_json(model.t1),
            }
        }
    elif isinstance(model, QuantumModel):
        doc = {
            "quantum": {
                "rho0": complex_matrix_to_json(model.rho0),
                "channel": channel_to_dict(model.channel),
                "instrument": instrument_to_dict(model.instrument),
            }
        }
    else:
        raise StructureError(f"cannot serialize {type(model).__name__}")
    if tol is not None:
        doc["tol"] = float(tol)
    return doc


def model_from_dict(doc: dict) -> Model:
    if not isinstance(doc, dict):
        raise StructureError("model document must be a JSON object")
    keys = [k for k in ("classical", "quantum", "channel") if k in doc]
    if len(keys) != 1:
        raise StructureError(
            "model document needs exactly one of 'classical', 'quantum' or 'channel'"
        )
    kind = keys[0]
    body = doc[kind]
    if kind == "classical":
        try:
            return ClassicalModel(pi=body["pi"], t0=body["t0"], t1=body["t1"])
        except (KeyError, TypeError) as exc:
            raise StructureError("classical model needs 'pi', 't0' and 't1'") from exc
    if kind == "quantum":
        try:
            rho0 = complex_matrix_from_json(body["rho0"], "rho0")
            channel = channel_from_dict(body["channel"])
            instrument = instrument_from_dict(body["instrument"])
        except (KeyError, TypeError) as exc:
            raise StructureError(
                "quantum model needs 'rho0', 'channel' and 'instrument'"
            ) from exc
        return QuantumModel(rho0=rho0, channel=channel, instrument=instrument)
    raise StructureError("bare 'channel' documents hold no full model; use load_channel")


def channel_from_document(doc: dict) -> EBChannel:
    """Extract a channel from a model document (bare channel or quantum model)."""
    if not isinstance(doc, dict):
        raise StructureError("channel document must be a JSON object")
    if "channel" in doc:
        return channel_from_dict(doc["channel"])
    if "quantum" in doc:
        model = model_from_dict(doc)
        return model.channel
    raise StructureError("document has neither 'channel' nor 'quantum'")


def dumps_model(model: Model, tol: float | None = None) -> str:
    return json.dumps(model_to_dict(model, tol=tol), indent=2)


def save_model(model: Model, path: str | Path, tol: float | None = None) -> None:
    Path(path).write_text(dumps_model(model, tol=tol) + "\n")


def load_document(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StructureError(f"{path}: not valid JSON: {exc}") from exc


def load_model(path: str | Path) -> Model:
    return model_from_dict(load_document(path))
