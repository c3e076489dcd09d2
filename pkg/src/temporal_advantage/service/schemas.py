"""Request and response models of the HTTP service.

Matrices follow the package's JSON schema: complex entries are ``[re, im]``
pairs, matrices are row-major nested lists.  A model document carries
exactly one of the keys ``classical``, ``quantum`` or ``channel``.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

ComplexMatrix = list[list[list[float]]]
RealMatrix = list[list[float]]


class ClassicalModelDoc(BaseModel):
    pi: list[float]
    t0: RealMatrix
    t1: RealMatrix


class ChannelDoc(BaseModel):
    effects: list[ComplexMatrix]
    preps: list[ComplexMatrix]


class InstrumentDoc(BaseModel):
    kraus0: list[ComplexMatrix]
    kraus1: list[ComplexMatrix]


class QuantumModelDoc(BaseModel):
    rho0: ComplexMatrix
    channel: ChannelDoc
    instrument: InstrumentDoc


class ModelDocument(BaseModel):
    classical: Optional[ClassicalModelDoc] = None
    quantum: Optional[QuantumModelDoc] = None
    channel: Optional[ChannelDoc] = None
    tol: Optional[float] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        present = [k for k in ("classical", "quantum", "channel") if getattr(self, k) is not None]
        if len(present) != 1:
            raise ValueError(
                "model document needs exactly one of 'classical', 'quantum' or 'channel'"
            )
        return self


class ValidateRequest(BaseModel):
    model: ModelDocument
    tol: float = 1e-9


class CheckResult(BaseModel):
    name: str
    residual: float
    detail: str = ""


class ValidateResponse(BaseModel):
    ok: bool
    tol: float
    max_residual: float
    violations: list[CheckResult]
    checks: list[CheckResult]


class EvalRequest(BaseModel):
    model: ModelDocument
    sequence: str
    use_channel: bool = True


class EvalResponse(BaseModel):
    sequence: str
    probability: float


class EffectiveRequest(BaseModel):
    model: ModelDocument


class ModelResponse(BaseModel):
    model: ModelDocument


class DistributionRequest(BaseModel):
    model: ModelDocument
    length: int = Field(ge=1)


class DistributionEntry(BaseModel):
    sequence: str
    probability: float


class DistributionResponse(BaseModel):
    length: int
    total: float
    entries: list[DistributionEntry]
    csv: str


class ConstructRequest(BaseModel):
    family: Literal["one-way", "cyclic", "etf", "diagonal"]
    length: Optional[int] = None  # one-way
    states: Optional[int] = None  # cyclic
    d: Optional[int] = None  # etf
    tick_index: int = 0
    model: Optional[ModelDocument] = None  # diagonal: classical model to embed


class ReduceRequest(BaseModel):
    model: ModelDocument  # bare channel or quantum model
    route: Literal["auto", "states", "povm"] = "auto"
    tol: float = 1e-9


class ReduceResponse(BaseModel):
    route: str
    max_residual: float
    channel: ChannelDoc
    basis: ComplexMatrix


class OptimizeRequest(BaseModel):
    sequence: str
    d: int = Field(ge=1)
    m: Optional[int] = None  # quantum targets only; defaults to d + 1
    target: Literal["quantum", "classical"] = "quantum"
    mode: Literal["rank1", "full"] = "rank1"
    iterations: int = Field(default=50_000, ge=1)
    lr_start: float = 0.07
    lr_end: float = 1e-12
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    trials: int = Field(default=64, ge=1)
    seed: int = 0
    kraus_per_outcome: int = Field(default=1, ge=1)
    commuting_preps: bool = False
    workers: Optional[int] = None


class TrialRecord(BaseModel):
    trial: int
    objective: float
    plateau_iteration: int


class OptimizeResponse(BaseModel):
    target: str
    sequence: str
    probability: float
    model: ModelDocument
    best_trial: int
    trials: list[TrialRecord]
    run_log_csv: str
    povm_residual: Optional[float] = None
    instrument_residual: Optional[float] = None


class ComplexityRequest(BaseModel):
    sequence: str
    d_max: int = Field(default=8, ge=1)


class ComplexityResponse(BaseModel):
    sequence: str
    complexity: Optional[int]
    exceeds_d_max: bool


class TableRowDoc(BaseModel):
    length: int
    d: int
    classical: float
    quantum: float
    ratio: float
    source: str


class TableResponse(BaseModel):
    rows: list[TableRowDoc]
    csv: str


class CurvePointDoc(BaseModel):
    length: int
    classical: float
    quantum_etf: float


class CurveResponse(BaseModel):
    points: list[CurvePointDoc]
    csv: str


class BuiltinVerifyResponse(BaseModel):
    label: str
    ok: bool
    probability: float
    expected_probability: float
    classical_bound: float
    margin: float
    ratio: float
    residuals: dict[str, float]
    text: str


class ErrorBody(BaseModel):
    detail: str
    kind: str
