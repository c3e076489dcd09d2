"""HTTP service exposing the probability engines, constructions, reductions
and the optimizer.  The CLI is a thin client of these endpoints."""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..builtin_models import BUILTIN_LABELS, check_builtin_model, load_builtin
from ..classicality import reduce_channel
from ..constructions import (
    cyclic_deterministic,
    deterministic_complexity,
    diagonal_quantum_from_classical,
    etf_quantum_model,
    one_way_classical,
)
from ..engine import (
    classical_sequence_prob,
    effective_classical_model,
    full_distribution,
    quantum_sequence_prob,
)
from ..models import (
    ClassicalModel,
    DataIntegrityError,
    DegenerateParamsError,
    NonCommutingError,
    QuantumModel,
    ResourceLimitError,
    StructureError,
    validate_channel,
    validate_classical,
    validate_quantum,
)
from ..optimize import AdamConfig, adam_maximize, classical_maximize, run_log_csv
from ..reports import (
    summary_table,
    summary_table_csv,
    violation_curve,
    violation_curve_csv,
)
from ..serialize import (
    channel_from_dict,
    channel_to_dict,
    complex_matrix_to_json,
    model_from_dict,
    model_to_dict,
)
from . import schemas as sc


def _document(model) -> sc.ModelDocument:
    return sc.ModelDocument(**model_to_dict(model))


def _model_from_doc(doc: sc.ModelDocument):
    return model_from_dict(doc.model_dump(exclude_none=True))


def _channel_from_doc(doc: sc.ModelDocument):
    body = doc.model_dump(exclude_none=True)
    if "channel" in body:
        return channel_from_dict(body["channel"])
    if "quantum" in body:
        return _model_from_doc(doc).channel
    raise StructureError("document has neither 'channel' nor 'quantum'")


def _check_results(report) -> list[sc.CheckResult]:
    return [
        sc.CheckResult(name=c.name, residual=c.residual, detail=c.detail)
        for c in report.checks
    ]


def create_app() -> FastAPI:
    app = FastAPI(
        title="temporal-advantage",
        version=__version__,
        description="Sequence-generation statistics of bounded-memory systems",
    )

    @app.exception_handler(StructureError)
    def _structure(_: Request, exc: StructureError):
        return JSONResponse(status_code=400, content={"detail": str(exc), "kind": "structure"})

    @app.exception_handler(DegenerateParamsError)
    def _degenerate(_: Request, exc: DegenerateParamsError):
        return JSONResponse(status_code=400, content={"detail": str(exc), "kind": "degenerate"})

    @app.exception_handler(ResourceLimitError)
    def _resource(_: Request, exc: ResourceLimitError):
        return JSONResponse(status_code=400, content={"detail": str(exc), "kind": "resource"})

    @app.exception_handler(NonCommutingError)
    def _noncommuting(_: Request, exc: NonCommutingError):
        return JSONResponse(
            status_code=409,
            content={"detail": str(exc), "kind": "non-commuting", "residual": exc.residual},
        )

    @app.exception_handler(DataIntegrityError)
    def _integrity(_: Request, exc: DataIntegrityError):
        return JSONResponse(
            status_code=409, content={"detail": str(exc), "kind": "data-integrity"}
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/validate", response_model=sc.ValidateResponse)
    def validate(req: sc.ValidateRequest):
        body = req.model.model_dump(exclude_none=True)
        if "channel" in body:
            report = validate_channel(channel_from_dict(body["channel"]), tol=req.tol)
        else:
            model = _model_from_doc(req.model)
            if isinstance(model, ClassicalModel):
                report = validate_classical(model, tol=req.tol)
            else:
                report = validate_quantum(model, tol=req.tol)
        return sc.ValidateResponse(
            ok=report.ok,
            tol=report.tol,
            max_residual=report.max_residual,
            violations=[
                sc.CheckResult(name=c.name, residual=c.residual, detail=c.detail)
                for c in report.violations
            ],
            checks=_check_results(report),
        )

    @app.post("/eval", response_model=sc.EvalResponse)
    def evaluate(req: sc.EvalRequest):
        model = _model_from_doc(req.model)
        if isinstance(model, ClassicalModel):
            prob = classical_sequence_prob(model, req.sequence)
        else:
            prob = quantum_sequence_prob(model, req.sequence, use_channel=req.use_channel)
        return sc.EvalResponse(sequence=req.sequence, probability=prob)

    @app.post("/effective", response_model=sc.ModelResponse)
    def effective(req: sc.EffectiveRequest):
        model = _model_from_doc(req.model)
        if not isinstance(model, QuantumModel):
            raise StructureError("effective model extraction needs a quantum model")
        return sc.ModelResponse(model=_document(effective_classical_model(model)))

    @app.post("/distribution", response_model=sc.DistributionResponse)
    def distribution(req: sc.DistributionRequest):
        model = _model_from_doc(req.model)
        dist = full_distribution(model, req.length)
        return sc.DistributionResponse(
            length=dist.length,
            total=dist.total(),
            entries=[
                sc.DistributionEntry(sequence=s, probability=p) for s, p in dist.items()
            ],
            csv=dist.to_csv(),
        )

    @app.post("/construct", response_model=sc.ModelResponse)
    def construct(req: sc.ConstructRequest):
        if req.family == "one-way":
            if req.length is None:
                raise StructureError("one-way construction needs 'length'")
            model = one_way_classical(req.length)
        elif req.family == "cyclic":
            if req.states is None:
                raise StructureError("cyclic construction needs 'states'")
            model = cyclic_deterministic(req.states)
        elif req.family == "etf":
            if req.d is None:
                raise StructureError("frame construction needs 'd'")
            model = etf_quantum_model(req.d, tick_index=req.tick_index)
        else:  # diagonal
            if req.model is None:
                raise StructureError("diagonal embedding needs a classical model")
            base = _model_from_doc(req.model)
            if not isinstance(base, ClassicalModel):
                raise StructureError("diagonal embedding needs a classical model")
            model = diagonal_quantum_from_classical(base)
        return sc.ModelResponse(model=_document(model))

    @app.post("/reduce", response_model=sc.ReduceResponse)
    def reduce(req: sc.ReduceRequest):
        channel = _channel_from_doc(req.model)
        result = reduce_channel(channel, route=req.route, tol=req.tol)
        return sc.ReduceResponse(
            route=result.route,
            max_residual=result.max_residual,
            channel=sc.ChannelDoc(**channel_to_dict(result.reduced)),
            basis=complex_matrix_to_json(result.basis),
        )

    @app.post("/optimize", response_model=sc.OptimizeResponse)
    def optimize(req: sc.OptimizeRequest):
        config = AdamConfig(
            iterations=req.iterations,
            lr_start=req.lr_start,
            lr_end=req.lr_end,
            beta1=req.beta1,
            beta2=req.beta2,
            epsilon=req.epsilon,
            trials=req.trials,
            seed=req.seed,
            mode=req.mode,
            kraus_per_outcome=req.kraus_per_outcome,
            commuting_preps=req.commuting_preps,
            workers=req.workers,
        )
        if req.target == "classical":
            run = classical_maximize(config, req.sequence, d=req.d)
            extra = {}
        else:
            m = req.m if req.m is not None else req.d + 1
            run = adam_maximize(config, req.sequence, d=req.d, m=m)
            extra = {
                "povm_residual": run.povm_residual,
                "instrument_residual": run.instrument_residual,
            }
        return sc.OptimizeResponse(
            target=req.target,
            sequence=req.sequence,
            probability=run.probability,
            model=_document(run.model),
            best_trial=run.best_trial,
            trials=[
                sc.TrialRecord(
                    trial=t.trial,
                    objective=t.objective,
                    plateau_iteration=t.plateau_iteration,
                )
                for t in run.trials
            ],
            run_log_csv=run_log_csv(run.trials),
            **extra,
        )

    @app.post("/dc", response_model=sc.ComplexityResponse)
    def complexity(req: sc.ComplexityRequest):
        dc = deterministic_complexity(req.sequence, d_max=req.d_max)
        return sc.ComplexityResponse(
            sequence=req.sequence, complexity=dc, exceeds_d_max=dc is None
        )

    @app.get("/table1", response_model=sc.TableResponse)
    def table1(
        optimize: bool = False,
        seed: int = 0,
        trials: int | None = None,
        iterations: int | None = None,
    ):
        config = None
        if optimize:
            overrides = {"seed": seed}
            if trials is not None:
                overrides["trials"] = trials
            if iterations is not None:
                overrides["iterations"] = iterations
            config = AdamConfig(**overrides)
        rows = summary_table(optimize=optimize, config=config)
        return sc.TableResponse(
            rows=[sc.TableRowDoc(**row.__dict__) for row in rows],
            csv=summary_table_csv(rows),
        )

    @app.get("/fig3", response_model=sc.CurveResponse)
    def fig3(l_min: int = 3, l_max: int = 7):
        points = violation_curve(l_min=l_min, l_max=l_max)
        return sc.CurveResponse(
            points=[sc.CurvePointDoc(**p.__dict__) for p in points],
            csv=violation_curve_csv(points),
        )

    @app.get("/builtin/{label}", response_model=sc.ModelResponse)
    def builtin(label: str):
        if label not in BUILTIN_LABELS:
            raise StructureError(f"unknown builtin label {label!r}; have {BUILTIN_LABELS}")
        return sc.ModelResponse(model=_document(load_builtin(label).model))

    @app.get("/verify-appendix/{label}", response_model=sc.BuiltinVerifyResponse)
    def verify_appendix(label: str):
        if label not in BUILTIN_LABELS:
            raise StructureError(f"unknown builtin label {label!r}; have {BUILTIN_LABELS}")
        report = check_builtin_model(load_builtin(label))
        return sc.BuiltinVerifyResponse(
            label=report.label,
            ok=report.ok,
            probability=report.probability,
            expected_probability=report.expected_probability,
            classical_bound=report.classical_bound,
            margin=report.margin,
            ratio=report.ratio,
            residuals=report.residuals,
            text=report.text(),
        )

    return app


app = create_app()
