"""Assembled experiment tables: classical bounds vs quantum values per length.

The summary table's quantum column defaults to the bundled optimized models
(fast and deterministic); fresh optimization runs can be requested instead.
The length-3 row has no bundled model: the best known quantum value equals
the classical bound and is realized by the diagonal embedding of the
one-way machine, which is what the default reports.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .builtin_models import BUILTIN_LABELS, load_builtin
from .constructions import (
    diagonal_quantum_from_classical,
    etf_quantum_model,
    one_tick,
    one_way_classical,
)
from .engine import classical_sequence_prob, quantum_sequence_prob
from .models import StructureError
from .optimize import AdamConfig, adam_maximize

TABLE_LENGTHS = (3, 4, 5)
FIG_MAX_LENGTH = 24


@dataclass(frozen=True)
class TableRow:
    length: int
    d: int
    classical: float
    quantum: float
    ratio: float
    source: str


def classical_bound(length: int) -> float:
    """Exact one-tick optimum of d = length-1 classical machines."""
    return classical_sequence_prob(one_way_classical(length), one_tick(length))


def summary_table(optimize: bool = False, config: AdamConfig | None = None) -> list[TableRow]:
    """One row per length in (3, 4, 5): classical bound and best quantum value."""
    rows = []
    for length in TABLE_LENGTHS:
        d = length - 1
        classical = classical_bound(length)
        label = f"L{length}"
        if optimize:
            cfg = config if config is not None else AdamConfig()
            cfg = replace(cfg, seed=cfg.seed + length)  # distinct streams per row
            run = adam_maximize(cfg, one_tick(length), d=d, m=d + 1)
            quantum, source = run.probability, "optimizer"
        elif label in BUILTIN_LABELS:
            builtin = load_builtin(label)
            quantum = quantum_sequence_prob(builtin.model, builtin.sequence)
            source = "builtin"
        else:
            embedded = diagonal_quantum_from_classical(one_way_classical(length))
            quantum = quantum_sequence_prob(embedded, one_tick(length))
            source = "diagonal-embedding"
        rows.append(
            TableRow(
                length=length,
                d=d,
                classical=classical,
                quantum=quantum,
                ratio=quantum / classical,
                source=source,
            )
        )
    return rows


def summary_table_csv(rows) -> str:
    lines = ["L,d,classical,quantum,ratio,source"]
    for r in rows:
        lines.append(
            f"{r.length},{r.d},{r.classical:.17g},{r.quantum:.17g},{r.ratio:.17g},{r.source}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CurvePoint:
    length: int
    classical: float
    quantum_etf: float


def violation_curve(l_min: int = 3, l_max: int = 7) -> list[CurvePoint]:
    """Classical one-tick bound vs the harmonic-frame quantum value per length."""
    if l_min < 3:
        raise StructureError("curve needs length >= 3 (two-state machines and up)")
    if l_max > FIG_MAX_LENGTH:
        raise StructureError(f"curve supports length <= {FIG_MAX_LENGTH}")
    if l_max < l_min:
        raise StructureError("l_max must be >= l_min")
    points = []
    for length in range(l_min, l_max + 1):
        d = length - 1
        quantum = quantum_sequence_prob(etf_quantum_model(d), one_tick(length))
        points.append(
            CurvePoint(
                length=length,
                classical=(1 - 1 / length) ** length,
                quantum_etf=quantum,
            )
        )
    return points


def violation_curve_csv(points) -> str:
    lines = ["L,classical,quantum_etf"]
    for p in points:
        lines.append(f"{p.length},{p.classical:.17g},{p.quantum_etf:.17g}")
    return "\n".join(lines) + "\n"
