"""Sample sets, update reports and their on-disk formats."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from .density import Density


class Provenance(str, Enum):
    ORIGINAL = "original"
    AUGMENTED = "augmented"
    RETAINED = "retained"


class Strategy(str, Enum):
    REWEIGHT = "reweight"
    AUGMENT = "augment"
    FILTER = "filter"
    MIXED = "mixed"


@dataclass
class SampleSet:
    """Values with per-sample weights and provenance tags.

    ``source`` is the density the unweighted values are asserted to
    follow; ``lineage`` records the named substreams that produced them.
    """

    values: np.ndarray
    weights: np.ndarray = None
    provenance: np.ndarray = None
    source: Optional[Density] = None
    lineage: tuple = ()

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = len(self.values)
        if self.weights is None:
            self.weights = np.full(n, 1.0 / n) if n else np.empty(0)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.provenance is None:
            self.provenance = np.full(n, Provenance.ORIGINAL.value, dtype=object)
        self.provenance = np.asarray([Provenance(t).value for t in self.provenance], dtype=object)
        if not (len(self.weights) == n == len(self.provenance)):
            raise ValueError("values, weights and provenance must have equal length")
        if np.any(self.weights < 0) or not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite and nonnegative")

    def __len__(self) -> int:
        return len(self.values)

    @classmethod
    def draw(cls, density: Density, n: int, rng, lineage=()) -> "SampleSet":
        return cls(density.draw(n, rng), source=density, lineage=tuple(lineage))

    @property
    def normalized_weights(self) -> np.ndarray:
        total = self.weights.sum()
        if total <= 0:
            raise ValueError("all weights are zero")
        return self.weights / total

    @property
    def is_uniform(self) -> bool:
        return bool(len(self) == 0 or np.all(self.weights == self.weights[0]))

    def count(self, tag: Provenance) -> int:
        return int(np.sum(self.provenance == Provenance(tag).value))

    # -- persistence ---------------------------------------------------------

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "weight", "provenance"])
        for v, wt, tag in zip(self.values, self.weights, self.provenance):
            w.writerow([repr(float(v)), repr(float(wt)), tag])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def read_csv(cls, path, source: Optional[Density] = None) -> "SampleSet":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["value", "weight", "provenance"]:
            raise ValueError(f"{path}: expected header 'value,weight,provenance'")
        body = [r for r in rows[1:] if r]
        return cls(
            values=[float(r[0]) for r in body],
            weights=[float(r[1]) for r in body],
            provenance=[r[2].strip() for r in body],
            source=source,
        )


@dataclass
class UpdateReport:
    strategy: Strategy
    n_before: int
    n_after: int
    n_added: int = 0
    n_rejected: int = 0
    ess: Optional[float] = None
    d1: Optional[float] = None
    feasible: bool = True
    reason: str = ""
    seed: Optional[int] = None
    constant: Optional[float] = None
    n_required: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.strategy = Strategy(self.strategy)
        if self.feasible and self.n_after != self.n_before + self.n_added - self.n_rejected:
            raise ValueError("n_after must equal n_before + n_added - n_rejected")

    @classmethod
    def infeasible(cls, strategy, n_before: int, reason: str, **kw) -> "UpdateReport":
        return cls(strategy, n_before, n_before, feasible=False, reason=reason, **kw)

    def to_json(self) -> dict:
        out = {
            "strategy": self.strategy.value,
            "n_before": self.n_before,
            "n_after": self.n_after,
            "n_added": self.n_added,
            "n_rejected": self.n_rejected,
            "ess": self.ess,
            "d1": self.d1,
            "feasible": self.feasible,
            "reason": self.reason,
            "seed": self.seed,
            "constant": self.constant,
            "n_required": self.n_required,
        }
        out.update(self.extra)
        return {k: json_number(v) for k, v in out.items()}

    def dumps(self) -> str:
        return dumps(self.to_json())


def json_number(v):
    """Render non-finite floats as ``"INF"``/``"-INF"``/``"NAN"``."""
    if isinstance(v, float) and not math.isfinite(v):
        return "NAN" if math.isnan(v) else ("INF" if v > 0 else "-INF")
    if isinstance(v, np.floating):
        return json_number(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return json_number(obj)


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed indentation)."""
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"
