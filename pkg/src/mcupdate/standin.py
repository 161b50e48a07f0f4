"""Stand-in yield-stress data for the sequential-update example.

The historical 79-test ABS-B record is only published as a histogram and
summary statistics (mean 34.782 ksi, COV 0.116). This module regenerates
a synthetic record with the same mean and COV, and nested stages of
10, 20, 35, 55 and 79 tests drawn in a seeded random order.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .rng import substream

MEAN = 34.782
COV = 0.116
STAGE_SIZES = (10, 20, 35, 55, 79)
SEED = 2019


def generate(seed: int = SEED) -> np.ndarray:
    """79 yield stresses in test order; stage ``k`` is the first ``STAGE_SIZES[k]``."""
    rng = substream(seed, "standin")
    s2 = math.log1p(COV**2)
    x = rng.lognormal(math.log(MEAN) - s2 / 2, math.sqrt(s2), STAGE_SIZES[-1])
    x = MEAN + (x - x.mean()) * (COV * MEAN / x.std(ddof=1))
    return np.round(x, 2)


def stages(data=None) -> list:
    data = generate() if data is None else np.asarray(data)
    return [data[:k] for k in STAGE_SIZES]


def read_observations(path) -> np.ndarray:
    """Single-column CSV of observations; a non-numeric first row is a header."""
    rows = [r.strip().split(",")[0] for r in Path(path).read_text().splitlines() if r.strip()]
    try:
        float(rows[0])
    except ValueError:
        rows = rows[1:]
    return np.array([float(r) for r in rows])


def write_observations(path, values) -> None:
    Path(path).write_text("yield_stress\n" + "".join(f"{v:.2f}\n" for v in values))


def data_dir() -> Path:
    return Path(str(resources.files("mcupdate") / "data"))


def write_files(directory, seed: int = SEED) -> Path:
    """Write the stage CSVs and a pipeline run-config; return the config path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for part in stages(generate(seed)):
        p = directory / f"yield_stage_{len(part):02d}.csv"
        write_observations(p, part)
        paths.append(p.name)
    cfg = {"stages": paths, "N": 10000, "ess_threshold": 0.9, "N_k": 100000, "seed": 1}
    path = directory / "pipeline.json"
    path.write_text(json.dumps(cfg, indent=2) + "\n")
    return path
