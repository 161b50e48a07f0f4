"""Ultimate strength of a simply supported plate under uniaxial compression.

Units are inches and ksi throughout. Only the yield stress is treated as
random by :func:`propagate`; the other inputs sit at their mean (default)
or nominal values.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np


class InadmissibleSpec(ValueError):
    pass


@dataclass(frozen=True)
class PlateSpec:
    b: float
    t: float
    sigma0: float
    E: float
    delta0: float
    eta: float

    def __post_init__(self):
        for name, v in asdict(self).items():
            if not v > 0:
                raise InadmissibleSpec(f"{name} must be positive, got {v!r}")

    @property
    def residual_factor(self) -> float:
        return 1.0 - 2.0 * self.eta * self.t / self.b

    @classmethod
    def from_json(cls, obj: dict, base: "PlateSpec" = None) -> "PlateSpec":
        if base is None:
            return cls(**{k: float(v) for k, v in obj.items()})
        return replace(base, **{k: float(v) for k, v in obj.items()})

    @classmethod
    def load(cls, path, base: "PlateSpec" = None) -> "PlateSpec":
        return cls.from_json(json.loads(Path(path).read_text()), base)


#: (nominal, mean bias, COV, global sensitivity) per variable; the
#: sensitivity column is reference metadata only
PLATE_VARIABLES = {
    "b": (36.0, 0.992, 0.028, 0.017),
    "t": (0.75, 1.05, 0.044, 0.045),
    "sigma0": (34.0, 1.023, 0.116, 0.482),
    "E": (29000.0, 0.987, 0.076, 0.194),
    "delta0": (0.35, 1.0, 0.05, 0.043),
    "eta": (5.25, 1.0, 0.07, 0.233),
}

NOMINAL = PlateSpec(**{k: v[0] for k, v in PLATE_VARIABLES.items()})
MEAN = PlateSpec(**{k: v[0] * v[1] for k, v in PLATE_VARIABLES.items()})


def slenderness(spec: PlateSpec) -> float:
    return spec.b / spec.t * math.sqrt(spec.sigma0 / spec.E)


def strength_pristine(lam):
    """Normalized strength ``2/lam - 1/lam^2`` of a plate without imperfections."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("slenderness must be positive")
    out = 2.0 / lam - 1.0 / lam**2
    return out if out.ndim else float(out)


def _carlsen(lam, delta0, eta, t, b):
    return (2.1 / lam - 0.9 / lam**2) * (1.0 - 0.75 * delta0 / lam) * (1.0 - 2.0 * eta * t / b)


def strength_carlsen(spec: PlateSpec) -> float:
    """Strength with residual-stress and initial-deflection reductions."""
    if spec.residual_factor <= 0:
        raise InadmissibleSpec(f"tension zone 2*eta*t = {2 * spec.eta * spec.t} exceeds width b = {spec.b}")
    return float(_carlsen(slenderness(spec), spec.delta0, spec.eta, spec.t, spec.b))


def weighted_ecdf(values, weights=None):
    """Sorted values and the right-continuous weighted CDF at each."""
    v = np.asarray(values, dtype=float)
    w = np.ones_like(v) if weights is None else np.asarray(weights, dtype=float)
    order = np.argsort(v, kind="stable")
    v, w = v[order], w[order]
    cdf = np.cumsum(w) / w.sum()
    # ties share the CDF value of their last member
    last = np.r_[v[1:] != v[:-1], True]
    idx = np.flatnonzero(last)
    cdf = np.repeat(cdf[idx], np.diff(np.r_[-1, idx]))
    cdf[-1] = 1.0
    return v, cdf


def kolmogorov_distance(a_vals, a_w, b_vals, b_w) -> float:
    """Sup distance between two weighted empirical CDFs."""
    av, ac = weighted_ecdf(a_vals, a_w)
    bv, bc = weighted_ecdf(b_vals, b_w)
    grid = np.union1d(av, bv)

    def at(v, c, x):
        i = np.searchsorted(v, x, side="right") - 1
        return np.where(i >= 0, c[np.clip(i, 0, None)], 0.0)

    return float(np.max(np.abs(at(av, ac, grid) - at(bv, bc, grid))))


@dataclass
class Propagation:
    psi: np.ndarray
    weights: np.ndarray
    table: tuple  # (sorted psi, cdf)

    def to_csv(self, path=None) -> str:
        lines = ["psi,cdf"]
        lines += [f"{float(x)!r},{float(c)!r}" for x, c in zip(*self.table)]
        text = "\n".join(lines) + "\n"
        if path is not None:
            Path(path).write_text(text)
        return text


def read_cdf_csv(path):
    rows = Path(path).read_text().splitlines()
    if rows[0].strip() != "psi,cdf":
        raise ValueError(f"{path}: expected header 'psi,cdf'")
    data = [tuple(float(c) for c in r.split(",")) for r in rows[1:] if r.strip()]
    return np.array([d[0] for d in data]), np.array([d[1] for d in data])


def propagate(sigma0_samples, base: PlateSpec = MEAN, weights=None, full_joint: bool = False, rng=None) -> Propagation:
    """Strength for each yield-stress sample and its weighted empirical CDF.

    With ``full_joint`` the other five variables are also drawn, as
    independent normals with the tabulated mean and COV around ``base``.
    """
    s0 = np.asarray(getattr(sigma0_samples, "values", sigma0_samples), dtype=float)
    if weights is None and hasattr(sigma0_samples, "weights"):
        weights = sigma0_samples.weights
    if np.any(s0 <= 0):
        raise ValueError("yield stress samples must be positive")
    if base.residual_factor <= 0:
        raise InadmissibleSpec("residual tension zone wider than the plate")
    vals = {k: np.full(len(s0), getattr(base, k)) for k in ("b", "t", "E", "delta0", "eta")}
    if full_joint:
        if rng is None:
            raise ValueError("full-joint propagation needs an rng")
        for k in vals:
            cov = PLATE_VARIABLES[k][2]
            vals[k] = rng.normal(getattr(base, k), cov * getattr(base, k), len(s0))
    lam = vals["b"] / vals["t"] * np.sqrt(s0 / vals["E"])
    psi = _carlsen(lam, vals["delta0"], vals["eta"], vals["t"], vals["b"])
    w = np.ones(len(s0)) if weights is None else np.asarray(weights, dtype=float)
    return Propagation(psi, w, weighted_ecdf(psi, w))
