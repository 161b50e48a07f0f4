"""Built-in (p, q) pairs: five common-support and six changing-support cases."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .density import Density, beta, lognormal, mixture, normal


@dataclass(frozen=True)
class Scenario:
    name: str
    table: int
    case: int
    p: Density
    q: Density
    label_p: str
    label_q: str


ORIGINAL = normal(10.0, 1.0)
COMMON = {
    "q1": normal(10.2, 1.0),
    "q2": normal(11.0, 1.0),
    "q3": normal(10.0, 1.5),
    "q4": normal(10.0, 0.5),
    "q5": mixture([0.4, 0.6], [normal(9.0, 0.5), normal(11.0, 0.5)]),
}

# the three densities share mean 0.667 and variance 0.0317
CHANGING = {
    "q1": normal(0.667, math.sqrt(0.0317)),
    "q2": beta(4.0, 2.0),
    "q3": lognormal(-0.44, 0.2627),
}

_TABLE2_PAIRS = [("q1", "q2"), ("q1", "q3"), ("q2", "q1"), ("q2", "q3"), ("q3", "q1"), ("q3", "q2")]


def _build() -> dict:
    out = {}
    for i, (key, q) in enumerate(COMMON.items(), start=1):
        out[f"case{i}"] = Scenario(f"case{i}", 1, i, ORIGINAL, q, "p", key)
    for i, (a, b) in enumerate(_TABLE2_PAIRS, start=1):
        out[f"support{i}"] = Scenario(f"support{i}", 2, i, CHANGING[a], CHANGING[b], a, b)
    return out


SCENARIOS = _build()


def get(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}") from None


def table(n: int) -> list:
    return [s for s in SCENARIOS.values() if s.table == n]
