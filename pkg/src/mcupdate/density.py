"""Parametric univariate densities.

Parameter conventions (``params`` order):

============  ======================  =============================
family        params                  support
============  ======================  =============================
Normal        (mean, sd)              (-inf, inf)
Lognormal     (mu_log, sigma_log)     (0, inf)
Gamma         (shape, scale)          (0, inf)
Beta          (a, b)                  [0, 1]
Weibull       (shape k, scale)        (0, inf)
Logistic      (loc, scale)            (-inf, inf)
Loglogistic   (shape beta, scale)     (0, inf)
Nakagami      (shape m, spread omega) (0, inf)
FiniteMixture weights + components    hull of component supports
============  ======================  =============================

Pointwise evaluation, CDFs and exact samplers are delegated to
:mod:`scipy.stats`; mixtures are sampled by the composition method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import stats
from scipy.special import logsumexp

#: mass left in each infinite tail when truncating to an effective support
TAIL_MASS = 1e-12


class Family(str, Enum):
    NORMAL = "Normal"
    LOGNORMAL = "Lognormal"
    GAMMA = "Gamma"
    BETA = "Beta"
    WEIBULL = "Weibull"
    LOGISTIC = "Logistic"
    LOGLOGISTIC = "Loglogistic"
    NAKAGAMI = "Nakagami"
    MIXTURE = "FiniteMixture"


class SupportKind(str, Enum):
    INFINITE = "Infinite"
    SEMI_INFINITE = "SemiInfinite"
    BOUNDED = "Bounded"


@dataclass(frozen=True)
class SupportInterval:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"empty support interval [{self.lower}, {self.upper}]")

    @property
    def kind(self) -> SupportKind:
        n_inf = math.isinf(self.lower) + math.isinf(self.upper)
        return [SupportKind.BOUNDED, SupportKind.SEMI_INFINITE, SupportKind.INFINITE][n_inf]

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x >= self.lower) & (x <= self.upper)

    def covers(self, other: "SupportInterval") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper

    def to_json(self) -> list:
        return [_bound_to_json(self.lower), _bound_to_json(self.upper)]

    @classmethod
    def from_json(cls, pair) -> "SupportInterval":
        lo, hi = pair
        return cls(_bound_from_json(lo), _bound_from_json(hi))


def _bound_to_json(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(v)


def _bound_from_json(v) -> float:
    if isinstance(v, str):
        return float(v.strip())
    return float(v)


_NPARAMS = {
    Family.NORMAL: 2,
    Family.LOGNORMAL: 2,
    Family.GAMMA: 2,
    Family.BETA: 2,
    Family.WEIBULL: 2,
    Family.LOGISTIC: 2,
    Family.LOGLOGISTIC: 2,
    Family.NAKAGAMI: 2,
}

# indices of parameters that must be strictly positive
_POSITIVE = {
    Family.NORMAL: (1,),
    Family.LOGNORMAL: (1,),
    Family.LOGISTIC: (1,),
}


def _scipy_dist(family: Family, params):
    a, b = params
    if family is Family.NORMAL:
        return stats.norm(loc=a, scale=b)
    if family is Family.LOGNORMAL:
        return stats.lognorm(s=b, scale=math.exp(a))
    if family is Family.GAMMA:
        return stats.gamma(a, scale=b)
    if family is Family.BETA:
        return stats.beta(a, b)
    if family is Family.WEIBULL:
        return stats.weibull_min(a, scale=b)
    if family is Family.LOGISTIC:
        return stats.logistic(loc=a, scale=b)
    if family is Family.LOGLOGISTIC:
        return stats.fisk(a, scale=b)
    if family is Family.NAKAGAMI:
        return stats.nakagami(a, scale=math.sqrt(b))
    raise ValueError(f"no scipy backing for {family}")


_NATURAL_SUPPORT = {
    Family.NORMAL: (-math.inf, math.inf),
    Family.LOGISTIC: (-math.inf, math.inf),
    Family.BETA: (0.0, 1.0),
}


@dataclass(frozen=True)
class Density:
    """An immutable 1-D density. Build with the module-level factories."""

    family: Family
    params: tuple = ()
    weights: tuple = ()
    components: tuple = ()
    _dist: object = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if fam is Family.MIXTURE:
            w = np.asarray(self.weights, dtype=float)
            if len(w) == 0 or len(w) != len(self.components):
                raise ValueError("mixture needs one weight per component")
            if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ValueError(f"mixture weights must be nonnegative and sum to 1, got {w.tolist()}")
            object.__setattr__(self, "weights", tuple(float(x) for x in w))
            object.__setattr__(self, "components", tuple(self.components))
            return
        if len(self.params) != _NPARAMS[fam]:
            raise ValueError(f"{fam.value} takes {_NPARAMS[fam]} parameters, got {len(self.params)}")
        if not all(math.isfinite(p) for p in self.params):
            raise ValueError(f"{fam.value} parameters must be finite: {self.params}")
        positive = _POSITIVE.get(fam, (0, 1))
        if any(self.params[i] <= 0 for i in positive):
            raise ValueError(f"{fam.value} parameters {self.params} violate positivity")
        object.__setattr__(self, "_dist", _scipy_dist(fam, self.params))

    # -- support -------------------------------------------------------------

    @property
    def support(self) -> SupportInterval:
        if self.family is Family.MIXTURE:
            sups = [c.support for c in self.components]
            return SupportInterval(min(s.lower for s in sups), max(s.upper for s in sups))
        lo, hi = _NATURAL_SUPPORT.get(self.family, (0.0, math.inf))
        return SupportInterval(lo, hi)

    def effective_support(self, tail_mass: float = TAIL_MASS) -> tuple[float, float]:
        """Finite range holding all but ``tail_mass`` in each infinite tail."""
        if self.family is Family.MIXTURE:
            bounds = [c.effective_support(tail_mass) for c in self.components]
            return min(b[0] for b in bounds), max(b[1] for b in bounds)
        sup = self.support
        lo = sup.lower if math.isfinite(sup.lower) else float(self._dist.ppf(tail_mass))
        hi = sup.upper if math.isfinite(sup.upper) else float(self._dist.isf(tail_mass))
        return lo, hi

    # -- evaluation ----------------------------------------------------------

    def logpdf(self, x):
        x = _checked(x)
        if self.family is Family.MIXTURE:
            terms = [math.log(w) + c.logpdf(x) for w, c in zip(self.weights, self.components) if w > 0]
            return logsumexp(np.stack(terms), axis=0) if np.ndim(x) else float(logsumexp(terms))
        out = self._dist.logpdf(x)
        return out if np.ndim(x) else float(out)

    def pdf(self, x):
        x = _checked(x)
        if self.family is Family.MIXTURE:
            return sum(w * c.pdf(x) for w, c in zip(self.weights, self.components))
        out = self._dist.pdf(x)
        return out if np.ndim(x) else float(out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.family is Family.MIXTURE:
            out = sum(w * c.cdf(x) for w, c in zip(self.weights, self.components))
        else:
            out = self._dist.cdf(x)
        return out if np.ndim(x) else float(out)

    def mean(self) -> float:
        if self.family is Family.MIXTURE:
            return sum(w * c.mean() for w, c in zip(self.weights, self.components))
        return float(self._dist.mean())

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` i.i.d. draws; mixtures pick a component, then draw from it."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        if n == 0:
            return np.empty(0)
        if self.family is Family.MIXTURE:
            idx = rng.choice(len(self.components), size=n, p=self.weights)
            out = np.empty(n)
            for k, comp in enumerate(self.components):
                sel = idx == k
                if sel.any():
                    out[sel] = comp.draw(int(sel.sum()), rng)
            return out
        return np.asarray(self._dist.rvs(size=n, random_state=rng), dtype=float)

    # -- tails ---------------------------------------------------------------

    def tail_order(self, side: str) -> tuple:
        """Decay class of the density at one end of its support.

        Larger tuples decay faster. At an infinite end:
        ``(0, k)`` polynomial ``|x|^-k``; ``(1, c)`` log-squared
        ``exp(-c log(x)^2)``; ``(2, p, c)`` exponential-power
        ``exp(-c |x|^p)``. At a finite end ``b``: ``(0, a)`` for
        ``|x-b|^a`` and ``(1, c)`` for faster than any power.
        """
        if side not in ("lower", "upper"):
            raise ValueError(side)
        if self.family is Family.MIXTURE:
            end = getattr(self.support, side)
            orders = [c.tail_order(side) for c in self.components if getattr(c.support, side) == end]
            return min(orders)
        f, (a, b) = self.family, self.params
        if f is Family.NORMAL:
            return (2, 2.0, 1.0 / (2 * b * b))
        if f is Family.LOGISTIC:
            return (2, 1.0, 1.0 / b)
        if f is Family.BETA:
            return (0, a - 1.0) if side == "lower" else (0, b - 1.0)
        if f is Family.LOGNORMAL:
            return (1, 1.0 / (2 * b * b))
        if side == "lower":
            power = {
                Family.GAMMA: a - 1.0,
                Family.WEIBULL: a - 1.0,
                Family.LOGLOGISTIC: a - 1.0,
                Family.NAKAGAMI: 2 * a - 1.0,
            }[f]
            return (0, power)
        if f is Family.GAMMA:
            return (2, 1.0, 1.0 / b)
        if f is Family.WEIBULL:
            return (2, a, b ** -a)
        if f is Family.NAKAGAMI:
            return (2, 2.0, a / b)
        if f is Family.LOGLOGISTIC:
            return (0, a + 1.0)
        raise AssertionError(f)

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        out = {"family": self.family.value, "params": list(self.params), "support": self.support.to_json()}
        if self.family is Family.MIXTURE:
            out["weights"] = list(self.weights)
            out["components"] = [c.to_json() for c in self.components]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Density":
        fam = Family(obj["family"])
        if fam is Family.MIXTURE:
            d = cls(fam, (), tuple(obj["weights"]), tuple(cls.from_json(c) for c in obj["components"]))
        else:
            d = cls(fam, tuple(obj["params"]))
        if "support" in obj:
            given = SupportInterval.from_json(obj["support"])
            if given != d.support:
                raise ValueError(f"{fam.value} support is {d.support.to_json()}, not {obj['support']}")
        return d

    def label(self) -> str:
        if self.family is Family.MIXTURE:
            inner = " + ".join(f"{w:g}*{c.label()}" for w, c in zip(self.weights, self.components))
            return f"Mixture[{inner}]"
        return f"{self.family.value}({', '.join(f'{p:g}' for p in self.params)})"


def _checked(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("density evaluated at a non-finite point")
    return arr if arr.ndim else float(arr)


def normal(mean: float, sd: float) -> Density:
    return Density(Family.NORMAL, (mean, sd))


def lognormal(mu_log: float, sigma_log: float) -> Density:
    return Density(Family.LOGNORMAL, (mu_log, sigma_log))


def gamma(shape: float, scale: float) -> Density:
    return Density(Family.GAMMA, (shape, scale))


def beta(a: float, b: float) -> Density:
    return Density(Family.BETA, (a, b))


def weibull(shape: float, scale: float) -> Density:
    return Density(Family.WEIBULL, (shape, scale))


def logistic(loc: float, scale: float) -> Density:
    return Density(Family.LOGISTIC, (loc, scale))


def loglogistic(shape: float, scale: float) -> Density:
    return Density(Family.LOGLOGISTIC, (shape, scale))


def nakagami(shape: float, spread: float) -> Density:
    return Density(Family.NAKAGAMI, (shape, spread))


def mixture(weights, components) -> Density:
    return Density(Family.MIXTURE, (), tuple(weights), tuple(components))


def make(family, params) -> Density:
    return Density(Family(family), tuple(params))
