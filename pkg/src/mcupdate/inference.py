"""Two-stage Bayesian inference: pick a family, then its MAP parameters.

Model evidence is estimated by plain Monte Carlo over the parameter prior,
posterior model probabilities follow from Bayes' rule, and the selected
family's parameters are the posterior mode. Parameter priors are uniform
boxes, so the mode coincides with the maximum likelihood estimate inside
the box.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, stats
from scipy.special import logsumexp
from scipy.stats import qmc

from .density import Density, Family, make

log = logging.getLogger(__name__)

#: the seven candidate families, in catalog order
FAMILIES = (
    Family.NORMAL,
    Family.LOGNORMAL,
    Family.GAMMA,
    Family.LOGISTIC,
    Family.WEIBULL,
    Family.LOGLOGISTIC,
    Family.NAKAGAMI,
)

POSITIVE_FAMILIES = frozenset(FAMILIES) - {Family.NORMAL, Family.LOGISTIC}

# parameter index that is a location (box is additive rather than multiplicative)
_LOCATION = {Family.NORMAL: 0, Family.LOGISTIC: 0, Family.LOGNORMAL: 0}

DEFAULT_NK = 100_000
N_STARTS = 16


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class PriorBox:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo, hi = np.asarray(self.lower, float), np.asarray(self.upper, float)
        if lo.shape != hi.shape or not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)):
            raise ValueError("prior box bounds must be finite and of equal length")
        if not np.all(hi > lo):
            raise ValueError(f"prior box has zero volume: {self.lower} .. {self.upper}")

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.upper, self.lower)))

    def sample(self, n: int, rng) -> np.ndarray:
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        return lo + rng.random((n, len(lo))) * (hi - lo)

    def contains(self, theta) -> bool:
        return bool(np.all(np.asarray(theta) >= self.lower) and np.all(np.asarray(theta) <= self.upper))


@dataclass(frozen=True)
class CatalogEntry:
    family: Family
    prior: PriorBox
    prior_prob: float


@dataclass(frozen=True)
class ModelCatalog:
    entries: tuple

    def __post_init__(self):
        total = sum(e.prior_prob for e in self.entries)
        if not self.entries or abs(total - 1.0) > 1e-12:
            raise ValueError(f"prior model probabilities must sum to 1, got {total!r}")

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class Evidence:
    estimate: float
    std_error: float
    log_estimate: float
    n_k: int
    underflow: bool = False


@dataclass
class ModelFit:
    family: Family
    map_params: tuple
    posteriors: dict
    evidence: dict
    n_k: int
    n_data: int
    degenerate: bool = False
    warnings: list = field(default_factory=list)

    @property
    def density(self) -> Density:
        return make(self.family, self.map_params)

    def to_json(self) -> dict:
        return {
            "family": self.family.value,
            "map_params": list(self.map_params),
            "density": self.density.to_json(),
            "posteriors": {f.value: p for f, p in self.posteriors.items()},
            "evidence": {
                f.value: {"estimate": e.estimate, "std_error": e.std_error, "log_estimate": e.log_estimate,
                          "underflow": e.underflow}
                for f, e in self.evidence.items()
            },
            "n_k": self.n_k,
            "n_data": self.n_data,
            "degenerate": self.degenerate,
            "warnings": list(self.warnings),
        }


# -- likelihoods -------------------------------------------------------------


def _logpdf(family: Family, x, a, b):
    """Family log-density broadcast over parameter arrays ``a`` and ``b``."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if family is Family.NORMAL:
            return stats.norm.logpdf(x, loc=a, scale=b)
        if family is Family.LOGNORMAL:
            return stats.lognorm.logpdf(x, b, scale=np.exp(a))
        if family is Family.GAMMA:
            return stats.gamma.logpdf(x, a, scale=b)
        if family is Family.LOGISTIC:
            return stats.logistic.logpdf(x, loc=a, scale=b)
        if family is Family.WEIBULL:
            return stats.weibull_min.logpdf(x, a, scale=b)
        if family is Family.LOGLOGISTIC:
            return stats.fisk.logpdf(x, a, scale=b)
        if family is Family.NAKAGAMI:
            return stats.nakagami.logpdf(x, a, scale=np.sqrt(b))
        if family is Family.BETA:
            return stats.beta.logpdf(x, a, b)
    raise ValueError(f"no likelihood for {family}")


def log_likelihood(family: Family, thetas, data, chunk: int = 0) -> np.ndarray:
    """Log-likelihood of ``data`` at each row of ``thetas`` (shape ``(k, 2)``)."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    data = np.asarray(data, dtype=float)
    chunk = chunk or max(1, 2_000_000 // max(len(data), 1))
    out = np.empty(len(thetas))
    for i in range(0, len(thetas), chunk):
        t = thetas[i:i + chunk]
        ll = _logpdf(family, data[None, :], t[:, :1], t[:, 1:2])
        out[i:i + chunk] = np.sum(np.nan_to_num(ll, nan=-np.inf), axis=1)
    return out


def _supports(family: Family, data) -> bool:
    data = np.asarray(data)
    if family in POSITIVE_FAMILIES:
        return bool(np.all(data > 0))
    if family is Family.BETA:
        return bool(np.all((data > 0) & (data < 1)))
    return True


# -- priors ------------------------------------------------------------------


def moment_start(family: Family, data) -> tuple:
    """Moment-matched parameters, used as box centre and first optimizer start."""
    x = np.asarray(data, dtype=float)
    m, s = float(np.mean(x)), float(np.std(x))
    s = max(s, 1e-3 * max(1.0, abs(m)))
    if family is Family.NORMAL:
        return (m, s)
    if family is Family.LOGISTIC:
        return (m, s * math.sqrt(3) / math.pi)
    if family is Family.GAMMA:
        return (m * m / (s * s), s * s / m)
    if family is Family.NAKAGAMI:
        x2 = x * x
        omega = float(np.mean(x2))
        return (max(omega * omega / max(float(np.var(x2)), 1e-12 * omega * omega), 0.5), omega)
    lx = np.log(x)
    ml, sl = float(np.mean(lx)), float(np.std(lx))
    sl = max(sl, 1e-3 * max(1.0, abs(ml)))
    if family is Family.LOGNORMAL:
        return (ml, sl)
    if family is Family.WEIBULL:
        k = math.pi / (sl * math.sqrt(6))
        return (k, math.exp(ml + 0.5772156649 / k))
    if family is Family.LOGLOGISTIC:
        return (math.pi / (sl * math.sqrt(3)), math.exp(ml))
    raise ValueError(family)


def _spread(family: Family, data) -> float:
    x = np.asarray(data, dtype=float)
    if family is Family.LOGNORMAL:
        x = np.log(x)
    m, s = float(np.mean(x)), float(np.std(x))
    return max(s, 1e-3 * max(1.0, abs(m)))


def default_prior(family: Family, data, width: float = 5.0) -> PriorBox:
    """Uniform box around the moment-matched parameters.

    Positive parameters span ``[c / width, c * width]``; location
    parameters span ``c +/- width * spread`` with ``spread`` the sample
    standard deviation (of the logs for Lognormal).
    """
    centre = moment_start(family, data)
    lo, hi = [], []
    for i, c in enumerate(centre):
        if _LOCATION.get(family) == i:
            half = width * _spread(family, data)
            lo.append(c - half)
            hi.append(c + half)
        else:
            lo.append(c / width)
            hi.append(c * width)
    return PriorBox(tuple(lo), tuple(hi))


def default_catalog(data, families=FAMILIES, width: float = 5.0, prior_probs=None) -> ModelCatalog:
    """Catalog of the families that can describe ``data``, equal prior odds."""
    fams = [Family(f) for f in families if _supports(Family(f), data)]
    if not fams:
        raise FitError("no candidate family supports the data")
    if prior_probs is None:
        probs = [1.0 / len(fams)] * len(fams)
        probs[-1] = 1.0 - sum(probs[:-1])
    else:
        probs = list(prior_probs)
    return ModelCatalog(tuple(CatalogEntry(f, default_prior(f, data, width), p) for f, p in zip(fams, probs)))


# -- evidence and model posteriors -------------------------------------------


def evidence(data, entry: CatalogEntry, n_k: int, rng) -> Evidence:
    """Monte Carlo evidence: mean likelihood over ``n_k`` prior draws."""
    data = np.asarray(data, dtype=float)
    if len(data) == 0:
        raise ValueError("evidence needs data")
    if n_k < 100:
        raise ValueError("n_k must be at least 100")
    thetas = entry.prior.sample(n_k, rng)
    if not _supports(entry.family, data):
        return Evidence(0.0, 0.0, -math.inf, n_k, underflow=True)
    ll = log_likelihood(entry.family, thetas, data)
    top = float(np.max(ll))
    if not math.isfinite(top):
        return Evidence(0.0, 0.0, -math.inf, n_k, underflow=True)
    scaled = np.exp(ll - top)
    log_est = top + math.log(float(np.mean(scaled)))
    rel_sd = float(np.std(scaled, ddof=1)) / float(np.mean(scaled))
    est = math.exp(log_est) if log_est > -745 else 0.0
    return Evidence(est, est * rel_sd / math.sqrt(n_k), log_est, n_k, underflow=est == 0.0)


def posteriors_from_log_evidence(log_ev, prior_probs):
    """Normalized posterior model probabilities, in log space."""
    lw = np.asarray(log_ev, dtype=float) + np.log(np.asarray(prior_probs, dtype=float))
    if not np.any(np.isfinite(lw)):
        return np.full(len(lw), 1.0 / len(lw)), True
    return np.exp(lw - logsumexp(lw)), False


def model_posteriors(data, catalog: ModelCatalog, n_k: int, rng):
    """Posterior model probabilities and per-entry evidence estimates."""
    rngs = rng.spawn(len(catalog))
    evs = [evidence(data, e, n_k, r) for e, r in zip(catalog, rngs)]
    post, flat = posteriors_from_log_evidence([e.log_estimate for e in evs], [e.prior_prob for e in catalog])
    if flat:
        log.warning("all evidence estimates are zero; using a uniform model posterior")
    return post, evs, flat


def select(catalog: ModelCatalog, post) -> CatalogEntry:
    """Highest posterior; ties go to fewer parameters, then family name."""
    best = max(post)
    tied = [e for e, p in zip(catalog, post) if p == best]
    return min(tied, key=lambda e: (len(e.prior.lower), e.family.value))


# -- MAP ----------------------------------------------------------------------


def map_fit(data, family, prior: PriorBox = None, n_starts: int = N_STARTS):
    """Posterior mode under a uniform box prior by multi-start L-BFGS-B.

    Returns ``(params, degenerate)``; ``degenerate`` is set when the mode
    sits on the box boundary.
    """
    family = Family(family)
    data = np.asarray(data, dtype=float)
    if not _supports(family, data):
        raise FitError(f"data lie outside the support of the {family.value} family")
    prior = prior or default_prior(family, data)
    lo, hi = np.asarray(prior.lower), np.asarray(prior.upper)
    span = hi - lo

    def nll(u):
        theta = lo + np.clip(u, 0.0, 1.0) * span
        v = -log_likelihood(family, theta[None, :], data)[0]
        return v if math.isfinite(v) else 1e300

    start0 = (np.asarray(moment_start(family, data)) - lo) / span
    lhs = qmc.LatinHypercube(d=len(lo), seed=0).random(n_starts - 1)
    starts = np.vstack([np.clip(start0, 0, 1), lhs])
    best = None
    for u0 in starts:
        res = optimize.minimize(nll, u0, method="L-BFGS-B", bounds=[(0.0, 1.0)] * len(lo),
                                options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 2000})
        if best is None or res.fun < best.fun:
            best = res
    polish = optimize.minimize(nll, best.x, method="Nelder-Mead",
                               options={"xatol": 1e-13, "fatol": 1e-14, "maxiter": 4000})
    u = np.clip(polish.x if polish.fun <= best.fun else best.x, 0.0, 1.0)
    theta = lo + u * span
    degenerate = bool(np.any(u <= 1e-9) or np.any(u >= 1 - 1e-9))
    return tuple(float(t) for t in theta), degenerate


def fit(data, catalog: ModelCatalog = None, n_k: int = DEFAULT_NK, rng=None) -> ModelFit:
    """Select a family by posterior probability and return its MAP fit."""
    data = np.asarray(data, dtype=float)
    if len(data) == 0:
        raise FitError("no data")
    catalog = catalog or default_catalog(data)
    post, evs, flat = model_posteriors(data, catalog, n_k, rng)
    chosen = select(catalog, post)
    params, degenerate = map_fit(data, chosen.family, chosen.prior)
    warnings = ["uniform posterior: all evidences zero"] if flat else []
    if degenerate:
        warnings.append("MAP estimate on prior box boundary")
    return ModelFit(
        family=chosen.family,
        map_params=params,
        posteriors={e.family: float(p) for e, p in zip(catalog, post)},
        evidence={e.family: ev for e, ev in zip(catalog, evs)},
        n_k=n_k,
        n_data=len(data),
        degenerate=degenerate,
        warnings=warnings,
    )
