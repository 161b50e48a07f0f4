"""Updating a Monte Carlo sample set after its input density changes.

Given values drawn from ``p`` and a new density ``q``, four updates are
available:

* :func:`reweight` keeps the values and attaches importance weights ``q/p``;
* :func:`augment` adds draws from the correction density
  ``(A q - p) / (A - 1)`` with ``A = max p/q``;
* :func:`filter_samples` thins the set by acceptance/rejection with
  majorizer ``c p``, ``c = max q/p``;
* :func:`mixed_update` adds draws where ``q >= p`` and thins where
  ``q < p``; it adds ``round((pi_q+ - pi_p+) N)`` samples, half the total
  variation distance times ``N``.

Infeasible updates return the input set unchanged together with a report
whose ``feasible`` flag is false.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import Density
from .geometry import UNBOUNDED, max_ratio, partition, support_contained
from .samples import Provenance, SampleSet, Strategy, UpdateReport

#: mass of the new density allowed outside the old support before reweighting
#: or filtering is declared infeasible (and the converse for augmenting)
SUPPORT_TOL = 1e-3
AUGMENT_CAP = 100
ESS_THRESHOLD = 0.9


@dataclass(frozen=True)
class Estimate:
    mean: float
    std_error: float


def ess(weights) -> float:
    """Kish effective sample size ``(sum w)^2 / sum w^2``."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if w.size == 0 or not w.max() > 0:
        raise ValueError("effective sample size undefined for all-zero weights")
    # rescale first so huge weight ranges do not overflow the square
    w = w / w.max()
    return float(w.sum() ** 2 / np.sum(w * w))


def mc_estimate(s: SampleSet, g=None) -> Estimate:
    if len(s) == 0:
        raise ValueError("cannot estimate from an empty sample set")
    y = s.values if g is None else np.asarray(g(s.values), dtype=float)
    w = s.normalized_weights
    mean = float(np.sum(w * y))
    se = float(np.sqrt(np.sum(w * w * (y - mean) ** 2)))
    return Estimate(mean, se)


def _log_ratio(num: Density, den: Density, x):
    with np.errstate(invalid="ignore"):
        ln, ld = num.logpdf(x), den.logpdf(x)
        return np.where(np.isneginf(ln), -np.inf, ln - ld)


def _d1(p: Density, q: Density) -> float:
    return partition(p, q).d1


def reweight(s: SampleSet, p: Density, q: Density, seed=None, support_tol: float = SUPPORT_TOL):
    """Importance weights ``w_i = q(x_i) / p(x_i)`` on unchanged values.

    Existing weights are discarded: ``p`` must be the density the values
    were drawn from.
    """
    n = len(s)
    d1 = _d1(p, q)
    if not support_contained(q, p, support_tol):
        return s, UpdateReport.infeasible(Strategy.REWEIGHT, n, "support", d1=d1, seed=seed)
    lr = _log_ratio(q, p, s.values)
    if np.any(np.isposinf(lr)):
        return s, UpdateReport.infeasible(Strategy.REWEIGHT, n, "support", d1=d1, seed=seed)
    w = np.exp(lr)
    if not np.any(w > 0):
        return s, UpdateReport.infeasible(Strategy.REWEIGHT, n, "zero weights", d1=d1, seed=seed)
    out = SampleSet(s.values.copy(), w, s.provenance.copy(), source=s.source or p, lineage=s.lineage)
    report = UpdateReport(Strategy.REWEIGHT, n, n, ess=ess(w), d1=d1, seed=seed)
    return out, report


def _correction_draws(q: Density, n: int, accept, rng, rate: float) -> np.ndarray:
    """``n`` draws from ``q`` thinned by ``accept(x, u) -> bool array``."""
    out = []
    have = 0
    while have < n:
        batch = int(math.ceil(1.2 * (n - have) / max(rate, 1e-6))) + 64
        x = q.draw(batch, rng)
        u = rng.random(batch)
        keep = x[accept(x, u)]
        out.append(keep)
        have += len(keep)
    return np.concatenate(out)[:n] if out else np.empty(0)


def augment(s: SampleSet, p: Density, q: Density, rng, seed=None, support_tol: float = SUPPORT_TOL,
            cap_factor: float = AUGMENT_CAP):
    """Append ``round((A - 1) N)`` draws from the correction density."""
    n = len(s)
    d1 = _d1(p, q)
    if not support_contained(p, q, support_tol):
        return s, UpdateReport.infeasible(Strategy.AUGMENT, n, "support", d1=d1, seed=seed,
                                          constant=UNBOUNDED, n_required=UNBOUNDED)
    a = max_ratio(p, q)
    if a == UNBOUNDED:
        return s, UpdateReport.infeasible(Strategy.AUGMENT, n, "unbounded", d1=d1, seed=seed,
                                          constant=UNBOUNDED, n_required=UNBOUNDED)
    a = max(a, 1.0)
    n_add = int(round((a - 1.0) * n))
    if n_add > cap_factor * n:
        return s, UpdateReport.infeasible(Strategy.AUGMENT, n, "cap", d1=d1, seed=seed,
                                          constant=a, n_required=n_add)

    def accept(x, u):
        return u < 1.0 - np.exp(_log_ratio(p, q, x)) / a

    new = _correction_draws(q, n_add, accept, rng, 1.0 - 1.0 / a) if n_add else np.empty(0)
    out = SampleSet(
        np.concatenate([s.values, new]),
        None,
        np.concatenate([s.provenance, np.full(n_add, Provenance.AUGMENTED.value, dtype=object)]),
        source=q,
        lineage=s.lineage,
    )
    return out, UpdateReport(Strategy.AUGMENT, n, n + n_add, n_added=n_add, d1=d1, seed=seed, constant=a)


def filter_samples(s: SampleSet, p: Density, q: Density, rng, c_mode: str = "analytic-scan", seed=None,
                   support_tol: float = SUPPORT_TOL):
    """Keep each sample with probability ``q(x) / (c p(x))``."""
    n = len(s)
    d1 = _d1(p, q)
    if not support_contained(q, p, support_tol):
        return s, UpdateReport.infeasible(Strategy.FILTER, n, "support", d1=d1, seed=seed, constant=UNBOUNDED)
    c = max_ratio(q, p, c_mode, samples=s.values)
    if c == UNBOUNDED:
        return s, UpdateReport.infeasible(Strategy.FILTER, n, "unbounded", d1=d1, seed=seed, constant=UNBOUNDED)
    prob = np.exp(_log_ratio(q, p, s.values)) / c
    if np.any(prob > 1.0 + 1e-9):
        raise ArithmeticError(f"acceptance probability {prob.max()!r} exceeds 1; c underestimated")
    keep = rng.random(n) < prob
    out = SampleSet(
        s.values[keep],
        None,
        np.full(int(keep.sum()), Provenance.RETAINED.value, dtype=object),
        source=q,
        lineage=s.lineage,
    )
    report = UpdateReport(Strategy.FILTER, n, int(keep.sum()), n_rejected=int(n - keep.sum()), d1=d1,
                          seed=seed, constant=c, extra={"c_mode": c_mode})
    return out, report


def mixed_update(s: SampleSet, p: Density, q: Density, rng, seed=None):
    """Augment on ``S+ = {q >= p}``, filter on ``S- = {q < p}``."""
    n = len(s)
    part = partition(p, q)
    lr = _log_ratio(q, p, s.values)
    plus = lr >= 0
    keep_prob = np.exp(np.where(plus, 0.0, lr))
    if np.any(keep_prob[~plus] > 1.0):
        raise AssertionError("acceptance probability above 1 in S-")
    u = rng.random(n)
    keep = plus | (u < keep_prob)
    n_add = int(round(part.half_tv * n))

    def accept(x, uu):
        r = _log_ratio(p, q, x)
        return (r <= 0) & (uu < 1.0 - np.exp(r))

    new = _correction_draws(q, n_add, accept, rng, part.half_tv) if n_add else np.empty(0)
    tags = s.provenance.copy()
    tags[~plus] = Provenance.RETAINED.value
    out = SampleSet(
        np.concatenate([s.values[keep], new]),
        None,
        np.concatenate([tags[keep], np.full(n_add, Provenance.AUGMENTED.value, dtype=object)]),
        source=q,
        lineage=s.lineage,
    )
    n_rej = int(n - keep.sum())
    report = UpdateReport(
        Strategy.MIXED, n, n - n_rej + n_add, n_added=n_add, n_rejected=n_rej, d1=part.d1, seed=seed,
        extra={
            "pi_p_plus": part.pi_p_plus,
            "pi_q_plus": part.pi_q_plus,
            "pi_p_minus": part.pi_p_minus,
            "pi_q_minus": part.pi_q_minus,
            "n_plus": int(plus.sum()),
            "expected_rejected": part.half_tv * n,
        },
    )
    return out, report


def choose_strategy(s: SampleSet, p: Density, q: Density, ess_fraction_threshold: float = ESS_THRESHOLD) -> Strategy:
    """Reweight when feasible with ESS >= threshold * N, otherwise mixed."""
    if not 0 < ess_fraction_threshold <= 1:
        raise ValueError("ess_fraction_threshold must lie in (0, 1]")
    _, rep = reweight(s, p, q)
    if rep.feasible and rep.ess >= ess_fraction_threshold * len(s):
        return Strategy.REWEIGHT
    return Strategy.MIXED


def update(s: SampleSet, p: Density, q: Density, strategy, rng, seed=None, c_mode: str = "analytic-scan"):
    """Dispatch to one strategy by name."""
    strategy = Strategy(strategy)
    if strategy is Strategy.REWEIGHT:
        return reweight(s, p, q, seed=seed)
    if strategy is Strategy.AUGMENT:
        return augment(s, p, q, rng, seed=seed)
    if strategy is Strategy.FILTER:
        return filter_samples(s, p, q, rng, c_mode=c_mode, seed=seed)
    return mixed_update(s, p, q, rng, seed=seed)
