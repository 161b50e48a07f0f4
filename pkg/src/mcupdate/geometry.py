"""Where two densities cross, how their mass splits, and how far apart they are.

For a pair ``(p, q)`` the total support is split into ``S+ = {q >= p}``
and ``S- = {q < p}``. The masses of both densities on both parts drive the
mixed update, and ``d1 = int |p - q| = 2 (pi_q+ - pi_p+)`` is checked on
every partition.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .density import TAIL_MASS, Density
from .quadrature import integrate

SCAN_POINTS = 4096
BISECT_TOL = 1e-10
RATIO_CAP = 1e6
RATIO_GRID = 20001
D1_IDENTITY_TOL = 1e-6

UNBOUNDED = math.inf


class PartitionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PartitionSummary:
    crossings: tuple
    s_plus: tuple
    s_minus: tuple
    pi_p_plus: float
    pi_q_plus: float
    pi_p_minus: float
    pi_q_minus: float
    d1: float
    d1_direct: float

    @property
    def half_tv(self) -> float:
        return self.pi_q_plus - self.pi_p_plus

    def to_json(self) -> dict:
        def ivs(xs):
            return [[_num(a), _num(b)] for a, b in xs]

        return {
            "crossings": list(self.crossings),
            "s_plus": ivs(self.s_plus),
            "s_minus": ivs(self.s_minus),
            "pi_p_plus": self.pi_p_plus,
            "pi_q_plus": self.pi_q_plus,
            "pi_p_minus": self.pi_p_minus,
            "pi_q_minus": self.pi_q_minus,
            "d1": self.d1,
            "d1_direct": self.d1_direct,
        }


def _num(v):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _scan_range(p: Density, q: Density) -> tuple[float, float]:
    pl, ph = p.effective_support()
    ql, qh = q.effective_support()
    return min(pl, ql), max(ph, qh)


_HINT_PROBS = (1e-10, 1e-6, 1e-3, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.999, 1 - 1e-6, 1 - 1e-10)


def _quantiles(d: Density, probs) -> np.ndarray:
    comps = d.components or (d,)
    return np.concatenate([np.asarray(c._dist.ppf(probs), dtype=float) for c in comps])


def _quantile_grid(d: Density, n: int) -> np.ndarray:
    """Points spread evenly in probability, with geometric refinement in both tails."""
    tail = np.geomspace(TAIL_MASS, 0.01, 64)
    probs = np.concatenate([tail, np.linspace(0.01, 0.99, n), 1.0 - tail])
    x = _quantiles(d, probs)
    return x[np.isfinite(x)]


def _plus(p: Density, q: Density, x):
    """Membership of ``x`` in S+ (q >= p), evaluated in log space."""
    lp, lq = p.logpdf(x), q.logpdf(x)
    return lq >= lp


def find_crossings(p: Density, q: Density, n_scan: int = SCAN_POINTS) -> list[float]:
    """Points where ``q - p`` changes sign, refined to ``BISECT_TOL``.

    A jump at a support boundary shows up as a sign change and is
    reported at the boundary point. Touch points without a sign change
    are not reported.
    """
    lo, hi = _scan_range(p, q)
    # linear over the joint range plus quantile grids, so a narrow density
    # next to a heavy-tailed one is still resolved
    grid = np.concatenate([np.linspace(lo, hi, n_scan), _quantile_grid(p, n_scan // 2),
                           _quantile_grid(q, n_scan // 2)])
    grid = grid[(grid >= lo) & (grid <= hi)]
    # keep finite support boundaries on the grid so jumps land exactly
    edges = [
        b
        for d in (p, q)
        for b in (d.support.lower, d.support.upper)
        if math.isfinite(b) and lo < b < hi
    ]
    grid = np.unique(np.concatenate([grid, edges]))
    # points where both densities vanish carry no sign
    both_zero = np.isneginf(p.logpdf(grid)) & np.isneginf(q.logpdf(grid))
    grid = grid[~both_zero]
    sign = _plus(p, q, grid)
    out = []
    for i in np.flatnonzero(sign[1:] != sign[:-1]):
        a, b = grid[i], grid[i + 1]
        sa = sign[i]
        while b - a > BISECT_TOL:
            m = 0.5 * (a + b)
            if _plus(p, q, m) == sa:
                a = m
            else:
                b = m
        out.append(float(0.5 * (a + b)))
    return out


def _pieces(p: Density, q: Density, crossings):
    """Consecutive intervals of the total support with their S+ flag."""
    sp, sq = p.support, q.support
    lo_all, hi_all = min(sp.lower, sq.lower), max(sp.upper, sq.upper)
    elo, ehi = _scan_range(p, q)
    bps = [lo_all, *crossings, hi_all]
    pieces = []
    for a, b in zip(bps[:-1], bps[1:]):
        if not a < b:
            continue
        ca, cb = max(a, elo), min(b, ehi)
        probe = 0.5 * (ca + cb) if ca < cb else (ca if math.isfinite(ca) else cb)
        pieces.append((a, b, bool(_plus(p, q, probe))))
    merged = []
    for a, b, flag in pieces:
        if merged and merged[-1][2] == flag:
            merged[-1] = (merged[-1][0], b, flag)
        else:
            merged.append((a, b, flag))
    return merged


def _hints(p: Density, q: Density, a: float, b: float):
    pts = np.concatenate([_quantiles(p, _HINT_PROBS), _quantiles(q, _HINT_PROBS)])
    return sorted({float(x) for x in pts if a < x < b})


def _mass(d: Density, a: float, b: float) -> float:
    """Probability of ``[a, b]`` from CDF differences (upper tail via the survival function)."""
    sup = d.support
    a, b = max(a, sup.lower), min(b, sup.upper)
    if not a < b:
        return 0.0
    comps = d.components or (d,)
    weights = d.weights or (1.0,)
    total = 0.0
    for w, c in zip(weights, comps):
        dist = c._dist
        med = float(dist.ppf(0.5))
        if a >= med:
            total += w * (float(dist.sf(a)) - float(dist.sf(b)))
        else:
            total += w * (float(dist.cdf(b)) - float(dist.cdf(a)))
    return total


@functools.lru_cache(maxsize=256)
def partition(p: Density, q: Density, tol: float = 1e-11) -> PartitionSummary:
    """Split the support into S+/S- and measure both densities on each part.

    Masses come from CDF differences; ``int |q - p|`` is integrated
    independently by quadrature; :class:`PartitionError` is raised when the
    two disagree by more than ``D1_IDENTITY_TOL``.
    """
    crossings = tuple(find_crossings(p, q))
    pieces = _pieces(p, q, crossings)
    pp = {True: 0.0, False: 0.0}
    pq = {True: 0.0, False: 0.0}
    direct = 0.0
    for a, b, flag in pieces:
        pp[flag] += _mass(p, a, b)
        pq[flag] += _mass(q, a, b)
        direct += integrate(lambda x: abs(q.pdf(x) - p.pdf(x)), (a, b), tol, _hints(p, q, a, b))
    d1 = 2.0 * (pq[True] - pp[True])
    if abs(direct - d1) > D1_IDENTITY_TOL:
        raise PartitionError(f"total variation {direct!r} disagrees with 2(pi_q+ - pi_p+) = {d1!r}")
    return PartitionSummary(
        crossings=crossings,
        s_plus=tuple((a, b) for a, b, f in pieces if f),
        s_minus=tuple((a, b) for a, b, f in pieces if not f),
        pi_p_plus=pp[True],
        pi_q_plus=pq[True],
        pi_p_minus=pp[False],
        pi_q_minus=pq[False],
        d1=max(d1, 0.0),
        d1_direct=direct,
    )


def total_variation(p: Density, q: Density) -> float:
    """``int |p - q| dx`` over the total support, in [0, 2]."""
    return partition(p, q).d1_direct


# -- density ratio bounds -------------------------------------------------------


def _log_ratio(num: Density, den: Density, x):
    with np.errstate(invalid="ignore"):
        ln, ld = num.logpdf(x), den.logpdf(x)
        r = np.where(np.isneginf(ln), -np.inf, ln - ld)
    return r


def _tail_probe(num: Density, den: Density, log_cap: float) -> bool:
    """True when the ratio exceeds the cap approaching an end of num's support."""
    lo, hi = num.effective_support()
    width = hi - lo
    sup = num.support
    for side, end in (("lower", sup.lower), ("upper", sup.upper)):
        sgn = -1.0 if side == "lower" else 1.0
        if math.isinf(end):
            anchor = lo if side == "lower" else hi
            xs = anchor + sgn * width * 2.0 ** np.arange(0, 41)
        else:
            xs = end - sgn * width * 2.0 ** -np.arange(1, 61, dtype=float)
            xs = xs[(xs > sup.lower) & (xs < sup.upper)]
        if len(xs) and np.nanmax(_log_ratio(num, den, xs)) > log_cap:
            return True
    return False


def _tail_diverges(num: Density, den: Density) -> bool:
    """Decide divergence from the family decay classes at shared ends."""
    sn, sd = num.support, den.support
    for side in ("lower", "upper"):
        end = getattr(sn, side)
        if end != getattr(sd, side):
            continue
        if num.tail_order(side) < den.tail_order(side):
            return True
    return False


@functools.lru_cache(maxsize=256)
def _max_ratio_analytic(num: Density, den: Density, cap: float) -> float:
    sn, sd = num.support, den.support
    if not sd.covers(sn):
        return UNBOUNDED
    if _tail_diverges(num, den):
        return UNBOUNDED
    log_cap = math.log(cap)
    if _tail_probe(num, den, log_cap):
        return UNBOUNDED
    lo = min(num.effective_support()[0], den.effective_support()[0])
    hi = max(num.effective_support()[1], den.effective_support()[1])
    lo, hi = max(lo, sn.lower), min(hi, sn.upper)
    grid = np.linspace(lo, hi, RATIO_GRID)
    with np.errstate(divide="ignore"):
        num_pos = num.logpdf(grid) > -np.inf
        den_zero = den.logpdf(grid) == -np.inf
    if np.any(num_pos & den_zero):
        return UNBOUNDED
    lr = _log_ratio(num, den, grid)
    k = int(np.nanargmax(lr))
    best = lr[k]
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    if a < b:
        res = minimize_scalar(
            lambda x: -float(_log_ratio(num, den, np.array([x]))[0]),
            bounds=(a, b),
            method="bounded",
            options={"xatol": 1e-12},
        )
        best = max(best, -res.fun)
    if best > log_cap:
        return UNBOUNDED
    return float(math.exp(best))


def max_ratio(num: Density, den: Density, mode: str = "analytic-scan", samples=None, cap: float = RATIO_CAP) -> float:
    """Supremum of ``num(x) / den(x)``, or ``UNBOUNDED`` (``math.inf``).

    ``analytic-scan`` combines a support check, the tail decay classes of
    :meth:`Density.tail_order`, a far-tail probe and a refined grid scan.
    ``sample-empirical`` takes the maximum over ``samples``.
    """
    if mode == "analytic-scan":
        return _max_ratio_analytic(num, den, float(cap))
    if mode == "sample-empirical":
        if samples is None or len(samples) == 0:
            raise ValueError("sample-empirical mode needs samples")
        lr = _log_ratio(num, den, np.asarray(samples, dtype=float))
        best = float(np.max(lr))
        return UNBOUNDED if best > math.log(cap) else math.exp(best)
    raise ValueError(f"unknown max_ratio mode {mode!r}")


def support_mass_outside(inner: Density, outer: Density) -> float:
    """Probability under ``inner`` of falling outside ``outer``'s support."""
    so = outer.support
    below = inner.cdf(so.lower) if math.isfinite(so.lower) else 0.0
    above = 1.0 - inner.cdf(so.upper) if math.isfinite(so.upper) else 0.0
    return float(below + above)


def support_contained(inner: Density, outer: Density, tol: float = 0.0) -> bool:
    """``S_inner`` within ``S_outer`` up to ``tol`` of inner's mass."""
    if outer.support.covers(inner.support):
        return True
    return support_mass_outside(inner, outer) <= tol
