"""Adaptive quadrature on finite, semi-infinite and infinite intervals.

Thin wrapper over QUADPACK (``scipy.integrate.quad``). Infinite intervals
are split at the hint points so the peaked part is integrated on a finite
range and only the tails go through QUADPACK's variable transform.
"""

from __future__ import annotations

import math
import warnings

from scipy import integrate as _integrate


class QuadratureError(RuntimeError):
    """Raised when adaptive refinement does not reach the tolerance."""

    def __init__(self, message: str, estimate: float, abserr: float):
        super().__init__(f"{message} (partial estimate {estimate!r}, error bound {abserr!r})")
        self.estimate = estimate
        self.abserr = abserr


def _quad(f, a, b, tol, points, limit):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        kw = {}
        if points and math.isfinite(a) and math.isfinite(b):
            kw["points"] = sorted(p for p in points if a < p < b) or None
        res = _integrate.quad(f, a, b, epsabs=tol, epsrel=tol, limit=limit, full_output=1, **kw)
    val, err = res[0], res[1]
    # QUADPACK flags roundoff on smooth integrands; only a loose bound is fatal
    if len(res) > 3 and err > 1e3 * tol * max(1.0, abs(val)):
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge", val, err)
    return val, err


def integrate(f, interval, tol: float = 1e-10, points=None, limit: int = 400) -> float:
    """Integrate ``f`` over ``interval`` (a pair or a ``SupportInterval``).

    ``points`` are optional locations of peaks or kinks; on infinite
    intervals they also define the finite core.
    """
    if hasattr(interval, "lower"):
        a, b = interval.lower, interval.upper
    else:
        a, b = interval
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    if a > b:
        return -integrate(f, (b, a), tol, points, limit)
    pts = sorted(float(p) for p in (points or ()) if a < p < b and math.isfinite(p))
    if math.isfinite(a) and math.isfinite(b) or not pts:
        return _quad(f, a, b, tol, pts, limit)[0]
    lo, hi = pts[0], pts[-1]
    total = 0.0
    if lo < hi:
        total += _quad(f, lo, hi, tol, pts, limit)[0]
    total += _quad(f, a, lo, tol, None, limit)[0]
    total += _quad(f, hi, b, tol, None, limit)[0]
    return total
