"""Strategy comparison tables for the built-in scenarios."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor

from . import scenarios
from .geometry import support_contained
from .rng import child_seed, substream
from .samples import SampleSet, dumps
from .strategies import SUPPORT_TOL, augment, filter_samples, mixed_update, reweight

COLUMNS = [
    "table", "case", "p", "q", "support",
    "ess",
    "augment_na", "augment_nstar",
    "filter_reject", "filter_nstar",
    "filter_reject_empirical", "filter_nstar_empirical",
    "mixed_na", "mixed_nstar", "mixed_rejected", "mixed_n_after",
    "d1",
]

INF = "INF"


def support_relation(p, q, tol: float = SUPPORT_TOL) -> str:
    qp = support_contained(q, p, tol)
    pq = support_contained(p, q, tol)
    if qp and pq:
        return "S_p = S_q"
    if qp:
        return "S_p >= S_q"
    if pq:
        return "S_p <= S_q"
    return "S_p <> S_q"


def run_scenario(name: str, n: int = 10_000, seed: int = 1) -> dict:
    sc = scenarios.get(name)
    base = SampleSet.draw(sc.p, n, substream(seed, "tables", name, "draw"), lineage=("tables", name, "draw"))

    def rng(tag):
        return substream(seed, "tables", name, tag)

    def sd(tag):
        return child_seed(seed, "tables", name, tag)

    _, rw = reweight(base, sc.p, sc.q, seed=sd("reweight"))
    _, au = augment(base, sc.p, sc.q, rng("augment"), seed=sd("augment"))
    _, fi = filter_samples(base, sc.p, sc.q, rng("filter"), seed=sd("filter"))
    _, fe = filter_samples(base, sc.p, sc.q, rng("filter-empirical"), c_mode="sample-empirical",
                           seed=sd("filter-empirical"))
    _, mx = mixed_update(base, sc.p, sc.q, rng("mixed"), seed=sd("mixed"))

    def aug_cell(r):
        if r.feasible:
            return r.n_added, r.n_after
        if r.reason == "cap":
            return r.n_required, n + r.n_required
        return INF, INF

    def filt_cell(r):
        return (r.n_rejected, r.n_after) if r.feasible else (INF, INF)

    na, nstar = aug_cell(au)
    fr, fs = filt_cell(fi)
    er, es = filt_cell(fe)
    return {
        "table": sc.table,
        "case": sc.case,
        "p": sc.p.label(),
        "q": sc.q.label(),
        "support": support_relation(sc.p, sc.q),
        "ess": round(rw.ess) if rw.feasible else INF,
        "augment_na": na,
        "augment_nstar": nstar,
        "filter_reject": fr,
        "filter_nstar": fs,
        "filter_reject_empirical": er,
        "filter_nstar_empirical": es,
        "mixed_na": mx.n_added,
        # expected size: the mean rejection count equals the added count
        "mixed_nstar": n + mx.n_added - round(mx.extra["expected_rejected"]),
        "mixed_rejected": mx.n_rejected,
        "mixed_n_after": mx.n_after,
        "d1": mx.d1,
    }


def _run(args):
    return run_scenario(*args)


def build_tables(n: int = 10_000, seed: int = 1, workers: int = 1) -> dict:
    """Rows for tables 1 and 2; identical for any ``workers``."""
    jobs = [(name, n, seed) for name in scenarios.SCENARIOS]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_run, jobs))
    else:
        rows = [_run(j) for j in jobs]
    return {
        "table1": [r for r in rows if r["table"] == 1],
        "table2": [r for r in rows if r["table"] == 2],
    }


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def to_json(rows, n: int, seed: int) -> str:
    return dumps({"n": n, "seed": seed, "rows": rows})
