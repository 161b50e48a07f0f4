"""Command line entry point: ``mcupdate {update,tables,pipeline,fit,buckle}``.

Exit status: 0 success, 2 infeasible strategy, 3 fit failure, 4 I/O
error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import buckling, inference, pipeline, scenarios, standin, tables
from .density import Density
from .rng import child_seed, substream
from .samples import SampleSet, Strategy, dumps
from .strategies import ESS_THRESHOLD, choose_strategy, update

EXIT_OK, EXIT_INFEASIBLE, EXIT_FIT, EXIT_IO, EXIT_USAGE = 0, 2, 3, 4, 64

log = logging.getLogger("mcupdate")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _density(text) -> Density:
    if isinstance(text, dict):
        return Density.from_json(text)
    text = str(text).strip()
    if not text.startswith("{"):
        text = Path(text).read_text()
    return Density.from_json(json.loads(text))


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _overlay(original: SampleSet, updated: SampleSet, p: Density, q: Density, bins: int = 60) -> dict:
    vals = np.concatenate([original.values, updated.values])
    lo, hi = float(vals.min()), float(vals.max())
    edges = np.linspace(lo, hi, bins + 1)
    grid = np.linspace(lo, hi, 401)
    return {
        "bin_edges": edges.tolist(),
        "original_counts": np.histogram(original.values, edges)[0].tolist(),
        "updated_counts": np.histogram(updated.values, edges)[0].tolist(),
        "updated_weighted_density": np.histogram(updated.values, edges, weights=updated.weights,
                                                 density=True)[0].tolist(),
        "grid": grid.tolist(),
        "p_pdf": p.pdf(grid).tolist(),
        "q_pdf": q.pdf(grid).tolist(),
    }


# -- commands -----------------------------------------------------------------


def cmd_update(args) -> int:
    if args.scenario:
        sc = scenarios.get(args.scenario)
        p, q = sc.p, sc.q
    else:
        if args.p is None or args.q is None:
            raise UsageError("update needs --scenario or both --p and --q")
        p, q = _density(args.p), _density(args.q)
    n = int(args.n or 10_000)
    if args.samples:
        s = SampleSet.read_csv(args.samples, source=p)
    else:
        s = SampleSet.draw(p, n, substream(args.seed, "update", "draw"), lineage=("update", "draw"))
    strategy = args.strategy or "auto"
    thr = float(args.ess_threshold or ESS_THRESHOLD)
    if strategy == "auto":
        strategy = choose_strategy(s, p, q, thr)
    strategy = Strategy(strategy)
    out, rep = update(s, p, q, strategy, substream(args.seed, "update", strategy.value),
                      seed=child_seed(args.seed, "update", strategy.value), c_mode=args.c_mode or "analytic-scan")
    d = Path(args.out)
    _write(d / "report.json", rep.dumps())
    _write(d / "samples.csv", out.to_csv())
    _write(d / "overlay.json", dumps(_overlay(s, out, p, q)))
    print(f"{rep.strategy.value}: feasible={rep.feasible} n_added={rep.n_added} n_rejected={rep.n_rejected}"
          + (f" ess={rep.ess:.1f}" if rep.ess is not None else "")
          + (f" reason={rep.reason}" if rep.reason else ""))
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


def cmd_tables(args) -> int:
    n = int(args.n or 10_000)
    res = tables.build_tables(n, args.seed, int(args.workers or 1))
    d = Path(args.out)
    for key, rows in res.items():
        _write(d / f"{key}.csv", tables.to_csv(rows))
        _write(d / f"{key}.json", tables.to_json(rows, n, args.seed))
        print(tables.to_csv(rows), end="")
    return EXIT_OK


def _load_run_config(args) -> tuple:
    if args.config:
        cfg_path = Path(args.config)
        cfg = json.loads(cfg_path.read_text())
        base = cfg_path.parent
    else:
        cfg_path = standin.data_dir() / "pipeline.json"
        cfg = json.loads(cfg_path.read_text())
        base = cfg_path.parent
    paths = [Path(p) if Path(p).is_absolute() else base / p for p in cfg["stages"]]
    return cfg, paths


def cmd_pipeline(args) -> int:
    cfg, paths = _load_run_config(args)
    n = int(args.n or cfg.get("N", 10_000))
    n_k = int(args.n_k or cfg.get("N_k", inference.DEFAULT_NK))
    thr = float(args.ess_threshold or cfg.get("ess_threshold", ESS_THRESHOLD))
    seed = args.seed if args.seed_given else int(cfg.get("seed", args.seed))
    stages = [standin.read_observations(p) for p in paths]
    try:
        results = pipeline.sequential_pipeline(stages, n, thr, n_k, seed)
    except inference.FitError as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return EXIT_FIT
    d = Path(args.out)
    rows = []
    for r in results:
        sd = d / f"stage_{r.index}"
        _write(sd / "fit.json", dumps(r.fit.to_json()))
        _write(sd / "report.json", r.report.dumps())
        _write(sd / "samples.csv", r.samples.to_csv())
        _write(sd / "cdf.csv", buckling.propagate(r.samples).to_csv())
        rows.append(r.summary_row())
    sv = pipeline.savings(results, n)
    _write(d / "summary.json", dumps({"stages": rows, "savings": sv, "N": n, "seed": seed}))
    header = ["stage", "dataset_size", "family", "strategy", "ess", "d1", "n_added", "n_rejected", "n_samples"]
    lines = [",".join(header)] + [",".join(repr(r[h]) if isinstance(r[h], float) else str(r[h]) for h in header)
                                  for r in rows]
    _write(d / "summary.csv", "\n".join(lines) + "\n")
    print("\n".join(lines))
    print(f"total added {sv['total_added']} vs rerun {sv['rerun_cost']}: savings {sv['savings_ratio']:.1%}")
    return EXIT_OK


def cmd_fit(args) -> int:
    if not args.data:
        raise UsageError("fit needs --data")
    data = standin.read_observations(args.data)
    try:
        res = pipeline.fit_stage(data, args.seed, int(args.n_k or inference.DEFAULT_NK))
    except inference.FitError as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return EXIT_FIT
    text = dumps(res.to_json())
    _write(Path(args.out) / "fit.json", text)
    print(f"{res.family.value} {list(res.map_params)}")
    return EXIT_OK


def cmd_buckle(args) -> int:
    base = buckling.NOMINAL if args.nominal else buckling.MEAN
    if args.spec:
        base = buckling.PlateSpec.load(args.spec, base)
    if args.samples:
        s = SampleSet.read_csv(args.samples)
    elif args.density:
        dens = _density(args.density)
        s = SampleSet.draw(dens, int(args.n or 10_000), substream(args.seed, "buckle", "draw"))
    else:
        raise UsageError("buckle needs --samples or --density")
    prop = buckling.propagate(s, base, full_joint=args.full_joint,
                              rng=substream(args.seed, "buckle", "joint"))
    _write(Path(args.out) / "cdf.csv", prop.to_csv())
    w = prop.weights / prop.weights.sum()
    print(f"psi mean {float(np.sum(w * prop.psi)):.6f} over {len(prop.psi)} samples;"
          f" nominal-spec strength {buckling.strength_carlsen(base):.6f}")
    return EXIT_OK


COMMANDS = {"update": cmd_update, "tables": cmd_tables, "pipeline": cmd_pipeline, "fit": cmd_fit,
            "buckle": cmd_buckle}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="64-bit master seed (default 1)")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--config", default=None, help="JSON file of option values")
    ap = _Parser(prog="mcupdate", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("update", parents=[common], help="apply one strategy to a sample set")
    p.add_argument("--scenario", choices=sorted(scenarios.SCENARIOS))
    p.add_argument("--p", help="original density as JSON or a JSON file")
    p.add_argument("--q", help="updated density as JSON or a JSON file")
    p.add_argument("--n", type=int)
    p.add_argument("--samples", help="existing sample CSV (value,weight,provenance)")
    p.add_argument("--strategy", choices=["auto"] + [s.value for s in Strategy])
    p.add_argument("--c-mode", choices=["analytic-scan", "sample-empirical"])
    p.add_argument("--ess-threshold", type=float)

    p = sub.add_parser("tables", parents=[common], help="strategy comparison tables")
    p.add_argument("--n", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("pipeline", parents=[common], help="sequential refit-and-update run")
    p.add_argument("--n", type=int)
    p.add_argument("--n-k", type=int)
    p.add_argument("--ess-threshold", type=float)

    p = sub.add_parser("fit", parents=[common], help="select a family and MAP parameters")
    p.add_argument("--data", help="single-column CSV of observations")
    p.add_argument("--n-k", type=int)

    p = sub.add_parser("buckle", parents=[common], help="plate strength CDF from yield-stress samples")
    p.add_argument("--samples")
    p.add_argument("--density")
    p.add_argument("--n", type=int)
    p.add_argument("--spec", help="JSON overrides of PlateSpec fields")
    p.add_argument("--nominal", action="store_true", help="fix other variables at nominal, not mean, values")
    p.add_argument("--full-joint", action="store_true", help="also draw the other five variables")
    return ap


def _apply_config(args):
    if args.command == "pipeline" or not args.config:
        return
    cfg = json.loads(Path(args.config).read_text())
    for key, val in cfg.items():
        attr = key.replace("-", "_")
        if attr == "N":
            attr = "n"
        if getattr(args, attr, None) is None:
            setattr(args, attr, val)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.seed_given = args.seed is not None
        _apply_config(args)
        if args.seed is None:
            args.seed = 1
        args.seed = int(args.seed)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mcupdate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"mcupdate: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
