"""Command line front end.

Subcommands: features, ndr, evolution, gen, classify, portfolio. Per-file
failures in batch runs are reported as warnings and marked rows; the run
still exits 0. All subcommands are deterministic given inputs and seed, and
--workers never changes the output bytes.
"""

from __future__ import annotations

import argparse
import json
import multiprocessing
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import cnf, features, fractal, graph, portfolio

DEFAULT_SEED = 42
MODELS = ("vig", "cvig", "cig")


@dataclass
class RunConfig:
    subcommand: str
    inputs: tuple[str, ...]
    model: str = "vig"
    weighted: bool = False
    ordering: str = "desc_degree"
    fit_lo: int = 1
    fit_hi: int = 5
    monotone_clamp: bool = False
    seed: int = DEFAULT_SEED
    workers: int = 1
    out_format: str = "csv"


def _resolve_seed(arg_seed) -> int:
    if arg_seed is not None:
        return int(arg_seed)
    env = os.environ.get("CNFSCOPE_SEED")
    if env is not None:
        return int(env)
    return DEFAULT_SEED


def _check_readable(paths):
    for p in paths:
        if not os.path.isfile(p):
            raise FileNotFoundError(f"input not readable: {p}")


def _build_graph(f: cnf.CnfFormula, model: str, weighted: bool) -> graph.Graph:
    if model == "vig":
        return graph.build_vig(f, weighted)
    if model == "cvig":
        return graph.build_cvig(f, weighted)
    if model == "cig":
        return graph.build_cig(f)
    raise ValueError(f"unknown graph model {model!r}")


def _emit(text: str, out_path: str | None):
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# features


def _feature_config(cfg: RunConfig) -> features.FeatureConfig:
    return features.FeatureConfig(seed=cfg.seed, fit_lo=cfg.fit_lo,
                                  fit_hi=cfg.fit_hi, ordering=cfg.ordering,
                                  monotone_clamp=cfg.monotone_clamp)


def _features_one(job) -> tuple[str, str | None, object]:
    """Worker: returns (instance, family, FeatureVector | error string)."""
    path, family_from_dir, cfg = job
    instance = Path(path).name
    family = Path(path).parent.name if family_from_dir else None
    try:
        formula = cnf.parse_dimacs(Path(path).read_bytes())
        vec = features.extract_features(formula, _feature_config(cfg))
        return instance, family, vec
    except Exception as exc:  # batch-continue contract
        return instance, family, f"{type(exc).__name__}: {exc}"


def cmd_features(args) -> int:
    cfg = _config_from(args, "features", tuple(args.inputs))
    _check_readable(cfg.inputs)
    jobs = [(p, args.family_from_dir, cfg) for p in cfg.inputs]
    if cfg.workers > 1:
        with multiprocessing.Pool(cfg.workers) as pool:
            results = pool.map(_features_one, jobs)
    else:
        results = [_features_one(j) for j in jobs]
    for instance, _, res in results:
        if isinstance(res, str):
            print(f"warning: {instance}: {res}", file=sys.stderr)
    if cfg.out_format == "json":
        out = []
        for instance, family, res in results:
            if isinstance(res, str):
                out.append({"instance": instance, "error": res})
            else:
                row = features.FeatureRow(instance, family, res)
                out.append(json.loads(features.matrix_to_json(
                    features.FeatureMatrix([row])))[0])
        _emit(json.dumps(out, indent=2) + "\n", args.output)
    else:
        text = [features.CSV_HEADER + "\n"]
        for instance, family, res in results:
            if isinstance(res, str):
                text.append(f"{instance},ERROR,,,,,,,,,,\n")
            else:
                row = features.FeatureRow(instance, family, res)
                text.append(features.matrix_to_csv(
                    features.FeatureMatrix([row])).splitlines(True)[1])
        _emit("".join(text), args.output)
    return 0


# ---------------------------------------------------------------------------
# ndr


def cmd_ndr(args) -> int:
    cfg = _config_from(args, "ndr", (args.input,))
    _check_readable(cfg.inputs)
    formula = cnf.parse_dimacs(Path(args.input).read_bytes())
    g = _build_graph(formula, cfg.model, cfg.weighted)
    curve = fractal.cover_curve(g, r_stop=args.r_stop, ordering=cfg.ordering,
                                monotone_clamp=cfg.monotone_clamp)
    try:
        fit = fractal.fit_dimension(curve, cfg.fit_lo, cfg.fit_hi)
    except ValueError:
        fit = None
    if cfg.out_format == "json":
        payload = {
            "r": curve.rs.tolist(),
            "N": curve.counts.tolist(),
            "N_norm": curve.normalized.tolist(),
            "r_max": curve.r_max,
            "fit": fractal.fit_to_dict(fit) if fit else None,
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
    else:
        _emit(fractal.curve_to_csv(curve, fit), args.output)
    return 0


# ---------------------------------------------------------------------------
# evolution


def _dims(f: cnf.CnfFormula, cfg: RunConfig) -> tuple[float, float]:
    g = graph.build_vig(f, weighted=False)
    d = fractal.fit_dimension(
        fractal.cover_curve(g, r_stop=cfg.fit_hi, ordering=cfg.ordering,
                            monotone_clamp=cfg.monotone_clamp),
        cfg.fit_lo, cfg.fit_hi).d
    gb = graph.build_cvig(f, weighted=False)
    d_b = fractal.fit_dimension(
        fractal.cover_curve(gb, r_stop=cfg.fit_hi, ordering=cfg.ordering,
                            monotone_clamp=cfg.monotone_clamp),
        cfg.fit_lo, cfg.fit_hi).d
    return d, d_b


def cmd_evolution(args) -> int:
    cfg = _config_from(args, "evolution", (args.input, args.trace))
    _check_readable(cfg.inputs)
    formula = cnf.parse_dimacs(Path(args.input).read_bytes())
    trace = cnf.parse_trace(Path(args.trace).read_text())
    if args.checkpoints:
        checkpoints = [int(c) for c in args.checkpoints.split(",")]
        missing = [c for c in checkpoints if c not in trace.decision_counts]
        if missing:
            raise ValueError(f"checkpoints not in trace: {missing}")
    else:
        checkpoints = list(trace.decision_counts)
    rows = []
    for idx, ck in enumerate(checkpoints):
        status = []
        d_l = db_l = d_r = db_r = None
        try:
            aug = cnf.augment_with_learnt(formula, trace, ck)
            d_l, db_l = _dims(aug, cfg)
        except cnf.PropagationConflict:
            status.append("conflict_learnt")
        try:
            rnd = cnf.random_replacement(formula, trace, ck, cfg.seed + idx)
            d_r, db_r = _dims(rnd, cfg)
        except cnf.PropagationConflict:
            status.append("conflict_random")
        rows.append({
            "checkpoint": ck,
            "d_learnt": d_l, "d_b_learnt": db_l,
            "d_random": d_r, "d_b_random": db_r,
            "status": "+".join(status) if status else "ok",
        })
    if cfg.out_format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", args.output)
    else:
        def fmt(x):
            return "" if x is None else repr(x)
        lines = ["checkpoint,d_learnt,d_b_learnt,d_random,d_b_random,status\n"]
        for r in rows:
            lines.append(f"{r['checkpoint']},{fmt(r['d_learnt'])},"
                         f"{fmt(r['d_b_learnt'])},{fmt(r['d_random'])},"
                         f"{fmt(r['d_b_random'])},{r['status']}\n")
        _emit("".join(lines), args.output)
    return 0


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    cfg = _config_from(args, "gen", ())
    if args.n < 3:
        raise ValueError("random 3-CNF needs n >= 3")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for k in range(args.count):
        formula = cnf.random_3cnf(args.n, args.m, cfg.seed + k)
        path = outdir / f"rand_n{args.n}_m{args.m}_s{k}.cnf"
        path.write_text(cnf.write_dimacs(formula))
        print(path, file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# classify / portfolio


def _load_matrix(path: str) -> features.FeatureMatrix:
    return features.matrix_from_csv(Path(path).read_text(), skip_errors=True)


def cmd_classify(args) -> int:
    _check_readable((args.features,))
    matrix = _load_matrix(args.features)
    if any(r.family is None for r in matrix.rows):
        raise ValueError("feature CSV lacks family labels for some rows")
    names = tuple(args.features_used.split(",")) if args.features_used else \
        features.FEATURE_NAMES
    if args.mode == "tree-loo":
        report = portfolio.loo_classify(matrix, min_leaf=args.min_leaf,
                                        features=names)
    else:
        report = portfolio.knn_loo_classify(matrix, features=names)
    _emit(report.to_json() + "\n", args.output)
    return 0


def cmd_portfolio(args) -> int:
    _check_readable((args.features, args.runtimes))
    matrix = _load_matrix(args.features)
    times = portfolio.RuntimeMatrix.from_csv(Path(args.runtimes).read_text(),
                                             timeout_value=args.timeout)
    feat_ids = set(matrix.instance_ids)
    time_ids = set(times.instances)
    if feat_ids != time_ids:
        only_f = sorted(feat_ids - time_ids)
        only_t = sorted(time_ids - feat_ids)
        raise ValueError(
            f"instance id mismatch: only in features {only_f}, "
            f"only in runtimes {only_t}")
    report = portfolio.loo_portfolio_sim(matrix, times)
    _emit(report.to_json() + "\n", args.output)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _config_from(args, sub: str, inputs: tuple[str, ...]) -> RunConfig:
    return RunConfig(
        subcommand=sub,
        inputs=inputs,
        model=getattr(args, "model", "vig"),
        weighted=getattr(args, "weighted", False),
        ordering=getattr(args, "ordering", "desc_degree"),
        fit_lo=getattr(args, "fit_lo", 1),
        fit_hi=getattr(args, "fit_hi", 5),
        monotone_clamp=getattr(args, "monotone_clamp", False),
        seed=_resolve_seed(getattr(args, "seed", None)),
        workers=getattr(args, "workers", 1),
        out_format=getattr(args, "format", "csv"),
    )


def _add_common(p, fit=True):
    p.add_argument("--seed", type=int, default=None,
                   help="random seed (default: $CNFSCOPE_SEED or 42)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    if fit:
        p.add_argument("--ordering", choices=fractal.ORDERINGS,
                       default="desc_degree")
        p.add_argument("--fit-lo", type=int, default=1, dest="fit_lo")
        p.add_argument("--fit-hi", type=int, default=5, dest="fit_hi")
        p.add_argument("--monotone-clamp", action="store_true",
                       dest="monotone_clamp")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cnfscope",
        description="Structural features of CNF formulas: fractal dimension, "
                    "power-law exponent, modularity, and portfolio tooling.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", help="extract feature rows for CNF files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--family-from-dir", action="store_true",
                   help="use each file's parent directory name as its family")
    _add_common(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("ndr", help="dump the N(r) cover curve of one formula")
    p.add_argument("input")
    p.add_argument("--model", choices=MODELS, default="vig")
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--r-stop", type=int, default=None, dest="r_stop")
    _add_common(p)
    p.set_defaults(func=cmd_ndr)

    p = sub.add_parser("evolution",
                       help="dimension after augmenting with trace clauses")
    p.add_argument("input")
    p.add_argument("--trace", required=True)
    p.add_argument("--checkpoints", default=None,
                   help="comma-separated decision counts (default: all)")
    _add_common(p)
    p.set_defaults(func=cmd_evolution)

    p = sub.add_parser("gen", help="generate random 3-CNF files")
    p.add_argument("outdir")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    _add_common(p, fit=False)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("classify", help="leave-one-out family classification")
    p.add_argument("features")
    p.add_argument("--mode", choices=("tree-loo", "knn-loo"), default="tree-loo")
    p.add_argument("--min-leaf", type=int, default=1, dest="min_leaf")
    p.add_argument("--features-used", default=None,
                   help="comma-separated feature subset (default: all five)")
    _add_common(p, fit=False)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("portfolio", help="leave-one-out portfolio simulation")
    p.add_argument("features")
    p.add_argument("runtimes")
    p.add_argument("--timeout", type=float, default=None,
                   help="timeout seconds (default: max finite runtime)")
    _add_common(p, fit=False)
    p.set_defaults(func=cmd_portfolio)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:  # DimacsError/TraceError included
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
