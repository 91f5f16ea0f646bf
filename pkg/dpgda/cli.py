# The MIT License (MIT)
# Copyright © 2025 <kisa134>

"""
Command line interface: ``python -m dpgda <command> ...``.

Every command reads an optional TOML file (``--config``) whose keys mirror
its flags; nested tables map onto dotted flags, e.g. ``[ga]
population_size = 30`` is ``--ga.population_size 30``. Precedence is
defaults < TOML < command line. Exit codes: 0 success, 2 invalid input,
3 infeasible augmentation.
"""

import argparse
import hashlib
import json
import logging
import os
import sys
import typing
from pathlib import Path
from typing import Callable, Dict, List, Optional

import psutil
from dotenv import load_dotenv

from dpgda import __version__
from dpgda.bench import (ablation_grid, friedman_nemenyi, load_benchmark_datasets, read_results, run_benchmark,
                         runtime_summary, scores_for_ranking, write_results)
from dpgda.config import (BenchConfig, DPGConfig, FitnessWeights, ForestConfig, GAConfig, PipelineConfig, build,
                          load_toml, merge_dicts)
from dpgda.constraints import audit, rules_from_json
from dpgda.datagen import (BUILTIN_DOMAINS, SHAPES, generate_domain, generate_shape, load_domain_config, shape_rules,
                           write_generated)
from dpgda.dpg import export_constraints, save_constraints, to_dot
from dpgda.errors import ConfigError, InfeasibleAugmentation, ValidationFailure
from dpgda.evolution import augment_dataset, fit_surrogate, load_trace
from dpgda.logger import log_event, setup_logger
from dpgda.report import (cumulative_change_barplot, delta_table, evolution_heatmap, pairwise_violation_plot,
                          violation_heatmap)
from dpgda.surrogate import save_forest
from dpgda.tabular import load_csv, write_csv

logger = logging.getLogger("dpgda.cli")

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE = 0, 2, 3
# keys that steer the CLI itself and never reach a config model
_CONTROL_KEYS = {"command", "handler", "config", "print_config", "log_level"}


def _parse_bool(text: str) -> bool:
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got '{text}'")


def _flag_type(annotation) -> Callable:
    if annotation is bool:
        return _parse_bool
    if typing.get_origin(annotation) is typing.Union:
        annotation = next(arg for arg in typing.get_args(annotation) if arg is not type(None))
    return annotation if annotation in (int, float) else str


def add_model_args(parser: argparse.ArgumentParser, model: type, prefix: str):
    """One ``--<prefix>.<field>`` flag per field of a config model."""
    group = parser.add_argument_group(f"{prefix} settings")
    for name, info in model.model_fields.items():
        group.add_argument(f"--{prefix}.{name}", type=_flag_type(info.annotation), default=None,
                           metavar=name.upper(), help=f"default: {info.default}")


def add_pipeline_args(parser: argparse.ArgumentParser):
    add_model_args(parser, ForestConfig, "forest")
    add_model_args(parser, DPGConfig, "dpg")
    add_model_args(parser, GAConfig, "ga")
    parser.add_argument("--weights", type=str, default=None, help="fitness weights w1,w2,w3 (default: 2,1,3)")
    parser.add_argument("--holdout-fraction", dest="holdout_fraction", type=float, default=None,
                        help="share of the training data the surrogate sees (default: 0.8)")


def nest(flat: Dict[str, object]) -> dict:
    """``{"ga.seed": 3}`` -> ``{"ga": {"seed": 3}}``; unset (None) values are dropped."""
    nested: dict = {}
    for key, value in flat.items():
        if value is None or key in _CONTROL_KEYS:
            continue
        parts = key.split(".")
        node = nested
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return nested


def resolve_settings(args: argparse.Namespace) -> dict:
    config_path = getattr(args, "config", None)
    from_file = load_toml(config_path) if config_path else {}
    return merge_dicts(from_file, nest(vars(args)))


def _require(settings: dict, key: str) -> object:
    if settings.get(key) in (None, ""):
        raise ConfigError(f"missing required option --{key.replace('_', '-')}", key)
    return settings[key]


def _split_list(value) -> List[str]:
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return list(value)


def parse_level(value) -> float:
    """``0.3`` or ``30`` (percent) -> 0.3."""
    try:
        level = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"level must be a number, got '{value}'", "level") from exc
    return level / 100.0 if level > 1.0 else level


def resolve_jobs(value) -> int:
    """0 means one worker per physical core."""
    if value is None:
        value = os.environ.get("DPGDA_JOBS", 1)
    try:
        jobs = int(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"jobs must be an integer, got '{value}'", "jobs") from exc
    if jobs < 0:
        raise ConfigError(f"jobs must be >= 0, got {jobs}", "jobs")
    if jobs == 0:
        jobs = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    return jobs


def pipeline_from(settings: dict) -> PipelineConfig:
    data = {key: settings[key] for key in ("forest", "dpg", "ga", "holdout_fraction") if key in settings}
    weights = settings.get("weights")
    if isinstance(weights, str):
        weights = FitnessWeights.parse(weights).model_dump()
    if weights is not None:
        data["weights"] = weights
    return build(PipelineConfig, data, "pipeline")


def bench_config_from(settings: dict) -> BenchConfig:
    keys = ("reps", "k_neighbors", "sigma_fraction", "seed", "timing")
    data = {key: settings[key] for key in keys if key in settings}
    if "methods" in settings:
        data["methods"] = tuple(_split_list(settings["methods"]))
    if "levels" in settings:
        data["levels"] = tuple(parse_level(level) for level in _split_list(settings["levels"]))
    if "classifiers" in settings:
        data["classifiers"] = tuple(_split_list(settings["classifiers"]))
    split = dict(settings.get("split", {}))
    if "train_fraction" in settings:
        split["train_fraction"] = settings["train_fraction"]
    data["split"] = split
    data["pipeline"] = pipeline_from(settings)
    data["jobs"] = resolve_jobs(settings.get("jobs"))
    return build(BenchConfig, data)


def _echo(settings: dict, effective: dict) -> bool:
    """Prints the effective configuration when ``--print-config`` was given."""
    if not settings.get("print_config"):
        return False
    print(json.dumps(effective, indent=2, sort_keys=True, default=str))
    return True


# ---------------------------------------------------------------- commands


def cmd_gen_data(settings: dict) -> int:
    target = str(_require(settings, "domain"))
    out = Path(_require(settings, "out"))
    seed = int(settings.get("seed", 0))
    ratio = settings.get("ratio")
    targets = list(BUILTIN_DOMAINS) + list(SHAPES) if target == "all" else [target]
    if _echo(settings, {"targets": targets, "seed": seed, "out": str(out), "ratio": ratio}):
        return EXIT_OK
    for name in targets:
        if name in SHAPES:
            ds, rules = generate_shape(name, seed=seed), shape_rules(name)
            params = {"kind": name, "n": ds.n_samples, "ratio": "5:1"}
            meta = {"name": name, "seed": seed,
                    "config_hash": hashlib.sha256(json.dumps(params, sort_keys=True).encode()).hexdigest()}
        else:
            cfg = load_domain_config(name, ratio)
            ds, rules = generate_domain(cfg, seed)
            name = cfg.name
            meta = {"name": name, "seed": seed, "config_hash": cfg.digest()}
        paths = write_generated(ds, rules, out, name, meta)
        log_event(logger, "generated", name=name, rows=ds.n_samples, rules=len(rules), csv=paths["csv"])
    return EXIT_OK


def cmd_extract_constraints(settings: dict) -> int:
    if settings.get("forest_cfg"):
        forest_file = load_toml(settings["forest_cfg"])
        settings = merge_dicts({"forest": forest_file.get("forest", forest_file)}, settings)
    pipeline = pipeline_from(settings)
    seed = int(settings.get("seed", 0))
    if _echo(settings, {"pipeline": pipeline.model_dump(), "seed": seed, "train": settings.get("train")}):
        return EXIT_OK
    train = load_csv(_require(settings, "train"), settings.get("label_col"))
    out = Path(_require(settings, "out"))
    forest, dpg, bounds = fit_surrogate(train, pipeline, seed)
    save_constraints(export_constraints(bounds, train.feature_names, train.class_names), out)
    if settings.get("dot"):
        Path(settings["dot"]).write_text(to_dot(dpg, train.feature_names, train.class_names), encoding="utf-8")
    if settings.get("forest_out"):
        save_forest(forest, settings["forest_out"])
    log_event(logger, "constraints", classes=len(bounds.classes), nodes=len(dpg.nodes), out=out)
    return EXIT_OK


def cmd_augment(settings: dict) -> int:
    pipeline = pipeline_from(settings)
    level = parse_level(_require(settings, "level"))
    seed = int(settings.get("seed", 0))
    jobs = resolve_jobs(settings.get("jobs"))
    if _echo(settings, {"pipeline": pipeline.model_dump(), "level": level, "seed": seed, "jobs": jobs,
                        "train": settings.get("train"), "minority": settings.get("minority")}):
        return EXIT_OK
    train = load_csv(_require(settings, "train"), settings.get("label_col"))
    out = Path(_require(settings, "out"))
    minority = settings.get("minority")
    minority_class = train.minority_class() if minority is None else train.class_index(str(minority))

    result = augment_dataset(train, minority_class, level, pipeline, seed, jobs)
    write_csv(result.augmented, out)
    if settings.get("trace_dir"):
        trace_dir = Path(settings["trace_dir"])
        for position, trace in enumerate(result.traces):
            trace.save(trace_dir, position)
        if result.constraints is not None:
            save_constraints(result.constraints, trace_dir / "constraints.json")
    if settings.get("constraints_out") and result.constraints is not None:
        save_constraints(result.constraints, settings["constraints_out"])
    if result.n_synthetic == 0:
        logger.info("notice: minority share already at or above %.4f; wrote an unchanged copy", level)
    log_event(logger, "augmented", synthetic=result.n_synthetic, rows=result.augmented.n_samples, out=out)
    return EXIT_OK


def cmd_audit(settings: dict) -> int:
    if _echo(settings, {key: settings.get(key) for key in ("data", "rules", "label_col", "out")}):
        return EXIT_OK
    data = load_csv(_require(settings, "data"), settings.get("label_col"))
    report = audit(data, rules_from_json(_require(settings, "rules")))
    out = Path(_require(settings, "out"))
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    log_event(logger, "audit", samples=report.n_synth, violating=report.n_violating_samples,
              rate=report.violation_rate, out=out)
    return EXIT_OK


def cmd_bench(settings: dict) -> int:
    cfg = bench_config_from(settings)
    if _echo(settings, cfg.model_dump()):
        return EXIT_OK
    datasets = load_benchmark_datasets(_require(settings, "datasets"), settings.get("label_col"))
    out = Path(_require(settings, "out"))
    results = run_benchmark(datasets, cfg)
    write_results(results, out)
    if cfg.timing:
        for method, seconds in runtime_summary(results).mean().items():
            log_event(logger, "runtime", method=method, mean_s=float(seconds))
    log_event(logger, "bench_written", rows=len(results), out=out)
    return EXIT_OK


def cmd_stats(settings: dict) -> int:
    alpha = float(settings.get("alpha", 0.05))
    metric = str(settings.get("metric", "f1"))
    if _echo(settings, {"results": settings.get("results"), "alpha": alpha, "metric": metric}):
        return EXIT_OK
    scores = scores_for_ranking(read_results(_require(settings, "results")), metric)
    summary = friedman_nemenyi(scores, alpha)
    summary.save(_require(settings, "out"))
    log_event(logger, "stats", methods=len(summary.methods), datasets=summary.n_datasets,
              statistic=summary.statistic, p_value=summary.p_value, cd=summary.critical_difference,
              best=summary.ordered()[0])
    return EXIT_OK


def cmd_ablate(settings: dict) -> int:
    cfg = bench_config_from(settings)
    values = tuple(float(v) for v in _split_list(settings.get("values", "1,2,3")))
    if _echo(settings, {"bench": cfg.model_dump(), "values": values}):
        return EXIT_OK
    datasets = load_benchmark_datasets(_require(settings, "datasets"), settings.get("label_col"))
    out = Path(_require(settings, "out"))
    table = ablation_grid(datasets, cfg, values)
    out.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(out, index=False, lineterminator="\n")
    top = table.iloc[0]
    log_event(logger, "ablation", configs=len(table), best=f"{top.w1:g},{top.w2:g},{top.w3:g}",
              mean_f1=float(top.mean_f1), out=out)
    return EXIT_OK


_TRACE_FIGURES = {
    "delta-table": delta_table,
    "evo-heatmap": evolution_heatmap,
    "bar": cumulative_change_barplot,
}


def cmd_report(settings: dict) -> int:
    kind = settings["kind"]
    if _echo(settings, {key: settings.get(key) for key in ("kind", "in", "rules", "out", "label_col")}):
        return EXIT_OK
    source, out = _require(settings, "in"), _require(settings, "out")
    if kind in _TRACE_FIGURES:
        figure = _TRACE_FIGURES[kind](load_trace(source))
    elif kind == "violation-heatmap":
        figure = violation_heatmap(read_results(source))
    else:
        figure = pairwise_violation_plot(load_csv(source, settings.get("label_col")),
                                         rules_from_json(_require(settings, "rules")))
    svg_path, csv_path = figure.save(out)
    log_event(logger, "report", kind=kind, svg=svg_path, table=csv_path)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dpgda", description="Constraint-aware minority oversampling.")
    parser.add_argument("--version", action="version", version=f"dpgda {__version__}")
    parser.add_argument("--log-level", dest="log_level", default=None,
                        help="DEBUG, INFO, WARNING or ERROR (default: $DPGDA_LOG_LEVEL or INFO)")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master seed (default: 0)")
    common.add_argument("--print-config", dest="print_config", action="store_true", default=None,
                        help="print the effective configuration and exit")
    with_config = argparse.ArgumentParser(add_help=False, parents=[common])
    with_config.add_argument("--config", default=None, help="TOML file mirroring the command's flags")

    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("gen-data", parents=[common], help="generate synthetic domains and shapes")
    p.add_argument("--config", dest="domain", default=None,
                   help=f"domain TOML, a built-in name ({', '.join(BUILTIN_DOMAINS + tuple(SHAPES))}) or 'all'")
    p.add_argument("--ratio", default=None,
                   help="override the domain class ratio (majority:minority, e.g. 4:1); shapes keep 5:1")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_gen_data)

    p = commands.add_parser("extract-constraints", parents=[with_config], help="surrogate, DPG and class bounds")
    p.add_argument("--train", default=None)
    p.add_argument("--label-col", dest="label_col", default=None)
    p.add_argument("--forest-cfg", dest="forest_cfg", default=None, help="TOML with forest settings")
    p.add_argument("--out", default=None, help="constraints.json")
    p.add_argument("--dot", default=None, help="also write the graph in Graphviz format")
    p.add_argument("--forest-out", dest="forest_out", default=None, help="also write the surrogate as JSON")
    add_pipeline_args(p)
    p.set_defaults(handler=cmd_extract_constraints)

    p = commands.add_parser("augment", parents=[with_config], help="oversample the minority class")
    p.add_argument("--train", default=None)
    p.add_argument("--label-col", dest="label_col", default=None)
    p.add_argument("--minority", default=None, help="class name or id (default: least frequent class)")
    p.add_argument("--level", default=None, help="target minority share, 0.30 or 30")
    p.add_argument("--out", default=None)
    p.add_argument("--trace-dir", dest="trace_dir", default=None)
    p.add_argument("--constraints-out", dest="constraints_out", default=None)
    p.add_argument("--jobs", type=int, default=None, help="worker processes, 0 = physical cores")
    add_pipeline_args(p)
    p.set_defaults(handler=cmd_augment)

    p = commands.add_parser("audit", parents=[with_config], help="check samples against domain rules")
    p.add_argument("--data", default=None)
    p.add_argument("--rules", default=None)
    p.add_argument("--label-col", dest="label_col", default=None)
    p.add_argument("--out", default=None, help="report.json")
    p.set_defaults(handler=cmd_audit)

    for name, handler, text in (("bench", cmd_bench, "run the benchmark protocol"),
                                ("ablate", cmd_ablate, "fitness weight grid")):
        p = commands.add_parser(name, parents=[with_config], help=text)
        p.add_argument("--datasets", default=None, help="directory of CSV files (+ <name>.rules.json)")
        p.add_argument("--label-col", dest="label_col", default=None)
        p.add_argument("--methods", default=None, help="comma list of dpgda, ros, smote, jitter, none")
        p.add_argument("--levels", default=None, help="comma list, e.g. 15,30,50")
        p.add_argument("--reps", type=int, default=None)
        p.add_argument("--classifiers", default=None, help="comma list of decision_tree, knn, logistic_regression")
        p.add_argument("--train-fraction", dest="train_fraction", type=float, default=None)
        p.add_argument("--k-neighbors", dest="k_neighbors", type=int, default=None)
        p.add_argument("--sigma-fraction", dest="sigma_fraction", type=float, default=None)
        p.add_argument("--jobs", type=int, default=None, help="worker processes, 0 = physical cores")
        p.add_argument("--no-timing", dest="timing", action="store_const", const=False, default=None,
                       help="write runtime_s = 0; by default runtime_s holds wall-clock seconds, so "
                            "two runs differ in that column and only --no-timing gives byte-identical files")
        p.add_argument("--out", default=None)
        if name == "ablate":
            p.add_argument("--values", default=None, help="weight values per component (default: 1,2,3)")
        add_pipeline_args(p)
        p.set_defaults(handler=handler)

    p = commands.add_parser("stats", parents=[with_config], help="Friedman test and Nemenyi critical difference")
    p.add_argument("--results", default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--metric", default=None, choices=("f1", "precision", "recall"))
    p.add_argument("--out", default=None, help="stats.json")
    p.set_defaults(handler=cmd_stats)

    p = commands.add_parser("report", parents=[with_config], help="render figures")
    p.add_argument("kind", choices=tuple(_TRACE_FIGURES) + ("violation-heatmap", "pairwise"))
    p.add_argument("--in", dest="in", default=None, help="trace JSON, results CSV or data CSV")
    p.add_argument("--rules", default=None, help="rules.json (pairwise only)")
    p.add_argument("--label-col", dest="label_col", default=None)
    p.add_argument("--out", default=None, help="output path without extension")
    p.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logger("dpgda", args.log_level)
    try:
        settings = resolve_settings(args)
        settings["print_config"] = bool(args.print_config)
        return args.handler(settings)
    except InfeasibleAugmentation as exc:
        logger.error("%s", exc)
        return EXIT_INFEASIBLE
    except ValidationFailure as exc:
        logger.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
