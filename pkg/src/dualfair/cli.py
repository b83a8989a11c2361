"""Command-line entry points.

Exit codes: 0 success, 1 input/config error, 2 pipeline error. Diagnostics
go to stderr with the failing stage name when available.
"""

from __future__ import annotations

import argparse
import sys

from .balance import balance_all
from .config import AppConfig, load_config
from .errors import CleanError, DualFairError, PipelineError, SchemaError
from .fairness import situation_test
from .harness import (
    ExperimentConfig,
    SyntheticSpec,
    generate_synthetic,
    run_dualfair,
    write_report,
)
from .tabular import clean, decode_to_csv, encode_and_normalize, load_csv
from .worlds import enumerate_worlds, partition


def _experiment_config(cfg: AppConfig) -> ExperimentConfig:
    return ExperimentConfig(
        split_fraction=cfg.split_fraction,
        repeats=cfg.repeats,
        master_seed=cfg.master_seed,
        repair_test=cfg.repair_test,
        smote=cfg.smote,
        fit=cfg.fit,
        n_jobs=cfg.n_jobs,
    )


def _load_dataset(cfg: AppConfig, path):
    raw = load_csv(path, list(cfg.schema), cfg.missing_markers)
    cleaned = clean(raw, cfg.missing_threshold)
    return encode_and_normalize(cleaned)


def _cmd_prepare(args):
    cfg = load_config(args.config)
    data = _load_dataset(cfg, args.input)
    decode_to_csv(data, args.output)
    print(f"prepared {data.n_rows} rows -> {args.output}")
    return 0


def _cmd_synth(args):
    cfg = load_config(args.config)
    worlds = enumerate_worlds(cfg.sensitive_spec)
    skew = tuple(
        cfg.synth.privileged_weight if key[0] == 0 else 1.0 for key in worlds
    )
    spec = SyntheticSpec(
        n_rows=args.rows,
        spec=cfg.sensitive_spec,
        n_features=cfg.synth.n_features,
        selection_skew=skew,
        label_bias_strength=cfg.synth.label_bias_strength,
        noise=cfg.synth.noise,
    )
    data = generate_synthetic(spec, args.seed if args.seed is not None else cfg.master_seed)
    decode_to_csv(data, args.output)
    print(f"synthesized {data.n_rows} rows -> {args.output}")
    return 0


def _cmd_debias(args):
    cfg = load_config(args.config)
    data = _load_dataset(cfg, args.input)
    balanced = balance_all(data, partition(data, cfg.sensitive_spec), cfg.smote)
    repaired = situation_test(balanced, cfg.sensitive_spec, cfg.fit)
    decode_to_csv(repaired, args.output)
    print(
        f"debiased: {data.n_rows} rows in, {balanced.n_rows} after balancing, "
        f"{repaired.n_rows} after situation testing -> {args.output}"
    )
    return 0


def _cmd_evaluate(args):
    cfg = load_config(args.config)
    data = _load_dataset(cfg, args.input)
    report = run_dualfair(data, _experiment_config(cfg), cfg.sensitive_spec)
    paths = write_report(report, args.report)
    print(f"report written: {paths['csv']}, {paths['summary']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualfair",
        description="Debiasing pipeline and AWI fairness metric for tabular loan data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="load, clean, encode and re-export a CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_prepare)

    p = sub.add_parser("synth", help="generate a synthetic biased fixture")
    p.add_argument("--config", required=True)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("debias", help="balance + situation-test, export repaired data")
    p.add_argument("--config", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_debias)

    p = sub.add_parser("evaluate", help="full before/after experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=_cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, CleanError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PipelineError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return 2
    except DualFairError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
