"""Experiment orchestration: synthetic fixtures, seeded repeats, reporting.

One repeat = stratified split, a BEFORE arm (train and evaluate on the raw
split) and an AFTER arm (balance the training data, situation-test it,
refit, evaluate on the - optionally also balanced - test set). Repeats run
independently with derived seeds and the report carries per-repeat values
plus elementwise medians.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .balance import SmoteParams, balance_all
from .errors import DualFairError, PipelineError
from .fairness import AwiScore, PerformanceMetrics, compute_awi, compute_performance, situation_test
from .model import FitConfig, fit
from .seeding import derive_seed, derived_rng
from .tabular import ColumnSpec, Dataset
from .worlds import SensitiveSpec, count_worlds, enumerate_worlds, partition

# base favorable-label rate of the synthetic generator, pre label bias
_FAVORABLE_RATE = 0.75

METRIC_NAMES = (
    "awi_raw", "awi_reported", "accuracy", "precision", "recall",
    "false_alarm", "f1",
)


@dataclass(frozen=True)
class ExperimentConfig:
    split_fraction: float = 0.7
    repeats: int = 10
    master_seed: int = 0
    repair_test: bool = True
    smote: SmoteParams = field(default_factory=SmoteParams)
    fit: FitConfig = field(default_factory=FitConfig)
    n_jobs: int = 1

    def __post_init__(self):
        if not 0.0 < self.split_fraction < 1.0:
            raise DualFairError("split_fraction must be in (0, 1)")
        if self.repeats < 1:
            raise DualFairError("repeats must be >= 1")


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a biased tabular fixture.

    selection_skew gives one positive sampling weight per world (in world
    enumeration order); favorable labels in unprivileged worlds flip to
    unfavorable with probability label_bias_strength.
    """

    n_rows: int
    spec: SensitiveSpec
    n_features: int = 6
    selection_skew: tuple = None
    label_bias_strength: float = 0.0
    noise: float = 0.1
    unprivileged: tuple = None

    def __post_init__(self):
        n_worlds = count_worlds(self.spec)
        skew = self.selection_skew
        if skew is None:
            skew = (1.0,) * n_worlds
        skew = tuple(float(w) for w in skew)
        if len(skew) != n_worlds or any(w <= 0 for w in skew):
            raise DualFairError("selection_skew needs one positive weight per world")
        object.__setattr__(self, "selection_skew", skew)
        unpriv = self.unprivileged
        if unpriv is None:
            # default: every world where the first parameter is not its
            # reference (first) option
            unpriv = tuple(k for k in enumerate_worlds(self.spec) if k[0] != 0)
        object.__setattr__(self, "unprivileged", tuple(tuple(k) for k in unpriv))
        if self.n_rows < 10 * n_worlds:
            raise DualFairError("n_rows must be >= 10x the world count")
        if not 0.0 <= self.label_bias_strength <= 1.0:
            raise DualFairError("label_bias_strength must be in [0, 1]")
        if self.noise < 0:
            raise DualFairError("noise must be >= 0")


@dataclass(frozen=True)
class ArmResult:
    performance: PerformanceMetrics
    awi: AwiScore

    def metric(self, name: str) -> float:
        if name == "awi_raw":
            return self.awi.raw
        if name == "awi_reported":
            return self.awi.reported
        return getattr(self.performance, name)


@dataclass(frozen=True)
class RepeatResult:
    repeat: int
    seed: int
    before: ArmResult
    after: ArmResult


@dataclass(frozen=True)
class FairnessReport:
    config: ExperimentConfig
    repeats: tuple  # of RepeatResult

    def __post_init__(self):
        if not self.repeats:
            raise DualFairError("report needs at least one repeat")
        object.__setattr__(self, "repeats", tuple(self.repeats))

    def median(self, phase: str, metric: str) -> float:
        values = sorted(
            getattr(r, phase).metric(metric) for r in self.repeats
        )
        # lower median: always a value some repeat actually produced
        return values[(len(values) - 1) // 2]


def generate_synthetic(spec: SyntheticSpec, seed: int) -> Dataset:
    """Draw a biased loan-style fixture, deterministically in seed.

    World membership follows selection_skew; features are per-world
    Gaussians clipped into [0, 1]; the latent label comes from a fixed
    linear rule over the features plus noise (favorable base rate 75%);
    label bias then flips the most marginal favorable labels in
    unprivileged worlds.
    """
    rng = derived_rng(seed, "synthetic")
    worlds = enumerate_worlds(spec.spec)
    n_worlds = len(worlds)
    weights = np.array(spec.selection_skew)
    world_idx = rng.choice(n_worlds, size=spec.n_rows, p=weights / weights.sum())
    keys = np.array(worlds)[world_idx]

    # mild per-world feature shift: worlds differ, but the label rule below
    # only reads the features, so the latent labels stay world-fair
    counts = np.array(spec.spec.option_counts, dtype=np.float64)
    shift = (keys / np.maximum(counts - 1, 1)).mean(axis=1)
    mu = 0.45 + 0.1 * shift
    X = np.clip(rng.normal(mu[:, None], 0.2, size=(spec.n_rows, spec.n_features)),
                0.0, 1.0)

    beta = np.where(np.arange(spec.n_features) % 2 == 0, 1.0, -0.5)
    score = X @ beta + spec.noise * rng.normal(size=spec.n_rows)
    y = (score > np.quantile(score, 1.0 - _FAVORABLE_RATE)).astype(np.float64)

    if spec.label_bias_strength > 0:
        # label bias denies marginal applicants: in each unprivileged world,
        # the lowest-scoring label_bias_strength share of the favorable rows
        # flips to unfavorable, so the world's favorable rate shrinks by
        # exactly that factor in expectation
        unpriv_set = set(spec.unprivileged)
        in_unpriv = np.array([tuple(k) in unpriv_set for k in keys])
        for w in range(n_worlds):
            fav = (world_idx == w) & in_unpriv & (y == 1.0)
            if fav.sum() < 2:
                continue
            cut = np.quantile(score[fav], spec.label_bias_strength)
            y = np.where(fav & (score < cut), 0.0, y)

    schema = (
        [ColumnSpec(name, "sensitive", opts) for name, opts in spec.spec.parameters]
        + [ColumnSpec(f"f{j}", "feature") for j in range(spec.n_features)]
        + [ColumnSpec("label", "label")]
    )
    rows = np.column_stack([keys.astype(np.float64), X, y])
    encoding_map = {
        name: {opt: i for i, opt in enumerate(opts)}
        for name, opts in spec.spec.parameters
    }
    normalization_map = {f"f{j}": (0.0, 1.0) for j in range(spec.n_features)}
    return Dataset(schema, rows, encoding_map, normalization_map)


def stratified_split(data: Dataset, fraction: float, seed: int):
    """Per-class shuffled split; label ratio preserved within one row."""
    rng = np.random.default_rng(seed)
    labels = data.labels
    train_idx, test_idx = [], []
    for cls in (0.0, 1.0):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        cut = int(round(fraction * len(idx)))
        train_idx.append(idx[:cut])
        test_idx.append(idx[cut:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    return data.with_rows(data.rows[train_idx]), data.with_rows(data.rows[test_idx])


def _run_repeat(data: Dataset, cfg: ExperimentConfig, spec: SensitiveSpec,
                repeat: int) -> RepeatResult:
    seed = derive_seed(cfg.master_seed, "repeat", repeat)
    stage = "split"
    try:
        train, test = stratified_split(data, cfg.split_fraction, seed)

        stage = "before:fit"
        fit_cfg = FitConfig(cfg.fit.learning_rate, cfg.fit.max_epochs,
                            cfg.fit.tolerance, cfg.fit.l2, seed)
        model_before = fit(train, fit_cfg)
        stage = "before:evaluate"
        before = ArmResult(
            performance=compute_performance(model_before, test),
            awi=compute_awi(model_before, test, spec),
        )

        stage = "after:balance-train"
        smote_train = SmoteParams(cfg.smote.f, cfg.smote.cr, cfg.smote.k,
                                  derive_seed(seed, "balance-train"))
        balanced = balance_all(train, partition(train, spec), smote_train)
        stage = "after:situation-test"
        repaired = situation_test(balanced, spec, fit_cfg)
        stage = "after:fit"
        model_after = fit(repaired, fit_cfg)

        stage = "after:balance-test"
        if cfg.repair_test:
            smote_test = SmoteParams(cfg.smote.f, cfg.smote.cr, cfg.smote.k,
                                     derive_seed(seed, "balance-test"))
            eval_set = balance_all(test, partition(test, spec), smote_test)
        else:
            eval_set = test
        stage = "after:evaluate"
        after = ArmResult(
            performance=compute_performance(model_after, eval_set),
            awi=compute_awi(model_after, eval_set, spec),
        )
    except DualFairError as exc:
        raise PipelineError(stage, f"repeat {repeat}: {exc}")
    return RepeatResult(repeat=repeat, seed=seed, before=before, after=after)


def run_dualfair(data: Dataset, cfg: ExperimentConfig,
                 spec: SensitiveSpec) -> FairnessReport:
    """Full before/after experiment over cfg.repeats seeded repeats.

    Repeats are pure given their derived seed, so n_jobs only changes wall
    time, never the report.
    """
    results = Parallel(n_jobs=cfg.n_jobs)(
        delayed(_run_repeat)(data, cfg, spec, r) for r in range(cfg.repeats)
    )
    return FairnessReport(config=cfg, repeats=tuple(results))


def _report_csv_text(report: FairnessReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["seed", "phase"] + list(METRIC_NAMES))
    for r in report.repeats:
        for phase in ("before", "after"):
            arm = getattr(r, phase)
            writer.writerow(
                [r.seed, phase] + [repr(arm.metric(m)) for m in METRIC_NAMES]
            )
    for phase in ("before", "after"):
        writer.writerow(
            ["median", phase]
            + [repr(report.median(phase, m)) for m in METRIC_NAMES]
        )
    return buf.getvalue()


def _summary_text(report: FairnessReport) -> str:
    lines = [
        "DualFair experiment summary",
        f"repeats: {len(report.repeats)}",
        f"master_seed: {report.config.master_seed}",
        f"split_fraction: {report.config.split_fraction}",
        f"repair_test: {report.config.repair_test}",
        "",
        f"{'metric':<14}{'before':>12}{'after':>12}",
    ]
    for m in METRIC_NAMES:
        b = report.median("before", m)
        a = report.median("after", m)
        lines.append(f"{m:<14}{b:>12.4f}{a:>12.4f}")
    lines.append("")
    return "\n".join(lines)


def write_report(report: FairnessReport, path) -> dict:
    """Write report.csv + summary.txt under path; byte-deterministic."""
    os.makedirs(path, exist_ok=True)
    csv_path = os.path.join(path, "report.csv")
    txt_path = os.path.join(path, "summary.txt")
    try:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(_report_csv_text(report))
        with open(txt_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(_summary_text(report))
    except OSError as exc:
        raise DualFairError(f"cannot write report under {path}: {exc}")
    return {"csv": csv_path, "summary": txt_path}


def read_report_rows(csv_path) -> list:
    """Parse a written report.csv back into numeric row dicts."""
    with open(csv_path, encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for rec in reader:
            row = {"seed": rec["seed"], "phase": rec["phase"]}
            for m in METRIC_NAMES:
                row[m] = float(rec[m])
            rows.append(row)
    return rows
