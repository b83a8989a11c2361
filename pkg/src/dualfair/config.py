"""JSON config parsing.

One config file drives every CLI subcommand. Documented keys:

    columns[]          name, kind (feature|sensitive|label), domain (optional)
    missing_threshold  column drop threshold, default 0.25
    missing_markers[]  cell values treated as missing, default ["", "NA", "Exempt"]
    sensitive[]        name + options[]; defaults to the sensitive columns
    smote              f, cr, k, and the master seed is reused
    fit                learning_rate, max_epochs, tolerance, l2
    master_seed        controls all randomness
    split_fraction     train share, default 0.7
    repeats            seeded repeats, default 10
    repair_test        balance the test set in the after arm, default true
    n_jobs             parallel repeats, default 1
    synth              n_features, label_bias_strength, privileged_weight, noise
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .balance import SmoteParams
from .errors import SchemaError
from .model import FitConfig
from .tabular import DEFAULT_MISSING_MARKERS, ColumnSpec, validate_schema
from .worlds import SensitiveSpec


@dataclass(frozen=True)
class SynthSettings:
    n_features: int = 6
    label_bias_strength: float = 0.0
    privileged_weight: float = 1.0
    noise: float = 0.1


@dataclass(frozen=True)
class AppConfig:
    schema: tuple
    sensitive_spec: SensitiveSpec
    missing_threshold: float = 0.25
    missing_markers: tuple = DEFAULT_MISSING_MARKERS
    smote: SmoteParams = field(default_factory=SmoteParams)
    fit: FitConfig = field(default_factory=FitConfig)
    master_seed: int = 0
    split_fraction: float = 0.7
    repeats: int = 10
    repair_test: bool = True
    n_jobs: int = 1
    synth: SynthSettings = field(default_factory=SynthSettings)


def config_from_dict(raw: dict) -> AppConfig:
    try:
        columns = [
            ColumnSpec(c["name"], c["kind"], c.get("domain"))
            for c in raw["columns"]
        ]
    except KeyError as exc:
        raise SchemaError(f"config: missing column key {exc.args[0]!r}")
    validate_schema(columns)

    if "sensitive" in raw:
        spec = SensitiveSpec(
            tuple((s["name"], tuple(s["options"])) for s in raw["sensitive"])
        )
        declared = {c.name: c.domain for c in columns if c.kind == "sensitive"}
        for name, options in spec.parameters:
            if declared.get(name) != options:
                raise SchemaError(
                    f"config: sensitive entry {name!r} disagrees with its column domain"
                )
    else:
        spec = SensitiveSpec.from_schema(columns)

    seed = int(raw.get("master_seed", 0))
    smote_raw = raw.get("smote", {})
    fit_raw = raw.get("fit", {})
    synth_raw = raw.get("synth", {})
    return AppConfig(
        schema=tuple(columns),
        sensitive_spec=spec,
        missing_threshold=float(raw.get("missing_threshold", 0.25)),
        missing_markers=tuple(raw.get("missing_markers", DEFAULT_MISSING_MARKERS)),
        smote=SmoteParams(
            f=float(smote_raw.get("f", 0.8)),
            cr=float(smote_raw.get("cr", 0.8)),
            k=int(smote_raw.get("k", 5)),
            seed=seed,
        ),
        fit=FitConfig(
            learning_rate=float(fit_raw.get("learning_rate", 0.1)),
            max_epochs=int(fit_raw.get("max_epochs", 2000)),
            tolerance=float(fit_raw.get("tolerance", 1e-8)),
            l2=float(fit_raw.get("l2", 1e-4)),
            seed=seed,
        ),
        master_seed=seed,
        split_fraction=float(raw.get("split_fraction", 0.7)),
        repeats=int(raw.get("repeats", 10)),
        repair_test=bool(raw.get("repair_test", True)),
        n_jobs=int(raw.get("n_jobs", 1)),
        synth=SynthSettings(
            n_features=int(synth_raw.get("n_features", 6)),
            label_bias_strength=float(synth_raw.get("label_bias_strength", 0.0)),
            privileged_weight=float(synth_raw.get("privileged_weight", 1.0)),
            noise=float(synth_raw.get("noise", 0.1)),
        ),
    )


def load_config(path) -> AppConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config file {path}: invalid JSON ({exc})")
    if not isinstance(raw, dict) or "columns" not in raw:
        raise SchemaError(f"config file {path}: expected an object with 'columns'")
    return config_from_dict(raw)
