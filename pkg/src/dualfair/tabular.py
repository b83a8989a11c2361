"""Loading, cleaning, encoding and normalization of raw loan tables.

The canonical column order of an encoded Dataset is: sensitive columns
(in schema order), then feature columns, then the single label column.
Downstream code relies on that contract instead of hard-coded indices.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import CleanError, SchemaError

DEFAULT_MISSING_MARKERS = ("", "NA", "Exempt")

KIND_FEATURE = "feature"
KIND_SENSITIVE = "sensitive"
KIND_LABEL = "label"
_KINDS = (KIND_FEATURE, KIND_SENSITIVE, KIND_LABEL)


@dataclass(frozen=True)
class ColumnSpec:
    """One column of the input table.

    ``domain`` is the ordered list of admissible string values for
    categorical columns; ``None`` marks a numeric column. Sensitive columns
    must be categorical with at least two options.
    """

    name: str
    kind: str
    domain: tuple | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise SchemaError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if self.domain is not None:
            object.__setattr__(self, "domain", tuple(self.domain))
            if len(set(self.domain)) != len(self.domain):
                raise SchemaError(f"column {self.name!r}: duplicate domain values")
        if self.kind == KIND_SENSITIVE:
            if self.domain is None or len(self.domain) < 2:
                raise SchemaError(
                    f"sensitive column {self.name!r} needs a categorical "
                    "domain with >= 2 values"
                )

    @property
    def is_categorical(self) -> bool:
        return self.domain is not None


def validate_schema(schema: list[ColumnSpec]) -> None:
    names = [c.name for c in schema]
    if len(set(names)) != len(names):
        raise SchemaError("duplicate column names in schema")
    labels = [c for c in schema if c.kind == KIND_LABEL]
    if len(labels) != 1:
        raise SchemaError(f"schema must have exactly one label column, got {len(labels)}")


@dataclass
class RawTable:
    """String-cell table in schema column order; missing cells are None."""

    schema: list[ColumnSpec]
    rows: list[list]

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def missing_counts(self) -> dict[str, int]:
        counts = {c.name: 0 for c in self.schema}
        for row in self.rows:
            for col, cell in zip(self.schema, row):
                if cell is None:
                    counts[col.name] += 1
        return counts


@dataclass(frozen=True)
class Dataset:
    """Immutable numeric-encoded table in canonical column order.

    ``rows`` is a read-only float64 array of shape (n_rows, n_cols).
    ``encoding_map`` maps categorical column name -> {string: code};
    ``normalization_map`` maps numeric column name -> (min, max).
    """

    schema: tuple
    rows: np.ndarray
    encoding_map: dict = field(default_factory=dict)
    normalization_map: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.rows, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)
        object.__setattr__(self, "schema", tuple(self.schema))

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.schema]

    @property
    def sensitive_indices(self) -> list[int]:
        return [i for i, c in enumerate(self.schema) if c.kind == KIND_SENSITIVE]

    @property
    def feature_indices(self) -> list[int]:
        """Everything the model sees: sensitive + feature columns."""
        return [i for i, c in enumerate(self.schema) if c.kind != KIND_LABEL]

    @property
    def numeric_feature_indices(self) -> list[int]:
        return [
            i
            for i, c in enumerate(self.schema)
            if c.kind == KIND_FEATURE and not c.is_categorical
        ]

    @property
    def label_index(self) -> int:
        return next(i for i, c in enumerate(self.schema) if c.kind == KIND_LABEL)

    @property
    def labels(self) -> np.ndarray:
        return self.rows[:, self.label_index]

    @property
    def features(self) -> np.ndarray:
        return self.rows[:, self.feature_indices]

    def with_rows(self, rows: np.ndarray) -> "Dataset":
        """Same schema and maps, different row array."""
        return Dataset(self.schema, rows, self.encoding_map, self.normalization_map)

    def decode_cell(self, column: str, code: float) -> str:
        inverse = {v: k for k, v in self.encoding_map[column].items()}
        return inverse[int(round(code))]


def load_csv(path, schema, missing_markers=DEFAULT_MISSING_MARKERS) -> RawTable:
    """Read an RFC-4180 CSV with header into a RawTable.

    The header must contain every schema column (order-insensitive); cells
    equal to any missing marker are stored as None.
    """
    validate_schema(schema)
    markers = set(missing_markers)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise SchemaError(f"input file not found: {path}")
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, no header row")
        positions = {}
        for col in schema:
            if col.name not in header:
                raise SchemaError(f"{path}: header lacks schema column {col.name!r}")
            positions[col.name] = header.index(col.name)
        rows = []
        for i, record in enumerate(reader):
            if len(record) != len(header):
                raise SchemaError(
                    f"{path}: ragged row {i} ({len(record)} cells, expected {len(header)})"
                )
            row = []
            for col in schema:
                cell = record[positions[col.name]]
                row.append(None if cell in markers else cell)
            rows.append(row)
    return RawTable(schema=list(schema), rows=rows)


def clean(raw: RawTable, column_missing_threshold: float = 0.25) -> RawTable:
    """Drop over-missing columns, then incomplete rows, then off-domain rows.

    Columns whose missing fraction exceeds the threshold are removed
    (feature columns only; losing the label or a sensitive column would make
    the table unusable, so that raises instead). Rows keep only if they have
    no missing value in a surviving column and every sensitive value is in
    its column's domain.
    """
    if not 0.0 <= column_missing_threshold <= 1.0:
        raise ValueError("column_missing_threshold must be in [0, 1]")
    n = raw.n_rows
    missing = raw.missing_counts()
    keep_cols = []
    for j, col in enumerate(raw.schema):
        frac = missing[col.name] / n if n else 0.0
        if frac > column_missing_threshold:
            if col.kind != KIND_FEATURE:
                raise CleanError(
                    f"{col.kind} column {col.name!r} is {frac:.0%} missing; "
                    "cannot drop it"
                )
            continue
        keep_cols.append(j)
    schema = [raw.schema[j] for j in keep_cols]

    sensitive = [
        (k, set(col.domain))
        for k, col in enumerate(schema)
        if col.kind == KIND_SENSITIVE
    ]
    rows = []
    for row in raw.rows:
        cells = [row[j] for j in keep_cols]
        if any(cell is None for cell in cells):
            continue
        if any(cells[k] not in domain for k, domain in sensitive):
            continue
        rows.append(cells)
    if not rows:
        raise CleanError("cleaning removed every row; input is unusable")
    return RawTable(schema=schema, rows=rows)


def _canonical_order(schema):
    sens = [c for c in schema if c.kind == KIND_SENSITIVE]
    feat = [c for c in schema if c.kind == KIND_FEATURE]
    lab = [c for c in schema if c.kind == KIND_LABEL]
    return sens + feat + lab


def encode_and_normalize(raw: RawTable) -> Dataset:
    """Encode categoricals by domain order and min-max scale numerics.

    Sensitive codes and the label are left unscaled (they index worlds and
    classes). Numeric columns with min == max map to all zeros. The label
    column must either carry a two-value domain (encoded 0/1 by order) or
    already hold literal 0/1 values.
    """
    validate_schema(raw.schema)
    schema = _canonical_order(raw.schema)
    src = {c.name: i for i, c in enumerate(raw.schema)}

    n = raw.n_rows
    data = np.empty((n, len(schema)), dtype=np.float64)
    encoding_map = {}
    normalization_map = {}
    for j, col in enumerate(schema):
        cells = [row[src[col.name]] for row in raw.rows]
        if col.is_categorical:
            codes = {v: k for k, v in enumerate(col.domain)}
            encoding_map[col.name] = codes
            try:
                data[:, j] = [codes[c] for c in cells]
            except KeyError as exc:
                raise SchemaError(
                    f"column {col.name!r}: value {exc.args[0]!r} not in domain"
                )
        else:
            try:
                values = np.array([float(c) for c in cells])
            except (TypeError, ValueError):
                bad = next(
                    i for i, c in enumerate(cells)
                    if c is None or not _parses(c)
                )
                raise SchemaError(
                    f"column {col.name!r}: unparseable numeric cell at row {bad}"
                )
            if col.kind == KIND_FEATURE:
                lo, hi = float(values.min()), float(values.max())
                normalization_map[col.name] = (lo, hi)
                data[:, j] = (values - lo) / (hi - lo) if hi > lo else 0.0
            else:
                data[:, j] = values
        if col.kind == KIND_LABEL:
            bad = set(np.unique(data[:, j])) - {0.0, 1.0}
            if bad:
                raise SchemaError(f"label column {col.name!r}: values {sorted(bad)} not in {{0, 1}}")
    return Dataset(schema, data, encoding_map, normalization_map)


def _parses(cell) -> bool:
    try:
        float(cell)
        return True
    except (TypeError, ValueError):
        return False


def decode_to_csv(data: Dataset, path) -> None:
    """Export a Dataset back to CSV.

    Categorical codes are decoded to their strings and min-max scaling is
    inverted, so the file can be fed back through load_csv / clean /
    encode_and_normalize.
    """
    inverse = {
        name: {v: k for k, v in codes.items()}
        for name, codes in data.encoding_map.items()
    }
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(data.column_names)
        for row in data.rows:
            out = []
            for col, cell in zip(data.schema, row):
                if col.name in inverse:
                    out.append(inverse[col.name][int(round(cell))])
                elif col.name in data.normalization_map:
                    lo, hi = data.normalization_map[col.name]
                    out.append(repr(lo + float(cell) * (hi - lo)))
                else:
                    out.append(repr(float(cell)))
            writer.writerow(out)
