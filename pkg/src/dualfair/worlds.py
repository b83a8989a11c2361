"""Sensitive-parameter structure, counterfactual worlds and partitioning.

A "world" is one complete assignment of an option to every sensitive
parameter. The count of worlds is the product of the per-parameter option
counts (the 3x3x3 race/sex/ethnicity grid gives 27), and worlds are ordered
lexicographically over option codes with the first parameter most
significant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import SchemaError
from .tabular import Dataset, KIND_SENSITIVE

WorldKey = tuple  # one option code per parameter, in SensitiveSpec order


@dataclass(frozen=True)
class SensitiveSpec:
    """Ordered sensitive parameters, each with its ordered option list."""

    parameters: tuple  # of (name, tuple-of-option-strings)

    def __post_init__(self):
        params = tuple((name, tuple(opts)) for name, opts in self.parameters)
        object.__setattr__(self, "parameters", params)
        if not params:
            raise SchemaError("SensitiveSpec needs at least one parameter")
        for name, opts in params:
            if len(opts) < 2:
                raise SchemaError(f"parameter {name!r} needs >= 2 options")
            if len(set(opts)) != len(opts):
                raise SchemaError(f"parameter {name!r} has duplicate options")

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.parameters]

    @property
    def option_counts(self) -> list[int]:
        return [len(opts) for _, opts in self.parameters]

    @classmethod
    def from_schema(cls, schema) -> "SensitiveSpec":
        params = [
            (c.name, c.domain) for c in schema if c.kind == KIND_SENSITIVE
        ]
        return cls(tuple(params))

    def describe(self, key: WorldKey) -> str:
        return "/".join(opts[c] for (_, opts), c in zip(self.parameters, key))


def count_worlds(spec: SensitiveSpec) -> int:
    # The option-count product, not a dot product of the parameter and
    # option vectors: only the product matches the 27-world grid every
    # downstream step assumes.
    return prod(spec.option_counts)


def enumerate_worlds(spec: SensitiveSpec) -> list[WorldKey]:
    """All worlds in lexicographic code order, first parameter outermost."""
    return [
        tuple(key)
        for key in itertools.product(*(range(n) for n in spec.option_counts))
    ]


def sensitive_column_indices(data: Dataset, spec: SensitiveSpec) -> list[int]:
    """Canonical-order column index of each spec parameter, in spec order."""
    by_name = {c.name: i for i, c in enumerate(data.schema)}
    indices = []
    for name in spec.names:
        if name not in by_name or data.schema[by_name[name]].kind != KIND_SENSITIVE:
            raise SchemaError(f"sensitive parameter {name!r} not in dataset schema")
        indices.append(by_name[name])
    return indices


def partition(data: Dataset, spec: SensitiveSpec) -> dict:
    """Map every world to the row indices that live in it.

    Empty worlds are present with empty index arrays so callers can report
    them explicitly.
    """
    cols = sensitive_column_indices(data, spec)
    codes = data.rows[:, cols].astype(np.int64)
    cells = {key: [] for key in enumerate_worlds(spec)}
    for i, row_codes in enumerate(codes):
        key = tuple(int(c) for c in row_codes)
        if key not in cells:
            raise SchemaError(f"row {i}: sensitive codes {key} outside the world grid")
        cells[key].append(i)
    return {key: np.array(idx, dtype=np.int64) for key, idx in cells.items()}


def world_of(row: np.ndarray, sensitive_cols: list[int]) -> WorldKey:
    return tuple(int(round(row[j])) for j in sensitive_cols)


def substitute_world(row: np.ndarray, key: WorldKey, sensitive_cols: list[int]) -> np.ndarray:
    """Copy of the row with its sensitive codes replaced by the key's codes."""
    out = np.array(row, dtype=np.float64)
    out[sensitive_cols] = key
    return out
