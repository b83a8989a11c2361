"""Selection-bias removal: resample every world to the cross-world medians.

Each world ends up with exactly target_accepted accepted rows and
target_rejected rejected rows. Deficits are filled with a seeded SMOTE
variant (differential-evolution-style: x1 + f * (x2 - x3) with per-feature
crossover at rate cr); surpluses are trimmed by uniform random deletion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import BalanceError
from .seeding import derive_seed
from .tabular import Dataset


@dataclass(frozen=True)
class BalanceTargets:
    target_accepted: int
    target_rejected: int

    def __post_init__(self):
        if self.target_accepted < 1 or self.target_rejected < 1:
            raise BalanceError(
                f"balance targets must be >= 1, got {self.target_accepted}/"
                f"{self.target_rejected}"
            )


@dataclass(frozen=True)
class SmoteParams:
    """f = mutation amount, cr = crossover frequency, both in [0, 1]."""

    f: float = 0.8
    cr: float = 0.8
    k: int = 5
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.f <= 1.0 and 0.0 <= self.cr <= 1.0):
            raise BalanceError("f and cr must lie in [0, 1]")
        if self.k < 1:
            raise BalanceError("k must be >= 1")


def _median_half_up(values) -> int:
    ordered = sorted(values)
    n = len(ordered)
    if n % 2:
        return int(ordered[n // 2])
    mid = (ordered[n // 2 - 1] + ordered[n // 2]) / 2.0
    return int(math.floor(mid + 0.5))


def _world_label_counts(part: dict, data: Dataset):
    labels = data.labels
    counts = {}
    for key, idx in part.items():
        lab = labels[idx]
        counts[key] = (int(np.sum(lab == 1.0)), int(np.sum(lab == 0.0)))
    return counts


def compute_targets(part: dict, data: Dataset) -> BalanceTargets:
    """Per-label medians of the world counts, computed over non-empty worlds.

    Raises when some world cannot be oversampled to a target: SMOTE needs at
    least two same-label parents, so any world short of a target with fewer
    than two rows of that label is a hard error (this covers empty worlds).
    """
    counts = _world_label_counts(part, data)
    nonempty = [c for c in counts.values() if sum(c) > 0]
    if not nonempty:
        raise BalanceError("partition has no non-empty world")
    targets = BalanceTargets(
        target_accepted=_median_half_up([a for a, _ in nonempty]),
        target_rejected=_median_half_up([r for _, r in nonempty]),
    )
    for key, (acc, rej) in counts.items():
        if acc + rej == 0:
            continue  # empty worlds are reported, not filled
        for label_name, have, want in (
            ("accepted", acc, targets.target_accepted),
            ("rejected", rej, targets.target_rejected),
        ):
            if have < want and have < 2:
                raise BalanceError(
                    f"world {key}: {have} {label_name} rows, need {want}; "
                    "oversampling requires at least 2"
                )
    return targets


def smote_sample(parents: np.ndarray, n_new: int, params: SmoteParams,
                 numeric_cols) -> np.ndarray:
    """Generate n_new synthetic records from same-label, same-world parents.

    Per record: draw a parent x1, pick two distinct neighbors x2, x3 among
    its k nearest (Euclidean over the normalized numeric feature columns);
    each numeric feature independently becomes x1 + f * (x2 - x3) with
    probability cr, else stays x1's value, then is clamped to [0, 1].
    Categorical, sensitive and label columns copy x1. Fully determined by
    params.seed.
    """
    parents = np.asarray(parents, dtype=np.float64)
    n = parents.shape[0]
    if n < 2:
        raise BalanceError(f"SMOTE needs >= 2 parents, got {n}")
    if n_new <= 0:
        return np.empty((0, parents.shape[1]))
    numeric_cols = list(numeric_cols)
    rng = np.random.default_rng(params.seed)

    space = parents[:, numeric_cols]
    dist = cdist(space, space)
    np.fill_diagonal(dist, np.inf)
    m = min(params.k, n - 1)
    # neighbor table: m nearest same-label rows per parent
    nbrs = np.argsort(dist, axis=1, kind="stable")[:, :m]

    pick = rng.integers(n, size=n_new)
    x1 = parents[pick]
    if m >= 2:
        r1 = rng.integers(m, size=n_new)
        r2 = rng.integers(m - 1, size=n_new)
        r2 = r2 + (r2 >= r1)
        x2 = parents[nbrs[pick, r1]]
        x3 = parents[nbrs[pick, r2]]
    else:
        x2 = parents[nbrs[pick, 0]]
        x3 = x1
    out = x1.copy()
    cross = rng.random((n_new, len(numeric_cols))) < params.cr
    mutated = x1[:, numeric_cols] + params.f * (x2[:, numeric_cols] - x3[:, numeric_cols])
    out[:, numeric_cols] = np.clip(
        np.where(cross, mutated, x1[:, numeric_cols]), 0.0, 1.0
    )
    return out


def undersample(rows: np.ndarray, n_keep: int, seed: int) -> np.ndarray:
    """Uniform random subset without replacement, original order preserved."""
    rows = np.asarray(rows)
    if n_keep > rows.shape[0]:
        raise BalanceError(f"cannot keep {n_keep} of {rows.shape[0]} rows")
    rng = np.random.default_rng(seed)
    keep = np.sort(rng.choice(rows.shape[0], size=n_keep, replace=False))
    return rows[keep]


def balance_all(data: Dataset, part: dict, params: SmoteParams) -> Dataset:
    """Resample every populated world to the shared targets.

    Empty worlds stay empty (they have nothing to seed synthesis from and
    were already surfaced by the partition). Worlds are processed
    independently with seeds derived from (params.seed, world key), so
    results do not depend on execution order. Output rows are sorted by
    world key, then accepted before rejected, originals before synthetics.
    """
    targets = compute_targets(part, data)
    labels = data.labels
    numeric_cols = data.numeric_feature_indices
    chunks = []
    for key in sorted(part.keys()):
        idx = part[key]
        if len(idx) == 0:
            continue
        for label, target in (
            (1.0, targets.target_accepted),
            (0.0, targets.target_rejected),
        ):
            sub = idx[labels[idx] == label]
            rows = data.rows[sub]
            seed = derive_seed(params.seed, key, int(label))
            if rows.shape[0] > target:
                chunks.append(undersample(rows, target, seed))
            elif rows.shape[0] < target:
                chunks.append(rows)
                synth_params = SmoteParams(params.f, params.cr, params.k, seed)
                chunks.append(
                    smote_sample(rows, target - rows.shape[0], synth_params,
                                 numeric_cols)
                )
            else:
                chunks.append(rows)
    return data.with_rows(np.vstack(chunks))
