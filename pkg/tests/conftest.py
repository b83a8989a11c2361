import numpy as np
import pytest

from dualfair.tabular import ColumnSpec, Dataset
from dualfair.worlds import SensitiveSpec


@pytest.fixture
def hmda_spec():
    """The 3x3x3 race/sex/ethnicity grid."""
    return SensitiveSpec((
        ("race", ("White", "Black", "Joint")),
        ("sex", ("Male", "Female", "Joint")),
        ("ethnicity", ("NonHispanic", "Hispanic", "Joint")),
    ))


@pytest.fixture
def small_spec():
    return SensitiveSpec((
        ("sex", ("Male", "Female")),
        ("race", ("White", "Black")),
    ))


def make_dataset(sensitive_codes, features, labels, spec):
    """Assemble a canonical-order Dataset from plain arrays."""
    sensitive_codes = np.atleast_2d(np.asarray(sensitive_codes, dtype=np.float64))
    features = np.atleast_2d(np.asarray(features, dtype=np.float64))
    labels = np.asarray(labels, dtype=np.float64)
    schema = (
        [ColumnSpec(name, "sensitive", opts) for name, opts in spec.parameters]
        + [ColumnSpec(f"f{j}", "feature") for j in range(features.shape[1])]
        + [ColumnSpec("label", "label")]
    )
    rows = np.column_stack([sensitive_codes, features, labels])
    encoding = {
        name: {o: i for i, o in enumerate(opts)} for name, opts in spec.parameters
    }
    norm = {f"f{j}": (0.0, 1.0) for j in range(features.shape[1])}
    return Dataset(schema, rows, encoding, norm)


@pytest.fixture
def dataset_factory():
    return make_dataset


def write_csv(path, header, rows):
    lines = [",".join(header)] + [",".join(str(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path
