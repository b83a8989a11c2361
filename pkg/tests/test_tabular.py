import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualfair.errors import CleanError, SchemaError
from dualfair.tabular import (
    ColumnSpec,
    clean,
    decode_to_csv,
    encode_and_normalize,
    load_csv,
)

from conftest import write_csv

SCHEMA = [
    ColumnSpec("race", "sensitive", ("White", "Black", "Joint")),
    ColumnSpec("income", "feature"),
    ColumnSpec("approved", "label", ("no", "yes")),
]


class TestLoadCsv:
    def test_identity_load(self, tmp_path):
        p = write_csv(tmp_path / "a.csv", ["race", "income", "approved"],
                      [["White", "50", "yes"], ["Black", "70", "no"],
                       ["Joint", "60", "yes"]])
        raw = load_csv(p, SCHEMA)
        assert raw.n_rows == 3
        assert raw.rows[0] == ["White", "50", "yes"]

    def test_header_order_insensitive(self, tmp_path):
        p = write_csv(tmp_path / "a.csv", ["income", "approved", "race"],
                      [["50", "yes", "White"]])
        raw = load_csv(p, SCHEMA)
        assert raw.rows[0] == ["White", "50", "yes"]

    def test_missing_schema_column_in_header(self, tmp_path):
        p = write_csv(tmp_path / "a.csv", ["race", "income"],
                      [["White", "50"]])
        with pytest.raises(SchemaError, match="approved"):
            load_csv(p, SCHEMA)

    def test_exempt_cell_flagged_missing(self, tmp_path):
        p = write_csv(tmp_path / "a.csv", ["race", "income", "approved"],
                      [["White", "50", "yes"], ["Black", "Exempt", "no"]])
        raw = load_csv(p, SCHEMA)
        assert raw.rows[1][1] is None
        assert raw.missing_counts() == {"race": 0, "income": 1, "approved": 0}

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError, match="not found"):
            load_csv(tmp_path / "nope.csv", SCHEMA)

    def test_ragged_row_reports_index(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("race,income,approved\nWhite,50,yes\nBlack,70\n")
        with pytest.raises(SchemaError, match="row 1"):
            load_csv(p, SCHEMA)


class TestClean:
    def _load(self, tmp_path, rows):
        p = write_csv(tmp_path / "c.csv", ["race", "income", "approved"], rows)
        return load_csv(p, SCHEMA)

    def test_over_threshold_column_dropped(self, tmp_path):
        rows = [["White", "NA", "yes"]] * 3 + [["Black", "70", "no"]] * 7
        raw = self._load(tmp_path, rows)  # income 30% missing
        cleaned = clean(raw, 0.25)
        assert [c.name for c in cleaned.schema] == ["race", "approved"]
        assert cleaned.n_rows == 10

    def test_no_missing_is_noop(self, tmp_path):
        rows = [["White", "50", "yes"], ["Black", "70", "no"]]
        raw = self._load(tmp_path, rows)
        cleaned = clean(raw, 0.25)
        assert cleaned.rows == raw.rows
        assert cleaned.schema == raw.schema

    def test_off_domain_sensitive_rows_dropped(self, tmp_path):
        rows = [["White", str(40 + i), "yes"] for i in range(8)]
        rows += [["Asian", "99", "no"], ["Asian", "98", "yes"]]
        raw = self._load(tmp_path, rows)
        cleaned = clean(raw, 0.25)
        # independent hand filter of the same fixture
        expected = [r for r in raw.rows if r[0] in ("White", "Black", "Joint")]
        assert cleaned.n_rows == 8
        assert cleaned.rows == expected

    def test_rows_with_missing_in_surviving_column_dropped(self, tmp_path):
        rows = [["White", "50", "yes"], ["Black", "NA", "no"],
                ["Joint", "60", "yes"]]
        raw = self._load(tmp_path, rows)
        cleaned = clean(raw, 0.5)
        assert cleaned.n_rows == 2

    def test_everything_removed_errors(self, tmp_path):
        raw = self._load(tmp_path, [["Asian", "50", "yes"]])
        with pytest.raises(CleanError):
            clean(raw, 0.25)

    def test_cannot_drop_label_column(self, tmp_path):
        rows = [["White", "50", "NA"]] * 3 + [["Black", "70", "no"]]
        raw = self._load(tmp_path, rows)
        with pytest.raises(CleanError, match="approved"):
            clean(raw, 0.25)

    def test_idempotent(self, tmp_path):
        rows = [["White", "50", "yes"], ["Black", "NA", "no"],
                ["Asian", "1", "yes"], ["Joint", "60", "no"]]
        raw = self._load(tmp_path, rows)
        once = clean(raw, 0.5)
        twice = clean(once, 0.5)
        assert twice.rows == once.rows
        assert twice.schema == once.schema


class TestEncodeAndNormalize:
    def test_categorical_codes_follow_domain_order(self, tmp_path):
        schema = [
            ColumnSpec("sex", "sensitive", ("Female", "Male", "Joint")),
            ColumnSpec("income", "feature"),
            ColumnSpec("approved", "label", ("no", "yes")),
        ]
        p = write_csv(tmp_path / "e.csv", ["sex", "income", "approved"],
                      [["Female", "50", "yes"], ["Male", "100", "no"],
                       ["Joint", "150", "yes"]])
        data = encode_and_normalize(load_csv(p, schema))
        assert data.encoding_map["sex"] == {"Female": 0, "Male": 1, "Joint": 2}
        assert list(data.rows[:, 0]) == [0.0, 1.0, 2.0]

    def test_min_max_scaling(self, tmp_path):
        p = write_csv(tmp_path / "e.csv", ["race", "income", "approved"],
                      [["White", "50", "yes"], ["Black", "100", "no"],
                       ["Joint", "150", "yes"]])
        data = encode_and_normalize(load_csv(p, SCHEMA))
        j = data.column_names.index("income")
        assert list(data.rows[:, j]) == [0.0, 0.5, 1.0]
        assert data.normalization_map["income"] == (50.0, 150.0)

    def test_constant_numeric_column_maps_to_zero(self, tmp_path):
        p = write_csv(tmp_path / "e.csv", ["race", "income", "approved"],
                      [["White", "7", "yes"], ["Black", "7", "no"]])
        data = encode_and_normalize(load_csv(p, SCHEMA))
        j = data.column_names.index("income")
        assert list(data.rows[:, j]) == [0.0, 0.0]

    def test_canonical_column_order(self, tmp_path):
        p = write_csv(tmp_path / "e.csv", ["income", "approved", "race"],
                      [["50", "yes", "White"], ["70", "no", "Black"]])
        data = encode_and_normalize(load_csv(p, SCHEMA))
        assert data.column_names == ["race", "income", "approved"]
        assert [c.kind for c in data.schema] == ["sensitive", "feature", "label"]

    def test_unparseable_numeric_reports_position(self, tmp_path):
        p = write_csv(tmp_path / "e.csv", ["race", "income", "approved"],
                      [["White", "50", "yes"], ["Black", "oops", "no"]])
        with pytest.raises(SchemaError, match="income"):
            encode_and_normalize(load_csv(p, SCHEMA))

    def test_rows_are_immutable(self, tmp_path):
        p = write_csv(tmp_path / "e.csv", ["race", "income", "approved"],
                      [["White", "50", "yes"], ["Black", "70", "no"]])
        data = encode_and_normalize(load_csv(p, SCHEMA))
        with pytest.raises(ValueError):
            data.rows[0, 0] = 9.0


class TestRoundTrip:
    def test_decode_reexport_reload(self, tmp_path):
        p = write_csv(tmp_path / "r.csv", ["race", "income", "approved"],
                      [["White", "50", "yes"], ["Black", "100", "no"],
                       ["Joint", "150", "yes"]])
        data = encode_and_normalize(load_csv(p, SCHEMA))
        out = tmp_path / "out.csv"
        decode_to_csv(data, out)
        again = encode_and_normalize(clean(load_csv(out, SCHEMA), 0.25))
        np.testing.assert_allclose(again.rows, data.rows, atol=1e-12)


@st.composite
def raw_tables(draw):
    n = draw(st.integers(min_value=2, max_value=20))
    races = draw(st.lists(
        st.sampled_from(["White", "Black", "Joint"]), min_size=n, max_size=n))
    incomes = draw(st.lists(
        st.integers(min_value=0, max_value=10_000), min_size=n, max_size=n))
    labels = draw(st.lists(st.sampled_from(["no", "yes"]), min_size=n, max_size=n))
    return [[r, str(i), l] for r, i, l in zip(races, incomes, labels)]


class TestProperties:
    @settings(max_examples=50, deadline=None)
    @given(raw_tables())
    def test_encoded_dataset_invariants(self, tmp_path_factory, rows):
        p = write_csv(tmp_path_factory.mktemp("h") / "t.csv",
                      ["race", "income", "approved"], rows)
        data = encode_and_normalize(clean(load_csv(p, SCHEMA), 0.25))
        assert set(np.unique(data.labels)) <= {0.0, 1.0}
        for j in data.numeric_feature_indices:
            assert np.all((data.rows[:, j] >= 0.0) & (data.rows[:, j] <= 1.0))
        # encoding is a bijection and decodes back to the original strings
        for name, codes in data.encoding_map.items():
            assert len(set(codes.values())) == len(codes)
            col = data.column_names.index(name)
            src = [r[0] if name == "race" else r[2] for r in rows]
            for cell, orig in zip(data.rows[:, col], src):
                assert data.decode_cell(name, cell) == orig
