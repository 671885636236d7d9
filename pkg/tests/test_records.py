"""Domain types, age bucketing, and schema-mapped ingestion.

Value provenance: bucket boundaries and clamping results are asserted
directly from the documented interval convention; round-trip checks use the
parser itself as the inverse oracle.
"""

import pytest

from ppdstream.records import (
    AgeBucket,
    MissingTopicError,
    ParseError,
    ResponseOption,
    SchemaMapping,
    ScreeningRecord,
    Topic,
    TOPIC_ORDER,
    bucket_age,
    clamp_age,
    class_counts,
    load_schema_mapping,
    make_record,
    parse_dataset,
    serialize_dataset,
    validate_record,
)
from ppdstream.synthetic import (
    generate_records,
    surrogate_mapping,
    surrogate_mapping_text,
)

ALL_NO = {t: ResponseOption.NO for t in Topic}


class TestAgeBuckets:
    @pytest.mark.parametrize(
        "age,expected",
        [
            (25, AgeBucket.B25_30),
            (29, AgeBucket.B25_30),
            (30, AgeBucket.B30_35),
            (34, AgeBucket.B30_35),
            (35, AgeBucket.B35_40),
            (40, AgeBucket.B40_45),
            (44, AgeBucket.B40_45),
            (45, AgeBucket.B45_50),
            (49, AgeBucket.B45_50),
            (50, AgeBucket.B45_50),  # top bucket is closed
        ],
    )
    def test_boundaries(self, age, expected):
        assert bucket_age(age) is expected

    @pytest.mark.parametrize("age,bucket,clamped", [
        (24, AgeBucket.B25_30, True),
        (18, AgeBucket.B25_30, True),
        (51, AgeBucket.B45_50, True),
        (70, AgeBucket.B45_50, True),
        (25, AgeBucket.B25_30, False),
        (50, AgeBucket.B45_50, False),
    ])
    def test_clamping(self, age, bucket, clamped):
        assert clamp_age(age) == (bucket, clamped)

    def test_adjacency(self):
        order = list(AgeBucket)
        assert AgeBucket.B25_30.adjacent() == (AgeBucket.B30_35,)
        assert AgeBucket.B45_50.adjacent() == (AgeBucket.B40_45,)
        for bucket in order[1:-1]:
            i = order.index(bucket)
            assert bucket.adjacent() == (order[i - 1], order[i + 1])

    def test_slugs_and_display(self):
        assert AgeBucket.B30_35.slug == "30_35"
        assert AgeBucket.B30_35.display == "30-35"


class TestRecords:
    def test_make_record_keeps_raw_age(self):
        record = make_record(24, ALL_NO, label=True)
        assert record.raw_age == 24
        assert record.age_clamped
        assert record.age_bucket is AgeBucket.B25_30
        assert record.label is True

    def test_missing_topic_rejected(self):
        partial = {t: ResponseOption.NO for t in list(Topic)[:-1]}
        with pytest.raises(MissingTopicError):
            make_record(30, partial)

    def test_validate_is_identity_on_valid(self):
        record = make_record(30, ALL_NO)
        assert validate_record(record) is record

    def test_with_responses(self):
        record = make_record(30, ALL_NO)
        updated = record.with_responses({Topic.SADNESS: ResponseOption.YES})
        assert updated.responses[Topic.SADNESS] is ResponseOption.YES
        assert record.responses[Topic.SADNESS] is ResponseOption.NO  # original intact

    def test_option_slug_round_trip(self):
        for option in ResponseOption:
            assert ResponseOption.from_slug(option.slug) is option
        assert ResponseOption.from_slug("Unwilling to disclose") is ResponseOption.UNWILLING

    def test_topic_order_covers_all_topics(self):
        assert set(TOPIC_ORDER) == set(Topic)
        assert len(TOPIC_ORDER) == 8


class TestSchemaMapping:
    def test_loads_config_text(self):
        mapping = load_schema_mapping(surrogate_mapping_text())
        assert mapping.age_header == "Age"
        assert mapping.label_header == "Diagnosis"
        assert mapping.topic_for("Feeling sad or Tearful") is Topic.SADNESS

    def test_rejects_missing_topic(self):
        with pytest.raises(ValueError, match="no column mapped"):
            SchemaMapping(columns={"Age": "age"}, aliases={"Yes": "yes"})

    def test_rejects_duplicate_target(self):
        columns = dict(surrogate_mapping().columns)
        columns["Extra sadness"] = Topic.SADNESS.slug
        with pytest.raises(ValueError, match="mapped twice"):
            SchemaMapping(columns=columns, aliases={"Yes": "yes"})

    def test_rejects_unknown_slug(self):
        columns = dict(surrogate_mapping().columns)
        columns["Mystery"] = "not_a_topic"
        with pytest.raises(ValueError):
            SchemaMapping(columns=columns, aliases={"Yes": "yes"})

    def test_missing_sections_raise(self):
        with pytest.raises(ValueError, match="columns"):
            load_schema_mapping("[aliases]\nYes = yes\n")


class TestParseDataset:
    def test_round_trip(self):
        records = generate_records(n_total=60, n_absence=25, seed=3)
        mapping = surrogate_mapping()
        text = serialize_dataset(records, mapping)
        parsed = parse_dataset(text.splitlines(True), mapping)
        assert parsed == records

    def test_row_order_preserved(self):
        records = generate_records(n_total=40, n_absence=15, seed=5)
        mapping = surrogate_mapping()
        parsed = parse_dataset(serialize_dataset(records, mapping).splitlines(True), mapping)
        assert [r.label for r in parsed] == [r.label for r in records]

    def _rows(self, *cells):
        mapping = surrogate_mapping()
        header = ",".join(mapping.columns)
        return [header + "\n"] + [c + "\n" for c in cells], mapping

    def test_bad_age_raises_with_row(self):
        lines, mapping = self._rows("abc," + ",".join(["No"] * 8) + ",0")
        with pytest.raises(ParseError, match="row 0"):
            parse_dataset(lines, mapping)

    def test_age_range_cell_uses_lower_bound(self):
        lines, mapping = self._rows("35-40," + ",".join(["No"] * 8) + ",0")
        (record,) = parse_dataset(lines, mapping)
        assert record.raw_age == 35

    def test_unmapped_cell_raises(self):
        lines, mapping = self._rows("30,Maybe," + ",".join(["No"] * 7) + ",0")
        with pytest.raises(ParseError, match="Maybe"):
            parse_dataset(lines, mapping)

    def test_on_error_skip_drops_bad_rows(self):
        lines, mapping = self._rows(
            "30," + ",".join(["No"] * 8) + ",0",
            "bad," + ",".join(["No"] * 8) + ",1",
            "41," + ",".join(["Yes"] * 8) + ",1",
        )
        records = parse_dataset(lines, mapping, on_error="skip")
        assert [r.raw_age for r in records] == [30, 41]

    def test_missing_label_raises_when_required(self):
        lines, mapping = self._rows("30," + ",".join(["No"] * 8) + ",")
        with pytest.raises(ParseError, match="label"):
            parse_dataset(lines, mapping)
        records = parse_dataset(lines, mapping, require_label=False)
        assert records[0].label is None

    def test_drop_na_removes_na_rows(self):
        lines, mapping = self._rows(
            "30,NA," + ",".join(["No"] * 7) + ",0",
            "30," + ",".join(["No"] * 8) + ",1",
        )
        records = parse_dataset(lines, mapping, drop_na=True)
        assert len(records) == 1 and records[0].label is True

    def test_class_counts(self):
        records = generate_records(n_total=30, n_absence=12, seed=1)
        assert class_counts(records) == (12, 18)
