"""Domain types and dataset ingestion for the screening pipeline.

Everything downstream (encoding, learners, explanations, dialogue) shares the
vocabulary defined here: the six response options, the eight symptom topics,
the five age buckets, and the ``ScreeningRecord`` value that ties them
together.  Ingestion is driven by a ``SchemaMapping`` config so that arbitrary
CSV headers and cell spellings can be adapted without touching code.
"""

from __future__ import annotations

import configparser
import csv
import enum
import io
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, TextIO


class ResponseOption(enum.Enum):
    """Canonical interpretation of a user's answer about one topic."""

    NA = "na"
    YES = "yes"
    SOMETIMES = "sometimes"
    OFTEN = "often"
    NO = "no"
    UNWILLING = "unwilling_to_disclose"

    @property
    def slug(self) -> str:
        return self.value

    @property
    def display(self) -> str:
        return _OPTION_DISPLAY[self]

    @classmethod
    def from_slug(cls, slug: str) -> "ResponseOption":
        try:
            return _OPTION_BY_SLUG[slug.strip().lower().replace(" ", "_")]
        except KeyError:
            raise ValueError(f"unknown response option: {slug!r}") from None


_OPTION_DISPLAY = {
    ResponseOption.NA: "NA",
    ResponseOption.YES: "Yes",
    ResponseOption.SOMETIMES: "Sometimes",
    ResponseOption.OFTEN: "Often",
    ResponseOption.NO: "No",
    ResponseOption.UNWILLING: "Unwilling to disclose",
}
_OPTION_BY_SLUG = {o.value: o for o in ResponseOption}


class Topic(enum.Enum):
    """The eight symptom topics covered by the screening conversation."""

    BABY_BONDING = "baby_bonding_issues"
    CONCENTRATION = "concentration_and_decision_making_problems"
    SADNESS = "feeling_sad_or_tearful"
    GUILT = "feeling_guilty"
    IRRITABILITY = "irritability_towards_the_baby_or_the_partner"
    APPETITE = "overreacting_or_loss_of_appetite"
    SUICIDE = "suicide_behavior"
    SLEEP = "trouble_sleeping"

    @property
    def slug(self) -> str:
        return self.value

    @property
    def display(self) -> str:
        return _TOPIC_DISPLAY[self]

    @classmethod
    def from_slug(cls, slug: str) -> "Topic":
        try:
            return _TOPIC_BY_SLUG[slug.strip().lower().replace(" ", "_")]
        except KeyError:
            raise ValueError(f"unknown topic: {slug!r}") from None


_TOPIC_DISPLAY = {
    Topic.BABY_BONDING: "Baby bonding issues",
    Topic.CONCENTRATION: "Concentration and decision-making problems",
    Topic.SADNESS: "Feeling sad or tearful",
    Topic.GUILT: "Feeling guilty",
    Topic.IRRITABILITY: "Irritability towards the baby or the partner",
    Topic.APPETITE: "Overreacting or loss of appetite",
    Topic.SUICIDE: "Suicide behavior",
    Topic.SLEEP: "Trouble sleeping",
}
_TOPIC_BY_SLUG = {t.value: t for t in Topic}

#: Canonical questioning / encoding order for the eight topics.
TOPIC_ORDER: tuple[Topic, ...] = (
    Topic.BABY_BONDING,
    Topic.CONCENTRATION,
    Topic.SADNESS,
    Topic.GUILT,
    Topic.IRRITABILITY,
    Topic.APPETITE,
    Topic.SUICIDE,
    Topic.SLEEP,
)


class AgeBucket(enum.Enum):
    """Five-year age intervals covering 25..50.

    Lower bounds are inclusive; upper bounds exclusive except for the last
    bucket, which includes 50.
    """

    B25_30 = (25, 30)
    B30_35 = (30, 35)
    B35_40 = (35, 40)
    B40_45 = (40, 45)
    B45_50 = (45, 50)

    @property
    def low(self) -> int:
        return self.value[0]

    @property
    def high(self) -> int:
        return self.value[1]

    @property
    def slug(self) -> str:
        return f"{self.low}_{self.high}"

    @property
    def display(self) -> str:
        return f"{self.low}-{self.high}"

    def adjacent(self) -> tuple["AgeBucket", ...]:
        """Neighbouring buckets (one or two)."""
        order = list(AgeBucket)
        i = order.index(self)
        out = []
        if i > 0:
            out.append(order[i - 1])
        if i < len(order) - 1:
            out.append(order[i + 1])
        return tuple(out)


def bucket_age(age: int) -> AgeBucket:
    """Map an age in [25, 50] to its bucket.

    Ages outside the range are clamped to the nearest bucket; callers that
    need to know whether clamping happened should use :func:`clamp_age`.
    """
    age = max(25, min(50, int(age)))
    if age == 50:
        return AgeBucket.B45_50
    for bucket in AgeBucket:
        if bucket.low <= age < bucket.high:
            return bucket
    raise AssertionError("unreachable")


def clamp_age(age: int) -> tuple[AgeBucket, bool]:
    """Bucket an age, reporting whether it fell outside [25, 50]."""
    clamped = age < 25 or age > 50
    return bucket_age(age), clamped


class RecordError(ValueError):
    """A screening record failed validation."""


class MissingTopicError(RecordError):
    def __init__(self, topic: Topic):
        super().__init__(f"record is missing a response for topic {topic.slug!r}")
        self.topic = topic


@dataclass(frozen=True)
class ScreeningRecord:
    """One respondent: age bucket, the eight topic responses, optional label.

    ``label`` is True for presence of PPD, False for absence, None for live
    sessions where no ground truth exists.  ``raw_age`` preserves the exact
    age for lossless re-serialization; ``age_clamped`` flags ages that fell
    outside [25, 50] before bucketing.
    """

    age_bucket: AgeBucket
    responses: Mapping[Topic, ResponseOption]
    label: Optional[bool] = None
    raw_age: Optional[int] = None
    age_clamped: bool = False

    def response(self, topic: Topic) -> ResponseOption:
        return self.responses[topic]

    def with_responses(self, updates: Mapping[Topic, ResponseOption]) -> "ScreeningRecord":
        merged = dict(self.responses)
        merged.update(updates)
        return replace(self, responses=merged)


def make_record(
    age: int,
    responses: Mapping[Topic, ResponseOption],
    label: Optional[bool] = None,
) -> ScreeningRecord:
    """Build a validated record from a raw age and topic responses."""
    bucket, clamped = clamp_age(age)
    record = ScreeningRecord(
        age_bucket=bucket,
        responses=dict(responses),
        label=label,
        raw_age=int(age),
        age_clamped=clamped,
    )
    return validate_record(record)


def validate_record(record: ScreeningRecord) -> ScreeningRecord:
    """Identity on valid records; raises ``RecordError`` otherwise."""
    for topic in Topic:
        if topic not in record.responses:
            raise MissingTopicError(topic)
    return record


# --------------------------------------------------------------------------
# Schema mapping + CSV ingestion
# --------------------------------------------------------------------------

AGE_COLUMN = "age"
LABEL_COLUMN = "label"


@dataclass(frozen=True)
class SchemaMapping:
    """How a delimited file's columns and cell strings map onto the domain.

    ``columns`` maps a header string to a topic slug, ``"age"`` or
    ``"label"``.  ``aliases`` maps raw cell strings (case-insensitive) to
    response-option slugs.  ``label_aliases`` maps raw label cells to 0/1.
    """

    columns: Mapping[str, str]
    aliases: Mapping[str, str]
    label_aliases: Mapping[str, int] = field(default_factory=lambda: {"0": 0, "1": 1})
    delimiter: str = ","

    def __post_init__(self):
        seen: dict[str, str] = {}
        for header, target in self.columns.items():
            if target not in (AGE_COLUMN, LABEL_COLUMN):
                Topic.from_slug(target)  # raises on unknown slug
            if target in seen and target != AGE_COLUMN:
                raise ValueError(f"column target {target!r} mapped twice")
            seen[target] = header
        for topic in Topic:
            if topic.slug not in seen:
                raise ValueError(f"no column mapped to topic {topic.slug!r}")

    def topic_for(self, header: str) -> Optional[Topic]:
        target = self.columns.get(header)
        if target in (None, AGE_COLUMN, LABEL_COLUMN):
            return None
        return Topic.from_slug(target)

    @property
    def age_header(self) -> Optional[str]:
        for header, target in self.columns.items():
            if target == AGE_COLUMN:
                return header
        return None

    @property
    def label_header(self) -> Optional[str]:
        for header, target in self.columns.items():
            if target == LABEL_COLUMN:
                return header
        return None

    def option_for(self, cell: str) -> ResponseOption:
        key = cell.strip().lower()
        if key in {k.lower(): v for k, v in self.aliases.items()}:
            slug = {k.lower(): v for k, v in self.aliases.items()}[key]
            return ResponseOption.from_slug(slug)
        raise ValueError(f"unmapped cell value: {cell!r}")


def load_schema_mapping(source: TextIO | str) -> SchemaMapping:
    """Read a SchemaMapping from its plain-text config format.

    The file has two required sections, ``[columns]`` and ``[aliases]``, plus
    an optional ``[labels]`` section and an optional ``delimiter`` key in a
    ``[format]`` section::

        [columns]
        Feeling sad or Tearful = feeling_sad_or_tearful
        Age = age
        Feeling anxious = label

        [aliases]
        Yes = yes
        Two or more days a week = sometimes
    """
    parser = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    parser.optionxform = str  # keep header case
    if isinstance(source, str):
        parser.read_string(source)
    else:
        parser.read_file(source)
    if "columns" not in parser or "aliases" not in parser:
        raise ValueError("schema mapping needs [columns] and [aliases] sections")
    label_aliases = {"0": 0, "1": 1}
    if "labels" in parser:
        label_aliases = {k: int(v) for k, v in parser["labels"].items()}
    delimiter = ","
    if "format" in parser and "delimiter" in parser["format"]:
        delimiter = parser["format"]["delimiter"]
        if delimiter == "\\t":
            delimiter = "\t"
    return SchemaMapping(
        columns=dict(parser["columns"]),
        aliases=dict(parser["aliases"]),
        label_aliases=label_aliases,
        delimiter=delimiter,
    )


def _parse_age(cell: Optional[str], row: int) -> int:
    """Accept plain integers or 'lo-hi' ranges (lower bound wins)."""
    text = (cell or "").strip()
    try:
        return int(float(text))
    except ValueError:
        pass
    match = re.fullmatch(r"(\d+)\s*[-–]\s*(\d+)", text)
    if match:
        return int(match.group(1))
    raise ParseError(f"bad age value {cell!r}", row=row)


class ParseError(ValueError):
    """A dataset row (or the header) could not be translated."""

    def __init__(self, message: str, row: Optional[int] = None):
        prefix = f"row {row}: " if row is not None else ""
        super().__init__(prefix + message)
        self.row = row


def parse_dataset(
    source: TextIO | Iterable[str],
    mapping: SchemaMapping,
    *,
    require_label: bool = True,
    drop_na: bool = False,
    on_error: str = "raise",
) -> list[ScreeningRecord]:
    """Parse a delimited text table into ordered ScreeningRecords.

    Rows are emitted in file order (the stream order for replay).  With
    ``on_error="skip"`` invalid rows are dropped instead of raising; the
    row index is carried either way.  ``drop_na`` removes rows where any
    topic response is NA, which is what the canonical replay config uses.
    """
    if on_error not in ("raise", "skip"):
        raise ValueError("on_error must be 'raise' or 'skip'")
    reader = csv.DictReader(source, delimiter=mapping.delimiter)
    if reader.fieldnames is None:
        return []
    headers = [h.strip() for h in reader.fieldnames]
    known = set(mapping.columns)
    mapped_topics = {h for h in headers if mapping.topic_for(h) is not None}
    missing = {h for h in mapping.columns if mapping.topic_for(h) is not None} - mapped_topics
    if missing:
        raise ParseError(f"dataset is missing mapped columns: {sorted(missing)}")
    if require_label and (mapping.label_header is None or mapping.label_header not in headers):
        raise ParseError("replay requires a label column, none found")

    alias_lookup = {k.strip().lower(): v for k, v in mapping.aliases.items()}
    label_lookup = {k.strip().lower(): v for k, v in mapping.label_aliases.items()}

    records: list[ScreeningRecord] = []
    for index, row in enumerate(reader):
        try:
            responses: dict[Topic, ResponseOption] = {}
            for header, cell in row.items():
                if header is None:
                    raise ParseError("row has more cells than headers", row=index)
                header = header.strip()
                if header not in known:
                    continue
                topic = mapping.topic_for(header)
                if topic is None:
                    continue
                if cell is None:
                    raise ParseError(f"missing value for column {header!r}", row=index)
                key = cell.strip().lower()
                if key not in alias_lookup:
                    raise ParseError(f"unmapped cell value {cell!r} in column {header!r}", row=index)
                responses[topic] = ResponseOption.from_slug(alias_lookup[key])

            label: Optional[bool] = None
            if mapping.label_header is not None and mapping.label_header in row:
                cell = (row[mapping.label_header] or "").strip().lower()
                if cell not in label_lookup:
                    if require_label:
                        raise ParseError(f"unmapped label value {cell!r}", row=index)
                else:
                    label = bool(label_lookup[cell])
            if require_label and label is None:
                raise ParseError("missing label", row=index)

            if mapping.age_header is None or mapping.age_header not in row:
                raise ParseError("missing age column", row=index)
            age = _parse_age(row[mapping.age_header], index)

            record = make_record(age, responses, label)
            if drop_na and any(o is ResponseOption.NA for o in record.responses.values()):
                continue
            records.append(record)
        except (ParseError, RecordError) as exc:
            if on_error == "raise":
                if isinstance(exc, RecordError):
                    raise ParseError(str(exc), row=index) from exc
                raise
    return records


def serialize_dataset(records: Iterable[ScreeningRecord], mapping: SchemaMapping) -> str:
    """Inverse of :func:`parse_dataset` under the same mapping.

    Cells are written using the first alias configured for each option, so a
    parse -> serialize -> parse round trip yields equal records.
    """
    reverse: dict[str, str] = {}
    for raw, slug in mapping.aliases.items():
        reverse.setdefault(slug, raw)
    label_reverse: dict[int, str] = {}
    for raw, value in mapping.label_aliases.items():
        label_reverse.setdefault(value, raw)

    headers = list(mapping.columns)
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=headers, delimiter=mapping.delimiter)
    writer.writeheader()
    for record in records:
        row: dict[str, str] = {}
        for header in headers:
            target = mapping.columns[header]
            if target == AGE_COLUMN:
                age = record.raw_age if record.raw_age is not None else record.age_bucket.low
                row[header] = str(age)
            elif target == LABEL_COLUMN:
                row[header] = label_reverse[int(bool(record.label))]
            else:
                option = record.responses[Topic.from_slug(target)]
                row[header] = reverse[option.slug]
        writer.writerow(row)
    return out.getvalue()


def class_counts(records: Iterable[ScreeningRecord]) -> tuple[int, int]:
    """(absence, presence) label counts over a record sequence."""
    neg = pos = 0
    for r in records:
        if r.label is True:
            pos += 1
        elif r.label is False:
            neg += 1
    return neg, pos
