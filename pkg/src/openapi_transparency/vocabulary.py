"""Transparency vocabulary elements carried by the ``x-tira`` OpenAPI extension.

The extension grammar is documented in docs/annotation-grammar.md. Parsing is
total: any mapping is either turned into typed vocabulary records or reported
through diagnostics, never an exception. Serialization is the exact inverse,
with absent optional fields omitted rather than written as null.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from . import diagnostics as diag
from .diagnostics import Diagnostic
from .sites import SitePath

EXTENSION_KEY = "x-tira"
IGNORE_KEY = "x-tira-ignore"

_COUNTRY_RE = re.compile(r"^[A-Z]{2}$")


class Kind(str, Enum):
    RETENTION_TIME = "retention_time"
    RECIPIENT = "recipient"
    THIRD_COUNTRY_TRANSFER = "third_country_transfer"
    SPECIAL_CATEGORY = "special_category"
    PROFILING = "profiling"
    PURPOSE = "purpose"
    SOURCE = "source"
    DATA_CATEGORY = "data_category"


class SourceOrigin(str, Enum):
    DATA_SUBJECT = "data_subject"
    THIRD_PARTY = "third_party"
    PUBLIC_SOURCE = "public_source"
    DERIVED = "derived"


# Extension-block key -> vocabulary kind. List-valued keys hold several
# elements per block; the others hold exactly one mapping.
BLOCK_KEYS: dict[str, Kind] = {
    "retention_time": Kind.RETENTION_TIME,
    "recipients": Kind.RECIPIENT,
    "third_country_transfer": Kind.THIRD_COUNTRY_TRANSFER,
    "special_category": Kind.SPECIAL_CATEGORY,
    "profiling": Kind.PROFILING,
    "purposes": Kind.PURPOSE,
    "source": Kind.SOURCE,
    "data_categories": Kind.DATA_CATEGORY,
}

LIST_VALUED_KINDS = frozenset({Kind.RECIPIENT, Kind.PURPOSE, Kind.DATA_CATEGORY})

_KIND_TO_KEY = {kind: key for key, kind in BLOCK_KEYS.items()}

# The seven per-service information rows every report must cover, mapped to
# the vocabulary kind that expresses each of them.
SERVICE_INFO_ROWS: dict[str, Kind] = {
    "recipients": Kind.RECIPIENT,
    "third_country_transfer": Kind.THIRD_COUNTRY_TRANSFER,
    "purpose": Kind.PURPOSE,
    "data_categories": Kind.DATA_CATEGORY,
    "retention": Kind.RETENTION_TIME,
    "source": Kind.SOURCE,
    "profiling": Kind.PROFILING,
}


@dataclass(frozen=True)
class Duration:
    days: int | None = None
    months: int | None = None
    years: int | None = None

    def __post_init__(self) -> None:
        if self.days is None and self.months is None and self.years is None:
            raise ValueError("a duration needs at least one of days, months, years")
        for name in ("days", "months", "years"):
            value = getattr(self, name)
            if value is not None and (not isinstance(value, int) or isinstance(value, bool) or value < 0):
                raise ValueError(f"duration {name} must be a non-negative integer")

    def total_days(self) -> int:
        """Comparison length only (months = 30 days, years = 365 days)."""
        return (self.days or 0) + 30 * (self.months or 0) + 365 * (self.years or 0)

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.total_days(), self.years or 0, self.months or 0, self.days or 0)

    def to_dict(self) -> dict:
        out = {}
        for name in ("days", "months", "years"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out


@dataclass(frozen=True)
class RetentionTime:
    period: Duration | None = None
    volatile: bool = False
    no_limit: bool = False
    periodic_review: bool = False
    review_frequency: Duration | None = None

    def __post_init__(self) -> None:
        stated = sum((self.period is not None, self.volatile, self.no_limit))
        if stated > 1:
            raise ValueError("period, volatile, and no_limit are mutually exclusive")
        if self.review_frequency is not None and not self.periodic_review:
            raise ValueError("review_frequency requires periodic_review")


@dataclass(frozen=True)
class Recipient:
    name: str
    category: str | None = None
    third_party: bool = False
    country: str | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("recipient name must not be empty")
        if self.country is not None and not _COUNTRY_RE.match(self.country):
            raise ValueError("country must be a two-letter uppercase ISO 3166-1 code")


@dataclass(frozen=True)
class ThirdCountryTransfer:
    occurs: bool = False
    countries: tuple[str, ...] = ()
    safeguards_note: str | None = None

    def __post_init__(self) -> None:
        if not self.occurs and self.countries:
            raise ValueError("countries listed although no transfer occurs")


@dataclass(frozen=True)
class SpecialCategory:
    applies: bool = False
    ground: str | None = None

    def __post_init__(self) -> None:
        if self.ground is not None and not self.applies:
            raise ValueError("a lawful ground is only meaningful when the category applies")


@dataclass(frozen=True)
class Profiling:
    performed: bool = False
    explanation: str | None = None

    def __post_init__(self) -> None:
        if self.performed and not self.explanation:
            raise ValueError("profiling requires an explanation when performed")


@dataclass(frozen=True)
class Purpose:
    id: str
    description: str = ""
    allowed_utilizers: tuple[str, ...] = ()
    excluded_utilizers: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("purpose id must not be empty")
        overlap = set(self.allowed_utilizers) & set(self.excluded_utilizers)
        if overlap:
            raise ValueError(f"utilizers cannot be both allowed and excluded: {sorted(overlap)}")


@dataclass(frozen=True)
class Source:
    origin: SourceOrigin
    description: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.origin, SourceOrigin):
            object.__setattr__(self, "origin", SourceOrigin(self.origin))


@dataclass(frozen=True)
class DataCategory:
    name: str
    description: str | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("data category name must not be empty")


_VALUE_TYPES: dict[Kind, type] = {
    Kind.RETENTION_TIME: RetentionTime,
    Kind.RECIPIENT: Recipient,
    Kind.THIRD_COUNTRY_TRANSFER: ThirdCountryTransfer,
    Kind.SPECIAL_CATEGORY: SpecialCategory,
    Kind.PROFILING: Profiling,
    Kind.PURPOSE: Purpose,
    Kind.SOURCE: Source,
    Kind.DATA_CATEGORY: DataCategory,
}


@dataclass(frozen=True)
class TransparencyProperty:
    kind: Kind
    value: object
    declared_at: SitePath

    def __post_init__(self) -> None:
        expected = _VALUE_TYPES[self.kind]
        if not isinstance(self.value, expected):
            raise ValueError(
                f"{self.kind.value} property carries {type(self.value).__name__}, "
                f"expected {expected.__name__}"
            )


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _BlockReader:
    """Field extraction over one raw mapping, reporting violations as diagnostics."""

    def __init__(self, raw: Mapping, key: str, site: SitePath, diags: list[Diagnostic]):
        self.raw = raw
        self.key = key
        self.site = site
        self.diags = diags
        self.failed = False

    def fail(self, message: str) -> None:
        self.failed = True
        self.diags.append(
            diag.error("invalid-vocabulary", f"{self.key}: {message}", site=self.site)
        )

    def string(self, name: str, required: bool = False) -> str | None:
        value = self.raw.get(name)
        if value is None:
            if required:
                self.fail(f"missing required field {name!r}")
            return None
        if not isinstance(value, str) or (required and not value):
            self.fail(f"field {name!r} must be a non-empty string")
            return None
        return value

    def boolean(self, name: str) -> bool:
        value = self.raw.get(name)
        if value is None:
            return False
        if not isinstance(value, bool):
            self.fail(f"field {name!r} must be a boolean")
            return False
        return value

    def string_list(self, name: str) -> tuple[str, ...]:
        value = self.raw.get(name)
        if value is None:
            return ()
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            self.fail(f"field {name!r} must be a list of strings")
            return ()
        return tuple(value)


def _read_duration(raw: object, reader: _BlockReader, what: str) -> Duration | None:
    """A duration mapping; explicit nulls are treated like omitted components."""
    if raw is None:
        return None
    if not isinstance(raw, Mapping):
        reader.fail(f"{what} must be a mapping of days/months/years")
        return None
    components: dict[str, int] = {}
    for name in ("days", "months", "years"):
        value = raw.get(name)
        if value is None:
            continue
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            reader.fail(f"{what}.{name} must be a non-negative integer")
            return None
        components[name] = value
    if not components:
        return None
    return Duration(**components)


def _parse_retention(raw: object, site: SitePath, diags: list[Diagnostic]) -> RetentionTime | None:
    if not isinstance(raw, Mapping):
        diags.append(
            diag.error("invalid-vocabulary", "retention_time must be a mapping", site=site)
        )
        return None
    reader = _BlockReader(raw, "retention_time", site, diags)
    known = {"days", "months", "years", "volatile", "no_limit", "periodic_review", "review_frequency"}
    for key in raw:
        if key not in known:
            diags.append(
                diag.warning(
                    "unknown-vocabulary-key",
                    f"retention_time: unknown field {key!r}",
                    site=site,
                )
            )
    period = _read_duration({k: raw.get(k) for k in ("days", "months", "years")}, reader, "period")
    volatile = reader.boolean("volatile")
    no_limit = reader.boolean("no_limit")
    periodic_review = reader.boolean("periodic_review")
    review_frequency = _read_duration(raw.get("review_frequency"), reader, "review_frequency")
    if reader.failed:
        return None
    try:
        return RetentionTime(
            period=period,
            volatile=volatile,
            no_limit=no_limit,
            periodic_review=periodic_review,
            review_frequency=review_frequency,
        )
    except ValueError as exc:
        reader.fail(str(exc))
        return None


def _parse_recipient(raw: object, site: SitePath, diags: list[Diagnostic]) -> Recipient | None:
    if not isinstance(raw, Mapping):
        diags.append(diag.error("invalid-vocabulary", "recipient must be a mapping", site=site))
        return None
    reader = _BlockReader(raw, "recipients", site, diags)
    name = reader.string("name", required=True)
    category = reader.string("category")
    third_party = reader.boolean("third_party")
    country = reader.string("country")
    if reader.failed or name is None:
        return None
    try:
        return Recipient(name=name, category=category, third_party=third_party, country=country)
    except ValueError as exc:
        reader.fail(str(exc))
        return None


def _parse_transfer(raw: object, site: SitePath, diags: list[Diagnostic]) -> ThirdCountryTransfer | None:
    if not isinstance(raw, Mapping):
        diags.append(
            diag.error("invalid-vocabulary", "third_country_transfer must be a mapping", site=site)
        )
        return None
    reader = _BlockReader(raw, "third_country_transfer", site, diags)
    occurs = reader.boolean("occurs")
    countries = reader.string_list("countries")
    note = reader.string("safeguards_note")
    if reader.failed:
        return None
    try:
        return ThirdCountryTransfer(occurs=occurs, countries=countries, safeguards_note=note)
    except ValueError as exc:
        reader.fail(str(exc))
        return None


def _parse_special(raw: object, site: SitePath, diags: list[Diagnostic]) -> SpecialCategory | None:
    if not isinstance(raw, Mapping):
        diags.append(
            diag.error("invalid-vocabulary", "special_category must be a mapping", site=site)
        )
        return None
    reader = _BlockReader(raw, "special_category", site, diags)
    applies = reader.boolean("applies")
    ground = reader.string("ground")
    if reader.failed:
        return None
    try:
        return SpecialCategory(applies=applies, ground=ground)
    except ValueError as exc:
        reader.fail(str(exc))
        return None


def _parse_profiling(raw: object, site: SitePath, diags: list[Diagnostic]) -> Profiling | None:
    if not isinstance(raw, Mapping):
        diags.append(diag.error("invalid-vocabulary", "profiling must be a mapping", site=site))
        return None
    reader = _BlockReader(raw, "profiling", site, diags)
    performed = reader.boolean("performed")
    explanation = reader.string("explanation")
    if reader.failed:
        return None
    try:
        return Profiling(performed=performed, explanation=explanation)
    except ValueError as exc:
        reader.fail(str(exc))
        return None


def _parse_purpose(raw: object, site: SitePath, diags: list[Diagnostic]) -> Purpose | None:
    if not isinstance(raw, Mapping):
        diags.append(diag.error("invalid-vocabulary", "purpose must be a mapping", site=site))
        return None
    reader = _BlockReader(raw, "purposes", site, diags)
    purpose_id = reader.string("id", required=True)
    description = reader.string("description") or ""
    allowed = reader.string_list("allowed_utilizers")
    excluded = reader.string_list("excluded_utilizers")
    if reader.failed or purpose_id is None:
        return None
    try:
        return Purpose(
            id=purpose_id,
            description=description,
            allowed_utilizers=allowed,
            excluded_utilizers=excluded,
        )
    except ValueError as exc:
        reader.fail(str(exc))
        return None


def _parse_source(raw: object, site: SitePath, diags: list[Diagnostic]) -> Source | None:
    if not isinstance(raw, Mapping):
        diags.append(diag.error("invalid-vocabulary", "source must be a mapping", site=site))
        return None
    reader = _BlockReader(raw, "source", site, diags)
    origin = reader.string("origin", required=True)
    description = reader.string("description")
    if reader.failed or origin is None:
        return None
    try:
        return Source(origin=SourceOrigin(origin), description=description)
    except ValueError:
        allowed = ", ".join(o.value for o in SourceOrigin)
        reader.fail(f"origin must be one of: {allowed}")
        return None


def _parse_data_category(raw: object, site: SitePath, diags: list[Diagnostic]) -> DataCategory | None:
    if isinstance(raw, str):
        if not raw:
            diags.append(
                diag.error("invalid-vocabulary", "data_categories: name must not be empty", site=site)
            )
            return None
        return DataCategory(name=raw)
    if not isinstance(raw, Mapping):
        diags.append(
            diag.error(
                "invalid-vocabulary", "data category must be a mapping or a name string", site=site
            )
        )
        return None
    reader = _BlockReader(raw, "data_categories", site, diags)
    name = reader.string("name", required=True)
    description = reader.string("description")
    if reader.failed or name is None:
        return None
    return DataCategory(name=name, description=description)


_SINGLE_PARSERS = {
    Kind.RETENTION_TIME: _parse_retention,
    Kind.THIRD_COUNTRY_TRANSFER: _parse_transfer,
    Kind.SPECIAL_CATEGORY: _parse_special,
    Kind.PROFILING: _parse_profiling,
    Kind.SOURCE: _parse_source,
}

_LIST_PARSERS = {
    Kind.RECIPIENT: _parse_recipient,
    Kind.PURPOSE: _parse_purpose,
    Kind.DATA_CATEGORY: _parse_data_category,
}


def parse_property_block(
    raw: object, site: SitePath
) -> tuple[list[TransparencyProperty], list[Diagnostic]]:
    """Parse the value of one ``x-tira`` extension into typed properties.

    Booleans and nulls are pure personal-data markers and yield no properties.
    Unknown vocabulary keys warn; malformed elements produce error diagnostics
    naming the site, never exceptions.
    """
    diags: list[Diagnostic] = []
    if raw is None or isinstance(raw, bool):
        return [], diags
    if not isinstance(raw, Mapping):
        diags.append(
            diag.warning(
                "unrecognized-extension-form",
                f"{EXTENSION_KEY} value of type {type(raw).__name__} marks personal data "
                "but carries no vocabulary",
                site=site,
            )
        )
        return [], diags

    properties: list[TransparencyProperty] = []
    seen_purpose_ids: set[str] = set()
    for key, value in raw.items():
        kind = BLOCK_KEYS.get(key) if isinstance(key, str) else None
        if kind is None:
            diags.append(
                diag.warning(
                    "unknown-vocabulary-key", f"unknown vocabulary key {key!r}", site=site
                )
            )
            continue
        if kind in LIST_VALUED_KINDS:
            if not isinstance(value, list):
                diags.append(
                    diag.error(
                        "invalid-vocabulary", f"{key} must be a list of elements", site=site
                    )
                )
                continue
            for entry in value:
                parsed = _LIST_PARSERS[kind](entry, site, diags)
                if parsed is None:
                    continue
                if kind is Kind.PURPOSE:
                    if parsed.id in seen_purpose_ids:
                        diags.append(
                            diag.error(
                                "invalid-vocabulary",
                                f"purposes: duplicate id {parsed.id!r} in one block",
                                site=site,
                            )
                        )
                        continue
                    seen_purpose_ids.add(parsed.id)
                properties.append(TransparencyProperty(kind, parsed, site))
        else:
            parsed = _SINGLE_PARSERS[kind](value, site, diags)
            if parsed is not None:
                properties.append(TransparencyProperty(kind, parsed, site))
    return properties, diags


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def value_to_dict(kind: Kind, value: object) -> dict:
    """One vocabulary record as its extension-grammar mapping (no nulls)."""
    if kind is Kind.RETENTION_TIME:
        assert isinstance(value, RetentionTime)
        out: dict = {}
        if value.period is not None:
            out.update(value.period.to_dict())
        if value.volatile:
            out["volatile"] = True
        if value.no_limit:
            out["no_limit"] = True
        if value.periodic_review:
            out["periodic_review"] = True
        if value.review_frequency is not None:
            out["review_frequency"] = value.review_frequency.to_dict()
        return out
    if kind is Kind.RECIPIENT:
        assert isinstance(value, Recipient)
        out = {"name": value.name}
        if value.category is not None:
            out["category"] = value.category
        if value.third_party:
            out["third_party"] = True
        if value.country is not None:
            out["country"] = value.country
        return out
    if kind is Kind.THIRD_COUNTRY_TRANSFER:
        assert isinstance(value, ThirdCountryTransfer)
        out = {"occurs": value.occurs}
        if value.countries:
            out["countries"] = list(value.countries)
        if value.safeguards_note is not None:
            out["safeguards_note"] = value.safeguards_note
        return out
    if kind is Kind.SPECIAL_CATEGORY:
        assert isinstance(value, SpecialCategory)
        out = {"applies": value.applies}
        if value.ground is not None:
            out["ground"] = value.ground
        return out
    if kind is Kind.PROFILING:
        assert isinstance(value, Profiling)
        out = {"performed": value.performed}
        if value.explanation is not None:
            out["explanation"] = value.explanation
        return out
    if kind is Kind.PURPOSE:
        assert isinstance(value, Purpose)
        out = {"id": value.id}
        if value.description:
            out["description"] = value.description
        if value.allowed_utilizers:
            out["allowed_utilizers"] = list(value.allowed_utilizers)
        if value.excluded_utilizers:
            out["excluded_utilizers"] = list(value.excluded_utilizers)
        return out
    if kind is Kind.SOURCE:
        assert isinstance(value, Source)
        out = {"origin": value.origin.value}
        if value.description is not None:
            out["description"] = value.description
        return out
    if kind is Kind.DATA_CATEGORY:
        assert isinstance(value, DataCategory)
        out = {"name": value.name}
        if value.description is not None:
            out["description"] = value.description
        return out
    raise ValueError(f"unknown kind {kind!r}")  # pragma: no cover


def serialize_property(prop: TransparencyProperty) -> dict:
    """An extension-map fragment that parses back to exactly this property."""
    fragment = value_to_dict(prop.kind, prop.value)
    key = _KIND_TO_KEY[prop.kind]
    if prop.kind in LIST_VALUED_KINDS:
        return {key: [fragment]}
    return {key: fragment}


def serialize_properties(props: list[TransparencyProperty]) -> dict:
    """Merge property fragments into one extension block (lists concatenate)."""
    out: dict = {}
    for prop in props:
        fragment = serialize_property(prop)
        for key, value in fragment.items():
            if key in out and isinstance(out[key], list):
                out[key].extend(value)
            else:
                out[key] = value
    return out
