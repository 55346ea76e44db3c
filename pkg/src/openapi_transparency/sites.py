"""Stable addresses for annotation sites inside an OpenAPI document.

A :class:`SitePath` names one node of the document tree (the document root, a
path item, an operation, a parameter, a request body, a response, a schema, a
schema property, or an array item slot). Paths serialize to a canonical
slash-joined text form that round-trips, so they can be stored, diffed, and
copied as reference links.
"""

from __future__ import annotations

from dataclasses import dataclass

DOCUMENT = "document"
PATH = "path"
OPERATION = "operation"
PARAMETER = "parameter"
REQUEST_BODY = "requestBody"
RESPONSE = "response"
SCHEMA = "schema"
PROPERTY = "property"
ITEMS = "items"

SEGMENT_KINDS = frozenset(
    {DOCUMENT, PATH, OPERATION, PARAMETER, REQUEST_BODY, RESPONSE, SCHEMA, PROPERTY, ITEMS}
)

# Segment kinds that never carry a value in canonical text form.
_VALUELESS = frozenset({DOCUMENT, REQUEST_BODY, ITEMS})


def _escape(value: str) -> str:
    # Only the separator characters need escaping; % must go first.
    return value.replace("%", "%25").replace("/", "%2F").replace(":", "%3A")


def _unescape(value: str) -> str:
    return value.replace("%3A", ":").replace("%2F", "/").replace("%25", "%")


@dataclass(frozen=True)
class Segment:
    kind: str
    value: str = ""

    def __post_init__(self) -> None:
        if self.kind not in SEGMENT_KINDS:
            raise ValueError(f"unknown site segment kind: {self.kind!r}")

    def text(self) -> str:
        if not self.value:
            return self.kind
        return f"{self.kind}:{_escape(self.value)}"


@dataclass(frozen=True)
class SitePath:
    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("a site path needs at least one segment")
        if self.segments[0].kind != DOCUMENT:
            raise ValueError("site paths are rooted at the document segment")

    @classmethod
    def root(cls) -> SitePath:
        return cls((Segment(DOCUMENT),))

    @classmethod
    def parse(cls, text: str) -> SitePath:
        segments = []
        for part in text.split("/"):
            kind, sep, raw = part.partition(":")
            segments.append(Segment(kind, _unescape(raw) if sep else ""))
        return cls(tuple(segments))

    def child(self, kind: str, value: str = "") -> SitePath:
        return SitePath(self.segments + (Segment(kind, value),))

    def parent(self) -> SitePath | None:
        if len(self.segments) == 1:
            return None
        return SitePath(self.segments[:-1])

    @property
    def is_root(self) -> bool:
        return len(self.segments) == 1

    @property
    def leaf(self) -> Segment:
        return self.segments[-1]

    def text(self) -> str:
        return "/".join(segment.text() for segment in self.segments)

    def is_prefix_of(self, other: SitePath) -> bool:
        return self.segments == other.segments[: len(self.segments)]

    def chain(self) -> list[SitePath]:
        """All prefixes from the document root down to this site, inclusive."""
        return [SitePath(self.segments[:n]) for n in range(1, len(self.segments) + 1)]

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.text()
