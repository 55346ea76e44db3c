"""Privacy transparency toolchain for OpenAPI-described service architectures.

Parse ``x-tira``-annotated OpenAPI 3 documents, resolve personal-data
indicators with inherited transparency properties, aggregate them across
services, and serve the combined view from a registry hub fed by uploads or
CI push events.
"""

from .aggregation import (
    AggregatedDatum,
    FlowEdge,
    FlowGraph,
    aggregate,
    flow_closure,
    merge_kind,
    merge_retention,
    purpose_index,
    recipient_index,
)
from .diagnostics import Diagnostic, Severity
from .openapi_model import OpenApiDocument, annotation_sites, canonical_text, parse_document
from .registry import (
    DirectoryStore,
    InMemoryStore,
    Registry,
    ServiceRecord,
    SpecDiff,
    SpecVersion,
    SystemWideInfo,
    diff_spec_texts,
)
from .resolver import (
    EffectiveProperties,
    PdIndicator,
    extract_pd_indicators,
    resolve_effective,
    validate_service,
)
from .sites import SitePath
from .vocabulary import (
    DataCategory,
    Duration,
    Kind,
    Profiling,
    Purpose,
    Recipient,
    RetentionTime,
    Source,
    SpecialCategory,
    ThirdCountryTransfer,
    TransparencyProperty,
    parse_property_block,
    serialize_property,
)

__version__ = "0.1.0"

__all__ = [
    "AggregatedDatum",
    "DataCategory",
    "Diagnostic",
    "DirectoryStore",
    "Duration",
    "EffectiveProperties",
    "FlowEdge",
    "FlowGraph",
    "InMemoryStore",
    "Kind",
    "OpenApiDocument",
    "PdIndicator",
    "Profiling",
    "Purpose",
    "Recipient",
    "Registry",
    "RetentionTime",
    "ServiceRecord",
    "Severity",
    "SitePath",
    "Source",
    "SpecDiff",
    "SpecVersion",
    "SpecialCategory",
    "SystemWideInfo",
    "ThirdCountryTransfer",
    "TransparencyProperty",
    "aggregate",
    "annotation_sites",
    "canonical_text",
    "diff_spec_texts",
    "extract_pd_indicators",
    "flow_closure",
    "merge_kind",
    "merge_retention",
    "parse_document",
    "parse_property_block",
    "purpose_index",
    "recipient_index",
    "resolve_effective",
    "serialize_property",
    "validate_service",
]
