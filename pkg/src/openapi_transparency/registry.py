"""Service registry with append-only spec history and transparency reports.

State is a set of registered services, each with a dense, append-only list of
content-addressed spec versions, plus the data-flow link set and the
system-wide information record. Everything a report contains is recomputable
from the stored head spec texts, the links, and the system-wide record.

Two storage backends implement the same contract: an in-memory store for
tests and embedding, and a directory store that keeps one JSON metadata file
per service and content-addressed spec blobs on disk.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import aggregation
from .aggregation import AggregatedDatum, FlowEdge, FlowGraph
from .diagnostics import Diagnostic
from .openapi_model import OpenApiDocument, canonical_text, content_hash, parse_document
from .resolver import EffectiveProperties, PdIndicator, extract_pd_indicators, resolve_effective
from .vocabulary import Kind, serialize_property, value_to_dict

SOURCE_MANUAL = "manual_upload"
SOURCE_WEBHOOK = "webhook"

ORIGINS = ("internal", "external")

LEGAL_BASES = (
    "consent",
    "contract",
    "legal_obligation",
    "vital_interest",
    "public_task",
    "legitimate_interest",
)

UNSPECIFIED = "unspecified"


class RegistryError(Exception):
    code = "registry-error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConflictError(RegistryError):
    code = "conflict"


class NotFoundError(RegistryError):
    code = "not-found"


class SpecValidationError(RegistryError):
    code = "invalid-spec"

    def __init__(self, message: str, diagnostics: list[Diagnostic]):
        super().__init__(message)
        self.diagnostics = diagnostics


class FieldValidationError(RegistryError):
    code = "invalid-field"

    def __init__(self, field_name: str, message: str):
        super().__init__(message)
        self.field = field_name


def slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    if not slug:
        raise FieldValidationError("name", "name must contain at least one alphanumeric character")
    return slug


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class SpecVersion:
    service_id: str
    version_number: int
    content_hash: str
    received_at: str
    source: str

    def to_dict(self) -> dict:
        return {
            "version_number": self.version_number,
            "content_hash": self.content_hash,
            "received_at": self.received_at,
            "source": self.source,
        }


@dataclass
class ServiceRecord:
    id: str
    name: str
    origin: str = "internal"
    repo_url: str | None = None
    spec_path: str | None = None
    versions: list[SpecVersion] = field(default_factory=list)

    @property
    def current_version(self) -> int | None:
        return self.versions[-1].version_number if self.versions else None

    @property
    def head_hash(self) -> str | None:
        return self.versions[-1].content_hash if self.versions else None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "origin": self.origin,
            "repo_url": self.repo_url,
            "spec_path": self.spec_path,
            "versions": [v.to_dict() for v in self.versions],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ServiceRecord":
        record = cls(
            id=data["id"],
            name=data["name"],
            origin=data.get("origin", "internal"),
            repo_url=data.get("repo_url"),
            spec_path=data.get("spec_path"),
        )
        for v in data.get("versions", []):
            record.versions.append(
                SpecVersion(
                    service_id=record.id,
                    version_number=v["version_number"],
                    content_hash=v["content_hash"],
                    received_at=v["received_at"],
                    source=v["source"],
                )
            )
        return record


@dataclass(frozen=True)
class PropertyChange:
    site: str
    kind: str
    before: object  # list of extension fragments, or None
    after: object

    def to_dict(self) -> dict:
        return {"site": self.site, "kind": self.kind, "before": self.before, "after": self.after}


@dataclass(frozen=True)
class SpecDiff:
    indicators_added: tuple[str, ...] = ()
    indicators_removed: tuple[str, ...] = ()
    properties_changed: tuple[PropertyChange, ...] = ()

    @property
    def empty(self) -> bool:
        return not (self.indicators_added or self.indicators_removed or self.properties_changed)

    def to_dict(self) -> dict:
        return {
            "indicators_added": list(self.indicators_added),
            "indicators_removed": list(self.indicators_removed),
            "properties_changed": [c.to_dict() for c in self.properties_changed],
        }


@dataclass(frozen=True)
class Contact:
    name: str = ""
    email: str = ""
    phone: str = ""
    address: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "email": self.email, "phone": self.phone, "address": self.address}

    @classmethod
    def from_dict(cls, data: object, field_name: str) -> "Contact":
        if data is None:
            return cls()
        if not isinstance(data, dict):
            raise FieldValidationError(field_name, "contact must be a mapping")
        out = {}
        for key in ("name", "email", "phone", "address"):
            value = data.get(key, "")
            if not isinstance(value, str):
                raise FieldValidationError(f"{field_name}.{key}", "must be a string")
            out[key] = value
        return cls(**out)

    @property
    def empty(self) -> bool:
        return not (self.name or self.email or self.phone or self.address)


@dataclass(frozen=True)
class LegalBasis:
    basis: str
    note: str = ""

    def to_dict(self) -> dict:
        return {"basis": self.basis, "note": self.note}


@dataclass(frozen=True)
class SystemWideInfo:
    """The system-level transparency record: contacts, legal bases, and rights."""

    controller_contact: Contact = Contact()
    dpo_contact: Contact = Contact()
    third_country_safeguards: str | None = None
    legal_bases: tuple[LegalBasis, ...] = ()
    legitimate_interest_note: str | None = None
    right_rectification_deletion_portability: bool = False
    right_withdraw_consent: bool = False
    right_lodge_complaint: bool = False
    provision_mandatory: bool = False
    consequences_note: str = ""
    data_subject_categories: tuple[str, ...] = ()

    def validate(self) -> None:
        for lb in self.legal_bases:
            if lb.basis not in LEGAL_BASES:
                raise FieldValidationError(
                    "legal_bases", f"unknown legal basis {lb.basis!r}; expected one of {LEGAL_BASES}"
                )
        if self.legitimate_interest_note and not any(
            lb.basis == "legitimate_interest" for lb in self.legal_bases
        ):
            raise FieldValidationError(
                "legitimate_interest_note",
                "a legitimate-interest note requires legitimate_interest among the legal bases",
            )
        if self.provision_mandatory and not self.consequences_note:
            raise FieldValidationError(
                "consequences_note",
                "mandatory provision requires a note on the consequences of non-provision",
            )

    @classmethod
    def from_dict(cls, data: dict) -> "SystemWideInfo":
        if not isinstance(data, dict):
            raise FieldValidationError("system_info", "system information must be a mapping")

        def _bool(key: str) -> bool:
            value = data.get(key, False)
            if not isinstance(value, bool):
                raise FieldValidationError(key, "must be a boolean")
            return value

        def _opt_str(key: str) -> str | None:
            value = data.get(key)
            if value is not None and not isinstance(value, str):
                raise FieldValidationError(key, "must be a string")
            return value

        bases_raw = data.get("legal_bases", [])
        if not isinstance(bases_raw, list):
            raise FieldValidationError("legal_bases", "must be a list")
        bases = []
        for entry in bases_raw:
            if not isinstance(entry, dict) or not isinstance(entry.get("basis"), str):
                raise FieldValidationError("legal_bases", "each entry needs a 'basis' string")
            bases.append(LegalBasis(basis=entry["basis"], note=str(entry.get("note", ""))))

        categories_raw = data.get("data_subject_categories", [])
        if not isinstance(categories_raw, list) or not all(
            isinstance(c, str) for c in categories_raw
        ):
            raise FieldValidationError("data_subject_categories", "must be a list of strings")

        info = cls(
            controller_contact=Contact.from_dict(data.get("controller_contact"), "controller_contact"),
            dpo_contact=Contact.from_dict(data.get("dpo_contact"), "dpo_contact"),
            third_country_safeguards=_opt_str("third_country_safeguards"),
            legal_bases=tuple(bases),
            legitimate_interest_note=_opt_str("legitimate_interest_note"),
            right_rectification_deletion_portability=_bool("right_rectification_deletion_portability"),
            right_withdraw_consent=_bool("right_withdraw_consent"),
            right_lodge_complaint=_bool("right_lodge_complaint"),
            provision_mandatory=_bool("provision_mandatory"),
            consequences_note=str(data.get("consequences_note", "")),
            data_subject_categories=tuple(categories_raw),
        )
        info.validate()
        return info

    def to_dict(self) -> dict:
        return {
            "controller_contact": self.controller_contact.to_dict(),
            "dpo_contact": self.dpo_contact.to_dict(),
            "third_country_safeguards": self.third_country_safeguards,
            "legal_bases": [lb.to_dict() for lb in self.legal_bases],
            "legitimate_interest_note": self.legitimate_interest_note,
            "right_rectification_deletion_portability": self.right_rectification_deletion_portability,
            "right_withdraw_consent": self.right_withdraw_consent,
            "right_lodge_complaint": self.right_lodge_complaint,
            "provision_mandatory": self.provision_mandatory,
            "consequences_note": self.consequences_note,
            "data_subject_categories": list(self.data_subject_categories),
        }

    def to_report_dict(self) -> dict:
        """Report view: every system-level row present, unset ones marked."""
        return {
            "controller_contact": self.controller_contact.to_dict()
            if not self.controller_contact.empty
            else UNSPECIFIED,
            "dpo_contact": self.dpo_contact.to_dict() if not self.dpo_contact.empty else UNSPECIFIED,
            "third_country_safeguards": self.third_country_safeguards or UNSPECIFIED,
            "legal_bases": [lb.to_dict() for lb in self.legal_bases] or UNSPECIFIED,
            "legitimate_interest_note": self.legitimate_interest_note or UNSPECIFIED,
            "right_rectification_deletion_portability": self.right_rectification_deletion_portability,
            "right_withdraw_consent": self.right_withdraw_consent,
            "right_lodge_complaint": self.right_lodge_complaint,
            "provision_mandatory": self.provision_mandatory,
            "consequences_note": self.consequences_note or UNSPECIFIED,
            "data_subject_categories": list(self.data_subject_categories) or UNSPECIFIED,
        }


# ---------------------------------------------------------------------------
# Storage backends
# ---------------------------------------------------------------------------


class InMemoryStore:
    """Storage contract kept entirely in process memory."""

    def __init__(self) -> None:
        self._blobs: dict[str, str] = {}
        self._services: dict[str, dict] = {}
        self._links: list[dict] = []
        self._system_info: dict | None = None
        self._aliases: dict[str, str] = {}

    # services
    def load_services(self) -> list[dict]:
        return [json.loads(json.dumps(s)) for s in self._services.values()]

    def save_service(self, record: dict) -> None:
        self._services[record["id"]] = json.loads(json.dumps(record))

    # blobs
    def load_blob(self, digest: str) -> str:
        return self._blobs[digest]

    def save_blob(self, digest: str, text: str) -> None:
        self._blobs.setdefault(digest, text)

    # links / system info / aliases
    def load_links(self) -> list[dict]:
        return json.loads(json.dumps(self._links))

    def save_links(self, edges: list[dict]) -> None:
        self._links = json.loads(json.dumps(edges))

    def load_system_info(self) -> dict | None:
        return json.loads(json.dumps(self._system_info)) if self._system_info else None

    def save_system_info(self, info: dict) -> None:
        self._system_info = json.loads(json.dumps(info))

    def load_aliases(self) -> dict[str, str]:
        return dict(self._aliases)

    def save_aliases(self, aliases: dict[str, str]) -> None:
        self._aliases = dict(aliases)


class DirectoryStore:
    """Inspectable on-disk store: JSON metadata plus content-addressed blobs."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        (self.root / "services").mkdir(parents=True, exist_ok=True)
        (self.root / "blobs").mkdir(parents=True, exist_ok=True)

    def load_services(self) -> list[dict]:
        records = []
        for path in sorted((self.root / "services").glob("*.json")):
            records.append(json.loads(path.read_text(encoding="utf-8")))
        return records

    def save_service(self, record: dict) -> None:
        path = self.root / "services" / f"{record['id']}.json"
        path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    def load_blob(self, digest: str) -> str:
        return (self.root / "blobs" / digest).read_text(encoding="utf-8")

    def save_blob(self, digest: str, text: str) -> None:
        path = self.root / "blobs" / digest
        if not path.exists():
            path.write_text(text, encoding="utf-8")

    def load_links(self) -> list[dict]:
        path = self.root / "links.json"
        if not path.exists():
            return []
        return json.loads(path.read_text(encoding="utf-8")).get("edges", [])

    def save_links(self, edges: list[dict]) -> None:
        (self.root / "links.json").write_text(
            json.dumps({"edges": edges}, indent=2) + "\n", encoding="utf-8"
        )

    def load_system_info(self) -> dict | None:
        path = self.root / "system_info.json"
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def save_system_info(self, info: dict) -> None:
        (self.root / "system_info.json").write_text(
            json.dumps(info, indent=2) + "\n", encoding="utf-8"
        )

    def load_aliases(self) -> dict[str, str]:
        path = self.root / "aliases.json"
        if not path.exists():
            return {}
        return json.loads(path.read_text(encoding="utf-8"))

    def save_aliases(self, aliases: dict[str, str]) -> None:
        (self.root / "aliases.json").write_text(
            json.dumps(aliases, indent=2) + "\n", encoding="utf-8"
        )


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


@dataclass
class _Analyzed:
    document: OpenApiDocument
    indicators: list[PdIndicator]
    effectives: list[EffectiveProperties]


class Registry:
    """Thread-safe registry over a storage backend.

    Mutations are serialized by one lock, which totally orders the writes per
    service; report generation reads a consistent snapshot under the same
    lock and computes outside it.
    """

    def __init__(self, store: InMemoryStore | DirectoryStore | None = None) -> None:
        self.store = store if store is not None else InMemoryStore()
        self._lock = threading.RLock()
        self._services: dict[str, ServiceRecord] = {}
        self._links: list[FlowEdge] = []
        self._system_info: SystemWideInfo | None = None
        self._aliases: dict[str, str] = {}
        self._analysis_cache: dict[str, _Analyzed] = {}
        self._load()

    def _load(self) -> None:
        for raw in self.store.load_services():
            record = ServiceRecord.from_dict(raw)
            self._services[record.id] = record
        self._links = [
            FlowEdge(e["sender"], e["receiver"], tuple(e.get("datum_names", ())))
            for e in self.store.load_links()
        ]
        info_raw = self.store.load_system_info()
        if info_raw is not None:
            self._system_info = SystemWideInfo.from_dict(info_raw)
        self._aliases = self.store.load_aliases()

    # -- spec handling ------------------------------------------------------

    def _parse_or_raise(self, spec_text: str) -> OpenApiDocument:
        result = parse_document(spec_text)
        if result.document is None:
            raise SpecValidationError("specification does not parse", result.diagnostics)
        return result.document

    def _analyze(self, digest: str, canonical: str) -> _Analyzed:
        cached = self._analysis_cache.get(digest)
        if cached is not None:
            return cached
        document = parse_document(canonical).document
        if document is None:  # pragma: no cover - canonical text always parses
            raise SpecValidationError("stored specification does not parse", [])
        indicators, _ = extract_pd_indicators(document)
        effectives = [resolve_effective(document, ind) for ind in indicators]
        analyzed = _Analyzed(document, indicators, effectives)
        self._analysis_cache[digest] = analyzed
        return analyzed

    # -- service operations --------------------------------------------------

    def register_service(
        self,
        name: str,
        spec_text: str,
        origin: str = "internal",
        repo_url: str | None = None,
        spec_path: str | None = None,
        source: str = SOURCE_MANUAL,
    ) -> tuple[ServiceRecord, SpecVersion]:
        if not name or not name.strip():
            raise FieldValidationError("name", "name must not be empty")
        if origin not in ORIGINS:
            raise FieldValidationError("origin", f"origin must be one of {ORIGINS}")
        document = self._parse_or_raise(spec_text)
        canonical = canonical_text(document)
        digest = content_hash(document)
        with self._lock:
            service_id = slugify(name)
            if service_id in self._services:
                raise ConflictError(f"service {service_id!r} is already registered")
            record = ServiceRecord(
                id=service_id,
                name=name.strip(),
                origin=origin,
                repo_url=repo_url,
                spec_path=spec_path,
            )
            version = SpecVersion(
                service_id=service_id,
                version_number=1,
                content_hash=digest,
                received_at=_now(),
                source=source,
            )
            record.versions.append(version)
            self.store.save_blob(digest, canonical)
            self._services[service_id] = record
            self.store.save_service(record.to_dict())
            self._analyze(digest, canonical)
            return record, version

    def add_spec_version(
        self, service_id: str, spec_text: str, source: str = SOURCE_MANUAL
    ) -> tuple[SpecVersion, bool]:
        """Append a new version; identical content is a no-op.

        Returns the head version and whether a new one was appended.
        """
        document = self._parse_or_raise(spec_text)
        canonical = canonical_text(document)
        digest = content_hash(document)
        with self._lock:
            record = self._get(service_id)
            head = record.versions[-1]
            if head.content_hash == digest:
                return head, False
            version = SpecVersion(
                service_id=service_id,
                version_number=head.version_number + 1,
                content_hash=digest,
                received_at=_now(),
                source=source,
            )
            record.versions.append(version)
            self.store.save_blob(digest, canonical)
            self.store.save_service(record.to_dict())
            self._analyze(digest, canonical)
            return version, True

    def _get(self, service_id: str) -> ServiceRecord:
        record = self._services.get(service_id)
        if record is None:
            raise NotFoundError(f"unknown service {service_id!r}")
        return record

    def get_service(self, service_id: str) -> ServiceRecord:
        with self._lock:
            return self._get(service_id)

    def list_services(self) -> list[ServiceRecord]:
        with self._lock:
            return sorted(self._services.values(), key=lambda r: r.id)

    def find_by_repo(self, repo_url: str, spec_path: str | None = None) -> ServiceRecord | None:
        with self._lock:
            for record in self._services.values():
                if record.repo_url == repo_url and (
                    spec_path is None or record.spec_path == spec_path
                ):
                    return record
        return None

    def spec_text(self, service_id: str, version_number: int) -> str:
        with self._lock:
            record = self._get(service_id)
            for version in record.versions:
                if version.version_number == version_number:
                    return self.store.load_blob(version.content_hash)
        raise NotFoundError(f"service {service_id!r} has no version {version_number}")

    def processes_personal_data(self, record: ServiceRecord) -> bool:
        if not record.versions:
            return False
        digest = record.versions[-1].content_hash
        analyzed = self._analyze(digest, self.store.load_blob(digest))
        return bool(analyzed.indicators)

    def indicators(self, service_id: str) -> list[PdIndicator]:
        with self._lock:
            record = self._get(service_id)
            digest = record.versions[-1].content_hash
            return list(self._analyze(digest, self.store.load_blob(digest)).indicators)

    def effective_properties(self, service_id: str) -> list[EffectiveProperties]:
        with self._lock:
            record = self._get(service_id)
            digest = record.versions[-1].content_hash
            return list(self._analyze(digest, self.store.load_blob(digest)).effectives)

    # -- diffing --------------------------------------------------------------

    def diff_versions(self, service_id: str, a: int, b: int) -> SpecDiff:
        """Semantic diff between two stored versions (indicators + properties)."""
        with self._lock:
            text_a = self.spec_text(service_id, a)
            text_b = self.spec_text(service_id, b)
        return diff_spec_texts(text_a, text_b)

    # -- links / flow ----------------------------------------------------------

    def set_links(self, edges: list[FlowEdge]) -> FlowGraph:
        with self._lock:
            graph = aggregation.build_flow_graph(self._services.keys(), edges)
            self._links = list(graph.edges)
            self.store.save_links(
                [
                    {"sender": e.sender, "receiver": e.receiver, "datum_names": list(e.datum_names)}
                    for e in graph.edges
                ]
            )
            return graph

    def get_flow(self) -> tuple[FlowGraph, set[tuple[str, str]]]:
        with self._lock:
            graph = aggregation.build_flow_graph(self._services.keys(), self._links)
        return graph, aggregation.flow_closure(graph)

    # -- system info -------------------------------------------------------------

    def set_system_info(self, info: SystemWideInfo) -> SystemWideInfo:
        info.validate()
        with self._lock:
            self._system_info = info
            self.store.save_system_info(info.to_dict())
            return info

    def get_system_info(self) -> SystemWideInfo:
        with self._lock:
            return self._system_info if self._system_info is not None else SystemWideInfo()

    def set_aliases(self, aliases: dict[str, str]) -> None:
        with self._lock:
            self._aliases = dict(aliases)
            self.store.save_aliases(self._aliases)

    # -- reporting ----------------------------------------------------------------

    def _service_corpus(self) -> list[tuple[str, list[EffectiveProperties]]]:
        corpus = []
        for record in sorted(self._services.values(), key=lambda r: r.id):
            digest = record.versions[-1].content_hash
            analyzed = self._analyze(digest, self.store.load_blob(digest))
            corpus.append((record.id, analyzed.effectives))
        return corpus

    def aggregated_data(self) -> list[AggregatedDatum]:
        with self._lock:
            corpus = self._service_corpus()
            aliases = dict(self._aliases)
        return aggregation.aggregate(corpus, aliases=aliases)

    def purposes(self) -> dict:
        with self._lock:
            corpus = self._service_corpus()
        return aggregation.purpose_index(corpus)

    def recipients(self) -> dict:
        with self._lock:
            corpus = self._service_corpus()
        return aggregation.recipient_index(corpus)

    def generate_report(self) -> dict:
        """The full transparency report over the current head versions."""
        with self._lock:
            corpus = self._service_corpus()
            aliases = dict(self._aliases)
            system_info = self._system_info if self._system_info is not None else SystemWideInfo()
            # Summaries carry only transparency-relevant fields; repository
            # coordinates stay on the service detail so reports are identical
            # however the same specs were registered.
            services = [
                {
                    "id": record.id,
                    "name": record.name,
                    "origin": record.origin,
                    "current_version": record.current_version,
                    "processes_personal_data": self.processes_personal_data(record),
                }
                for record in sorted(self._services.values(), key=lambda r: r.id)
            ]
            graph = aggregation.build_flow_graph(self._services.keys(), self._links)

        datums = aggregation.aggregate(corpus, aliases=aliases)
        closure = aggregation.flow_closure(graph)
        return {
            "generated_at": _now(),
            "system": system_info.to_report_dict(),
            "services": services,
            "data": [datum_to_dict(d) for d in datums],
            "purposes": aggregation.purpose_index(corpus),
            "recipients": aggregation.recipient_index(corpus),
            "flow": {
                "nodes": list(graph.nodes),
                "edges": [
                    {"sender": e.sender, "receiver": e.receiver, "datum_names": list(e.datum_names)}
                    for e in graph.edges
                ],
                "closure": [list(pair) for pair in sorted(closure)],
            },
        }


def datum_to_dict(datum: AggregatedDatum) -> dict:
    """JSON view of an aggregated datum with every service-level row present."""
    merged: dict = {}
    for kind in Kind:
        if kind in datum.merged:
            merged[kind.value] = aggregation.merged_to_json(kind, datum.merged[kind])
        else:
            merged[kind.value] = UNSPECIFIED
    return {
        "datum_name": datum.datum_name,
        "processing_services": list(datum.processing_services),
        "merged": merged,
        "notes": list(datum.notes),
        "contributions": [
            {
                "service": c.service_id,
                "site": c.site.text(),
                "kind": c.prop.kind.value,
                "value": serialize_property(c.prop),
            }
            for c in datum.contributions
        ],
    }


def _effective_fragments(effective: EffectiveProperties) -> dict[str, list]:
    """kind -> serialized winning fragments, for diffing."""
    out: dict[str, list] = {}
    for kind, props in effective.by_kind.items():
        out[kind.value] = sorted(
            (value_to_dict(kind, p.value) for p in props), key=lambda d: json.dumps(d, sort_keys=True)
        )
    return out


def diff_spec_texts(text_a: str, text_b: str) -> SpecDiff:
    """Semantic diff of two specification texts.

    The diff is computed on extracted indicators and their effective
    properties, not on raw lines; two texts with identical extraction results
    produce an empty diff.
    """
    result_a = parse_document(text_a)
    result_b = parse_document(text_b)
    doc_a, doc_b = result_a.document, result_b.document
    if doc_a is None or doc_b is None:
        raise SpecValidationError(
            "both specifications must parse to be diffed",
            (result_a.diagnostics if doc_a is None else [])
            + (result_b.diagnostics if doc_b is None else []),
        )

    def extraction(doc: OpenApiDocument) -> dict[str, dict[str, list]]:
        indicators, _ = extract_pd_indicators(doc)
        return {
            ind.site.text(): _effective_fragments(resolve_effective(doc, ind))
            for ind in indicators
        }

    before = extraction(doc_a)
    after = extraction(doc_b)

    added = tuple(sorted(set(after) - set(before)))
    removed = tuple(sorted(set(before) - set(after)))
    changes: list[PropertyChange] = []
    for site in sorted(set(before) & set(after)):
        kinds = [k.value for k in Kind if k.value in before[site] or k.value in after[site]]
        for kind in kinds:
            fragment_before = before[site].get(kind)
            fragment_after = after[site].get(kind)
            if fragment_before != fragment_after:
                changes.append(PropertyChange(site, kind, fragment_before, fragment_after))
    return SpecDiff(
        indicators_added=added,
        indicators_removed=removed,
        properties_changed=tuple(changes),
    )
