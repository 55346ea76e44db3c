"""OpenAPI 3 parsing into an addressable tree of annotation sites.

Only the document parts relevant to transparency annotations are modeled:
paths, operations, parameters, request bodies, responses, and schemas. All
other keys are carried opaquely in the raw tree and survive canonical
re-serialization. Every ``x-*`` key is preserved verbatim in the extension
map of the node that declared it.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import yaml

from . import diagnostics as diag
from .diagnostics import Diagnostic
from .sites import (
    DOCUMENT,
    ITEMS,
    OPERATION,
    PARAMETER,
    PATH,
    PROPERTY,
    REQUEST_BODY,
    RESPONSE,
    SCHEMA,
    SitePath,
)

HTTP_METHODS = ("get", "put", "post", "delete", "options", "head", "patch", "trace")

_LOCAL_SCHEMA_REF = "#/components/schemas/"

# Schema node kinds. "ref" marks a reference placeholder: the node carries the
# target name (and any sibling extensions) but no structure of its own.
KIND_OBJECT = "object"
KIND_ARRAY = "array"
KIND_PRIMITIVE = "primitive"
KIND_REF = "ref"


def extension_map(node: object) -> dict:
    """Every ``x-*`` key of a raw mapping, verbatim and in document order."""
    if not isinstance(node, dict):
        return {}
    return {k: v for k, v in node.items() if isinstance(k, str) and k.startswith("x-")}


@dataclass(frozen=True)
class Info:
    title: str = ""
    description: str = ""


@dataclass
class SchemaNode:
    kind: str
    primitive_type: str | None = None
    format: str | None = None
    title: str | None = None
    properties: dict[str, "SchemaNode"] = field(default_factory=dict)
    items: "SchemaNode | None" = None
    required: tuple[str, ...] = ()
    extensions: dict = field(default_factory=dict)
    ref: str | None = None  # component schema name for kind == "ref"


@dataclass
class Parameter:
    name: str
    location: str  # path | query | header | cookie
    schema: SchemaNode | None = None
    extensions: dict = field(default_factory=dict)

    @property
    def key(self) -> str:
        return f"{self.location}:{self.name}"


@dataclass
class Payload:
    """A request body or a single response, with its (first) media-type schema."""

    extensions: dict = field(default_factory=dict)
    media_type: str | None = None
    schema: SchemaNode | None = None


@dataclass
class Operation:
    method: str
    parameters: list[Parameter] = field(default_factory=list)
    request_body: Payload | None = None
    responses: dict[str, Payload] = field(default_factory=dict)
    extensions: dict = field(default_factory=dict)


@dataclass
class PathItem:
    route: str
    operations: dict[str, Operation] = field(default_factory=dict)
    parameters: list[Parameter] = field(default_factory=list)
    extensions: dict = field(default_factory=dict)


@dataclass
class OpenApiDocument:
    version: str
    info: Info
    paths: dict[str, PathItem]
    components: dict[str, SchemaNode]
    root_extensions: dict
    raw: dict

    def resolve_ref(self, node: SchemaNode) -> SchemaNode | None:
        if node.kind != KIND_REF or node.ref is None:
            return None
        return self.components.get(node.ref)


@dataclass
class ParseResult:
    document: OpenApiDocument | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.document is not None


def parse_document(text: str, format_hint: str = "auto") -> ParseResult:
    """Parse an OpenAPI 3 document from YAML or JSON source text.

    A fatal problem (syntax error, non-3.x version) yields a result without a
    document; reference problems are reported as non-fatal diagnostics on a
    usable document.
    """
    diags: list[Diagnostic] = []
    if not text or not text.strip():
        return ParseResult(None, [diag.error("empty-document", "document source is empty")])

    raw, parse_diag = _load_raw(text, format_hint)
    if parse_diag is not None:
        return ParseResult(None, [parse_diag])
    if not isinstance(raw, dict):
        return ParseResult(
            None, [diag.error("invalid-structure", "document root must be a mapping")]
        )

    version = raw.get("openapi")
    if not isinstance(version, str) or not version.startswith("3."):
        if "swagger" in raw:
            message = "only OpenAPI 3.x is supported (found a Swagger 2 document)"
        elif version is None:
            message = "missing 'openapi' version field"
        else:
            message = f"unsupported OpenAPI version {version!r}; only 3.x is accepted"
        return ParseResult(None, [diag.error("unsupported-version", message)])

    info_raw = raw.get("info")
    if isinstance(info_raw, dict):
        info = Info(
            title=str(info_raw.get("title") or ""),
            description=str(info_raw.get("description") or ""),
        )
    else:
        info = Info()
        diags.append(diag.warning("missing-info", "document has no info section"))

    paths: dict[str, PathItem] = {}
    paths_raw = raw.get("paths")
    if paths_raw is None:
        diags.append(diag.warning("missing-paths", "document has no paths section"))
        paths_raw = {}
    if isinstance(paths_raw, dict):
        for route, item_raw in paths_raw.items():
            route = str(route)
            site = SitePath.root().child(PATH, route)
            paths[route] = _parse_path_item(route, item_raw, site, diags)

    components: dict[str, SchemaNode] = {}
    components_raw = raw.get("components")
    if isinstance(components_raw, dict):
        schemas_raw = components_raw.get("schemas")
        if isinstance(schemas_raw, dict):
            for name, schema_raw in schemas_raw.items():
                name = str(name)
                site = SitePath.root().child(SCHEMA, name)
                components[name] = _parse_schema(schema_raw, site, diags)

    document = OpenApiDocument(
        version=version,
        info=info,
        paths=paths,
        components=components,
        root_extensions=extension_map(raw),
        raw=raw,
    )
    _check_references(document, diags)
    return ParseResult(document, diags)


def _load_raw(text: str, format_hint: str) -> tuple[object, Diagnostic | None]:
    if format_hint not in ("yaml", "json", "auto"):
        raise ValueError(f"unknown format hint {format_hint!r}")
    fmt = format_hint
    if fmt == "auto":
        fmt = "json" if text.lstrip()[:1] == "{" else "yaml"
    if fmt == "json":
        try:
            return json.loads(text), None
        except json.JSONDecodeError as exc:
            return None, diag.error(
                "syntax-error",
                f"invalid JSON: {exc.msg}",
                line=exc.lineno,
                column=exc.colno,
            )
    try:
        return yaml.safe_load(text), None
    except yaml.YAMLError as exc:
        line = column = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            line, column = mark.line + 1, mark.column + 1
        problem = getattr(exc, "problem", None) or str(exc)
        return None, diag.error("syntax-error", f"invalid YAML: {problem}", line=line, column=column)


def _parse_path_item(route: str, raw: object, site: SitePath, diags: list[Diagnostic]) -> PathItem:
    item = PathItem(route=route, extensions=extension_map(raw))
    if not isinstance(raw, dict):
        return item
    item.parameters = _parse_parameters(raw.get("parameters"), site, diags)
    for method, op_raw in raw.items():
        if method not in HTTP_METHODS:
            continue
        op_site = site.child(OPERATION, method)
        item.operations[method] = _parse_operation(method, op_raw, op_site, diags)
    return item


def _parse_operation(method: str, raw: object, site: SitePath, diags: list[Diagnostic]) -> Operation:
    op = Operation(method=method, extensions=extension_map(raw))
    if not isinstance(raw, dict):
        return op
    op.parameters = _parse_parameters(raw.get("parameters"), site, diags)
    seen: set[tuple[str, str]] = set()
    for param in op.parameters:
        if (param.name, param.location) in seen:
            diags.append(
                diag.warning(
                    "duplicate-parameter",
                    f"parameter {param.name!r} in {param.location!r} appears more than once",
                    site=site.child(PARAMETER, param.key),
                )
            )
        seen.add((param.name, param.location))
    body_raw = raw.get("requestBody")
    if isinstance(body_raw, dict):
        op.request_body = _parse_payload(body_raw, site.child(REQUEST_BODY), diags)
    responses_raw = raw.get("responses")
    if isinstance(responses_raw, dict):
        for status, response_raw in responses_raw.items():
            status = str(status)
            if isinstance(response_raw, dict):
                op.responses[status] = _parse_payload(
                    response_raw, site.child(RESPONSE, status), diags
                )
    return op


def _parse_parameters(raw: object, parent: SitePath, diags: list[Diagnostic]) -> list[Parameter]:
    params: list[Parameter] = []
    if not isinstance(raw, list):
        return params
    for entry in raw:
        if not isinstance(entry, dict):
            continue
        if "$ref" in entry:
            # Shared component parameters are outside the modeled subset.
            diags.append(
                diag.warning(
                    "parameter-ref-skipped",
                    f"parameter reference {entry['$ref']!r} is carried opaquely",
                    site=parent,
                )
            )
            continue
        name = str(entry.get("name") or "")
        location = str(entry.get("in") or "query")
        param = Parameter(name=name, location=location, extensions=extension_map(entry))
        schema_raw = entry.get("schema")
        if schema_raw is not None:
            param.schema = _parse_schema(
                schema_raw, parent.child(PARAMETER, param.key), diags
            )
        params.append(param)
    return params


def _parse_payload(raw: dict, site: SitePath, diags: list[Diagnostic]) -> Payload:
    payload = Payload(extensions=extension_map(raw))
    content = raw.get("content")
    if isinstance(content, dict):
        for media_type, media_raw in content.items():
            if not isinstance(media_raw, dict):
                continue
            schema_raw = media_raw.get("schema")
            if schema_raw is None:
                continue
            # Only the first media type's schema is addressed; media types
            # sharing one payload almost always share the schema.
            payload.media_type = str(media_type)
            name = _ref_name(schema_raw)
            payload.schema = _parse_schema(
                schema_raw, site.child(SCHEMA, name or ""), diags
            )
            break
    return payload


def _ref_name(raw: object) -> str | None:
    if isinstance(raw, dict) and isinstance(raw.get("$ref"), str):
        ref = raw["$ref"]
        if ref.startswith(_LOCAL_SCHEMA_REF):
            return ref[len(_LOCAL_SCHEMA_REF) :]
    return None


def _parse_schema(raw: object, site: SitePath, diags: list[Diagnostic]) -> SchemaNode:
    if not isinstance(raw, dict):
        # JSON-Schema boolean form and other degenerate shapes.
        return SchemaNode(kind=KIND_PRIMITIVE)

    ref = raw.get("$ref")
    if isinstance(ref, str):
        if ref.startswith(_LOCAL_SCHEMA_REF):
            return SchemaNode(kind=KIND_REF, ref=ref[len(_LOCAL_SCHEMA_REF) :], extensions=extension_map(raw))
        diags.append(
            diag.warning(
                "remote-ref",
                f"non-local reference {ref!r} is carried opaquely",
                site=site,
            )
        )
        return SchemaNode(kind=KIND_REF, ref=None, extensions=extension_map(raw))

    declared_type = raw.get("type")
    properties_raw = raw.get("properties")
    items_raw = raw.get("items")
    title = raw.get("title") if isinstance(raw.get("title"), str) else None

    if declared_type == "object" or isinstance(properties_raw, dict):
        node = SchemaNode(kind=KIND_OBJECT, title=title, extensions=extension_map(raw))
        if isinstance(properties_raw, dict):
            for prop_name, prop_raw in properties_raw.items():
                prop_name = str(prop_name)
                node.properties[prop_name] = _parse_schema(
                    prop_raw, site.child(PROPERTY, prop_name), diags
                )
        required_raw = raw.get("required")
        if isinstance(required_raw, list):
            node.required = tuple(str(r) for r in required_raw)
        return node

    if declared_type == "array" or items_raw is not None:
        node = SchemaNode(kind=KIND_ARRAY, title=title, extensions=extension_map(raw))
        if items_raw is not None:
            node.items = _parse_schema(items_raw, site.child(ITEMS), diags)
        return node

    return SchemaNode(
        kind=KIND_PRIMITIVE,
        primitive_type=str(declared_type) if declared_type is not None else None,
        format=str(raw["format"]) if isinstance(raw.get("format"), str) else None,
        title=title,
        extensions=extension_map(raw),
    )


def _check_references(doc: OpenApiDocument, diags: list[Diagnostic]) -> None:
    for site, node in _all_schema_nodes(doc):
        if node.kind == KIND_REF and node.ref is not None and node.ref not in doc.components:
            diags.append(
                diag.warning(
                    "unresolved-ref",
                    f"schema reference {node.ref!r} has no target in components",
                    site=site,
                )
            )


def _all_schema_nodes(doc: OpenApiDocument):
    """(site, node) pairs for every schema node, references included."""

    def walk(node: SchemaNode, site: SitePath):
        yield site, node
        for prop_name, prop in node.properties.items():
            yield from walk(prop, site.child(PROPERTY, prop_name))
        if node.items is not None:
            yield from walk(node.items, site.child(ITEMS))

    root = SitePath.root()
    for route, item in doc.paths.items():
        path_site = root.child(PATH, route)
        for param in item.parameters:
            if param.schema is not None:
                yield from walk(param.schema, path_site.child(PARAMETER, param.key))
        for method, op in item.operations.items():
            op_site = path_site.child(OPERATION, method)
            for param in op.parameters:
                if param.schema is not None:
                    yield from walk(param.schema, op_site.child(PARAMETER, param.key))
            if op.request_body is not None and op.request_body.schema is not None:
                body_site = op_site.child(REQUEST_BODY)
                schema = op.request_body.schema
                yield from walk(schema, body_site.child(SCHEMA, schema.ref or ""))
            for status, response in op.responses.items():
                if response.schema is not None:
                    response_site = op_site.child(RESPONSE, status)
                    yield from walk(
                        response.schema, response_site.child(SCHEMA, response.schema.ref or "")
                    )
    for name, schema in doc.components.items():
        yield from walk(schema, root.child(SCHEMA, name))


def annotation_sites(doc: OpenApiDocument) -> list[tuple[SitePath, dict]]:
    """Every site where a transparency annotation may appear, in document order.

    Sites with empty extension maps are included. Reference schemas are listed
    as a single site carrying the extensions declared next to the reference;
    their target's structure is enumerated once, under components.
    """
    sites: list[tuple[SitePath, dict]] = []
    root = SitePath.root()
    sites.append((root, dict(doc.root_extensions)))

    for route, item in doc.paths.items():
        path_site = root.child(PATH, route)
        sites.append((path_site, dict(item.extensions)))
        for param in item.parameters:
            sites.append((path_site.child(PARAMETER, param.key), dict(param.extensions)))
        for method, op in item.operations.items():
            op_site = path_site.child(OPERATION, method)
            sites.append((op_site, dict(op.extensions)))
            for param in op.parameters:
                sites.append((op_site.child(PARAMETER, param.key), dict(param.extensions)))
            if op.request_body is not None:
                body_site = op_site.child(REQUEST_BODY)
                sites.append((body_site, dict(op.request_body.extensions)))
                if op.request_body.schema is not None:
                    schema = op.request_body.schema
                    _schema_sites(schema, body_site.child(SCHEMA, schema.ref or ""), sites)
            for status, response in op.responses.items():
                response_site = op_site.child(RESPONSE, status)
                sites.append((response_site, dict(response.extensions)))
                if response.schema is not None:
                    _schema_sites(
                        response.schema,
                        response_site.child(SCHEMA, response.schema.ref or ""),
                        sites,
                    )

    for name, schema in doc.components.items():
        _schema_sites(schema, root.child(SCHEMA, name), sites)
    return sites


def _schema_sites(node: SchemaNode, site: SitePath, out: list[tuple[SitePath, dict]]) -> None:
    out.append((site, dict(node.extensions)))
    if node.kind == KIND_REF:
        return
    for prop_name, prop in node.properties.items():
        _schema_sites(prop, site.child(PROPERTY, prop_name), out)
    if node.items is not None:
        _schema_sites(node.items, site.child(ITEMS), out)


def dereference(doc: OpenApiDocument, site: SitePath):
    """Return the model node a site path names; raises LookupError if absent."""
    node: object = doc
    for index, segment in enumerate(site.segments):
        if segment.kind == DOCUMENT:
            if index != 0:
                raise LookupError(f"misplaced document segment in {site.text()!r}")
            node = doc
        elif segment.kind == PATH:
            assert isinstance(node, OpenApiDocument)
            node = _lookup(node.paths, segment.value, site)
        elif segment.kind == OPERATION:
            assert isinstance(node, PathItem)
            node = _lookup(node.operations, segment.value, site)
        elif segment.kind == PARAMETER:
            params = node.parameters if isinstance(node, (PathItem, Operation)) else []
            for param in params:
                if param.key == segment.value:
                    node = param
                    break
            else:
                raise LookupError(f"no parameter {segment.value!r} at {site.text()!r}")
        elif segment.kind == REQUEST_BODY:
            assert isinstance(node, Operation)
            if node.request_body is None:
                raise LookupError(f"no request body at {site.text()!r}")
            node = node.request_body
        elif segment.kind == RESPONSE:
            assert isinstance(node, Operation)
            node = _lookup(node.responses, segment.value, site)
        elif segment.kind == SCHEMA:
            if isinstance(node, OpenApiDocument):
                node = _lookup(node.components, segment.value, site)
            elif isinstance(node, Payload):
                if node.schema is None:
                    raise LookupError(f"no schema at {site.text()!r}")
                node = node.schema
            else:
                raise LookupError(f"schema segment misplaced in {site.text()!r}")
        elif segment.kind == PROPERTY:
            assert isinstance(node, SchemaNode)
            node = _lookup(node.properties, segment.value, site)
        elif segment.kind == ITEMS:
            assert isinstance(node, SchemaNode)
            if node.items is None:
                raise LookupError(f"no items at {site.text()!r}")
            node = node.items
        else:  # pragma: no cover - SEGMENT_KINDS is closed
            raise LookupError(f"unknown segment kind {segment.kind!r}")
    return node


def _lookup(mapping: dict, key: str, site: SitePath):
    try:
        return mapping[key]
    except KeyError:
        raise LookupError(f"{key!r} not found while resolving {site.text()!r}") from None


def extensions_at(doc: OpenApiDocument, site: SitePath) -> dict:
    """Extension map of the node a site names (root extensions for the root)."""
    node = dereference(doc, site)
    if isinstance(node, OpenApiDocument):
        return node.root_extensions
    return getattr(node, "extensions", {})


def canonical_text(doc: OpenApiDocument) -> str:
    """Bit-exact canonical YAML form: document key order, 2-space block style."""
    return yaml.safe_dump(
        doc.raw,
        sort_keys=False,
        indent=2,
        default_flow_style=False,
        allow_unicode=True,
        width=100000,
    )


def content_hash(doc: OpenApiDocument) -> str:
    return hashlib.sha256(canonical_text(doc).encode("utf-8")).hexdigest()
