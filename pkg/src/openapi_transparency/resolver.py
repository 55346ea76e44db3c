"""Personal-data indicator extraction and effective-property resolution.

An ``x-tira`` extension of any form marks its node as describing personal
data. Marking a schema covers its properties; ``x-tira-ignore: true`` exempts
a node and everything below it from that coverage. Vocabulary declared on
ancestor levels (document root, path item, operation, body/response) is
inherited by indicators beneath and can be overridden by nearer declarations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import diagnostics as diag
from .diagnostics import Diagnostic
from .openapi_model import (
    KIND_ARRAY,
    KIND_OBJECT,
    KIND_REF,
    OpenApiDocument,
    Parameter,
    SchemaNode,
    annotation_sites,
    extensions_at,
)
from .sites import (
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
from .vocabulary import (
    EXTENSION_KEY,
    IGNORE_KEY,
    Kind,
    LIST_VALUED_KINDS,
    TransparencyProperty,
    parse_property_block,
)


@dataclass(frozen=True)
class PdIndicator:
    name: str
    site: SitePath
    service_local: bool
    direct_properties: tuple[TransparencyProperty, ...] = ()
    constituent_fields: tuple[str, ...] = ()
    covered_schemas: tuple[str, ...] = ()  # whole-service indicators only


@dataclass(frozen=True)
class EffectiveProperties:
    indicator: PdIndicator
    by_kind: dict[Kind, tuple[TransparencyProperty, ...]] = field(default_factory=dict)
    provenance: dict[Kind, SitePath] = field(default_factory=dict)


def _is_ignored(extensions: dict) -> bool:
    return extensions.get(IGNORE_KEY) is True


def _is_marked(extensions: dict) -> bool:
    return EXTENSION_KEY in extensions


def _check_marks(extensions: dict, site: SitePath, diags: list[Diagnostic]) -> None:
    if _is_marked(extensions) and _is_ignored(extensions):
        diags.append(
            diag.error(
                "conflicting-marks",
                f"{EXTENSION_KEY} and {IGNORE_KEY}: true on the same node",
                site=site,
            )
        )
    ignore_value = extensions.get(IGNORE_KEY)
    if IGNORE_KEY in extensions and ignore_value is not True:
        diags.append(
            diag.warning(
                "invalid-ignore",
                f"{IGNORE_KEY} only exempts with the boolean value true (got {ignore_value!r})",
                site=site,
            )
        )


def _leaf_fields(node: SchemaNode, prefix: str = "") -> list[str]:
    """Dotted names of the non-ignored leaf properties under an object schema."""
    leaves: list[str] = []
    for prop_name, prop in node.properties.items():
        if _is_ignored(prop.extensions):
            continue
        dotted = f"{prefix}{prop_name}"
        if prop.kind == KIND_OBJECT and prop.properties:
            leaves.extend(_leaf_fields(prop, prefix=f"{dotted}."))
        else:
            leaves.append(dotted)
    return leaves


def extract_pd_indicators(
    doc: OpenApiDocument,
) -> tuple[list[PdIndicator], list[Diagnostic]]:
    """All personal-data indicators of a document, in document order.

    A marked node is one indicator; marks on nodes below an already marked
    schema contribute vocabulary but never split off further indicators, so
    adding an exemption can only ever shrink the indicator set.
    """
    indicators: list[PdIndicator] = []
    diags: list[Diagnostic] = []

    for site, extensions in annotation_sites(doc):
        _check_marks(extensions, site, diags)

    root_ext = doc.root_extensions
    if _is_marked(root_ext) and not _is_ignored(root_ext):
        covered = [
            name
            for name, schema in doc.components.items()
            if not _is_ignored(schema.extensions)
        ]
        fields: list[str] = []
        for name in covered:
            schema = doc.components[name]
            if schema.kind == KIND_OBJECT:
                fields.extend(f"{name}.{leaf}" for leaf in _leaf_fields(schema))
            else:
                fields.append(name)
        properties, _ = parse_property_block(root_ext[EXTENSION_KEY], SitePath.root())
        indicators.append(
            PdIndicator(
                name=doc.info.title or "service",
                site=SitePath.root(),
                service_local=False,
                direct_properties=tuple(properties),
                constituent_fields=tuple(fields),
                covered_schemas=tuple(covered),
            )
        )

    root = SitePath.root()
    for route, item in doc.paths.items():
        path_site = root.child(PATH, route)
        for param in item.parameters:
            _collect_parameter(param, path_site.child(PARAMETER, param.key), indicators)
        for method, op in item.operations.items():
            op_site = path_site.child(OPERATION, method)
            for param in op.parameters:
                _collect_parameter(param, op_site.child(PARAMETER, param.key), indicators)
            if op.request_body is not None and op.request_body.schema is not None:
                schema = op.request_body.schema
                _collect_schema(
                    doc,
                    schema,
                    op_site.child(REQUEST_BODY).child(SCHEMA, schema.ref or ""),
                    _payload_schema_name(schema, doc, method, route, "requestBody"),
                    indicators,
                )
            for status, response in op.responses.items():
                if response.schema is not None:
                    _collect_schema(
                        doc,
                        response.schema,
                        op_site.child(RESPONSE, status).child(SCHEMA, response.schema.ref or ""),
                        _payload_schema_name(response.schema, doc, method, route, f"response {status}"),
                        indicators,
                    )

    for name, schema in doc.components.items():
        _collect_schema(doc, schema, root.child(SCHEMA, name), name, indicators)

    return indicators, diags


def _payload_schema_name(
    schema: SchemaNode, doc: OpenApiDocument, method: str, route: str, slot: str
) -> str:
    if schema.ref:
        return schema.ref
    if schema.title:
        return schema.title
    return f"{method.upper()} {route} {slot}"


def _collect_parameter(param: Parameter, site: SitePath, indicators: list[PdIndicator]) -> None:
    extensions = param.extensions
    if not _is_marked(extensions) or _is_ignored(extensions):
        return
    properties, _ = parse_property_block(extensions[EXTENSION_KEY], site)
    indicators.append(
        PdIndicator(
            name=param.name,
            site=site,
            service_local=True,
            direct_properties=tuple(properties),
        )
    )


def _collect_schema(
    doc: OpenApiDocument,
    node: SchemaNode,
    site: SitePath,
    name: str,
    indicators: list[PdIndicator],
) -> None:
    """Find the topmost marked node within one schema tree."""
    if _is_ignored(node.extensions):
        pass  # exempt from ancestor coverage; explicit marks below still count
    elif _is_marked(node.extensions):
        target = node
        if node.kind == KIND_REF:
            target = doc.resolve_ref(node) or node
        fields = tuple(_leaf_fields(target)) if target.kind == KIND_OBJECT else ()
        properties, _ = parse_property_block(node.extensions[EXTENSION_KEY], site)
        indicators.append(
            PdIndicator(
                name=name,
                site=site,
                service_local=True,
                direct_properties=tuple(properties),
                constituent_fields=fields,
            )
        )
        return

    if node.kind == KIND_REF:
        return
    for prop_name, prop in node.properties.items():
        _collect_schema(doc, prop, site.child(PROPERTY, prop_name), f"{name}.{prop_name}", indicators)
    if node.kind == KIND_ARRAY and node.items is not None:
        _collect_schema(doc, node.items, site.child(ITEMS), name, indicators)


def resolve_effective(doc: OpenApiDocument, indicator: PdIndicator) -> EffectiveProperties:
    """Winning declarations for each vocabulary kind along the ancestor chain.

    The nearest declaration wins per kind. List-valued kinds accumulate within
    one declaration level; a nearer level replaces farther ones outright.
    """
    by_kind: dict[Kind, tuple[TransparencyProperty, ...]] = {}
    provenance: dict[Kind, SitePath] = {}
    for prefix in indicator.site.chain():
        extensions = extensions_at(doc, prefix)
        raw = extensions.get(EXTENSION_KEY)
        if raw is None and EXTENSION_KEY not in extensions:
            continue
        properties, _ = parse_property_block(raw, prefix)
        level: dict[Kind, list[TransparencyProperty]] = {}
        for prop in properties:
            level.setdefault(prop.kind, []).append(prop)
        for kind, props in level.items():
            if kind in LIST_VALUED_KINDS:
                by_kind[kind] = tuple(props)
            else:
                by_kind[kind] = (props[-1],)
            provenance[kind] = prefix
    return EffectiveProperties(indicator=indicator, by_kind=by_kind, provenance=provenance)


def validate_service(doc: OpenApiDocument) -> list[Diagnostic]:
    """Lint one parsed service description.

    Vocabulary violations are errors; indicators lacking a purpose or a
    retention statement warn; a document with no indicators at all gets a
    single informational note.
    """
    diags: list[Diagnostic] = []
    for site, extensions in annotation_sites(doc):
        _check_marks(extensions, site, diags)
        if EXTENSION_KEY in extensions:
            _, block_diags = parse_property_block(extensions[EXTENSION_KEY], site)
            diags.extend(block_diags)

    indicators, _ = extract_pd_indicators(doc)
    if not indicators:
        diags.append(
            diag.info("no-personal-data", "service declares no personal-data indicators")
        )
        return _dedupe(diags)

    for indicator in indicators:
        effective = resolve_effective(doc, indicator)
        if Kind.PURPOSE not in effective.by_kind:
            diags.append(
                diag.warning(
                    "missing-purpose",
                    f"indicator {indicator.name!r} has no purpose declaration",
                    site=indicator.site,
                )
            )
        if Kind.RETENTION_TIME not in effective.by_kind:
            diags.append(
                diag.warning(
                    "missing-retention",
                    f"indicator {indicator.name!r} has no retention declaration",
                    site=indicator.site,
                )
            )
    return _dedupe(diags)


def _dedupe(diags: list[Diagnostic]) -> list[Diagnostic]:
    return list(dict.fromkeys(diags))
