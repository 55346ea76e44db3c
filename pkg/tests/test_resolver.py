from __future__ import annotations

import copy
import random

from openapi_transparency.diagnostics import Severity
from openapi_transparency.fixtures import fixture_text
from openapi_transparency.openapi_model import parse_document
from openapi_transparency.resolver import (
    extract_pd_indicators,
    resolve_effective,
    validate_service,
)
from openapi_transparency.vocabulary import Kind, value_to_dict

from helpers import (
    covered_schemas_brute,
    expected_effective,
    fragments_sorted,
    layered_document,
    minimal_doc,
    to_yaml,
)


def parse(tree_or_text) -> object:
    text = tree_or_text if isinstance(tree_or_text, str) else to_yaml(tree_or_text)
    result = parse_document(text)
    assert result.ok, [d.message for d in result.diagnostics]
    return result.document


def test_weight_fixture_yields_exactly_one_indicator():
    doc = parse(fixture_text("weight-schema.yaml"))
    indicators, diags = extract_pd_indicators(doc)
    assert diags == []
    [indicator] = indicators
    assert indicator.name == "Weight"
    assert indicator.site.text() == "document/schema:Weight"
    assert set(indicator.constituent_fields) == {"weight", "submission"}
    assert "log-level" not in indicator.constituent_fields
    assert indicator.service_local
    assert indicator.direct_properties == ()  # plain marker


def test_document_without_marks_has_no_indicators():
    doc = parse(minimal_doc(schemas={"Plain": {"type": "object", "properties": {"a": {"type": "string"}}}}))
    indicators, diags = extract_pd_indicators(doc)
    assert indicators == [] and diags == []


def test_extraction_is_deterministic_across_parses():
    text = fixture_text("fitness/main-application.yaml")
    first, _ = extract_pd_indicators(parse(text))
    second, _ = extract_pd_indicators(parse(text))
    assert [(i.name, i.site.text()) for i in first] == [(i.name, i.site.text()) for i in second]


def test_conflicting_marks_are_an_error_and_suppress_the_indicator():
    tree = minimal_doc(
        schemas={"S": {"type": "object", "x-tira": True, "x-tira-ignore": True, "properties": {}}}
    )
    indicators, diags = extract_pd_indicators(parse(tree))
    assert indicators == []
    assert any(d.code == "conflicting-marks" and d.severity is Severity.ERROR for d in diags)


def test_non_boolean_ignore_warns_and_does_not_exempt():
    tree = minimal_doc(
        schemas={
            "S": {
                "type": "object",
                "x-tira": True,
                "properties": {"a": {"type": "string", "x-tira-ignore": "yes"}},
            }
        }
    )
    doc = parse(tree)
    indicators, diags = extract_pd_indicators(doc)
    assert indicators[0].constituent_fields == ("a",)
    assert any(d.code == "invalid-ignore" for d in diags)


def test_marked_property_in_unmarked_schema_is_its_own_indicator():
    tree = minimal_doc(
        schemas={
            "Account": {
                "type": "object",
                "properties": {
                    "email": {"type": "string", "x-tira": True},
                    "theme": {"type": "string"},
                },
            }
        }
    )
    indicators, _ = extract_pd_indicators(parse(tree))
    [indicator] = indicators
    assert indicator.name == "Account.email"
    assert indicator.site.text() == "document/schema:Account/property:email"


def test_marks_below_a_marked_schema_do_not_split_indicators():
    tree = minimal_doc(
        schemas={
            "S": {
                "type": "object",
                "x-tira": True,
                "properties": {"a": {"type": "string", "x-tira": {"retention_time": {"volatile": True}}}},
            }
        }
    )
    indicators, _ = extract_pd_indicators(parse(tree))
    assert len(indicators) == 1
    assert indicators[0].name == "S"


def test_marked_parameter_is_an_indicator():
    tree = minimal_doc(
        paths={
            "/users/{user_id}": {
                "get": {
                    "parameters": [
                        {"name": "user_id", "in": "path", "schema": {"type": "string"}, "x-tira": True}
                    ],
                    "summary": "fetch",
                }
            }
        }
    )
    indicators, _ = extract_pd_indicators(parse(tree))
    [indicator] = indicators
    assert indicator.name == "user_id"
    assert indicator.site.leaf.kind == "parameter"


def test_root_marking_covers_non_ignored_schemas():
    tree = minimal_doc(
        schemas={
            "A": {"type": "object", "properties": {"x": {"type": "string"}}},
            "B": {"type": "object", "x-tira-ignore": True, "properties": {"y": {"type": "string"}}},
            "C": {"type": "object", "properties": {"z": {"type": "string"}, "w": {"type": "integer"}}},
        },
        root_ext={"x-tira": {"recipients": [{"name": "Host Co", "third_party": True}]}},
    )
    doc = parse(tree)
    indicators, _ = extract_pd_indicators(doc)
    root_indicators = [i for i in indicators if i.site.is_root]
    [root_indicator] = root_indicators
    assert not root_indicator.service_local
    assert list(root_indicator.covered_schemas) == covered_schemas_brute(tree)
    assert set(root_indicator.constituent_fields) == {"A.x", "C.z", "C.w"}


def test_root_marking_coverage_matches_brute_force_on_random_ignores():
    rng = random.Random(99)
    for _ in range(50):
        schemas = {}
        for index in range(rng.randint(1, 5)):
            schema = {"type": "object", "properties": {"p": {"type": "string"}}}
            if rng.random() < 0.4:
                schema["x-tira-ignore"] = True
            schemas[f"S{index}"] = schema
        tree = minimal_doc(schemas=schemas, root_ext={"x-tira": True})
        doc = parse(tree)
        indicators, _ = extract_pd_indicators(doc)
        root_indicator = next(i for i in indicators if i.site.is_root)
        assert list(root_indicator.covered_schemas) == covered_schemas_brute(tree)


def test_ignore_monotonicity_under_random_insertion():
    rng = random.Random(1234)
    for _ in range(60):
        tree, _, _, _ = layered_document(rng)
        doc = parse(tree)
        before = {i.site.text() for i in extract_pd_indicators(doc)[0]}

        mutated = copy.deepcopy(tree)
        _add_ignore_somewhere(mutated, rng)
        after = {i.site.text() for i in extract_pd_indicators(parse(mutated))[0]}
        assert after <= before


def _add_ignore_somewhere(tree: dict, rng: random.Random) -> None:
    nodes: list[dict] = []

    def collect(node):
        if isinstance(node, dict):
            nodes.append(node)
            for value in node.values():
                collect(value)
        elif isinstance(node, list):
            for item in node:
                collect(item)

    schemas = (tree.get("components") or {}).get("schemas") or {}
    collect(schemas)
    for path_item in (tree.get("paths") or {}).values():
        collect(path_item)
    if nodes:
        target = rng.choice(nodes)
        target.pop("x-tira", None)  # conflicting marks would suppress via error
        target["x-tira-ignore"] = True


# ---------------------------------------------------------------------------
# Effective-property resolution
# ---------------------------------------------------------------------------


def _body_schema_doc(path_ext=None, op_ext=None, schema_ext=None):
    schema = {"type": "object", "properties": {"v": {"type": "number"}}}
    if schema_ext is not None:
        schema["x-tira"] = schema_ext
    operation = {
        "summary": "submit",
        "requestBody": {"content": {"application/json": {"schema": schema}}},
    }
    if op_ext is not None:
        operation["x-tira"] = op_ext
    path_item = {"post": operation}
    if path_ext is not None:
        path_item["x-tira"] = path_ext
    return minimal_doc(paths={"/w": path_item})


def test_schema_inherits_retention_declared_on_path_item():
    tree = _body_schema_doc(path_ext={"retention_time": {"days": 30}}, schema_ext=True)
    doc = parse(tree)
    [indicator] = extract_pd_indicators(doc)[0]
    effective = resolve_effective(doc, indicator)
    [prop] = effective.by_kind[Kind.RETENTION_TIME]
    assert value_to_dict(Kind.RETENTION_TIME, prop.value) == {"days": 30}
    assert effective.provenance[Kind.RETENTION_TIME].text() == "document/path:%2Fw"


def test_nearer_declaration_overrides_root():
    tree = _body_schema_doc(schema_ext={"retention_time": {"years": 10}})
    tree["x-tira"] = {"retention_time": {"days": 30}}
    doc = parse(tree)
    indicator = next(i for i in extract_pd_indicators(doc)[0] if not i.site.is_root)
    effective = resolve_effective(doc, indicator)
    [prop] = effective.by_kind[Kind.RETENTION_TIME]
    assert value_to_dict(Kind.RETENTION_TIME, prop.value) == {"years": 10}
    assert effective.provenance[Kind.RETENTION_TIME] == indicator.site


def test_unmarked_ancestors_leave_by_kind_empty():
    doc = parse(_body_schema_doc(schema_ext=True))
    [indicator] = extract_pd_indicators(doc)[0]
    effective = resolve_effective(doc, indicator)
    assert effective.by_kind == {}
    assert effective.provenance == {}


def test_list_kinds_accumulate_at_one_level_and_replace_across_levels():
    tree = _body_schema_doc(
        op_ext={"recipients": [{"name": "A"}, {"name": "B"}]},
        schema_ext={"recipients": [{"name": "C"}]},
    )
    doc = parse(tree)
    [indicator] = extract_pd_indicators(doc)[0]
    effective = resolve_effective(doc, indicator)
    names = [p.value.name for p in effective.by_kind[Kind.RECIPIENT]]
    assert names == ["C"]

    tree2 = _body_schema_doc(op_ext={"recipients": [{"name": "A"}, {"name": "B"}]}, schema_ext=True)
    doc2 = parse(tree2)
    [indicator2] = extract_pd_indicators(doc2)[0]
    names2 = sorted(p.value.name for p in resolve_effective(doc2, indicator2).by_kind[Kind.RECIPIENT])
    assert names2 == ["A", "B"]


def test_provenance_is_always_self_or_ancestor():
    rng = random.Random(5150)
    for _ in range(40):
        tree, _, _, _ = layered_document(rng)
        doc = parse(tree)
        for indicator in extract_pd_indicators(doc)[0]:
            effective = resolve_effective(doc, indicator)
            for site in effective.provenance.values():
                assert site.is_prefix_of(indicator.site)


def test_resolution_matches_nearest_ancestor_oracle():
    rng = random.Random(424242)
    checked = 0
    for _ in range(150):
        tree, placements, indicator_level, variant = layered_document(rng)
        doc = parse(tree)
        indicators, _ = extract_pd_indicators(doc)
        candidates = [i for i in indicators if not i.site.is_root]
        assert candidates, f"variant {variant} produced no indicator"
        [indicator] = candidates
        effective = resolve_effective(doc, indicator)
        expected = expected_effective(placements, indicator_level)
        chain = indicator.site.chain()

        got_keys = set()
        for kind, props in effective.by_kind.items():
            key = _kind_to_block_key(kind)
            got_keys.add(key)
            fragments = [value_to_dict(kind, p.value) for p in props]
            assert fragments_sorted(fragments) == fragments_sorted(expected[key]["fragments"])
            assert effective.provenance[kind] == chain[expected[key]["level"]]
        assert got_keys == set(expected)
        checked += 1
    assert checked == 150


def _kind_to_block_key(kind: Kind) -> str:
    from openapi_transparency.vocabulary import BLOCK_KEYS

    return next(key for key, k in BLOCK_KEYS.items() if k is kind)


# ---------------------------------------------------------------------------
# validate_service
# ---------------------------------------------------------------------------


def test_retention_fixture_warns_only_about_missing_purpose():
    doc = parse(fixture_text("weight-schema-retention.yaml"))
    diags = validate_service(doc)
    assert not any(d.severity is Severity.ERROR for d in diags)
    warnings = [d.code for d in diags if d.severity is Severity.WARNING]
    assert warnings == ["missing-purpose"]


def test_unannotated_document_gets_single_info():
    doc = parse(minimal_doc(schemas={"Plain": {"type": "object"}}))
    diags = validate_service(doc)
    assert [d.code for d in diags] == ["no-personal-data"]
    assert diags[0].severity is Severity.INFO


def test_invalid_retention_is_an_error_with_site():
    tree = minimal_doc(
        schemas={"S": {"type": "object", "x-tira": {"retention_time": {"years": -1}}}}
    )
    diags = validate_service(parse(tree))
    errors = [d for d in diags if d.severity is Severity.ERROR]
    assert len(errors) == 1
    assert errors[0].site.text() == "document/schema:S"


def test_fully_annotated_indicator_has_no_warnings():
    tree = minimal_doc(
        schemas={
            "S": {
                "type": "object",
                "x-tira": {
                    "retention_time": {"volatile": True},
                    "purposes": [{"id": "p"}],
                },
            }
        }
    )
    diags = validate_service(parse(tree))
    assert [d for d in diags if d.severity is Severity.WARNING] == []
