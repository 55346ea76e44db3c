"""Shared fixtures builders, random generators, and independent oracles.

The oracles here work on raw dict trees or on the generators' own placement
records, never through the library code paths they are used to check.
"""

from __future__ import annotations

import copy
import json
import random

import yaml

from openapi_transparency.vocabulary import (
    Duration,
    RetentionTime,
)

HTTP_METHODS = ("get", "put", "post", "delete", "options", "head", "patch", "trace")


def to_yaml(tree: dict) -> str:
    return yaml.safe_dump(tree, sort_keys=False)


def minimal_doc(paths: dict | None = None, schemas: dict | None = None, root_ext: dict | None = None) -> dict:
    tree: dict = {
        "openapi": "3.0.3",
        "info": {"title": "Test Service", "version": "1.0.0"},
        "paths": paths or {},
    }
    if schemas is not None:
        tree["components"] = {"schemas": schemas}
    if root_ext:
        tree.update(root_ext)
    return tree


def normalize_report(report: dict) -> dict:
    out = copy.deepcopy(report)
    out["generated_at"] = "<normalized>"
    return out


# ---------------------------------------------------------------------------
# Brute-force site counting (independent walk over the raw tree)
# ---------------------------------------------------------------------------


def count_sites_brute(tree: dict) -> int:
    """Count annotation sites by walking the raw dict with the documented rules."""
    count = 1  # document root

    def schema_sites(schema: object) -> int:
        if not isinstance(schema, dict):
            return 0
        if "$ref" in schema:
            return 1
        n = 1
        for prop in (schema.get("properties") or {}).values():
            n += schema_sites(prop)
        if schema.get("items") is not None:
            n += schema_sites(schema["items"])
        elif schema.get("type") == "array":
            pass
        return n

    def payload_sites(payload: object) -> int:
        if not isinstance(payload, dict):
            return 0
        n = 1
        content = payload.get("content")
        if isinstance(content, dict):
            for media in content.values():
                if isinstance(media, dict) and media.get("schema") is not None:
                    n += schema_sites(media["schema"])
                    break
        return n

    for path_item in (tree.get("paths") or {}).values():
        if not isinstance(path_item, dict):
            continue
        count += 1
        for param in path_item.get("parameters") or []:
            if isinstance(param, dict) and "$ref" not in param:
                count += 1
        for method in HTTP_METHODS:
            op = path_item.get(method)
            if not isinstance(op, dict):
                continue
            count += 1
            for param in op.get("parameters") or []:
                if isinstance(param, dict) and "$ref" not in param:
                    count += 1
            if isinstance(op.get("requestBody"), dict):
                count += payload_sites(op["requestBody"])
            for response in (op.get("responses") or {}).values():
                count += payload_sites(response)

    schemas = (tree.get("components") or {}).get("schemas") or {}
    for schema in schemas.values():
        count += schema_sites(schema)
    return count


def covered_schemas_brute(tree: dict) -> list[str]:
    """Schemas a root-level marking covers: all except ignore-rooted ones."""
    schemas = (tree.get("components") or {}).get("schemas") or {}
    return [
        name
        for name, schema in schemas.items()
        if not (isinstance(schema, dict) and schema.get("x-tira-ignore") is True)
    ]


# ---------------------------------------------------------------------------
# Vocabulary fragment generators (canonical shape: no nulls, no defaults)
# ---------------------------------------------------------------------------


def random_duration_fragment(rng: random.Random) -> dict:
    fragment = {}
    for unit in ("days", "months", "years"):
        if rng.random() < 0.5:
            fragment[unit] = rng.randint(0, 400)
    if not fragment:
        fragment["days"] = rng.randint(1, 30)
    return fragment


def random_retention_fragment(rng: random.Random) -> dict:
    scale = rng.choice(("period", "volatile", "no_limit"))
    fragment: dict = {}
    if scale == "period":
        fragment.update(random_duration_fragment(rng))
    else:
        fragment[scale] = True
    if rng.random() < 0.5:
        fragment["periodic_review"] = True
        if rng.random() < 0.7:
            fragment["review_frequency"] = random_duration_fragment(rng)
    return fragment


def random_recipient_fragment(rng: random.Random) -> dict:
    fragment = {"name": f"recipient-{rng.randint(1, 6)}"}
    if rng.random() < 0.5:
        fragment["category"] = rng.choice(("analytics", "social network", "processor"))
    if rng.random() < 0.5:
        fragment["third_party"] = True
    if rng.random() < 0.4:
        fragment["country"] = rng.choice(("US", "DE", "FR", "JP"))
    return fragment


def random_purpose_fragment(rng: random.Random, used_ids: set[str]) -> dict:
    purpose_id = f"purpose-{rng.randint(1, 50)}"
    while purpose_id in used_ids:
        purpose_id = f"purpose-{rng.randint(1, 5000)}"
    used_ids.add(purpose_id)
    fragment = {"id": purpose_id}
    if rng.random() < 0.6:
        fragment["description"] = f"described purpose {purpose_id}"
    if rng.random() < 0.4:
        fragment["allowed_utilizers"] = [f"util-{rng.randint(1, 4)}"]
    if rng.random() < 0.3:
        excluded = f"excl-{rng.randint(5, 9)}"
        fragment["excluded_utilizers"] = [excluded]
    return fragment


def random_transfer_fragment(rng: random.Random) -> dict:
    if rng.random() < 0.5:
        fragment = {"occurs": True, "countries": sorted(rng.sample(["US", "GB", "IN", "BR"], rng.randint(1, 2)))}
        if rng.random() < 0.5:
            fragment["safeguards_note"] = "contractual safeguards in place"
        return fragment
    return {"occurs": False}


def random_special_fragment(rng: random.Random) -> dict:
    if rng.random() < 0.5:
        return {"applies": True, "ground": "explicit consent"}
    return {"applies": False}


def random_profiling_fragment(rng: random.Random) -> dict:
    if rng.random() < 0.5:
        return {"performed": True, "explanation": f"scoring variant {rng.randint(1, 3)}"}
    return {"performed": False}


def random_source_fragment(rng: random.Random) -> dict:
    fragment = {"origin": rng.choice(("data_subject", "third_party", "public_source", "derived"))}
    if rng.random() < 0.4:
        fragment["description"] = "collected at signup"
    return fragment


def random_data_category_fragment(rng: random.Random) -> dict:
    fragment = {"name": rng.choice(("health data", "contact data", "usage data"))}
    if rng.random() < 0.3:
        fragment["description"] = "category description"
    return fragment


def random_block(rng: random.Random, kinds: list[str] | None = None) -> dict:
    """One x-tira extension block with a random subset of vocabulary keys."""
    block: dict = {}
    choices = kinds if kinds is not None else [
        "retention_time",
        "recipients",
        "third_country_transfer",
        "special_category",
        "profiling",
        "purposes",
        "source",
        "data_categories",
    ]
    picked = [k for k in choices if rng.random() < 0.45]
    if not picked:
        picked = [rng.choice(choices)]
    used_purpose_ids: set[str] = set()
    for key in picked:
        if key == "retention_time":
            block[key] = random_retention_fragment(rng)
        elif key == "recipients":
            seen: dict[str, dict] = {}
            for _ in range(rng.randint(1, 2)):
                fragment = random_recipient_fragment(rng)
                seen[fragment["name"]] = fragment
            block[key] = list(seen.values())
        elif key == "third_country_transfer":
            block[key] = random_transfer_fragment(rng)
        elif key == "special_category":
            block[key] = random_special_fragment(rng)
        elif key == "profiling":
            block[key] = random_profiling_fragment(rng)
        elif key == "purposes":
            block[key] = [random_purpose_fragment(rng, used_purpose_ids) for _ in range(rng.randint(1, 2))]
        elif key == "source":
            block[key] = random_source_fragment(rng)
        elif key == "data_categories":
            names: dict[str, dict] = {}
            for _ in range(rng.randint(1, 2)):
                fragment = random_data_category_fragment(rng)
                names[fragment["name"]] = fragment
            block[key] = list(names.values())
    return block


LIST_KEYS = {"recipients", "purposes", "data_categories"}


def expected_effective(placements: dict[int, dict], indicator_level: int) -> dict[str, list]:
    """Nearest-ancestor oracle computed from the generator's placement record.

    For each vocabulary key, the deepest placement at or above the indicator
    wins; list-valued keys contribute every element of that single block.
    """
    expected: dict[str, tuple[int, list]] = {}
    for level in sorted(placements):
        if level > indicator_level:
            continue
        for key, value in placements[level].items():
            fragments = list(value) if key in LIST_KEYS else [value]
            expected[key] = (level, fragments)
    return {key: {"level": level, "fragments": fragments} for key, (level, fragments) in expected.items()}


# ---------------------------------------------------------------------------
# Layered random documents for the inheritance oracle
# ---------------------------------------------------------------------------


def layered_document(rng: random.Random) -> tuple[dict, dict[int, dict], int, str]:
    """A random document with vocabulary placed at random ancestor levels.

    Returns (tree, placements, indicator_level, variant). Placement levels
    index the indicator's ancestor chain from the document root (0) to the
    indicator itself; each placement records the vocabulary block written at
    that level ({} for a plain marker).
    """
    variant = rng.choice(
        ("body-schema", "body-property", "response-schema", "components-schema", "parameter")
    )
    method = rng.choice(("get", "put", "post", "delete"))
    route = rng.choice(("/things", "/records/{id}", "/measurements"))

    if variant == "components-schema":
        declaration_levels = [0, 1]
    elif variant == "parameter":
        declaration_levels = [0, 1, 2, 3]
    elif variant == "body-property":
        # Level 4 (the enclosing schema) must stay bare: marking it would make
        # the schema itself the indicator.
        declaration_levels = [0, 1, 2, 3, 5]
    else:
        declaration_levels = [0, 1, 2, 3, 4]
    indicator_level = max(declaration_levels)

    marks: dict[int, object] = {}
    placements: dict[int, dict] = {}
    for level in declaration_levels:
        if level == indicator_level:
            if rng.random() < 0.25:
                marks[level] = True  # plain marker, no vocabulary
                placements[level] = {}
            else:
                block = random_block(rng)
                marks[level] = block
                placements[level] = block
        elif rng.random() < 0.6:
            block = random_block(rng)
            marks[level] = block
            placements[level] = block

    tree: dict = {
        "openapi": "3.0.3",
        "info": {"title": "Layered Service", "version": "0.0.1"},
        "paths": {},
    }
    schema_node: dict = {
        "type": "object",
        "properties": {
            "field-a": {"type": "string"},
            "field-b": {"type": "integer"},
        },
    }

    if variant == "components-schema":
        if 1 in marks:
            schema_node["x-tira"] = marks[1]
        tree["components"] = {"schemas": {"Layered": schema_node}}
    else:
        operation: dict = {"summary": "generated"}
        if variant == "parameter":
            parameter = {"name": "subject", "in": "query", "schema": {"type": "string"}}
            if 3 in marks:
                parameter["x-tira"] = marks[3]
            operation["parameters"] = [parameter]
        else:
            if variant == "body-property":
                if 5 in marks:
                    schema_node["properties"]["field-a"]["x-tira"] = marks[5]
            elif 4 in marks:
                schema_node["x-tira"] = marks[4]
            payload: dict = {"content": {"application/json": {"schema": schema_node}}}
            if 3 in marks:
                payload["x-tira"] = marks[3]
            if variant == "response-schema":
                payload["description"] = "generated"
                operation["responses"] = {"200": payload}
            else:
                operation["requestBody"] = payload
        if 2 in marks:
            operation["x-tira"] = marks[2]
        path_item: dict = {method: operation}
        if 1 in marks:
            path_item["x-tira"] = marks[1]
        tree["paths"][route] = path_item

    if 0 in marks:
        tree["x-tira"] = marks[0]
    return tree, placements, indicator_level, variant


# ---------------------------------------------------------------------------
# Random retention values
# ---------------------------------------------------------------------------


def random_retention(rng: random.Random, allow_unstated: bool = True) -> RetentionTime:
    choices = ["volatile", "period", "no_limit"]
    if allow_unstated:
        choices.append("unstated")
    scale = rng.choice(choices)
    periodic_review = rng.random() < 0.5
    review_frequency = None
    if periodic_review and rng.random() < 0.7:
        review_frequency = _random_duration(rng)
    kwargs = {"periodic_review": periodic_review, "review_frequency": review_frequency}
    if scale == "volatile":
        return RetentionTime(volatile=True, **kwargs)
    if scale == "no_limit":
        return RetentionTime(no_limit=True, **kwargs)
    if scale == "period":
        return RetentionTime(period=_random_duration(rng), **kwargs)
    return RetentionTime(**kwargs)


def _random_duration(rng: random.Random) -> Duration:
    kwargs = {}
    for unit in ("days", "months", "years"):
        if rng.random() < 0.5:
            kwargs[unit] = rng.randint(0, 500)
    if not kwargs:
        kwargs["days"] = rng.randint(1, 100)
    return Duration(**kwargs)


def fragments_sorted(fragments: list[dict]) -> list[str]:
    return sorted(json.dumps(f, sort_keys=True) for f in fragments)
