from __future__ import annotations

import pytest

from openapi_transparency.registry import Registry
from openapi_transparency.webhook import (
    ACTION_CREATED,
    ACTION_IGNORED,
    ACTION_UNCHANGED,
    ACTION_UPDATED,
    DEFAULT_SPEC_GLOBS,
    DirectoryFetcher,
    PushEvent,
    WebhookConfig,
    discover_spec_files,
    handle_push,
    push_event_from_payload,
)

from helpers import minimal_doc, to_yaml

SPEC = to_yaml(minimal_doc(schemas={"Weight": {"type": "object", "x-tira": True}}))
SPEC_V2 = to_yaml(
    minimal_doc(schemas={"Weight": {"type": "object", "x-tira": True}, "Pulse": {"type": "object", "x-tira": True}})
)


def event(**kw) -> PushEvent:
    defaults = dict(
        repo_url="https://git.example.com/team/tracker",
        repo_name="tracker",
        ref="refs/heads/main",
        head_commit="c0ffee",
        changed_files=("openapi.yaml",),
        inline_specs={"openapi.yaml": SPEC},
    )
    defaults.update(kw)
    return PushEvent(**defaults)


# ---------------------------------------------------------------------------
# discover_spec_files
# ---------------------------------------------------------------------------


def test_spec_file_among_sources_is_discovered():
    assert discover_spec_files(["src/main.rs", "openapi.yaml"]) == ["openapi.yaml"]


def test_empty_path_list_discovers_nothing():
    assert discover_spec_files([]) == []


def test_nested_spec_matches_recursive_glob():
    # evaluated by hand against the default pattern set: "**/openapi.*" matches
    assert discover_spec_files(["services/a/openapi.yml"]) == ["services/a/openapi.yml"]
    assert discover_spec_files(["docs/api/public.yaml"]) == ["docs/api/public.yaml"]
    assert discover_spec_files(["deep/er/openapi.json"]) == ["deep/er/openapi.json"]
    assert discover_spec_files(["openapi.todo/readme.md"]) == []
    assert discover_spec_files(["not-openapi.yaml"]) == []


def test_discovery_order_is_input_order():
    paths = ["b/openapi.yaml", "a/openapi.yaml", "b/openapi.yaml"]
    assert discover_spec_files(paths) == ["b/openapi.yaml", "a/openapi.yaml"]


def test_custom_globs_override_defaults():
    assert discover_spec_files(["api.yaml"], patterns=("api.yaml",)) == ["api.yaml"]
    assert discover_spec_files(["openapi.yaml"], patterns=("api.yaml",)) == []


# ---------------------------------------------------------------------------
# handle_push
# ---------------------------------------------------------------------------


def test_first_push_creates_service_with_version_one():
    registry = Registry()
    [outcome] = handle_push(event(), registry)
    assert outcome.action == ACTION_CREATED
    assert outcome.service_id == "tracker"
    assert outcome.version == 1
    assert registry.get_service("tracker").repo_url == "https://git.example.com/team/tracker"


def test_unchanged_spec_repush_is_reported_unchanged():
    registry = Registry()
    handle_push(event(), registry)
    [outcome] = handle_push(event(head_commit="deadbeef"), registry)
    assert outcome.action == ACTION_UNCHANGED
    assert len(registry.get_service("tracker").versions) == 1


def test_changed_spec_appends_version():
    registry = Registry()
    handle_push(event(), registry)
    [outcome] = handle_push(event(inline_specs={"openapi.yaml": SPEC_V2}), registry)
    assert outcome.action == ACTION_UPDATED
    assert outcome.version == 2


def test_push_without_spec_files_is_ignored():
    registry = Registry()
    [outcome] = handle_push(
        event(changed_files=("src/app.py", "README.md"), inline_specs=None), registry
    )
    assert outcome.action == ACTION_IGNORED
    assert registry.list_services() == []


def test_non_default_branch_is_ignored_unless_configured():
    registry = Registry()
    [outcome] = handle_push(event(ref="refs/heads/feature/x"), registry)
    assert outcome.action == ACTION_IGNORED
    [outcome] = handle_push(
        event(ref="refs/heads/feature/x"), registry, WebhookConfig(all_branches=True)
    )
    assert outcome.action == ACTION_CREATED


def test_replayed_delivery_is_idempotent():
    registry = Registry()
    for _ in range(5):
        handle_push(event(), registry)
    assert len(registry.get_service("tracker").versions) == 1


def test_missing_fetcher_yields_ignored_with_note():
    registry = Registry()
    [outcome] = handle_push(event(inline_specs=None), registry)
    assert outcome.action == ACTION_IGNORED
    assert any("fetcher" in note for note in outcome.notes)


def test_fetch_failure_is_acknowledged_with_note(tmp_path):
    registry = Registry()
    config = WebhookConfig(fetcher=DirectoryFetcher(tmp_path))
    [outcome] = handle_push(event(inline_specs=None), registry, config)
    assert outcome.action == ACTION_IGNORED
    assert outcome.notes


def test_directory_fetcher_supplies_content(tmp_path):
    repo = tmp_path / "tracker"
    repo.mkdir()
    (repo / "openapi.yaml").write_text(SPEC, encoding="utf-8")
    registry = Registry()
    config = WebhookConfig(fetcher=DirectoryFetcher(tmp_path))
    [outcome] = handle_push(event(inline_specs=None), registry, config)
    assert outcome.action == ACTION_CREATED


def test_unparsable_inline_spec_is_ignored_with_note():
    registry = Registry()
    [outcome] = handle_push(event(inline_specs={"openapi.yaml": "{"}), registry)
    assert outcome.action == ACTION_IGNORED
    assert outcome.notes


def test_nested_spec_gets_derived_service_name():
    registry = Registry()
    [outcome] = handle_push(
        event(
            changed_files=("services/ingest/openapi.yaml",),
            inline_specs={"services/ingest/openapi.yaml": SPEC},
        ),
        registry,
    )
    assert outcome.action == ACTION_CREATED
    assert outcome.service_id == "tracker-services-ingest"


def test_two_spec_files_in_one_push_yield_two_outcomes():
    registry = Registry()
    outcomes = handle_push(
        event(
            changed_files=("openapi.yaml", "services/b/openapi.yaml"),
            inline_specs={"openapi.yaml": SPEC, "services/b/openapi.yaml": SPEC_V2},
        ),
        registry,
    )
    assert [o.action for o in outcomes] == [ACTION_CREATED, ACTION_CREATED]
    assert len(registry.list_services()) == 2


def test_inline_paths_must_be_changed_files():
    with pytest.raises(ValueError):
        PushEvent(
            repo_url="u",
            repo_name="n",
            ref="main",
            changed_files=("a.txt",),
            inline_specs={"openapi.yaml": SPEC},
        )


# ---------------------------------------------------------------------------
# Payload adapters
# ---------------------------------------------------------------------------


def test_canonical_payload_passthrough():
    parsed = push_event_from_payload(
        {
            "repo_url": "https://git.example.com/x/y",
            "repo_name": "y",
            "ref": "main",
            "changed_files": ["openapi.yaml"],
            "inline_specs": {"openapi.yaml": SPEC},
        }
    )
    assert parsed.repo_name == "y"
    assert parsed.branch == "main"


def test_github_style_payload():
    parsed = push_event_from_payload(
        {
            "ref": "refs/heads/main",
            "after": "abc",
            "repository": {"name": "tracker", "clone_url": "https://github.example/org/tracker.git"},
            "head_commit": {"id": "abc"},
            "commits": [
                {"added": ["openapi.yaml"], "modified": ["src/x.py"]},
                {"added": [], "modified": ["openapi.yaml"]},
            ],
        }
    )
    assert parsed.repo_name == "tracker"
    assert parsed.head_commit == "abc"
    assert parsed.changed_files == ("openapi.yaml", "src/x.py")


def test_gitlab_style_payload():
    parsed = push_event_from_payload(
        {
            "ref": "refs/heads/main",
            "checkout_sha": "fff",
            "project": {"name": "tracker", "git_http_url": "https://gitlab.example/org/tracker.git"},
            "commits": [{"added": ["docs/api/spec.yaml"], "modified": []}],
        }
    )
    assert parsed.repo_name == "tracker"
    assert parsed.changed_files == ("docs/api/spec.yaml",)


def test_unrecognized_payload_rejected():
    with pytest.raises(ValueError):
        push_event_from_payload({"something": "else"})


def test_repo_name_derived_from_url_when_missing():
    parsed = push_event_from_payload(
        {"repo_url": "https://git.example.com/org/widget.git", "ref": "main"}
    )
    assert parsed.repo_name == "widget"


def test_default_globs_are_stable():
    assert DEFAULT_SPEC_GLOBS == (
        "openapi.yaml",
        "openapi.yml",
        "openapi.json",
        "**/openapi.*",
        "docs/api/*.yaml",
    )
