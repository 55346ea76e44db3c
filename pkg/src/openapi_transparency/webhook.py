"""Git push-event ingestion: automatic service registration from CI webhooks.

Deliveries carry the canonical push-event shape below; thin adapters translate
the common Git-host payloads into it. Spec content comes either inline with
the event or through a pluggable repository-content fetcher. Replayed
deliveries are harmless: identical content never appends a version.
"""

from __future__ import annotations

import fnmatch
import urllib.request
from dataclasses import dataclass
from pathlib import Path, PurePosixPath

from .registry import ConflictError, Registry, RegistryError, SOURCE_WEBHOOK, slugify

DEFAULT_SPEC_GLOBS = (
    "openapi.yaml",
    "openapi.yml",
    "openapi.json",
    "**/openapi.*",
    "docs/api/*.yaml",
)

DEFAULT_BRANCHES = ("main", "master")

ACTION_CREATED = "created"
ACTION_UPDATED = "updated"
ACTION_UNCHANGED = "unchanged"
ACTION_IGNORED = "ignored"


@dataclass(frozen=True)
class PushEvent:
    repo_url: str
    repo_name: str
    ref: str
    head_commit: str = ""
    changed_files: tuple[str, ...] = ()
    inline_specs: dict[str, str] | None = None

    def __post_init__(self) -> None:
        if not self.repo_url:
            raise ValueError("push event needs a repo_url")
        if self.inline_specs and self.changed_files:
            extras = set(self.inline_specs) - set(self.changed_files)
            if extras:
                raise ValueError(f"inline spec paths not among changed files: {sorted(extras)}")

    @property
    def branch(self) -> str:
        ref = self.ref
        for prefix in ("refs/heads/", "refs/tags/"):
            if ref.startswith(prefix):
                return ref[len(prefix):]
        return ref


@dataclass(frozen=True)
class RegistrationOutcome:
    action: str
    service_id: str | None = None
    version: int | None = None
    notes: tuple[str, ...] = ()
    spec_path: str | None = None

    def to_dict(self) -> dict:
        return {
            "action": self.action,
            "service_id": self.service_id,
            "version": self.version,
            "notes": list(self.notes),
            "spec_path": self.spec_path,
        }


class FetchError(Exception):
    pass


class DirectoryFetcher:
    """Reads repository content from <root>/<repo_name>/<path> on local disk."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    def fetch(self, event: PushEvent, path: str) -> str:
        candidate = self.root / event.repo_name / path
        try:
            return candidate.read_text(encoding="utf-8")
        except OSError as exc:
            raise FetchError(f"cannot read {candidate}: {exc}") from exc


class UrlTemplateFetcher:
    """Fetches raw file content from a URL template.

    The template may use {repo_url}, {repo_name}, {ref}, and {path}, e.g.
    "{repo_url}/raw/{ref}/{path}".
    """

    def __init__(self, template: str, timeout: float = 10.0) -> None:
        self.template = template
        self.timeout = timeout

    def fetch(self, event: PushEvent, path: str) -> str:
        url = self.template.format(
            repo_url=event.repo_url.rstrip("/"),
            repo_name=event.repo_name,
            ref=event.branch,
            path=path,
        )
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as response:
                return response.read().decode("utf-8")
        except (OSError, ValueError) as exc:
            raise FetchError(f"cannot fetch {url}: {exc}") from exc


@dataclass
class WebhookConfig:
    spec_globs: tuple[str, ...] = DEFAULT_SPEC_GLOBS
    branches: tuple[str, ...] = DEFAULT_BRANCHES
    all_branches: bool = False
    fetcher: object | None = None  # anything with fetch(event, path) -> str
    origin: str = "internal"


def _glob_match(path: str, pattern: str) -> bool:
    """Segment-wise glob where ** spans any number of directories."""
    path_parts = path.split("/")
    pattern_parts = pattern.split("/")

    def match(pi: int, si: int) -> bool:
        if pi == len(pattern_parts):
            return si == len(path_parts)
        part = pattern_parts[pi]
        if part == "**":
            return any(match(pi + 1, skip) for skip in range(si, len(path_parts) + 1))
        if si == len(path_parts):
            return False
        return fnmatch.fnmatchcase(path_parts[si], part) and match(pi + 1, si + 1)

    return match(0, 0)


def discover_spec_files(
    paths: list[str] | tuple[str, ...], patterns: tuple[str, ...] = DEFAULT_SPEC_GLOBS
) -> list[str]:
    """Paths that look like API specification files, in their original order."""
    found: list[str] = []
    for path in paths:
        if path in found:
            continue
        if any(_glob_match(path, pattern) for pattern in patterns):
            found.append(path)
    return found


def _service_name(event: PushEvent, spec_path: str) -> str:
    parent = str(PurePosixPath(spec_path).parent)
    if parent in (".", ""):
        return event.repo_name
    return f"{event.repo_name}-{slugify(parent.replace('/', ' '))}"


def handle_push(
    event: PushEvent, registry: Registry, config: WebhookConfig | None = None
) -> list[RegistrationOutcome]:
    """Process one push event against the registry.

    Every discovered spec file yields one outcome; failures are reported as
    "ignored" outcomes with a note so the delivery can be acknowledged and
    safely retried.
    """
    config = config or WebhookConfig()

    if not config.all_branches and event.branch not in config.branches:
        return [
            RegistrationOutcome(
                ACTION_IGNORED, notes=(f"ref {event.ref!r} is not a registered branch",)
            )
        ]

    candidates = discover_spec_files(event.changed_files, config.spec_globs)
    if event.inline_specs:
        for path in event.inline_specs:
            if path not in candidates and any(
                _glob_match(path, pattern) for pattern in config.spec_globs
            ):
                candidates.append(path)
    if not candidates:
        return [RegistrationOutcome(ACTION_IGNORED, notes=("no specification files in push",))]

    outcomes: list[RegistrationOutcome] = []
    for spec_path in candidates:
        outcomes.append(_ingest_spec(event, spec_path, registry, config))
    return outcomes


def _ingest_spec(
    event: PushEvent, spec_path: str, registry: Registry, config: WebhookConfig
) -> RegistrationOutcome:
    text: str | None = None
    if event.inline_specs and spec_path in event.inline_specs:
        text = event.inline_specs[spec_path]
    elif config.fetcher is not None:
        try:
            text = config.fetcher.fetch(event, spec_path)
        except FetchError as exc:
            return RegistrationOutcome(ACTION_IGNORED, notes=(str(exc),), spec_path=spec_path)
    else:
        return RegistrationOutcome(
            ACTION_IGNORED,
            notes=("no inline content and no content fetcher configured",),
            spec_path=spec_path,
        )

    existing = registry.find_by_repo(event.repo_url, spec_path)
    try:
        if existing is not None:
            version, changed = registry.add_spec_version(existing.id, text, source=SOURCE_WEBHOOK)
            action = ACTION_UPDATED if changed else ACTION_UNCHANGED
            return RegistrationOutcome(
                action, service_id=existing.id, version=version.version_number, spec_path=spec_path
            )
        record, version = registry.register_service(
            name=_service_name(event, spec_path),
            spec_text=text,
            origin=config.origin,
            repo_url=event.repo_url,
            spec_path=spec_path,
            source=SOURCE_WEBHOOK,
        )
        return RegistrationOutcome(
            ACTION_CREATED, service_id=record.id, version=version.version_number, spec_path=spec_path
        )
    except ConflictError as exc:
        return RegistrationOutcome(ACTION_IGNORED, notes=(exc.message,), spec_path=spec_path)
    except RegistryError as exc:
        notes = [exc.message]
        diagnostics = getattr(exc, "diagnostics", None)
        if diagnostics:
            notes.extend(d.message for d in diagnostics[:5])
        return RegistrationOutcome(ACTION_IGNORED, notes=tuple(notes), spec_path=spec_path)


# ---------------------------------------------------------------------------
# Payload adapters
# ---------------------------------------------------------------------------


def push_event_from_payload(payload: dict) -> PushEvent:
    """Translate a webhook JSON body into the canonical push event.

    Accepts the canonical shape itself plus the two common Git-host shapes
    (detected by their repository/project envelopes).
    """
    if not isinstance(payload, dict):
        raise ValueError("push payload must be a JSON object")

    if "repo_url" in payload:
        return PushEvent(
            repo_url=str(payload.get("repo_url") or ""),
            repo_name=str(payload.get("repo_name") or _name_from_url(payload.get("repo_url"))),
            ref=str(payload.get("ref") or "main"),
            head_commit=str(payload.get("head_commit") or ""),
            changed_files=tuple(payload.get("changed_files") or ()),
            inline_specs=payload.get("inline_specs"),
        )

    if "repository" in payload:  # github-style
        repo = payload.get("repository") or {}
        commits = payload.get("commits") or []
        changed: list[str] = []
        for commit in commits:
            for key in ("added", "modified"):
                changed.extend(commit.get(key) or [])
        head = payload.get("head_commit") or {}
        return PushEvent(
            repo_url=str(repo.get("clone_url") or repo.get("html_url") or repo.get("url") or ""),
            repo_name=str(repo.get("name") or ""),
            ref=str(payload.get("ref") or "main"),
            head_commit=str(head.get("id") or payload.get("after") or ""),
            changed_files=tuple(dict.fromkeys(changed)),
        )

    if "project" in payload:  # gitlab-style
        project = payload.get("project") or {}
        commits = payload.get("commits") or []
        changed = []
        for commit in commits:
            for key in ("added", "modified"):
                changed.extend(commit.get(key) or [])
        return PushEvent(
            repo_url=str(project.get("git_http_url") or project.get("web_url") or ""),
            repo_name=str(project.get("name") or project.get("path_with_namespace") or ""),
            ref=str(payload.get("ref") or "main"),
            head_commit=str(payload.get("checkout_sha") or payload.get("after") or ""),
            changed_files=tuple(dict.fromkeys(changed)),
        )

    raise ValueError("unrecognized push payload shape")


def _name_from_url(url: object) -> str:
    if not isinstance(url, str) or not url:
        return ""
    return url.rstrip("/").rsplit("/", 1)[-1].removesuffix(".git")
