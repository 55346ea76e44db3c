"""Bundled example specifications: a desk-scale fitness architecture corpus."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def fixture_path(name: str) -> Path:
    """Absolute path of a bundled fixture file (e.g. "weight-schema.yaml")."""
    return Path(str(resources.files(__package__) / name))


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


def fitness_corpus_dir() -> Path:
    """Directory with the six fitness-scenario service specs and links.json."""
    return fixture_path("fitness")


def fitness_service_names() -> list[str]:
    return sorted(p.stem for p in fitness_corpus_dir().glob("*.yaml"))
