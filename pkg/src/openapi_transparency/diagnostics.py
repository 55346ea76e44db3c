"""Diagnostic records shared by the parser, resolver, and validation surfaces."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .sites import SitePath


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    site: SitePath | None = None
    line: int | None = None  # 1-based, parse failures only
    column: int | None = None

    def to_dict(self) -> dict:
        out: dict = {
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
        }
        if self.site is not None:
            out["site"] = self.site.text()
        if self.line is not None:
            out["line"] = self.line
        if self.column is not None:
            out["column"] = self.column
        return out


def error(code: str, message: str, **kw) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, **kw)


def warning(code: str, message: str, **kw) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, **kw)


def info(code: str, message: str, **kw) -> Diagnostic:
    return Diagnostic(Severity.INFO, code, message, **kw)


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)
