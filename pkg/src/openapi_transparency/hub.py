"""HTTP surface of the transparency hub.

All request and response bodies are UTF-8 JSON. Errors use a problem-details
shape {code, message, field?}; spec-validation failures additionally carry a
diagnostics array. Mutating routes can be protected with a shared bearer
token.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from fastapi import Body, FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .aggregation import FlowEdge, flow_graph_dot
from .registry import (
    ConflictError,
    FieldValidationError,
    NotFoundError,
    Registry,
    RegistryError,
    ServiceRecord,
    SpecValidationError,
    SystemWideInfo,
    datum_to_dict,
)
from .vocabulary import serialize_property, value_to_dict
from .webhook import WebhookConfig, handle_push, push_event_from_payload

ENV_PORT = "TRANSPARENCY_HUB_PORT"
ENV_DATA_DIR = "TRANSPARENCY_HUB_DATA_DIR"
ENV_TOKEN = "TRANSPARENCY_HUB_TOKEN"
ENV_WEBHOOK_SECRET = "TRANSPARENCY_HUB_WEBHOOK_SECRET"


@dataclass
class HubConfig:
    token: str | None = None
    webhook_secret: str | None = None
    webhook: WebhookConfig | None = None

    @classmethod
    def from_env(cls) -> "HubConfig":
        return cls(
            token=os.environ.get(ENV_TOKEN) or None,
            webhook_secret=os.environ.get(ENV_WEBHOOK_SECRET) or None,
        )


def _problem(status: int, code: str, message: str, **extra) -> JSONResponse:
    body = {"code": code, "message": message}
    body.update({k: v for k, v in extra.items() if v is not None})
    return JSONResponse(body, status_code=status)


_STATUS_BY_ERROR = {
    ConflictError: 409,
    NotFoundError: 404,
    SpecValidationError: 422,
    FieldValidationError: 422,
}


def _service_summary(registry: Registry, record: ServiceRecord) -> dict:
    return {
        "id": record.id,
        "name": record.name,
        "origin": record.origin,
        "repo_url": record.repo_url,
        "current_version": record.current_version,
        "processes_personal_data": registry.processes_personal_data(record),
    }


def create_app(registry: Registry, config: HubConfig | None = None) -> FastAPI:
    config = config or HubConfig()
    app = FastAPI(title="transparency hub", docs_url=None, redoc_url=None, openapi_url=None)

    @app.exception_handler(RegistryError)
    async def registry_error_handler(_request: Request, exc: RegistryError):
        status = _STATUS_BY_ERROR.get(type(exc), 400)
        extra = {}
        if isinstance(exc, FieldValidationError):
            extra["field"] = exc.field
        if isinstance(exc, SpecValidationError):
            extra["diagnostics"] = [d.to_dict() for d in exc.diagnostics]
        return _problem(status, exc.code, exc.message, **extra)

    @app.exception_handler(RequestValidationError)
    async def request_validation_handler(_request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        field = ".".join(str(part) for part in first.get("loc", ()) if part != "body") or None
        return _problem(422, "invalid-request", str(first.get("msg", "request failed validation")), field=field)

    @app.exception_handler(StarletteHTTPException)
    async def http_exception_handler(_request: Request, exc: StarletteHTTPException):
        return _problem(exc.status_code, "http-error", str(exc.detail))

    def _authorize(request: Request) -> JSONResponse | None:
        if config.token is None:
            return None
        header = request.headers.get("authorization", "")
        if header == f"Bearer {config.token}":
            return None
        return _problem(401, "unauthorized", "missing or invalid bearer token")

    def _expect(payload: dict, key: str) -> object:
        if key not in payload:
            raise FieldValidationError(key, f"missing required field {key!r}")
        return payload[key]

    # -- services ---------------------------------------------------------

    @app.post("/api/services", status_code=201)
    def register_service(request: Request, payload: dict = Body(...)):
        denied = _authorize(request)
        if denied:
            return denied
        name = str(_expect(payload, "name"))
        spec = str(_expect(payload, "spec"))
        record, version = registry.register_service(
            name=name,
            spec_text=spec,
            origin=str(payload.get("origin", "internal")),
            repo_url=payload.get("repo_url"),
        )
        return {"service": _service_summary(registry, record), "version": version.to_dict()}

    @app.get("/api/services")
    def list_services():
        processing, no_personal_data = [], []
        for record in registry.list_services():
            summary = _service_summary(registry, record)
            (processing if summary["processes_personal_data"] else no_personal_data).append(summary)
        return {"services": processing, "no_personal_data": no_personal_data}

    @app.get("/api/services/{service_id}")
    def get_service(service_id: str):
        record = registry.get_service(service_id)
        document_effectives = registry.effective_properties(service_id)
        indicators = []
        for effective in document_effectives:
            ind = effective.indicator
            indicators.append(
                {
                    "name": ind.name,
                    "site": ind.site.text(),
                    "service_local": ind.service_local,
                    "constituent_fields": list(ind.constituent_fields),
                    "covered_schemas": list(ind.covered_schemas),
                    "direct_properties": [serialize_property(p) for p in ind.direct_properties],
                    "effective": {
                        kind.value: [value_to_dict(kind, p.value) for p in props]
                        for kind, props in effective.by_kind.items()
                    },
                    "provenance": {
                        kind.value: site.text() for kind, site in effective.provenance.items()
                    },
                }
            )
        summary = _service_summary(registry, record)
        summary["versions"] = [v.to_dict() for v in record.versions]
        summary["indicators"] = indicators
        return summary

    @app.post("/api/services/{service_id}/versions")
    def add_version(service_id: str, request: Request, payload: dict = Body(...)):
        denied = _authorize(request)
        if denied:
            return denied
        spec = str(_expect(payload, "spec"))
        version, changed = registry.add_spec_version(service_id, spec)
        body = {"version": version.to_dict(), "changed": changed}
        return JSONResponse(body, status_code=201 if changed else 200)

    @app.get("/api/services/{service_id}/versions/{number}")
    def get_version(service_id: str, number: int):
        text = registry.spec_text(service_id, number)
        return Response(content=text, media_type="application/yaml")

    @app.get("/api/services/{service_id}/diff")
    def diff(service_id: str, request: Request):
        params = request.query_params
        try:
            a = int(params.get("from", ""))
            b = int(params.get("to", ""))
        except ValueError:
            raise FieldValidationError("from/to", "query needs integer 'from' and 'to' versions")
        return registry.diff_versions(service_id, a, b).to_dict()

    # -- links / flow -------------------------------------------------------

    @app.put("/api/links")
    def set_links(request: Request, payload: dict = Body(...)):
        denied = _authorize(request)
        if denied:
            return denied
        edges_raw = _expect(payload, "edges")
        if not isinstance(edges_raw, list):
            raise FieldValidationError("edges", "must be a list")
        edges = []
        for entry in edges_raw:
            if not isinstance(entry, dict):
                raise FieldValidationError("edges", "each edge must be an object")
            edges.append(
                FlowEdge(
                    sender=str(entry.get("sender", "")),
                    receiver=str(entry.get("receiver", "")),
                    datum_names=tuple(entry.get("datum_names", ())),
                )
            )
        try:
            graph = registry.set_links(edges)
        except ValueError as exc:
            raise FieldValidationError("edges", str(exc))
        return {
            "edges": [
                {"sender": e.sender, "receiver": e.receiver, "datum_names": list(e.datum_names)}
                for e in graph.edges
            ]
        }

    @app.get("/api/flow")
    def get_flow():
        graph, closure = registry.get_flow()
        return {
            "nodes": list(graph.nodes),
            "edges": [
                {"sender": e.sender, "receiver": e.receiver, "datum_names": list(e.datum_names)}
                for e in graph.edges
            ],
            "closure": [list(pair) for pair in sorted(closure)],
        }

    # -- system info ----------------------------------------------------------

    @app.put("/api/system-info")
    def set_system_info(request: Request, payload: dict = Body(...)):
        denied = _authorize(request)
        if denied:
            return denied
        info = SystemWideInfo.from_dict(payload)
        registry.set_system_info(info)
        return info.to_dict()

    @app.get("/api/system-info")
    def get_system_info():
        return registry.get_system_info().to_dict()

    # -- aggregated views --------------------------------------------------------

    @app.get("/api/data")
    def get_data():
        return {"data": [datum_to_dict(d) for d in registry.aggregated_data()]}

    @app.get("/api/data/{name}")
    def get_datum(name: str):
        wanted = name.casefold().strip()
        for datum in registry.aggregated_data():
            if datum.datum_name.casefold().strip() == wanted:
                return datum_to_dict(datum)
        raise NotFoundError(f"no aggregated datum named {name!r}")

    @app.get("/api/purposes")
    def get_purposes():
        return {"purposes": registry.purposes()}

    @app.get("/api/recipients")
    def get_recipients():
        return {"recipients": registry.recipients()}

    @app.get("/api/report")
    def get_report():
        return registry.generate_report()

    @app.get("/api/report.dot")
    def get_report_dot():
        graph, closure = registry.get_flow()
        return Response(content=flow_graph_dot(graph, closure), media_type="text/vnd.graphviz")

    # -- webhook -------------------------------------------------------------------

    @app.post("/api/hooks/push", status_code=202)
    def hooks_push(request: Request, payload: dict = Body(...)):
        if config.webhook_secret is not None:
            provided = request.headers.get("x-webhook-secret", "")
            if provided != config.webhook_secret:
                return _problem(401, "unauthorized", "missing or invalid webhook secret")
        try:
            event = push_event_from_payload(payload)
        except ValueError as exc:
            return _problem(400, "invalid-push-event", str(exc))
        outcomes = handle_push(event, registry, config.webhook)
        return {"outcomes": [o.to_dict() for o in outcomes]}

    return app
