import { ServiceIndex, ServiceSummary } from "../api.js";
import { h, VNode } from "../render.js";
import { pageTitle } from "./shared.js";

function serviceRow(service: ServiceSummary): VNode {
  return h(
    "tr",
    { class: "service-row", "data-service": service.id },
    h("td", {}, h("a", { href: `#/services/${encodeURIComponent(service.id)}` }, service.name)),
    h("td", {}, service.origin),
    h("td", {}, service.current_version === null ? "-" : `v${service.current_version}`),
  );
}

function serviceTable(services: ServiceSummary[]): VNode {
  return h(
    "table",
    { class: "services" },
    h("thead", {}, h("tr", {}, h("th", {}, "Service"), h("th", {}, "Origin"), h("th", {}, "Version"))),
    h("tbody", {}, services.map(serviceRow)),
  );
}

export function serviceIndexView(index: ServiceIndex): VNode {
  return h(
    "section",
    { class: "view service-index" },
    pageTitle("Registered services"),
    index.services.length
      ? serviceTable(index.services)
      : h("p", { class: "empty" }, "No services process personal data yet."),
    h("h3", { class: "no-personal-data-header" }, "Services without personal data"),
    index.no_personal_data.length
      ? serviceTable(index.no_personal_data)
      : h("p", { class: "empty" }, "None."),
  );
}
