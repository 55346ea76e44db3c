import { AggregatedDatum } from "../api.js";
import { h, VNode } from "../render.js";
import { pageTitle, rawValue, refLink, retentionLabel } from "./shared.js";

const KIND_LABELS: Record<string, string> = {
  retention_time: "Retention",
  recipient: "Recipients",
  third_country_transfer: "Third-country transfer",
  special_category: "Special category",
  profiling: "Profiling",
  purpose: "Purposes",
  source: "Source",
  data_category: "Data categories",
};

function mergedRow(kind: string, value: unknown): VNode {
  const label = KIND_LABELS[kind] ?? kind;
  if (value === "unspecified") {
    return h(
      "tr",
      { class: "merged-row", "data-kind": kind },
      h("th", {}, label),
      h("td", {}, h("span", { class: "unspecified" }, "unspecified")),
    );
  }
  const cells: VNode[] = [];
  if (kind === "retention_time") {
    cells.push(h("span", { class: "badge retention" }, retentionLabel(value)));
  }
  cells.push(rawValue(kind, value));
  return h("tr", { class: "merged-row", "data-kind": kind }, h("th", {}, label), h("td", {}, cells));
}

export function datumDetailView(datum: AggregatedDatum): VNode {
  return h(
    "section",
    { class: "view datum-detail", "data-datum": datum.datum_name },
    pageTitle(datum.datum_name),
    h("h3", {}, "Processed by"),
    h(
      "ul",
      { class: "processing-services" },
      datum.processing_services.map((id) =>
        h("li", { "data-service": id }, h("a", { href: `#/services/${encodeURIComponent(id)}` }, id)),
      ),
    ),
    h("h3", {}, "Aggregated transparency information"),
    h(
      "table",
      { class: "merged" },
      h("tbody", {}, Object.entries(datum.merged).map(([kind, value]) => mergedRow(kind, value))),
    ),
    datum.notes.length
      ? h(
          "div",
          { class: "merge-notes" },
          h("h3", {}, "Merge notes"),
          h("ul", {}, datum.notes.map((note) => h("li", {}, note))),
        )
      : null,
    h("h3", {}, "Declarations"),
    h(
      "table",
      { class: "contributions" },
      h(
        "thead",
        {},
        h("tr", {}, h("th", {}, "Service"), h("th", {}, "Kind"), h("th", {}, "Declared at"), h("th", {}, "")),
      ),
      h(
        "tbody",
        {},
        datum.contributions.map((contribution) =>
          h(
            "tr",
            { class: "contribution" },
            h("td", {}, contribution.service),
            h("td", {}, contribution.kind),
            h("td", {}, h("code", { class: "site" }, contribution.site)),
            h("td", {}, refLink(contribution.site)),
          ),
        ),
      ),
    ),
  );
}
