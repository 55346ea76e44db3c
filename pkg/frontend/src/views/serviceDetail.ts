import { ServiceDetail, SpecDiff } from "../api.js";
import { h, VNode } from "../render.js";
import { pageTitle, rawValue, refLink } from "./shared.js";

function indicatorCard(detail: ServiceDetail, index: number): VNode {
  const indicator = detail.indicators[index];
  return h(
    "article",
    { class: "indicator", "data-indicator": indicator.name },
    h("h4", {}, indicator.name),
    h("p", {}, h("code", { class: "site" }, indicator.site), " ", refLink(indicator.site)),
    indicator.constituent_fields.length
      ? h("p", { class: "fields" }, `Fields: ${indicator.constituent_fields.join(", ")}`)
      : null,
    indicator.covered_schemas.length
      ? h("p", { class: "covered" }, `Covers schemas: ${indicator.covered_schemas.join(", ")}`)
      : null,
    h(
      "table",
      { class: "effective" },
      h(
        "tbody",
        {},
        Object.entries(indicator.effective).map(([kind, fragments]) =>
          h(
            "tr",
            { "data-kind": kind },
            h("th", {}, kind),
            h("td", {}, rawValue(kind, fragments)),
            h("td", {}, h("code", { class: "provenance" }, indicator.provenance[kind] ?? "")),
          ),
        ),
      ),
    ),
  );
}

export function diffView(diff: SpecDiff, from: number, to: number): VNode {
  const empty =
    diff.indicators_added.length === 0 &&
    diff.indicators_removed.length === 0 &&
    diff.properties_changed.length === 0;
  return h(
    "div",
    { class: "diff-result" },
    h("h4", {}, `Changes from v${from} to v${to}`),
    empty ? h("p", { class: "empty" }, "No transparency-relevant changes.") : null,
    diff.indicators_added.length
      ? h(
          "div",
          { class: "diff-added" },
          h("h5", {}, "Indicators added"),
          h("ul", {}, diff.indicators_added.map((site) => h("li", {}, h("code", {}, site)))),
        )
      : null,
    diff.indicators_removed.length
      ? h(
          "div",
          { class: "diff-removed" },
          h("h5", {}, "Indicators removed"),
          h("ul", {}, diff.indicators_removed.map((site) => h("li", {}, h("code", {}, site)))),
        )
      : null,
    diff.properties_changed.length
      ? h(
          "table",
          { class: "diff-properties" },
          h(
            "thead",
            {},
            h("tr", {}, h("th", {}, "Site"), h("th", {}, "Kind"), h("th", {}, "Before"), h("th", {}, "After")),
          ),
          h(
            "tbody",
            {},
            diff.properties_changed.map((change) =>
              h(
                "tr",
                { class: "property-change", "data-kind": change.kind },
                h("td", {}, h("code", {}, change.site)),
                h("td", {}, change.kind),
                h("td", {}, h("code", {}, JSON.stringify(change.before))),
                h("td", {}, h("code", {}, JSON.stringify(change.after))),
              ),
            ),
          ),
        )
      : null,
  );
}

export function serviceDetailView(
  detail: ServiceDetail,
  specUrlOf: (version: number) => string,
  diffResult: { from: number; to: number; diff: SpecDiff } | null,
  onDiff: (from: number, to: number) => void,
): VNode {
  const versionNumbers = detail.versions.map((version) => version.version_number);
  return h(
    "section",
    { class: "view service-detail", "data-service": detail.id },
    pageTitle(detail.name),
    h(
      "p",
      { class: "meta" },
      `${detail.origin} service, ${detail.processes_personal_data ? "processes personal data" : "no personal data"}`,
      detail.repo_url ? ` — ${detail.repo_url}` : "",
    ),
    h("h3", {}, "Personal-data indicators"),
    detail.indicators.length
      ? detail.indicators.map((_, index) => indicatorCard(detail, index))
      : h("p", { class: "empty" }, "This service declares no personal-data indicators."),
    h("h3", {}, "Specification history"),
    h(
      "table",
      { class: "versions" },
      h(
        "thead",
        {},
        h("tr", {}, h("th", {}, "Version"), h("th", {}, "Received"), h("th", {}, "Source"), h("th", {}, "Content"), h("th", {}, "Spec")),
      ),
      h(
        "tbody",
        {},
        detail.versions.map((version) =>
          h(
            "tr",
            { class: "version-row", "data-version": String(version.version_number) },
            h("td", {}, `v${version.version_number}`),
            h("td", {}, version.received_at),
            h("td", {}, version.source),
            h("td", {}, h("code", { class: "hash" }, version.content_hash.slice(0, 12))),
            h("td", {}, h("a", { href: specUrlOf(version.version_number), target: "_blank" }, "raw")),
          ),
        ),
      ),
    ),
    detail.versions.length > 1
      ? h(
          "form",
          {
            class: "diff-form",
            onsubmit: (event: Event) => {
              event.preventDefault();
              const form = event.target as HTMLFormElement;
              const from = Number((form.querySelector("select[name=from]") as HTMLSelectElement).value);
              const to = Number((form.querySelector("select[name=to]") as HTMLSelectElement).value);
              onDiff(from, to);
            },
          },
          h("h3", {}, "Compare versions"),
          h(
            "select",
            { name: "from" },
            versionNumbers.map((n) => h("option", { value: String(n) }, `v${n}`)),
          ),
          " → ",
          h(
            "select",
            { name: "to" },
            versionNumbers.map((n) =>
              h("option", { value: String(n), selected: n === versionNumbers[versionNumbers.length - 1] }, `v${n}`),
            ),
          ),
          h("button", { type: "submit" }, "Diff"),
        )
      : null,
    diffResult ? diffView(diffResult.diff, diffResult.from, diffResult.to) : null,
  );
}
