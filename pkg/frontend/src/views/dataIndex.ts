import { AggregatedDatum } from "../api.js";
import { h, VNode } from "../render.js";
import { pageTitle, retentionLabel } from "./shared.js";

export function dataIndexView(data: AggregatedDatum[]): VNode {
  return h(
    "section",
    { class: "view data-index" },
    pageTitle("Personal data"),
    data.length === 0
      ? h("p", { class: "empty" }, "No personal-data indicators registered.")
      : h(
          "table",
          { class: "datums" },
          h(
            "thead",
            {},
            h("tr", {}, h("th", {}, "Datum"), h("th", {}, "Services"), h("th", {}, "Retention")),
          ),
          h(
            "tbody",
            {},
            data.map((datum) =>
              h(
                "tr",
                { class: "datum-row", "data-datum": datum.datum_name },
                h(
                  "td",
                  {},
                  h("a", { href: `#/data/${encodeURIComponent(datum.datum_name)}` }, datum.datum_name),
                ),
                h("td", {}, String(datum.processing_services.length)),
                h("td", {}, retentionLabel(datum.merged["retention_time"])),
              ),
            ),
          ),
        ),
  );
}
