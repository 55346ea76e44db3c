import { IndexEntry } from "../api.js";
import { h, VNode } from "../render.js";
import { pageTitle } from "./shared.js";

function entrySection(key: string, entry: IndexEntry): VNode {
  return h(
    "article",
    { class: "index-entry", "data-key": key },
    h("h3", {}, key),
    entry.descriptions.length ? h("p", { class: "descriptions" }, entry.descriptions.join(" | ")) : null,
    h(
      "p",
      {},
      "Services: ",
      entry.services.map((id, position) =>
        h(
          "span",
          {},
          position > 0 ? ", " : "",
          h("a", { href: `#/services/${encodeURIComponent(id)}` }, id),
        ),
      ),
    ),
    h(
      "p",
      {},
      "Data: ",
      entry.datum_names.map((name, position) =>
        h(
          "span",
          {},
          position > 0 ? ", " : "",
          h("a", { href: `#/data/${encodeURIComponent(name)}` }, name),
        ),
      ),
    ),
  );
}

export function purposeIndexView(purposes: Record<string, IndexEntry>): VNode {
  const keys = Object.keys(purposes);
  return h(
    "section",
    { class: "view purpose-index" },
    pageTitle("Purposes"),
    keys.length === 0
      ? h("p", { class: "empty" }, "No purposes declared.")
      : keys.map((key) => entrySection(key, purposes[key])),
  );
}

export function recipientIndexView(recipients: Record<string, IndexEntry>): VNode {
  const keys = Object.keys(recipients);
  return h(
    "section",
    { class: "view recipient-index" },
    pageTitle("Recipients"),
    keys.length === 0
      ? h("p", { class: "empty" }, "No recipients declared.")
      : keys.map((key) => entrySection(key, recipients[key])),
  );
}
