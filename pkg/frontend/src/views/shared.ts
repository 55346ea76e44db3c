import { h, VNode } from "../render.js";

/**
 * Raw API fragment rendered verbatim. Every merged value the dashboard shows
 * goes through this, so what the user sees is exactly what the hub returned.
 */
export function rawValue(kind: string, value: unknown): VNode {
  return h(
    "code",
    { class: "merged-value", "data-kind": kind },
    JSON.stringify(value),
  );
}

/** Human badge for a retention fragment; the raw value is always shown beside it. */
export function retentionLabel(fragment: unknown): string {
  if (typeof fragment !== "object" || fragment === null) return "unspecified";
  const retention = fragment as Record<string, unknown>;
  if (retention["no_limit"] === true) return "unlimited";
  if (retention["volatile"] === true) return "volatile";
  const parts: string[] = [];
  for (const unit of ["years", "months", "days"] as const) {
    const amount = retention[unit];
    if (typeof amount === "number") parts.push(`${amount} ${unit}`);
  }
  return parts.length ? parts.join(", ") : "unspecified";
}

export function refLink(site: string): VNode {
  return h(
    "button",
    {
      class: "ref-link",
      "data-site": site,
      title: "Copy the declaration's reference link",
      onclick: () => {
        const clipboard = (globalThis as { navigator?: Navigator }).navigator?.clipboard;
        void clipboard?.writeText(site);
      },
    },
    "Ref-Link",
  );
}

export function errorPanel(message: string, onRetry: () => void): VNode {
  return h(
    "div",
    { class: "error-panel" },
    h("p", {}, `The hub request failed: ${message}`),
    h("button", { class: "retry", onclick: () => onRetry() }, "Retry"),
  );
}

export function loadingPanel(): VNode {
  return h("div", { class: "loading" }, "Loading…");
}

export function pageTitle(text: string): VNode {
  return h("h2", {}, text);
}
