import { FlowEdge, FlowView } from "../api.js";
import { h, VNode } from "../render.js";
import { pageTitle } from "./shared.js";

const NODE_WIDTH = 150;
const NODE_HEIGHT = 34;
const COLUMN_GAP = 220;
const ROW_GAP = 70;
const MARGIN = 20;

interface Placed {
  id: string;
  x: number;
  y: number;
}

/**
 * Longest-path layering over the hub's edge list. Purely presentational: the
 * edges and the closure always come from the API as-is.
 */
export function layoutFlow(flow: FlowView): Placed[] {
  const layer = new Map<string, number>(flow.nodes.map((node) => [node, 0]));
  const cap = flow.nodes.length;
  for (let round = 0; round < cap; round += 1) {
    for (const edge of flow.edges) {
      const next = (layer.get(edge.sender) ?? 0) + 1;
      if (next < cap && next > (layer.get(edge.receiver) ?? 0)) {
        layer.set(edge.receiver, next);
      }
    }
  }
  const rows = new Map<number, number>();
  return flow.nodes.map((id) => {
    const column = layer.get(id) ?? 0;
    const row = rows.get(column) ?? 0;
    rows.set(column, row + 1);
    return {
      id,
      x: MARGIN + column * COLUMN_GAP,
      y: MARGIN + row * ROW_GAP,
    };
  });
}

function graphSvg(flow: FlowView): VNode {
  const placed = layoutFlow(flow);
  const byId = new Map(placed.map((p) => [p.id, p]));
  const width = Math.max(...placed.map((p) => p.x), 0) + NODE_WIDTH + MARGIN;
  const height = Math.max(...placed.map((p) => p.y), 0) + NODE_HEIGHT + MARGIN;

  const edges = flow.edges.map((edge) => {
    const from = byId.get(edge.sender);
    const to = byId.get(edge.receiver);
    if (!from || !to) return null;
    const x1 = from.x + NODE_WIDTH;
    const y1 = from.y + NODE_HEIGHT / 2;
    const x2 = to.x;
    const y2 = to.y + NODE_HEIGHT / 2;
    return h(
      "g",
      { class: "flow-edge", "data-edge": `${edge.sender}->${edge.receiver}` },
      h("line", { x1: String(x1), y1: String(y1), x2: String(x2), y2: String(y2), "marker-end": "url(#arrow)" }),
      h(
        "text",
        { x: String((x1 + x2) / 2), y: String((y1 + y2) / 2 - 6), class: "edge-label" },
        edge.datum_names.join(", "),
      ),
    );
  });

  const nodes = placed.map((p) =>
    h(
      "g",
      { class: "flow-node", "data-node": p.id },
      h("rect", { x: String(p.x), y: String(p.y), width: String(NODE_WIDTH), height: String(NODE_HEIGHT), rx: "6" }),
      h("text", { x: String(p.x + NODE_WIDTH / 2), y: String(p.y + NODE_HEIGHT / 2 + 4), "text-anchor": "middle" }, p.id),
    ),
  );

  return h(
    "svg",
    { class: "flow-graph", width: String(width), height: String(height), viewBox: `0 0 ${width} ${height}` },
    h(
      "defs",
      {},
      h(
        "marker",
        { id: "arrow", markerWidth: "8", markerHeight: "8", refX: "8", refY: "4", orient: "auto" },
        h("path", { d: "M0,0 L8,4 L0,8 z" }),
      ),
    ),
    edges.filter((edge): edge is VNode => edge !== null),
    nodes,
  );
}

export interface LinkDraft {
  sender: string;
  receiver: string;
  datum_names: string;
}

/** Parse the editor's textarea lines: "sender -> receiver: Datum, Datum". */
export function parseLinkLines(text: string): FlowEdge[] {
  const edges: FlowEdge[] = [];
  for (const rawLine of text.split("\n")) {
    const line = rawLine.trim();
    if (!line || line.startsWith("#")) continue;
    const arrow = line.indexOf("->");
    if (arrow < 0) throw new Error(`cannot parse link line: ${line}`);
    const sender = line.slice(0, arrow).trim();
    const rest = line.slice(arrow + 2);
    const colon = rest.indexOf(":");
    const receiver = (colon >= 0 ? rest.slice(0, colon) : rest).trim();
    const names =
      colon >= 0
        ? rest
            .slice(colon + 1)
            .split(",")
            .map((name) => name.trim())
            .filter(Boolean)
        : [];
    if (!sender || !receiver) throw new Error(`cannot parse link line: ${line}`);
    edges.push({ sender, receiver, datum_names: names });
  }
  return edges;
}

export function formatLinkLines(edges: FlowEdge[]): string {
  return edges
    .map((edge) => `${edge.sender} -> ${edge.receiver}: ${edge.datum_names.join(", ")}`)
    .join("\n");
}

export function flowView(
  flow: FlowView,
  dotUrl: string,
  editorError: string | null,
  onSave: (text: string) => void,
): VNode {
  return h(
    "section",
    { class: "view flow-view" },
    pageTitle("Data flow"),
    flow.nodes.length ? graphSvg(flow) : h("p", { class: "empty" }, "No services registered."),
    h(
      "p",
      { class: "closure-summary" },
      `Transitive reachability: ${flow.closure.length} pair(s).`,
    ),
    h(
      "ul",
      { class: "closure-list" },
      flow.closure.map(([sender, receiver]) =>
        h("li", { "data-pair": `${sender}->${receiver}` }, `${sender} → ${receiver}`),
      ),
    ),
    h("p", {}, h("a", { href: dotUrl, class: "dot-export" }, "DOT export")),
    h(
      "form",
      {
        class: "link-editor",
        onsubmit: (event: Event) => {
          event.preventDefault();
          const form = event.target as HTMLFormElement;
          const textarea = form.querySelector("textarea[name=links]") as HTMLTextAreaElement | null;
          onSave(textarea ? textarea.value : "");
        },
      },
      h("h3", {}, "Edit links"),
      h("p", { class: "hint" }, "One edge per line: sender -> receiver: Datum, Datum"),
      h("textarea", { name: "links", rows: "8" }, formatLinkLines(flow.edges)),
      editorError ? h("p", { class: "editor-error" }, editorError) : null,
      h("button", { type: "submit" }, "Save links"),
    ),
  );
}
