/**
 * Minimal render tree. Views are pure functions from API data to VNodes, so
 * they can be inspected in tests without a browser; mount() turns a tree into
 * real DOM in the app shell.
 */

export type EventHandler = (event: Event) => void;

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  handlers: Record<string, EventHandler>;
  children: Array<VNode | string>;
}

type Child = VNode | string | null | undefined | false;
type Attrs = Record<string, string | EventHandler | boolean | undefined>;

export function h(tag: string, attrs: Attrs = {}, ...children: Array<Child | Child[]>): VNode {
  const plain: Record<string, string> = {};
  const handlers: Record<string, EventHandler> = {};
  for (const [key, value] of Object.entries(attrs)) {
    if (value === undefined || value === false) continue;
    if (key.startsWith("on") && typeof value === "function") {
      handlers[key.slice(2).toLowerCase()] = value;
    } else if (value === true) {
      plain[key] = "";
    } else {
      plain[key] = String(value);
    }
  }
  const flat: Array<VNode | string> = [];
  const push = (child: Child | Child[]): void => {
    if (child === null || child === undefined || child === false) return;
    if (Array.isArray(child)) {
      child.forEach(push);
    } else {
      flat.push(child);
    }
  };
  children.forEach(push);
  return { tag, attrs: plain, handlers, children: flat };
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function mount(node: VNode, target: Element): void {
  target.replaceChildren(toDom(node, target.ownerDocument));
}

function toDom(node: VNode | string, doc: Document, namespace?: string): Node {
  if (typeof node === "string") {
    return doc.createTextNode(node);
  }
  const ns = namespace ?? (node.tag === "svg" ? SVG_NS : undefined);
  const el = ns ? doc.createElementNS(ns, node.tag) : doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    el.setAttribute(key, value);
  }
  for (const [event, handler] of Object.entries(node.handlers)) {
    el.addEventListener(event, handler);
  }
  for (const child of node.children) {
    el.appendChild(toDom(child, doc, ns));
  }
  return el;
}

/** Concatenated text content of a subtree (test helper and clipboard source). */
export function textOf(node: VNode | string): string {
  if (typeof node === "string") return node;
  return node.children.map(textOf).join("");
}

/** Depth-first search over a render tree. */
export function findAll(node: VNode, predicate: (candidate: VNode) => boolean): VNode[] {
  const found: VNode[] = [];
  const walk = (candidate: VNode | string): void => {
    if (typeof candidate === "string") return;
    if (predicate(candidate)) found.push(candidate);
    candidate.children.forEach(walk);
  };
  walk(node);
  return found;
}

export function findByClass(node: VNode, className: string): VNode[] {
  return findAll(node, (candidate) =>
    (candidate.attrs["class"] ?? "").split(/\s+/).includes(className),
  );
}
