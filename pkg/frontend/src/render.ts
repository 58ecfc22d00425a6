// Every statistic shown to the user is bound to a path inside a server
// payload and rendered with the canonical serialization of that field.
// Nothing numeric is computed client side; the registry keeps the
// (element, payload, path) triple so an audit can re-resolve each path
// and compare byte for byte with what is on screen.

export function resolve(root: unknown, path: string): unknown {
  let node: unknown = root;
  for (const part of path.split(".")) {
    if (node === null || typeof node !== "object") {
      throw new Error(`path ${path} broke at ${part}`);
    }
    node = (node as Record<string, unknown>)[part];
    if (node === undefined) {
      throw new Error(`path ${path} missing at ${part}`);
    }
  }
  return node;
}

export function serialize(value: unknown): string {
  if (typeof value === "string") {
    return value;
  }
  if (
    typeof value === "number" ||
    typeof value === "boolean" ||
    value === null
  ) {
    return String(value);
  }
  throw new Error(`refusing to render non-scalar ${typeof value}`);
}

interface StatEntry {
  el: Element;
  attr: string | null; // null means textContent
  root: unknown;
  path: string;
}

export class StatRegistry {
  private entries: StatEntry[] = [];

  /** Render a payload field as element text. Rebinding an element
   * (frame players do this every tick) replaces its entry. */
  bind(el: Element, root: unknown, path: string): void {
    el.textContent = serialize(resolve(root, path));
    el.setAttribute("data-stat", path);
    this.entries = this.entries.filter(
      (e) => !(e.el === el && e.attr === null),
    );
    this.entries.push({ el, attr: null, root, path });
  }

  /** Render a payload field into an attribute (tooltips etc). */
  bindAttr(el: Element, attr: string, root: unknown, path: string): void {
    el.setAttribute(attr, serialize(resolve(root, path)));
    el.setAttribute("data-stat-attr", `${attr}:${path}`);
    this.entries = this.entries.filter(
      (e) => !(e.el === el && e.attr === attr),
    );
    this.entries.push({ el, attr, root, path });
  }

  get size(): number {
    return this.entries.length;
  }

  /** Drop bindings for elements no longer in the given document. */
  prune(doc: Document): void {
    this.entries = this.entries.filter((e) => doc.contains(e.el));
  }

  /**
   * Re-resolve every bound path and diff against what is rendered.
   * Returns human-readable mismatch descriptions; empty means every
   * statistic on screen equals its payload field byte for byte.
   */
  audit(): string[] {
    const problems: string[] = [];
    for (const { el, attr, root, path } of this.entries) {
      const want = serialize(resolve(root, path));
      const got = attr === null ? el.textContent : el.getAttribute(attr);
      if (got !== want) {
        problems.push(`${path}: rendered ${JSON.stringify(got)} != payload ${JSON.stringify(want)}`);
      }
    }
    return problems;
  }
}

export function elem<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  parent?: Element,
): HTMLElementTagNameMap[K] {
  const el = document.createElement(tag);
  if (className) {
    el.className = className;
  }
  if (parent) {
    parent.appendChild(el);
  }
  return el;
}

export const SVG_NS = "http://www.w3.org/2000/svg";

export function svgElem(
  tag: string,
  attrs: Record<string, string | number>,
  parent?: Element,
): SVGElement {
  const el = document.createElementNS(SVG_NS, tag) as SVGElement;
  for (const [k, v] of Object.entries(attrs)) {
    el.setAttribute(k, String(v));
  }
  if (parent) {
    parent.appendChild(el);
  }
  return el;
}
