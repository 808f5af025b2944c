/**
 * Minimal SVG assembly.  Everything figkit draws is lines, polylines,
 * text and rectangles, so a string builder beats a renderer dependency
 * and keeps the output byte-stable.
 */

export type Attrs = Record<string, string | number>;

function fmt(n: number): string {
  const r = Math.round(n * 100) / 100;
  return Object.is(r, -0) ? "0" : String(r);
}

export function escapeXml(s: string): string {
  return s.replace(/[&<>"]/g, (c) =>
    ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;" }[c] as string));
}

function attrString(attrs: Attrs): string {
  let out = "";
  for (const [key, value] of Object.entries(attrs)) {
    if (value === "") continue;
    out += ` ${key}="${typeof value === "number" ? fmt(value) : escapeXml(value)}"`;
  }
  return out;
}

export class SvgDoc {
  private body: string[] = [];
  private defs: string[] = [];
  private idCounter = 0;

  constructor(readonly width: number, readonly height: number) {}

  uid(prefix: string): string {
    return `${prefix}${this.idCounter++}`;
  }

  line(x1: number, y1: number, x2: number, y2: number, attrs: Attrs = {}): void {
    this.body.push(`<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" ` +
                   `y2="${fmt(y2)}"${attrString(attrs)}/>`);
  }

  rect(x: number, y: number, w: number, h: number, attrs: Attrs = {}): void {
    this.body.push(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" ` +
                   `height="${fmt(h)}"${attrString(attrs)}/>`);
  }

  polyline(points: Array<[number, number]>, attrs: Attrs = {}): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.body.push(`<polyline points="${pts}" fill="none"${attrString(attrs)}/>`);
  }

  text(x: number, y: number, content: string, attrs: Attrs = {}): void {
    this.body.push(`<text x="${fmt(x)}" y="${fmt(y)}"${attrString(attrs)}>` +
                   `${escapeXml(content)}</text>`);
  }

  /** Register a rectangular clip path; returns the clip-path attribute value. */
  clipRect(x: number, y: number, w: number, h: number): string {
    const id = this.uid("clip");
    this.defs.push(`<clipPath id="${id}"><rect x="${fmt(x)}" y="${fmt(y)}" ` +
                   `width="${fmt(w)}" height="${fmt(h)}"/></clipPath>`);
    return `url(#${id})`;
  }

  open(tag: string, attrs: Attrs = {}): void {
    this.body.push(`<${tag}${attrString(attrs)}>`);
  }

  close(tag: string): void {
    this.body.push(`</${tag}>`);
  }

  toString(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
        `height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" ` +
        `font-family="Helvetica, Arial, sans-serif">`,
      `<defs>${this.defs.join("")}</defs>`,
      `<rect width="${this.width}" height="${this.height}" fill="white"/>`,
      ...this.body,
      `</svg>`,
      ``,
    ].join("\n");
  }
}
