/** One framed panel: axes, ticks, clipped line series, optional legend. */

import { Scale, ScaleKind, fmtTick, makeScale } from "./scale";
import { SvgDoc } from "./svg";

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface AxisSpec {
  label: string;
  kind: ScaleKind;
  /** fixed domain; otherwise padded data extent */
  domain?: [number, number];
}

export interface SeriesStyle {
  stroke: string;
  /** stroke-dasharray; empty string means solid */
  dash: string;
  width: number;
}

export interface Series {
  label: string;
  x: number[];
  y: number[];
  style: SeriesStyle;
}

export type LegendCorner = "none" | "topleft" | "topright" | "bottomleft";

export interface PanelOptions {
  legend?: LegendCorner;
  fontScale?: number;
  tickTarget?: number;
}

function dataExtent(series: Series[], pick: (s: Series) => number[],
                    kind: ScaleKind): [number, number] | null {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const v of pick(s)) {
      if (!Number.isFinite(v)) continue;
      if (kind === "log" && v <= 0) continue;
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo > hi) return null;
  return [lo, hi];
}

function paddedDomain(extent: [number, number] | null,
                      kind: ScaleKind): [number, number] {
  if (extent === null) return kind === "log" ? [0.1, 10] : [0, 1];
  let [lo, hi] = extent;
  if (lo === hi) {
    if (kind === "log") return [lo / 2, hi * 2];
    const pad = Math.max(1, Math.abs(lo)) * 0.5;
    return [lo - pad, hi + pad];
  }
  if (kind === "log") {
    const factor = Math.pow(hi / lo, 0.03);
    return [lo / factor, hi * factor];
  }
  const pad = (hi - lo) * 0.04;
  return [lo - pad, hi + pad];
}

/** Consecutive plottable points; breaks at gaps so lines never bridge them. */
function segments(s: Series, xKind: ScaleKind,
                  yKind: ScaleKind): Array<Array<[number, number]>> {
  const runs: Array<Array<[number, number]>> = [];
  let run: Array<[number, number]> = [];
  for (let i = 0; i < s.x.length; i++) {
    const x = s.x[i];
    const y = s.y[i];
    const ok = Number.isFinite(x) && Number.isFinite(y) &&
      (xKind !== "log" || x > 0) && (yKind !== "log" || y > 0);
    if (ok) {
      run.push([x, y]);
    } else if (run.length > 0) {
      runs.push(run);
      run = [];
    }
  }
  if (run.length > 0) runs.push(run);
  return runs.filter((r) => r.length >= 2);
}

function drawLegend(doc: SvgDoc, rect: Rect, series: Series[],
                    corner: LegendCorner, fontScale: number): void {
  if (corner === "none" || series.length === 0) return;
  const font = 9 * fontScale;
  const lineLen = 18 * fontScale;
  const pad = 6 * fontScale;
  const lineHeight = 12 * fontScale;
  const labelWidth = Math.max(...series.map((s) => s.label.length)) * font * 0.56;
  const boxW = lineLen + 3 * pad + labelWidth;
  const boxH = series.length * lineHeight + 2 * pad;
  const inset = 8;
  const bx = corner === "topleft" || corner === "bottomleft"
    ? rect.x + inset : rect.x + rect.w - boxW - inset;
  const by = corner === "bottomleft"
    ? rect.y + rect.h - boxH - inset : rect.y + inset;
  doc.rect(bx, by, boxW, boxH,
           { fill: "white", stroke: "#888888", "stroke-width": 0.6 });
  series.forEach((s, i) => {
    const cy = by + pad + (i + 0.5) * lineHeight;
    doc.line(bx + pad, cy, bx + pad + lineLen, cy, {
      stroke: s.style.stroke,
      "stroke-width": s.style.width,
      "stroke-dasharray": s.style.dash,
    });
    doc.text(bx + 2 * pad + lineLen, cy + font * 0.35, s.label,
             { "font-size": font });
  });
}

export function drawPanel(doc: SvgDoc, rect: Rect, xspec: AxisSpec,
                          yspec: AxisSpec, series: Series[],
                          opts: PanelOptions = {}): void {
  const fontScale = opts.fontScale ?? 1;
  const font = 11 * fontScale;
  const tickLen = 5 * fontScale;

  const xdom = xspec.domain ??
    paddedDomain(dataExtent(series, (s) => s.x, xspec.kind), xspec.kind);
  const ydom = yspec.domain ??
    paddedDomain(dataExtent(series, (s) => s.y, yspec.kind), yspec.kind);
  const xscale = makeScale(xspec.kind, xdom, [rect.x, rect.x + rect.w]);
  const yscale = makeScale(yspec.kind, ydom, [rect.y + rect.h, rect.y]);

  doc.rect(rect.x, rect.y, rect.w, rect.h,
           { fill: "none", stroke: "black", "stroke-width": 1 });

  const inDomain = (v: number, dom: [number, number]) =>
    v >= dom[0] * (1 - 1e-12) - 1e-12 && v <= dom[1] * (1 + 1e-12) + 1e-12;
  for (const t of xscale.ticks(opts.tickTarget)) {
    if (!inDomain(t, xdom)) continue;
    const px = xscale.map(t);
    doc.line(px, rect.y + rect.h, px, rect.y + rect.h - tickLen,
             { stroke: "black", "stroke-width": 1 });
    doc.text(px, rect.y + rect.h + font + 3, fmtTick(t),
             { "font-size": font, "text-anchor": "middle" });
  }
  for (const t of yscale.ticks(opts.tickTarget)) {
    if (!inDomain(t, ydom)) continue;
    const py = yscale.map(t);
    doc.line(rect.x, py, rect.x + tickLen, py,
             { stroke: "black", "stroke-width": 1 });
    doc.text(rect.x - 5, py + font * 0.35, fmtTick(t),
             { "font-size": font, "text-anchor": "end" });
  }

  if (xspec.label) {
    doc.text(rect.x + rect.w / 2, rect.y + rect.h + 2.4 * font + 6,
             xspec.label, { "font-size": font + 1, "text-anchor": "middle" });
  }
  if (yspec.label) {
    const lx = rect.x - 4.2 * font;
    const ly = rect.y + rect.h / 2;
    doc.text(lx, ly, yspec.label, {
      "font-size": font + 1,
      "text-anchor": "middle",
      transform: `rotate(-90 ${lx} ${ly})`,
    });
  }

  const clip = doc.clipRect(rect.x, rect.y, rect.w, rect.h);
  doc.open("g", { "clip-path": clip });
  for (const s of series) {
    for (const run of segments(s, xspec.kind, yspec.kind)) {
      doc.polyline(run.map(([x, y]) => [xscale.map(x), yscale.map(y)]), {
        stroke: s.style.stroke,
        "stroke-width": s.style.width,
        "stroke-dasharray": s.style.dash,
      });
    }
  }
  doc.close("g");

  drawLegend(doc, rect, series, opts.legend ?? "none", fontScale);
}
