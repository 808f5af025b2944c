/**
 * The four figure recipes.  Each one validates its input schema, groups
 * rows into series, assigns the house styles (coupling -> color,
 * temperature -> dash) and renders one SVG string.
 */

import { CsvTable, SeriesGroup, assertCompatibleUnits, groupRows } from "./csv";
import { Rect, Series, SeriesStyle, drawPanel } from "./plot";
import { SvgDoc } from "./svg";

export type FigureName = "fig1" | "fig1-inset" | "fig2" | "fig3";

export const FIGURE_NAMES: FigureName[] = [
  "fig1", "fig1-inset", "fig2", "fig3",
];

export const EXPECTED_COLUMNS: Record<FigureName, string[]> = {
  "fig1": ["t", "g", "T", "abs_nu", "arg_nu", "log_abs_nu"],
  "fig1-inset": ["Q", "g", "T", "tf", "density", "zero_atom_weight", "sigma"],
  "fig2": ["tf", "g", "T", "mean_Q", "var_Q"],
  "fig3": ["T", "g", "mean_Q_longtime", "stddev_over_window"],
};

/** default CSV file (under data/) for each figure */
export const DEFAULT_DATA: Record<FigureName, string[]> = {
  "fig1": ["decoherence.csv"],
  "fig1-inset": ["heat_distribution.csv"],
  "fig2": ["heat_vs_time.csv"],
  "fig3": ["heat_vs_temperature.csv"],
};

// house style: g = 0.1 black, 0.5 red, 1 blue; T = 0 dotted,
// 0.01 solid, 0.1 dashed; other values fall back to rank order
const COLORS = ["#000000", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b"];
const DASHES = ["1.5 3", "", "7 4", "7 3 2 3", "2 2"];

function houseColor(value: string, rank: number): string {
  const v = Number(value);
  if (v === 0.1) return COLORS[0];
  if (v === 0.5) return COLORS[1];
  if (v === 1) return COLORS[2];
  return COLORS[rank % COLORS.length];
}

function houseDash(value: string, rank: number): string {
  const v = Number(value);
  if (v === 0) return DASHES[0];
  if (v === 0.01) return DASHES[1];
  if (v === 0.1) return DASHES[2];
  return DASHES[rank % DASHES.length];
}

interface Keyed {
  table: CsvTable;
  group: SeriesGroup;
}

function collectGroups(tables: CsvTable[], keys: string[]): Keyed[] {
  const out: Keyed[] = [];
  for (const table of tables) {
    for (const group of groupRows(table, keys)) out.push({ table, group });
  }
  return out;
}

/** Distinct numeric values of one key, ascending, as rank lookup. */
function ranks(keyed: Keyed[], key: string): Map<string, number> {
  const distinct = [...new Set(keyed.map(({ group }) => group.values[key]))];
  distinct.sort((a, b) => Number(a) - Number(b));
  return new Map(distinct.map((v, i) => [v, i]));
}

function styleFor(keyed: Keyed[], colorKey: string,
                  dashKey: string | null): (g: SeriesGroup) => SeriesStyle {
  const colorRank = ranks(keyed, colorKey);
  const dashRank = dashKey === null ? null : ranks(keyed, dashKey);
  return (group) => ({
    stroke: houseColor(group.values[colorKey],
                         colorRank.get(group.values[colorKey]) ?? 0),
    dash: dashRank === null ? ""
      : houseDash(group.values[dashKey!],
                    dashRank.get(group.values[dashKey!]) ?? 0),
    width: 1.4,
  });
}

function pick(table: CsvTable, column: string, rows: number[]): number[] {
  const values = table.column(column);
  return rows.map((r) => values[r]);
}

function checked(tables: CsvTable[], figure: FigureName): void {
  for (const table of tables) table.requireColumns(EXPECTED_COLUMNS[figure]);
  assertCompatibleUnits(tables);
}

const PANEL: Rect = { x: 66, y: 18, w: 470, h: 340 };

function newDoc(): SvgDoc {
  return new SvgDoc(560, 420);
}

function fig1(tables: CsvTable[]): string {
  checked(tables, "fig1");
  const keyed = collectGroups(tables, ["g", "T"]);
  const style = styleFor(keyed, "g", "T");
  const series: Series[] = keyed.map(({ table, group }) => ({
    label: `g=${group.values["g"]}, T=${group.values["T"]}`,
    x: pick(table, "t", group.rows),
    y: pick(table, "abs_nu", group.rows),
    style: style(group),
  }));
  const doc = newDoc();
  // the weakest decoherence stays near 1 while the strongest underflows;
  // four decades keep the power-law-to-exponential crossover readable
  drawPanel(doc, PANEL,
            { label: "Ωt", kind: "log" },
            { label: "|ν(t)|", kind: "log", domain: [1e-4, 1.15] },
            series, { legend: "bottomleft" });
  return doc.toString();
}

function fig1Inset(tables: CsvTable[]): string {
  checked(tables, "fig1-inset");
  const keyed = collectGroups(tables, ["g", "T", "tf"]);
  const multiTf = new Set(keyed.map(({ group }) => group.values["tf"])).size > 1;
  const style = styleFor(keyed, "g", "T");
  const series: Series[] = keyed.map(({ table, group }) => ({
    label: `g=${group.values["g"]}, T=${group.values["T"]}` +
      (multiTf ? `, tf=${group.values["tf"]}` : ""),
    x: pick(table, "Q", group.rows),
    y: pick(table, "density", group.rows),
    style: style(group),
  }));
  const doc = newDoc();
  drawPanel(doc, PANEL,
            { label: "Q/Ω", kind: "linear" },
            { label: "P1(Q) Ω  (regular part)", kind: "linear" },
            series, { legend: "topright" });
  return doc.toString();
}

function fig2(tables: CsvTable[]): string {
  checked(tables, "fig2");
  const keyed = collectGroups(tables, ["g", "T"]);
  const style = styleFor(keyed, "g", "T");
  const series: Series[] = keyed.map(({ table, group }) => ({
    label: `g=${group.values["g"]}, T=${group.values["T"]}`,
    x: pick(table, "tf", group.rows),
    y: pick(table, "mean_Q", group.rows),
    style: style(group),
  }));
  const doc = newDoc();
  drawPanel(doc, PANEL,
            { label: "Ωtf", kind: "linear" },
            { label: "⟨Q⟩/Ω", kind: "linear" },
            series, { legend: "topright" });
  return doc.toString();
}

function sortedByX(series: Series): Series {
  const order = series.x.map((_, i) => i)
    .sort((a, b) => series.x[a] - series.x[b]);
  return {
    ...series,
    x: order.map((i) => series.x[i]),
    y: order.map((i) => series.y[i]),
  };
}

function fig3(tables: CsvTable[]): string {
  checked(tables, "fig3");
  const keyed = collectGroups(tables, ["g"]);
  // no dash cycle here; fig3 colors by panel position instead (strong
  // coupling blue in the main panel, weak coupling red in the inset)
  const order = ranks(keyed, "g");
  const palette = ["#1f77b4", "#2ca02c", "#9467bd", "#8c564b"];
  const toSeries = (k: Keyed, stroke: string): Series => sortedByX({
    label: `g=${k.group.values["g"]}`,
    x: pick(k.table, "T", k.group.rows),
    y: pick(k.table, "mean_Q_longtime", k.group.rows),
    style: { stroke, dash: "", width: 1.6 },
  });

  const minRank = 0;
  const splitInset = order.size > 1;
  const main: Series[] = [];
  const inset: Series[] = [];
  let mainCount = 0;
  for (const k of keyed) {
    const rank = order.get(k.group.values["g"]) ?? 0;
    if (splitInset && rank === minRank) {
      inset.push(toSeries(k, "#d62728"));
    } else {
      main.push(toSeries(k, palette[Math.max(0, mainCount++) % palette.length]));
    }
  }

  const doc = newDoc();
  const xspec = { label: "T/Ω", kind: "log" as const };
  drawPanel(doc, PANEL, xspec, { label: "⟨Q⟩∞/Ω", kind: "linear" },
            main, { legend: "bottomleft" });
  if (inset.length > 0) {
    const sub: Rect = {
      x: PANEL.x + PANEL.w * 0.52,
      y: PANEL.y + PANEL.h * 0.08,
      w: PANEL.w * 0.42,
      h: PANEL.h * 0.38,
    };
    drawPanel(doc, sub, { ...xspec, label: "" }, { label: "", kind: "linear" },
              inset, { legend: "topright", fontScale: 0.8, tickTarget: 4 });
  }
  return doc.toString();
}

export function renderFigure(figure: FigureName, tables: CsvTable[]): string {
  switch (figure) {
    case "fig1": return fig1(tables);
    case "fig1-inset": return fig1Inset(tables);
    case "fig2": return fig2(tables);
    case "fig3": return fig3(tables);
  }
}
