export { CsvTable, SchemaError, SeriesGroup, assertCompatibleUnits,
         groupRows, parseCsv, readCsv } from "./csv";
export { Scale, ScaleKind, fmtTick, linearTicks, logTicks,
         makeScale } from "./scale";
export { Attrs, SvgDoc, escapeXml } from "./svg";
export { AxisSpec, PanelOptions, Rect, Series, SeriesStyle,
         drawPanel } from "./plot";
export { DEFAULT_DATA, EXPECTED_COLUMNS, FIGURE_NAMES, FigureName,
         renderFigure } from "./figures";
export { dataDir, runCli } from "./cli";
