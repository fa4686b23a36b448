export { parseCurveCsv, SchemaError } from "./csv.js";
export type { CurveTable, Series } from "./csv.js";
export { renderCurves } from "./plot.js";
export type { PlotOptions } from "./plot.js";
