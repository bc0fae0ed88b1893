export { readCdf, readResults } from "./csv.js";
export {
  FIGURE_KINDS,
  FigureKind,
  FigureOptions,
  cdfFigure,
  effectiveRateFigure,
  measurementsFigure,
  multiuserRateFigure,
} from "./figures.js";
export { CdfRow, ResultRow, SchemaError, cdfRowSchema, resultRowSchema } from "./schema.js";
export { ChartOptions, Series, linearTicks, renderLineChart } from "./svg.js";
export { renderFigure, run } from "./cli.js";
