import { CdfRow, ResultRow, SchemaError } from "./schema.js";
import { ChartOptions, Series, renderLineChart } from "./svg.js";

export const FIGURE_KINDS = ["measurements", "effective-rate", "cdf", "multiuser-rate"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureOptions {
  /** plot only these schemes; every one must be present in the data */
  schemes?: string[];
  title?: string;
  logY?: boolean;
}

const DASHES = ["", "7 4", "2 3", "7 3 2 3"];

function uniqueSorted<T extends number | string>(values: T[]): T[] {
  return [...new Set(values)].sort((a, b) => (a < b ? -1 : a > b ? 1 : 0));
}

/** Validate an optional scheme filter against the schemes the CSV holds;
 * absent schemes are an error, never a silent drop. */
function selectSchemes(present: string[], requested?: string[]): string[] {
  const have = uniqueSorted(present);
  if (!requested) return have;
  const missing = requested.filter((s) => !have.includes(s));
  if (missing.length > 0) {
    throw new SchemaError(
      `schemes not present in the CSV: ${missing.join(", ")} (have: ${have.join(", ")})`,
    );
  }
  return uniqueSorted(requested);
}

function sortedXY(
  rows: ResultRow[],
): { x: number[]; y: number[]; err: number[] } {
  const sorted = [...rows].sort((a, b) => a.sweep_value - b.sweep_value);
  return {
    x: sorted.map((r) => r.sweep_value),
    y: sorted.map((r) => r.mean),
    err: sorted.map((r) => r.stderr),
  };
}

/** frame lengths present as effective-rate metrics, e.g. [200, 400] */
function frameLengths(rows: ResultRow[], prefix: string): number[] {
  const lengths = rows
    .map((r) => r.metric)
    .filter((m) => m.startsWith(prefix))
    .map((m) => Number(m.slice(prefix.length)))
    .filter((v) => Number.isFinite(v) && v > 0);
  return uniqueSorted(lengths);
}

function requireRows<T>(rows: T[], what: string): T[] {
  if (rows.length === 0) throw new SchemaError(`no rows for ${what}`);
  return rows;
}

/** Mean pilot slots until completion vs SNR, one line per scheme. */
export function measurementsFigure(rows: ResultRow[], opts: FigureOptions = {}): string {
  const relevant = requireRows(
    rows.filter((r) => r.sweep_var === "snr_db" && r.metric === "t_e_slots"),
    "metric t_e_slots over snr_db (single-user results.csv expected)",
  );
  const schemes = selectSchemes(relevant.map((r) => r.scheme), opts.schemes);
  const series: Series[] = schemes.map((scheme) => ({
    label: scheme,
    ...sortedXY(relevant.filter((r) => r.scheme === scheme)),
  }));
  return renderLineChart(series, {
    title: opts.title ?? "Measurements until completion vs SNR",
    xLabel: "SNR (dB)",
    yLabel: "mean pilot slots",
    logY: opts.logY,
    yMin: opts.logY ? undefined : 0,
  });
}

/** Effective rate vs SNR, one line per (scheme, frame length). */
export function effectiveRateFigure(rows: ResultRow[], opts: FigureOptions = {}): string {
  const prefix = "effective_rate_tc";
  const relevant = requireRows(
    rows.filter((r) => r.sweep_var === "snr_db" && r.metric.startsWith(prefix)),
    `metrics ${prefix}* over snr_db (single-user results.csv expected)`,
  );
  const schemes = selectSchemes(relevant.map((r) => r.scheme), opts.schemes);
  const frames = frameLengths(relevant, prefix);
  const series: Series[] = [];
  schemes.forEach((scheme) => {
    frames.forEach((tc, fi) => {
      const sub = relevant.filter((r) => r.scheme === scheme && r.metric === `${prefix}${tc}`);
      if (sub.length === 0) return;
      series.push({
        label: `${scheme}, frame ${tc}`,
        dash: DASHES[fi % DASHES.length],
        ...sortedXY(sub),
      });
    });
  });
  return renderLineChart(series, {
    title: opts.title ?? "Effective rate vs SNR",
    xLabel: "SNR (dB)",
    yLabel: "effective rate (bps/Hz)",
    logY: opts.logY,
    yMin: opts.logY ? undefined : 0,
  });
}

/** Empirical completion-time CDFs, one line per (scheme, SNR). */
export function cdfFigure(rows: CdfRow[], opts: FigureOptions = {}): string {
  const relevant = requireRows(rows, "completion-time CDF (cdf.csv expected)");
  const schemes = selectSchemes(relevant.map((r) => r.scheme), opts.schemes);
  const snrs = uniqueSorted(relevant.map((r) => r.snr_db));
  const series: Series[] = [];
  schemes.forEach((scheme) => {
    snrs.forEach((snr, si) => {
      const sub = relevant
        .filter((r) => r.scheme === scheme && r.snr_db === snr)
        .sort((a, b) => a.t_e - b.t_e);
      if (sub.length === 0) return;
      series.push({
        label: `${scheme}, ${snr >= 0 ? "+" : ""}${snr} dB`,
        dash: DASHES[si % DASHES.length],
        x: sub.map((r) => r.t_e),
        y: sub.map((r) => r.cdf),
      });
    });
  });
  const chart: ChartOptions = {
    title: opts.title ?? "Completion-time CDF",
    xLabel: "pilot slots",
    yLabel: "P(completed by slot)",
    yMin: 0,
  };
  if (opts.logY) throw new SchemaError("log y axis makes no sense for a CDF");
  return renderLineChart(series, chart);
}

/** Per-user effective rate vs number of users, one line per (scheme, frame). */
export function multiuserRateFigure(rows: ResultRow[], opts: FigureOptions = {}): string {
  const prefix = "per_user_effective_rate_tc";
  const relevant = requireRows(
    rows.filter((r) => r.sweep_var === "num_users" && r.metric.startsWith(prefix)),
    `metrics ${prefix}* over num_users (multi-user results.csv expected)`,
  );
  const schemes = selectSchemes(relevant.map((r) => r.scheme), opts.schemes);
  const frames = frameLengths(relevant, prefix);
  const series: Series[] = [];
  schemes.forEach((scheme) => {
    frames.forEach((tc, fi) => {
      const sub = relevant.filter((r) => r.scheme === scheme && r.metric === `${prefix}${tc}`);
      if (sub.length === 0) return;
      series.push({
        label: `${scheme}, frame ${tc}`,
        dash: DASHES[fi % DASHES.length],
        ...sortedXY(sub),
      });
    });
  });
  return renderLineChart(series, {
    title: opts.title ?? "Per-user effective rate vs number of users",
    xLabel: "users in cell",
    yLabel: "per-user effective rate (bps/Hz)",
    logY: opts.logY,
    yMin: opts.logY ? undefined : 0,
  });
}
