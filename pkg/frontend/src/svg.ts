/** Minimal deterministic SVG line charts: no DOM, no canvas, just strings.
 * Enough for the four figure kinds — polylines with markers, optional
 * symmetric error bars, linear or log-10 y axis, legend, axis labels. */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  /** symmetric error bar half-widths, same length as y */
  err?: number[];
  /** stroke-dasharray, e.g. "6 3"; solid when empty */
  dash?: string;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  width?: number;
  height?: number;
  logY?: boolean;
  /** force the y axis to start here (linear axis only), e.g. 0 for rates */
  yMin?: number;
}

const PALETTE = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
];

const MARGIN = { top: 44, right: 24, bottom: 52, left: 64 };

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** shortest stable decimal form (repr-style) for tick and coordinate text */
function fmt(v: number): string {
  if (!Number.isFinite(v)) return String(v);
  const r = Number(v.toPrecision(10));
  return String(r);
}

function coord(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

/** ticks on a 1/2/5 progression covering [lo, hi] */
export function linearTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = mag * (norm >= 7.5 ? 10 : norm >= 3.5 ? 5 : norm >= 1.5 ? 2 : 1);
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    out.push(Math.pow(10, e));
  }
  // a single decade (or none) gives too sparse an axis: add 2x and 5x minors
  if (out.length < 3) {
    const extra: number[] = [];
    for (const t of out) {
      for (const m of [2, 5]) {
        if (t * m >= lo && t * m <= hi) extra.push(t * m);
      }
    }
    out.push(...extra);
    out.sort((a, b) => a - b);
  }
  return out.length > 0 ? out : [lo, hi];
}

interface Extent {
  lo: number;
  hi: number;
}

function dataExtent(values: number[]): Extent {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    lo = Math.min(lo, v);
    hi = Math.max(hi, v);
  }
  if (lo === Infinity) throw new Error("no finite values to plot");
  return { lo, hi };
}

function pad(e: Extent, frac: number): Extent {
  const span = e.hi - e.lo;
  if (span === 0) {
    const bump = e.hi === 0 ? 1 : Math.abs(e.hi) * 0.1;
    return { lo: e.lo - bump, hi: e.hi + bump };
  }
  return { lo: e.lo - frac * span, hi: e.hi + frac * span };
}

export function renderLineChart(series: Series[], opts: ChartOptions): string {
  if (series.length === 0) throw new Error("no series to plot");
  for (const s of series) {
    if (s.x.length !== s.y.length || s.x.length === 0) {
      throw new Error(`series "${s.label}": x and y must be equal-length and non-empty`);
    }
    if (s.err && s.err.length !== s.y.length) {
      throw new Error(`series "${s.label}": error bars must match y length`);
    }
  }
  const width = opts.width ?? 720;
  const height = opts.height ?? 460;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = series.flatMap((s) => s.x);
  const yLow = series.flatMap((s) => s.y.map((v, i) => v - (s.err?.[i] ?? 0)));
  const yHigh = series.flatMap((s) => s.y.map((v, i) => v + (s.err?.[i] ?? 0)));
  const xe = pad(dataExtent(xs), 0.03);
  let ye = dataExtent(yLow.concat(yHigh));
  if (opts.logY) {
    const positive = series.flatMap((s) => s.y).filter((v) => v > 0);
    if (positive.length === 0) throw new Error("log y axis needs positive values");
    const pe = dataExtent(positive);
    ye = { lo: pe.lo / 1.3, hi: pe.hi * 1.3 };
  } else {
    ye = pad(ye, 0.06);
    if (opts.yMin !== undefined) ye.lo = opts.yMin;
  }

  const sx = (v: number) => MARGIN.left + ((v - xe.lo) / (xe.hi - xe.lo)) * plotW;
  const sy = (v: number) => {
    const t = opts.logY
      ? (Math.log10(v) - Math.log10(ye.lo)) / (Math.log10(ye.hi) - Math.log10(ye.lo))
      : (v - ye.lo) / (ye.hi - ye.lo);
    return MARGIN.top + (1 - t) * plotH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="22" text-anchor="middle" font-size="15">` +
      `${escapeXml(opts.title)}</text>`,
  );

  // frame
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#333" stroke-width="1"/>`,
  );

  // x axis
  for (const t of linearTicks(xe.lo, xe.hi)) {
    const x = coord(sx(t));
    const y0 = MARGIN.top + plotH;
    parts.push(`<line x1="${x}" y1="${y0}" x2="${x}" y2="${y0 + 5}" stroke="#333"/>`);
    parts.push(
      `<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${y0}" stroke="#ddd" stroke-width="0.6"/>`,
    );
    parts.push(
      `<text x="${x}" y="${y0 + 18}" text-anchor="middle" font-size="11">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 12}" text-anchor="middle" ` +
      `font-size="13">${escapeXml(opts.xLabel)}</text>`,
  );

  // y axis
  const yTicks = opts.logY ? logTicks(ye.lo, ye.hi) : linearTicks(ye.lo, ye.hi);
  for (const t of yTicks) {
    const y = coord(sy(t));
    parts.push(`<line x1="${MARGIN.left - 5}" y1="${y}" x2="${MARGIN.left}" y2="${y}" stroke="#333"/>`);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + plotW}" y2="${y}" ` +
        `stroke="#ddd" stroke-width="0.6"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${y}" text-anchor="end" dominant-baseline="middle" ` +
        `font-size="11">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text transform="rotate(-90 16 ${MARGIN.top + plotH / 2})" x="16" ` +
      `y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13">` +
      `${escapeXml(opts.yLabel)}</text>`,
  );

  // series
  series.forEach((s, si) => {
    const color = PALETTE[si % PALETTE.length]!;
    const order = s.x.map((_, i) => i).sort((a, b) => s.x[a]! - s.x[b]!);
    const pts = order.map((i) => `${coord(sx(s.x[i]!))},${coord(sy(s.y[i]!))}`).join(" ");
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.8"${dash}/>`,
    );
    for (const i of order) {
      const cx = coord(sx(s.x[i]!));
      parts.push(`<circle cx="${cx}" cy="${coord(sy(s.y[i]!))}" r="2.6" fill="${color}"/>`);
      const e = s.err?.[i] ?? 0;
      if (e > 0) {
        let lo = s.y[i]! - e;
        if (opts.logY && lo <= 0) lo = s.y[i]!; // lower arm would leave the axis
        const yTop = coord(sy(s.y[i]! + e));
        const yBot = coord(sy(lo));
        parts.push(`<line x1="${cx}" y1="${yTop}" x2="${cx}" y2="${yBot}" stroke="${color}"/>`);
        for (const yc of [yTop, yBot]) {
          parts.push(
            `<line x1="${Number(cx) - 3}" y1="${yc}" x2="${Number(cx) + 3}" y2="${yc}" ` +
              `stroke="${color}"/>`,
          );
        }
      }
    }
  });

  // legend, top-right inside the frame
  const legendX = MARGIN.left + plotW - 10;
  series.forEach((s, si) => {
    const color = PALETTE[si % PALETTE.length]!;
    const y = MARGIN.top + 14 + 16 * si;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<line x1="${legendX - 158}" y1="${y - 4}" x2="${legendX - 134}" y2="${y - 4}" ` +
        `stroke="${color}" stroke-width="1.8"${dash}/>`,
    );
    parts.push(
      `<text x="${legendX - 128}" y="${y}" font-size="11">${escapeXml(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
