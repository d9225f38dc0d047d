/**
 * Tiny deterministic SVG chart builder: enough for line plots with
 * linear or logarithmic axes, legends, annotations and heatmaps. No DOM,
 * no dependencies; output is a plain string.
 */

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dash?: string;
}

export interface LinePlotOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logY?: boolean;
  logX?: boolean;
  annotations?: string[];
  width?: number;
  height?: number;
}

export const PALETTE = ["#1f6fb2", "#d1495b", "#3a9d5d", "#8a6d3b", "#7d5ba6", "#444444"];

const MARGIN = { left: 72, right: 16, top: 34, bottom: 46 };

function fmt(value: number): string {
  if (!Number.isFinite(value)) return "0";
  return Number(value.toPrecision(6)).toString();
}

function fmtTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e4 || abs < 1e-3) return value.toExponential(1);
  return Number(value.toPrecision(4)).toString();
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / count / step;
  const factor = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const nice = factor * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / nice) * nice; v <= hi + 1e-12 * span; v += nice) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); Math.pow(10, e) <= hi * (1 + 1e-12); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks.length > 0 ? ticks : [lo];
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function linePlot(options: LinePlotOptions): string {
  const width = options.width ?? 640;
  const height = options.height ?? 420;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xsAll: number[] = [];
  const ysAll: number[] = [];
  for (const s of options.series) {
    for (let i = 0; i < s.x.length; i++) {
      const x = s.x[i]!;
      const y = s.y[i]!;
      if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
      if (options.logY && y <= 0) continue;
      if (options.logX && x <= 0) continue;
      xsAll.push(x);
      ysAll.push(y);
    }
  }
  let xLo = Math.min(...xsAll);
  let xHi = Math.max(...xsAll);
  let yLo = Math.min(...ysAll);
  let yHi = Math.max(...ysAll);
  if (xsAll.length === 0) {
    xLo = 0; xHi = 1; yLo = 0; yHi = 1;
  }
  if (xHi === xLo) xHi = xLo + 1;
  if (yHi === yLo) {
    yHi = yLo + (yLo === 0 ? 1 : Math.abs(yLo) * 0.5);
    yLo = yLo - (yLo === 0 ? 0 : Math.abs(yLo) * 0.5);
  }

  const tx = (x: number): number => {
    const u = options.logX
      ? (Math.log10(x) - Math.log10(xLo)) / (Math.log10(xHi) - Math.log10(xLo))
      : (x - xLo) / (xHi - xLo);
    return MARGIN.left + u * plotW;
  };
  const ty = (y: number): number => {
    const u = options.logY
      ? (Math.log10(y) - Math.log10(yLo)) / (Math.log10(yHi) - Math.log10(yLo))
      : (y - yLo) / (yHi - yLo);
    return MARGIN.top + (1 - u) * plotH;
  };

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica,Arial,sans-serif" font-size="11">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="18" text-anchor="middle" font-size="14">` +
    `${escapeXml(options.title)}</text>`,
  );

  const xTicks = options.logX ? decadeTicks(xLo, xHi) : niceTicks(xLo, xHi);
  const yTicks = options.logY ? decadeTicks(yLo, yHi) : niceTicks(yLo, yHi);
  for (const v of xTicks) {
    const px = tx(v);
    parts.push(`<line x1="${fmt(px)}" y1="${MARGIN.top}" x2="${fmt(px)}" ` +
      `y2="${MARGIN.top + plotH}" stroke="#dddddd"/>`);
    parts.push(`<text x="${fmt(px)}" y="${MARGIN.top + plotH + 16}" ` +
      `text-anchor="middle">${fmtTick(v)}</text>`);
  }
  for (const v of yTicks) {
    const py = ty(v);
    parts.push(`<line x1="${MARGIN.left}" y1="${fmt(py)}" ` +
      `x2="${MARGIN.left + plotW}" y2="${fmt(py)}" stroke="#dddddd"/>`);
    parts.push(`<text x="${MARGIN.left - 6}" y="${fmt(py + 4)}" ` +
      `text-anchor="end">${fmtTick(v)}</text>`);
  }
  parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" ` +
    `height="${plotH}" fill="none" stroke="#333333"/>`);

  for (const s of options.series) {
    const points: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const x = s.x[i]!;
      const y = s.y[i]!;
      if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
      if (options.logY && y <= 0) continue;
      if (options.logX && x <= 0) continue;
      points.push(`${fmt(tx(x))},${fmt(ty(y))}`);
    }
    if (points.length > 0) {
      const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
      parts.push(`<polyline fill="none" stroke="${s.color}" stroke-width="1.6"${dash} ` +
        `points="${points.join(" ")}"/>`);
    }
  }

  options.series.forEach((s, i) => {
    const ly = MARGIN.top + 14 + 15 * i;
    const lx = MARGIN.left + 10;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" ` +
      `stroke="${s.color}" stroke-width="1.6"${dash}/>`);
    parts.push(`<text x="${lx + 28}" y="${ly}">${escapeXml(s.label)}</text>`);
  });

  (options.annotations ?? []).forEach((note, i) => {
    parts.push(`<text x="${width - MARGIN.right - 4}" ` +
      `y="${MARGIN.top + plotH - 8 - 14 * i}" text-anchor="end" fill="#555555">` +
      `${escapeXml(note)}</text>`);
  });

  parts.push(`<text x="${MARGIN.left + plotW / 2}" y="${height - 10}" ` +
    `text-anchor="middle">${escapeXml(options.xLabel)}</text>`);
  parts.push(`<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
    `transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">` +
    `${escapeXml(options.yLabel)}</text>`);
  parts.push("</svg>");
  return parts.join("\n");
}

/** Blue-white-red diverging map anchored at the value range. */
function colorFor(u: number): string {
  const c = Math.max(0, Math.min(1, u));
  const lerp = (a: number, b: number, s: number): number => Math.round(a + (b - a) * s);
  if (c < 0.5) {
    const s = c * 2;
    return `rgb(${lerp(33, 255, s)},${lerp(102, 255, s)},${lerp(172, 255, s)})`;
  }
  const s = (c - 0.5) * 2;
  return `rgb(${lerp(255, 178, s)},${lerp(255, 24, s)},${lerp(255, 43, s)})`;
}

export interface HeatmapOptions {
  title: string;
  n: number;
  values: Float64Array | number[];
  annotations?: string[];
  width?: number;
}

export function heatmap(options: HeatmapOptions): string {
  const n = options.n;
  const size = options.width ?? 480;
  const cell = Math.floor((size - 90) / n);
  const plot = cell * n;
  const height = plot + 78;
  const width = plot + 90;

  let lo = Infinity;
  let hi = -Infinity;
  for (const v of options.values) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!(hi > lo)) hi = lo + 1;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica,Arial,sans-serif" font-size="11">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<text x="${width / 2}" y="18" text-anchor="middle" font-size="14">` +
    `${escapeXml(options.title)}</text>`);
  // rows advance in x1, columns in x2; draw x1 rightwards, x2 upwards
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const v = Number(options.values[i * n + j]);
      const u = (v - lo) / (hi - lo);
      const px = 46 + i * cell;
      const py = 28 + (n - 1 - j) * cell;
      parts.push(`<rect x="${px}" y="${py}" width="${cell}" height="${cell}" ` +
        `fill="${colorFor(u)}"/>`);
    }
  }
  parts.push(`<rect x="46" y="28" width="${plot}" height="${plot}" ` +
    `fill="none" stroke="#333333"/>`);
  parts.push(`<text x="46" y="${28 + plot + 16}">min ${fmtTick(lo)}</text>`);
  parts.push(`<text x="${46 + plot}" y="${28 + plot + 16}" text-anchor="end">` +
    `max ${fmtTick(hi)}</text>`);
  (options.annotations ?? []).forEach((note, i) => {
    parts.push(`<text x="46" y="${28 + plot + 34 + 14 * i}" fill="#555555">` +
      `${escapeXml(note)}</text>`);
  });
  parts.push("</svg>");
  return parts.join("\n");
}
