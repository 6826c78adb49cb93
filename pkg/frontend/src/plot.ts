/** Deterministic SVG line plots of GM throughput curves with error bars. */

import type { SweepRow } from "./csv.js";

export interface PlotSpec {
  /** Sweep variable on the x axis; must match the CSV's axis column. */
  axis: string;
  /** Curves to draw, in legend order. Defaults to CSV appearance order. */
  solutions?: string[];
  /** Annotation above the plot, e.g. "U = 12, desk profile". */
  title?: string;
  width?: number;
  height?: number;
}

interface CurvePoint {
  x: number;
  mean: number;
  stderr: number;
}

const PALETTE = [
  "#0072b2",
  "#d55e00",
  "#009e73",
  "#cc79a7",
  "#e69f00",
  "#56b4e9",
  "#000000",
];

const MARGIN = { top: 42, right: 24, bottom: 46, left: 78 };

function fmt(v: number): string {
  // fixed decimals keep the output byte-stable across runs
  return v.toFixed(2);
}

/** Tick label in engineering style: 2.5M, 300k, 1.2G. */
export function engineeringLabel(value: number): string {
  if (value === 0) return "0";
  const units: Array<[number, string]> = [
    [1e9, "G"],
    [1e6, "M"],
    [1e3, "k"],
  ];
  for (const [scale, suffix] of units) {
    if (Math.abs(value) >= scale) {
      const scaled = value / scale;
      const text = scaled >= 100 ? scaled.toFixed(0) : scaled >= 10 ? scaled.toFixed(1) : scaled.toFixed(2);
      return `${text}${suffix}`;
    }
  }
  return value >= 10 ? value.toFixed(0) : value.toPrecision(3);
}

/** Smallest 1/2/5 x 10^n value at or above x. */
export function niceCeil(x: number): number {
  if (x <= 0) return 1;
  const power = Math.pow(10, Math.floor(Math.log10(x)));
  for (const m of [1, 2, 5, 10]) {
    if (m * power >= x) return m * power;
  }
  return 10 * power;
}

function groupCurves(rows: SweepRow[], spec: PlotSpec): Map<string, CurvePoint[]> {
  for (const row of rows) {
    if (row.axis !== spec.axis) {
      throw new Error(
        `axis mismatch: CSV rows are over ${row.axis}, requested ${spec.axis}`,
      );
    }
  }
  const seen: string[] = [];
  for (const row of rows) {
    if (!seen.includes(row.solution)) seen.push(row.solution);
  }
  const wanted = spec.solutions ?? seen;
  if (wanted.length === 0) {
    throw new Error("no solutions selected");
  }
  const curves = new Map<string, CurvePoint[]>();
  for (const name of wanted) {
    const points = rows
      .filter((row) => row.solution === name)
      .map((row) => ({ x: row.value, mean: row.meanGm, stderr: row.stderrGm }))
      .sort((a, b) => a.x - b.x);
    if (points.length === 0) {
      throw new Error(`no rows for solution ${name}`);
    }
    curves.set(name, points);
  }
  return curves;
}

/**
 * Render the sweep as an SVG string: one line with error bars per solution,
 * y starting at zero. Every marker carries the underlying numbers in
 * data-* attributes, unrounded, so downstream checks can read exact values
 * back out of the image.
 */
export function renderSweepSvg(rows: SweepRow[], spec: PlotSpec): string {
  const width = spec.width ?? 720;
  const height = spec.height ?? 480;
  const curves = groupCurves(rows, spec);

  const xs = [...curves.values()].flatMap((pts) => pts.map((p) => p.x));
  const tops = [...curves.values()].flatMap((pts) =>
    pts.map((p) => p.mean + p.stderr),
  );
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMax = niceCeil(Math.max(...tops, Number.MIN_VALUE) * 1.05);

  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) =>
    xMax === xMin
      ? MARGIN.left + plotW / 2
      : MARGIN.left + ((x - xMin) / (xMax - xMin)) * plotW;
  const sy = (y: number) => MARGIN.top + plotH - (y / yMax) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);

  // axes and grid
  const yTicks = 5;
  for (let i = 0; i <= yTicks; i++) {
    const v = (yMax * i) / yTicks;
    const y = fmt(sy(v));
    parts.push(
      `<line x1="${fmt(MARGIN.left)}" y1="${y}" x2="${fmt(width - MARGIN.right)}" y2="${y}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${fmt(MARGIN.left - 8)}" y="${y}" text-anchor="end" dominant-baseline="middle">${engineeringLabel(v)}</text>`,
    );
  }
  const xValues = [...new Set(xs)].sort((a, b) => a - b);
  for (const v of xValues) {
    const x = fmt(sx(v));
    parts.push(
      `<line x1="${x}" y1="${fmt(MARGIN.top + plotH)}" x2="${x}" y2="${fmt(MARGIN.top + plotH + 5)}" stroke="black"/>`,
    );
    parts.push(
      `<text x="${x}" y="${fmt(MARGIN.top + plotH + 20)}" text-anchor="middle">${v}</text>`,
    );
  }
  parts.push(
    `<line x1="${fmt(MARGIN.left)}" y1="${fmt(MARGIN.top)}" x2="${fmt(MARGIN.left)}" y2="${fmt(MARGIN.top + plotH)}" stroke="black"/>`,
  );
  parts.push(
    `<line x1="${fmt(MARGIN.left)}" y1="${fmt(MARGIN.top + plotH)}" x2="${fmt(width - MARGIN.right)}" y2="${fmt(MARGIN.top + plotH)}" stroke="black"/>`,
  );

  // axis labels and title
  parts.push(
    `<text x="${fmt(MARGIN.left + plotW / 2)}" y="${fmt(height - 10)}" text-anchor="middle">${spec.axis}</text>`,
  );
  parts.push(
    `<text x="16" y="${fmt(MARGIN.top + plotH / 2)}" text-anchor="middle" transform="rotate(-90 16 ${fmt(MARGIN.top + plotH / 2)})">GM of average UE throughput (bps)</text>`,
  );
  if (spec.title) {
    parts.push(
      `<text x="${fmt(MARGIN.left + plotW / 2)}" y="20" text-anchor="middle" font-size="14">${escapeXml(spec.title)}</text>`,
    );
  }

  // curves
  let colorIndex = 0;
  for (const [name, points] of curves) {
    const color = PALETTE[colorIndex % PALETTE.length]!;
    colorIndex++;
    const path = points
      .map((p) => `${fmt(sx(p.x))},${fmt(sy(p.mean))}`)
      .join(" ");
    parts.push(
      `<polyline points="${path}" fill="none" stroke="${color}" stroke-width="1.8" data-solution="${escapeXml(name)}"/>`,
    );
    for (const p of points) {
      const cx = fmt(sx(p.x));
      if (p.stderr > 0) {
        const yLo = fmt(sy(Math.max(0, p.mean - p.stderr)));
        const yHi = fmt(sy(p.mean + p.stderr));
        parts.push(
          `<line x1="${cx}" y1="${yLo}" x2="${cx}" y2="${yHi}" stroke="${color}"/>`,
        );
        for (const yCap of [yLo, yHi]) {
          parts.push(
            `<line x1="${fmt(sx(p.x) - 4)}" y1="${yCap}" x2="${fmt(sx(p.x) + 4)}" y2="${yCap}" stroke="${color}"/>`,
          );
        }
      }
      parts.push(
        `<circle cx="${cx}" cy="${fmt(sy(p.mean))}" r="3.2" fill="${color}" ` +
          `data-solution="${escapeXml(name)}" data-x="${p.x}" ` +
          `data-mean-gm="${p.mean}" data-stderr-gm="${p.stderr}"/>`,
      );
    }
  }

  // legend, top right inside the plot area
  let row = 0;
  colorIndex = 0;
  for (const name of curves.keys()) {
    const color = PALETTE[colorIndex % PALETTE.length]!;
    colorIndex++;
    const y = MARGIN.top + 10 + row * 18;
    const x = width - MARGIN.right - 110;
    parts.push(
      `<line x1="${fmt(x)}" y1="${fmt(y)}" x2="${fmt(x + 22)}" y2="${fmt(y)}" stroke="${color}" stroke-width="1.8"/>`,
    );
    parts.push(
      `<circle cx="${fmt(x + 11)}" cy="${fmt(y)}" r="3.2" fill="${color}"/>`,
    );
    parts.push(
      `<text x="${fmt(x + 28)}" y="${fmt(y)}" dominant-baseline="middle">${escapeXml(name)}</text>`,
    );
    row++;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
