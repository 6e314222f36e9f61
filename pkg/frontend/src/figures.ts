import * as fs from "fs";

import {
  SCHEMAS,
  Table,
  column,
  concatTables,
  numericColumn,
  requireRows,
  requireSchema,
} from "./csv";
import {
  HEIGHT,
  MARGIN,
  WIDTH,
  axes,
  escapeText,
  fmt,
  FONT,
  legend,
  linearScale,
  methodColor,
  openSvg,
} from "./svg";

export type FigureKind = "reward_curve" | "line_sweep" | "grouped_bars" | "boxplot";

export const FIGURE_KINDS: FigureKind[] = [
  "reward_curve",
  "line_sweep",
  "grouped_bars",
  "boxplot",
];

function mean(values: number[]): number {
  let s = 0;
  for (const v of values) {
    s += v;
  }
  return s / values.length;
}

// Linear-interpolation quantile on a sorted copy (matches the numpy default).
export function quantile(values: number[], q: number): number {
  const sorted = values.slice().sort((a, b) => a - b);
  const h = (sorted.length - 1) * q;
  const lo = Math.floor(h);
  const hi = Math.min(lo + 1, sorted.length - 1);
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

function uniqueSorted(values: number[]): number[] {
  return Array.from(new Set(values)).sort((a, b) => a - b);
}

function sortedMethods(methods: string[]): string[] {
  return Array.from(new Set(methods)).sort();
}

const plotLeft = MARGIN.left;
const plotRight = WIDTH - MARGIN.right;
const plotTop = MARGIN.top + 24; // keep clear of the legend row
const plotBottom = HEIGHT - MARGIN.bottom;

// ---------------------------------------------------------------- reward

export interface RewardPoint {
  episode: number;
  meanReward: number;
}

export function buildRewardCurve(table: Table): RewardPoint[] {
  requireSchema(table, SCHEMAS.rewardCurve);
  requireRows(table);
  const episodes = numericColumn(table, "episode");
  const rewards = numericColumn(table, "mean_reward");
  // Mean over seeds when several runs are concatenated; one point per episode.
  const byEpisode = new Map<number, number[]>();
  episodes.forEach((ep, i) => {
    const bucket = byEpisode.get(ep);
    if (bucket) {
      bucket.push(rewards[i]);
    } else {
      byEpisode.set(ep, [rewards[i]]);
    }
  });
  return uniqueSorted(episodes).map((ep) => ({
    episode: ep,
    meanReward: mean(byEpisode.get(ep) as number[]),
  }));
}

export function renderRewardCurve(tables: Table[], outPath: string): void {
  const table = concatTables(tables);
  const points = buildRewardCurve(table);
  console.log(`reward_curve: ${table.rows.length} rows -> ${points.length} points`);
  const xs = points.map((p) => p.episode);
  const ys = points.map((p) => p.meanReward);
  const xScale = linearScale(Math.min(...xs), Math.max(...xs), plotLeft, plotRight);
  const yScale = linearScale(Math.min(...ys), Math.max(...ys), plotBottom, plotTop);
  const parts = openSvg("Mean episode reward");
  parts.push(...axes(xScale, yScale, "episode", "mean reward"));
  const path = points
    .map((p, i) => `${i === 0 ? "M" : "L"}${fmt(xScale.toPixel(p.episode))},${fmt(yScale.toPixel(p.meanReward))}`)
    .join(" ");
  parts.push(`<path d="${path}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>`);
  parts.push("</svg>");
  fs.writeFileSync(outPath, parts.join("\n") + "\n");
}

// ------------------------------------------------------------ line sweep

export interface SweepSeries {
  method: string;
  points: { x: number; y: number }[];
}

export function buildSweepSeries(table: Table, yColumn: string): SweepSeries[] {
  requireSchema(table, SCHEMAS.sweepLine);
  requireRows(table);
  const xs = numericColumn(table, "sweep_value");
  const ys = numericColumn(table, yColumn);
  const methods = column(table, "method");
  const series: SweepSeries[] = [];
  for (const method of sortedMethods(methods)) {
    const byX = new Map<number, number[]>();
    methods.forEach((m, i) => {
      if (m !== method) {
        return;
      }
      const bucket = byX.get(xs[i]);
      if (bucket) {
        bucket.push(ys[i]);
      } else {
        byX.set(xs[i], [ys[i]]);
      }
    });
    const points = Array.from(byX.keys())
      .sort((a, b) => a - b)
      .map((x) => ({ x, y: mean(byX.get(x) as number[]) }));
    series.push({ method, points });
  }
  return series;
}

export function renderLineSweep(tables: Table[], outPath: string): void {
  const table = concatTables(tables);
  const series = buildSweepSeries(table, "total_delay");
  console.log(`line_sweep: ${table.rows.length} rows -> ${series.length} series`);
  const allX = series.flatMap((s) => s.points.map((p) => p.x));
  const allY = series.flatMap((s) => s.points.map((p) => p.y));
  const xScale = linearScale(Math.min(...allX), Math.max(...allX), plotLeft, plotRight);
  const yScale = linearScale(Math.min(...allY), Math.max(...allY), plotBottom, plotTop);
  const parts = openSvg("Mean total delay vs sweep value");
  parts.push(...axes(xScale, yScale, "sweep value", "mean total delay (s)"));
  series.forEach((s, idx) => {
    const color = methodColor(s.method, idx);
    const path = s.points
      .map((p, i) => `${i === 0 ? "M" : "L"}${fmt(xScale.toPixel(p.x))},${fmt(yScale.toPixel(p.y))}`)
      .join(" ");
    parts.push(`<path d="${path}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    for (const p of s.points) {
      parts.push(
        `<circle cx="${fmt(xScale.toPixel(p.x))}" cy="${fmt(yScale.toPixel(p.y))}" r="3" fill="${color}"/>`
      );
    }
  });
  parts.push(
    ...legend(series.map((s, idx) => ({ label: s.method, color: methodColor(s.method, idx) })))
  );
  parts.push("</svg>");
  fs.writeFileSync(outPath, parts.join("\n") + "\n");
}

// ----------------------------------------------------------- grouped bars

export interface LinkBars {
  method: string;
  v2i: number;
  v2v: number;
}

export function buildLinkBars(table: Table): LinkBars[] {
  requireSchema(table, SCHEMAS.sweepLine);
  requireRows(table);
  const methods = column(table, "method");
  const v2i = numericColumn(table, "v2i_delay");
  const v2v = numericColumn(table, "v2v_delay");
  return sortedMethods(methods).map((method) => {
    const v2iVals: number[] = [];
    const v2vVals: number[] = [];
    methods.forEach((m, i) => {
      if (m === method) {
        v2iVals.push(v2i[i]);
        v2vVals.push(v2v[i]);
      }
    });
    return { method, v2i: mean(v2iVals), v2v: mean(v2vVals) };
  });
}

const V2I_COLOR = "#1f77b4";
const V2V_COLOR = "#ff7f0e";

export function renderGroupedBars(tables: Table[], outPath: string): void {
  const table = concatTables(tables);
  const bars = buildLinkBars(table);
  console.log(`grouped_bars: ${table.rows.length} rows -> ${bars.length} method groups`);
  const maxY = Math.max(...bars.flatMap((b) => [b.v2i, b.v2v]));
  const yScale = linearScale(0, maxY, plotBottom, plotTop);
  const parts = openSvg("Per-link transmission delay");
  // y axis only; the x axis is categorical.
  const xAxisStub = axes(
    linearScale(0, 1, plotLeft, plotRight),
    yScale,
    "method",
    "mean delay (s)"
  ).filter((p) => !p.includes("text-anchor=\"middle\" font-size=\"11\"")); // drop numeric x ticks
  parts.push(...xAxisStub);
  const groupWidth = (plotRight - plotLeft) / bars.length;
  const barWidth = groupWidth / 3;
  bars.forEach((b, g) => {
    const cx = plotLeft + groupWidth * (g + 0.5);
    const v2iTop = yScale.toPixel(b.v2i);
    const v2vTop = yScale.toPixel(b.v2v);
    parts.push(
      `<rect x="${fmt(cx - barWidth)}" y="${fmt(v2iTop)}" width="${fmt(barWidth)}" height="${fmt(plotBottom - v2iTop)}" fill="${V2I_COLOR}"/>`
    );
    parts.push(
      `<rect x="${fmt(cx)}" y="${fmt(v2vTop)}" width="${fmt(barWidth)}" height="${fmt(plotBottom - v2vTop)}" fill="${V2V_COLOR}"/>`
    );
    parts.push(
      `<text x="${fmt(cx)}" y="${plotBottom + 18}" text-anchor="middle" font-size="12" ${FONT}>${escapeText(b.method)}</text>`
    );
  });
  parts.push(
    ...legend([
      { label: "V2I", color: V2I_COLOR },
      { label: "V2V", color: V2V_COLOR },
    ])
  );
  parts.push("</svg>");
  fs.writeFileSync(outPath, parts.join("\n") + "\n");
}

// --------------------------------------------------------------- boxplot

export interface Box {
  group: number; // sweep value, e.g. vehicle count
  method: string;
  min: number;
  q1: number;
  median: number;
  q3: number;
  max: number;
  count: number;
}

export function buildBoxes(table: Table): Box[] {
  requireSchema(table, SCHEMAS.episodes);
  requireRows(table);
  const groups = numericColumn(table, "sweep_value");
  const methods = column(table, "method");
  const delays = numericColumn(table, "mean_delay");
  const boxes: Box[] = [];
  for (const group of uniqueSorted(groups)) {
    for (const method of sortedMethods(methods)) {
      const values: number[] = [];
      groups.forEach((g, i) => {
        if (g === group && methods[i] === method) {
          values.push(delays[i]);
        }
      });
      if (values.length === 0) {
        continue;
      }
      boxes.push({
        group,
        method,
        min: Math.min(...values),
        q1: quantile(values, 0.25),
        median: quantile(values, 0.5),
        q3: quantile(values, 0.75),
        max: Math.max(...values),
        count: values.length,
      });
    }
  }
  return boxes;
}

export function renderBoxplot(tables: Table[], outPath: string): void {
  const table = concatTables(tables);
  const boxes = buildBoxes(table);
  const groups = uniqueSorted(boxes.map((b) => b.group));
  const methods = sortedMethods(boxes.map((b) => b.method));
  console.log(
    `boxplot: ${table.rows.length} rows -> ${groups.length} groups x ${methods.length} methods`
  );
  const lo = Math.min(...boxes.map((b) => b.min));
  const hi = Math.max(...boxes.map((b) => b.max));
  const yScale = linearScale(lo, hi, plotBottom, plotTop);
  const parts = openSvg("Delay distribution per group");
  const yAxisOnly = axes(
    linearScale(0, 1, plotLeft, plotRight),
    yScale,
    "group",
    "episode mean delay (s)"
  ).filter((p) => !p.includes("text-anchor=\"middle\" font-size=\"11\""));
  parts.push(...yAxisOnly);
  const groupWidth = (plotRight - plotLeft) / groups.length;
  const slotWidth = groupWidth / (methods.length + 1);
  const boxWidth = slotWidth * 0.7;
  for (const box of boxes) {
    const g = groups.indexOf(box.group);
    const m = methods.indexOf(box.method);
    const cx = plotLeft + groupWidth * g + slotWidth * (m + 1);
    const color = methodColor(box.method, m);
    const yMin = yScale.toPixel(box.min);
    const yMax = yScale.toPixel(box.max);
    const yQ1 = yScale.toPixel(box.q1);
    const yQ3 = yScale.toPixel(box.q3);
    const yMed = yScale.toPixel(box.median);
    parts.push(
      `<line x1="${fmt(cx)}" y1="${fmt(yMin)}" x2="${fmt(cx)}" y2="${fmt(yMax)}" stroke="${color}" stroke-width="1"/>`
    );
    parts.push(
      `<rect x="${fmt(cx - boxWidth / 2)}" y="${fmt(yQ3)}" width="${fmt(boxWidth)}" height="${fmt(yQ1 - yQ3)}" fill="#ffffff" stroke="${color}" stroke-width="1.5"/>`
    );
    parts.push(
      `<line x1="${fmt(cx - boxWidth / 2)}" y1="${fmt(yMed)}" x2="${fmt(cx + boxWidth / 2)}" y2="${fmt(yMed)}" stroke="${color}" stroke-width="1.5"/>`
    );
    for (const cap of [yMin, yMax]) {
      parts.push(
        `<line x1="${fmt(cx - boxWidth / 4)}" y1="${fmt(cap)}" x2="${fmt(cx + boxWidth / 4)}" y2="${fmt(cap)}" stroke="${color}" stroke-width="1"/>`
      );
    }
  }
  groups.forEach((group, g) => {
    const cx = plotLeft + groupWidth * (g + 0.5);
    parts.push(
      `<text x="${fmt(cx)}" y="${plotBottom + 18}" text-anchor="middle" font-size="12" ${FONT}>${fmt(group)}</text>`
    );
  });
  parts.push(
    ...legend(methods.map((m, idx) => ({ label: m, color: methodColor(m, idx) })))
  );
  parts.push("</svg>");
  fs.writeFileSync(outPath, parts.join("\n") + "\n");
}

// -------------------------------------------------------------- dispatch

export function render(kind: FigureKind, tables: Table[], outPath: string): void {
  if (kind === "reward_curve") {
    renderRewardCurve(tables, outPath);
  } else if (kind === "line_sweep") {
    renderLineSweep(tables, outPath);
  } else if (kind === "grouped_bars") {
    renderGroupedBars(tables, outPath);
  } else if (kind === "boxplot") {
    renderBoxplot(tables, outPath);
  } else {
    throw new Error(`unknown figure kind: ${kind}`);
  }
  console.log(`wrote ${outPath}`);
}
