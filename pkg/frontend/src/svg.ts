// Minimal deterministic SVG emission. Every figure is plain markup built
// from the input numbers and fixed style constants, so identical CSVs give
// byte-identical files.

export const WIDTH = 760;
export const HEIGHT = 480;
export const MARGIN = { left: 68, right: 20, top: 40, bottom: 52 };

export const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

// One fixed colour per known method; extra series cycle through the tail.
const METHOD_COLORS: { [method: string]: string } = {
  ppo: "#1f77b4",
  ga: "#ff7f0e",
  qpso: "#2ca02c",
  heuristic: "#d62728",
};
const EXTRA_COLORS = ["#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

export function methodColor(method: string, fallbackIndex: number): string {
  if (method in METHOD_COLORS) {
    return METHOD_COLORS[method];
  }
  return EXTRA_COLORS[fallbackIndex % EXTRA_COLORS.length];
}

export function fmt(value: number): string {
  // Fixed-precision then trailing-zero strip: deterministic and compact.
  if (value === 0) {
    return "0";
  }
  const abs = Math.abs(value);
  let text: string;
  if (abs >= 1e5 || abs < 1e-4) {
    text = value.toExponential(3);
  } else {
    text = value.toPrecision(6);
  }
  if (text.includes(".") && !text.includes("e")) {
    text = text.replace(/0+$/, "").replace(/\.$/, "");
  }
  return text;
}

export interface Scale {
  lo: number;
  hi: number;
  toPixel(v: number): number;
}

export function linearScale(lo: number, hi: number, p0: number, p1: number): Scale {
  if (hi === lo) {
    // Degenerate extent: pad so a flat series still renders mid-axis.
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
  const span = hi - lo;
  return {
    lo,
    hi,
    toPixel: (v: number) => p0 + ((v - lo) / span) * (p1 - p0),
  };
}

// Standard nice-number ticks: steps of 1/2/5 times a power of ten.
export function ticks(lo: number, hi: number, count: number): number[] {
  if (hi === lo) {
    return [lo];
  }
  const rawStep = (hi - lo) / Math.max(1, count);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    step = m * mag;
    if (step >= rawStep) {
      break;
    }
  }
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    // Snap to the grid to avoid float drift like 0.30000000000000004.
    out.push(Math.round(v / step) * step);
  }
  return out;
}

export function escapeText(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function openSvg(title: string): string[] {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="16" ${FONT}>${escapeText(title)}</text>`,
  ];
}

export function axes(
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string
): string[] {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const parts: string[] = [];
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="#000000" stroke-width="1"/>`
  );
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="#000000" stroke-width="1"/>`
  );
  for (const t of ticks(xScale.lo, xScale.hi, 6)) {
    const px = xScale.toPixel(t);
    parts.push(
      `<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="#000000" stroke-width="1"/>`
    );
    parts.push(
      `<text x="${fmt(px)}" y="${y0 + 18}" text-anchor="middle" font-size="11" ${FONT}>${fmt(t)}</text>`
    );
  }
  for (const t of ticks(yScale.lo, yScale.hi, 6)) {
    const py = yScale.toPixel(t);
    parts.push(
      `<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="#000000" stroke-width="1"/>`
    );
    parts.push(
      `<text x="${x0 - 8}" y="${fmt(py + 4)}" text-anchor="end" font-size="11" ${FONT}>${fmt(t)}</text>`
    );
    parts.push(
      `<line x1="${x0}" y1="${fmt(py)}" x2="${x1}" y2="${fmt(py)}" stroke="#dddddd" stroke-width="0.5"/>`
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13" ${FONT}>${escapeText(xLabel)}</text>`
  );
  parts.push(
    `<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" ${FONT} transform="rotate(-90 18 ${(y0 + y1) / 2})">${escapeText(yLabel)}</text>`
  );
  return parts;
}

export function legend(entries: { label: string; color: string }[]): string[] {
  const parts: string[] = [];
  let x = MARGIN.left + 8;
  const y = MARGIN.top + 6;
  for (const entry of entries) {
    parts.push(
      `<rect x="${x}" y="${y}" width="12" height="12" fill="${entry.color}"/>`
    );
    parts.push(
      `<text x="${x + 16}" y="${y + 10}" font-size="12" ${FONT}>${escapeText(entry.label)}</text>`
    );
    x += 16 + entry.label.length * 7 + 18;
  }
  return parts;
}
