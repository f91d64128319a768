import type { Series } from "./csv.js";

/** Categorical palette (colorblind-safe Okabe-Ito). */
const PALETTE = [
  "#0072B2",
  "#D55E00",
  "#009E73",
  "#CC79A7",
  "#E69F00",
  "#56B4E9",
  "#000000",
  "#F0E442",
];

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { top: 40, right: 24, bottom: 56, left: 80 };

interface LogScale {
  (v: number): number;
  ticks: number[];
}

function logScale(min: number, max: number, r0: number, r1: number): LogScale {
  const lo = Math.log10(min);
  const hi = Math.log10(max);
  const span = hi - lo || 1;
  const scale = ((v: number) =>
    r0 + ((Math.log10(v) - lo) / span) * (r1 - r0)) as LogScale;
  const ticks: number[] = [];
  for (let e = Math.ceil(lo); e <= Math.floor(hi); e++) {
    ticks.push(10 ** e);
  }
  if (ticks.length === 0) ticks.push(10 ** Math.round((lo + hi) / 2));
  scale.ticks = ticks;
  return scale;
}

function fmtTick(v: number): string {
  const e = Math.round(Math.log10(v));
  return `1e${e}`;
}

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/**
 * Render series as a log-log SVG line chart with shaded confidence bands.
 * Non-positive values are clamped to a small positive floor so they stay
 * representable on the log axis.
 */
export function renderFigure(
  series: Series[],
  xLabel: string,
  yLabel: string,
  title = "",
): string {
  if (series.length === 0) throw new Error("no series to render");

  const floorOf = (vals: number[]): number => {
    const pos = vals.filter((v) => v > 0);
    return pos.length > 0 ? Math.min(...pos) / 10 : 1e-12;
  };
  const allX = series.flatMap((s) => s.x);
  const allY = series.flatMap((s) => s.y);
  const allHi = series.flatMap((s) => s.y.map((y, i) => y + s.ci[i]));
  const xFloor = floorOf(allX);
  const yFloor = floorOf(allY);
  const clampX = (v: number) => Math.max(v, xFloor);
  const clampY = (v: number) => Math.max(v, yFloor);

  const xMin = Math.min(...allX.map(clampX));
  const xMax = Math.max(...allX.map(clampX));
  const yMin = Math.min(
    ...series.flatMap((s) => s.y.map((y, i) => clampY(y - s.ci[i]))),
  );
  const yMax = Math.max(...allHi.map(clampY));

  const sx = logScale(xMin, xMax, MARGIN.left, WIDTH - MARGIN.right);
  const sy = logScale(yMin, yMax, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  // axes
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(
    `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`,
    `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`,
  );
  for (const t of sx.ticks) {
    const px = sx(t);
    parts.push(
      `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="black"/>`,
      `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y1}" stroke="#ddd" stroke-dasharray="2,4"/>`,
      `<text x="${px}" y="${y0 + 18}" text-anchor="middle">${fmtTick(t)}</text>`,
    );
  }
  for (const t of sy.ticks) {
    const py = sy(t);
    parts.push(
      `<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`,
      `<line x1="${x0}" y1="${py}" x2="${x1}" y2="${py}" stroke="#ddd" stroke-dasharray="2,4"/>`,
      `<text x="${x0 - 8}" y="${py + 4}" text-anchor="end">${fmtTick(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle">${esc(xLabel)}</text>`,
    `<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" transform="rotate(-90 18 ${(y0 + y1) / 2})">${esc(yLabel)}</text>`,
  );
  if (title !== "") {
    parts.push(
      `<text x="${(x0 + x1) / 2}" y="24" text-anchor="middle" font-size="16">${esc(title)}</text>`,
    );
  }

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = s.x.map((x, j) => ({
      px: sx(clampX(x)),
      lo: sy(clampY(s.y[j] - s.ci[j])),
      mid: sy(clampY(s.y[j])),
      hi: sy(clampY(s.y[j] + s.ci[j])),
    }));
    const band = [
      ...pts.map((p) => `${p.px.toFixed(2)},${p.hi.toFixed(2)}`),
      ...pts
        .slice()
        .reverse()
        .map((p) => `${p.px.toFixed(2)},${p.lo.toFixed(2)}`),
    ].join(" ");
    parts.push(
      `<polygon points="${band}" fill="${color}" fill-opacity="0.2" stroke="none"/>`,
    );
    const line = pts
      .map((p) => `${p.px.toFixed(2)},${p.mid.toFixed(2)}`)
      .join(" ");
    parts.push(
      `<polyline points="${line}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
  });

  // legend
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const ly = MARGIN.top + 8 + i * 18;
    const lx = x0 + 12;
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 22}" y2="${ly}" stroke="${color}" stroke-width="1.8"/>`,
      `<text x="${lx + 28}" y="${ly + 4}">${esc(s.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
