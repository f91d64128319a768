import { writeFileSync } from "node:fs";
import { parseAggregateCsv, assertSharedGrid } from "./csv.js";
import type { FigureSpec } from "./figure.js";
import { renderFigure } from "./render.js";

/** Load every series of a figure spec, render it, and write the SVG. */
export function buildFigure(spec: FigureSpec): string {
  const series = spec.inputs.map((path, i) =>
    parseAggregateCsv(path, spec.x, spec.y, spec.labels[i]),
  );
  assertSharedGrid(series);
  const svg = renderFigure(series, spec.x, spec.y, spec.title);
  writeFileSync(spec.output, svg);
  return spec.output;
}
