export { parseAggregateCsv, assertSharedGrid, ciColumnFor } from "./csv.js";
export type { Series } from "./csv.js";
export { parseFigureSpec, loadFigureSpec } from "./figure.js";
export type { FigureSpec } from "./figure.js";
export { renderFigure } from "./render.js";
export { buildFigure } from "./plot.js";
