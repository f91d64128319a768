import { readFileSync } from "node:fs";
import Papa from "papaparse";

/** One aggregated metrics series: per-checkpoint means with CI half-widths. */
export interface Series {
  label: string;
  x: number[];
  y: number[];
  ci: number[];
}

const CI_COLUMN: Record<string, string> = {
  exploitability: "exploitability_ci",
  mean_cfv_variance: "mean_cfv_variance_ci",
};

export function ciColumnFor(y: string): string {
  return CI_COLUMN[y] ?? `${y}_ci`;
}

export function parseAggregateCsv(
  path: string,
  xColumn: string,
  yColumn: string,
  label: string,
): Series {
  const text = readFileSync(path, "utf-8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new Error(`${path}: malformed CSV (${parsed.errors[0].message})`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new Error(`${path}: empty series`);
  }
  const columns = parsed.meta.fields ?? [];
  const ciColumn = ciColumnFor(yColumn);
  for (const col of [xColumn, yColumn, ciColumn]) {
    if (!columns.includes(col)) {
      throw new Error(`${path}: missing column '${col}'`);
    }
  }
  const series: Series = { label, x: [], y: [], ci: [] };
  for (const row of rows) {
    const x = Number(row[xColumn]);
    const y = Number(row[yColumn]);
    const ci = row[ciColumn] === "" ? 0 : Number(row[ciColumn]);
    if (!Number.isFinite(x) || !Number.isFinite(y) || !Number.isFinite(ci)) {
      throw new Error(`${path}: non-numeric value in series '${label}'`);
    }
    series.x.push(x);
    series.y.push(y);
    series.ci.push(ci);
  }
  return series;
}

/** All series of one figure must share the checkpoint grid. */
export function assertSharedGrid(series: Series[]): void {
  const grid = JSON.stringify(series[0].x);
  for (const s of series.slice(1)) {
    if (JSON.stringify(s.x) !== grid) {
      throw new Error(
        `series '${s.label}' has a different checkpoint grid than '${series[0].label}'`,
      );
    }
  }
}
