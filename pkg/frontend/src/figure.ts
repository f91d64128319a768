import { readFileSync } from "node:fs";

/** Flat key=value figure description; `input`/`label` repeat per series. */
export interface FigureSpec {
  inputs: string[];
  labels: string[];
  x: string;
  y: string;
  output: string;
  title: string;
}

const X_COLUMNS = ["iteration", "nodes_touched"];

export function parseFigureSpec(text: string): FigureSpec {
  const spec: FigureSpec = {
    inputs: [],
    labels: [],
    x: "iteration",
    y: "exploitability",
    output: "",
    title: "",
  };
  text.split(/\r?\n/).forEach((raw, i) => {
    const line = raw.trim();
    if (line === "" || line.startsWith("#")) return;
    const eq = line.indexOf("=");
    if (eq < 0) {
      throw new Error(`line ${i + 1}: expected key=value, got '${line}'`);
    }
    const key = line.slice(0, eq).trim();
    const value = line.slice(eq + 1).trim();
    switch (key) {
      case "input":
        spec.inputs.push(value);
        break;
      case "label":
        spec.labels.push(value);
        break;
      case "x":
      case "y":
      case "output":
      case "title":
        spec[key] = value;
        break;
      default:
        throw new Error(`line ${i + 1}: unknown key '${key}'`);
    }
  });
  if (spec.inputs.length === 0) throw new Error("no input= series given");
  if (spec.output === "") throw new Error("no output= path given");
  if (spec.labels.length === 0) {
    spec.labels = spec.inputs.slice();
  }
  if (spec.labels.length !== spec.inputs.length) {
    throw new Error(
      `${spec.inputs.length} input= lines but ${spec.labels.length} label= lines`,
    );
  }
  if (!X_COLUMNS.includes(spec.x)) {
    throw new Error(`x must be one of ${X_COLUMNS.join(", ")}`);
  }
  return spec;
}

export function loadFigureSpec(path: string): FigureSpec {
  return parseFigureSpec(readFileSync(path, "utf-8"));
}
