#!/usr/bin/env node
import { loadFigureSpec } from "./figure.js";
import { buildFigure } from "./plot.js";

function usage(): void {
  console.error("usage: cfrkit-plot plot --spec <file>");
}

export function main(argv: string[]): number {
  if (argv[0] !== "plot") {
    usage();
    return 2;
  }
  const flag = argv.indexOf("--spec");
  if (flag < 0 || flag + 1 >= argv.length) {
    usage();
    return 2;
  }
  try {
    const out = buildFigure(loadFigureSpec(argv[flag + 1]));
    console.log(out);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
