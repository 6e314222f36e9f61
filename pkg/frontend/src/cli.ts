#!/usr/bin/env node
// Usage: plot <figure-kind> --in <csv...> --out <img>

import { readTable } from "./csv";
import { FIGURE_KINDS, FigureKind, render } from "./figures";

function usage(): never {
  console.error("usage: plot <" + FIGURE_KINDS.join("|") + "> --in <csv...> --out <img>");
  process.exit(2);
}

function main(argv: string[]): void {
  if (argv.length === 0) {
    usage();
  }
  const kind = argv[0];
  if (!FIGURE_KINDS.includes(kind as FigureKind)) {
    console.error(`unknown figure kind: ${kind}`);
    usage();
  }
  const inputs: string[] = [];
  let out = "";
  let i = 1;
  while (i < argv.length) {
    if (argv[i] === "--in") {
      i += 1;
      while (i < argv.length && !argv[i].startsWith("--")) {
        inputs.push(argv[i]);
        i += 1;
      }
    } else if (argv[i] === "--out") {
      i += 1;
      if (i >= argv.length) {
        usage();
      }
      out = argv[i];
      i += 1;
    } else {
      console.error(`unknown argument: ${argv[i]}`);
      usage();
    }
  }
  if (inputs.length === 0 || out === "") {
    usage();
  }
  const tables = inputs.map(readTable);
  render(kind as FigureKind, tables, out);
}

try {
  main(process.argv.slice(2));
} catch (err) {
  console.error(String(err instanceof Error ? err.message : err));
  process.exit(1);
}
