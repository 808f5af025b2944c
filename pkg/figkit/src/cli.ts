#!/usr/bin/env node
/** figkit <figure> [--data <csv...>] [--out <path>] */

import fs from "fs";
import path from "path";

import { CsvTable, SchemaError, readCsv } from "./csv";
import { DEFAULT_DATA, FIGURE_NAMES, FigureName, renderFigure } from "./figures";

class UsageError extends Error {}

const USAGE = `usage: figkit <figure> [--data <csv...>] [--out <path>]
  figure   one of: ${FIGURE_NAMES.join(", ")}
  --data   input CSV paths (default: the packaged CSVs under data/)
  --out    output SVG path (default: <figure>.svg)`;

export function dataDir(): string {
  return path.resolve(__dirname, "..", "data");
}

interface Args {
  figure: FigureName;
  data: string[];
  out: string;
}

function parseArgs(argv: string[]): Args | null {
  if (argv.includes("-h") || argv.includes("--help")) return null;
  let figure: string | null = null;
  const data: string[] = [];
  let out: string | null = null;
  let i = 0;
  while (i < argv.length) {
    const token = argv[i];
    if (token === "--data") {
      i += 1;
      while (i < argv.length && !argv[i].startsWith("--")) {
        data.push(argv[i]);
        i += 1;
      }
      if (data.length === 0) throw new UsageError("--data needs at least one path");
    } else if (token === "--out") {
      if (i + 1 >= argv.length) throw new UsageError("--out needs a path");
      out = argv[i + 1];
      i += 2;
    } else if (token.startsWith("--")) {
      throw new UsageError(`unknown flag ${token}`);
    } else if (figure === null) {
      figure = token;
      i += 1;
    } else {
      throw new UsageError(`unexpected argument ${token}`);
    }
  }
  if (figure === null) throw new UsageError("missing figure name");
  if (!(FIGURE_NAMES as string[]).includes(figure)) {
    throw new UsageError(
      `unknown figure ${figure} (choose from ${FIGURE_NAMES.join(", ")})`);
  }
  const fig = figure as FigureName;
  const inputs = data.length > 0
    ? data
    : DEFAULT_DATA[fig].map((name) => path.join(dataDir(), name));
  return { figure: fig, data: inputs, out: out ?? `${fig}.svg` };
}

export function runCli(argv: string[]): number {
  let args: Args | null;
  try {
    args = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`error: ${err.message}`);
      console.error(USAGE);
      return 1;
    }
    throw err;
  }
  if (args === null) {
    console.log(USAGE);
    return 0;
  }
  try {
    const tables: CsvTable[] = args.data.map((p) => readCsv(p));
    fs.writeFileSync(args.out, renderFigure(args.figure, tables));
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(runCli(process.argv.slice(2)));
}
