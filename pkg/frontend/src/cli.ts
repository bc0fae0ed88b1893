#!/usr/bin/env node
import { realpathSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { readCdf, readResults } from "./csv.js";
import {
  FIGURE_KINDS,
  FigureKind,
  FigureOptions,
  cdfFigure,
  effectiveRateFigure,
  measurementsFigure,
  multiuserRateFigure,
} from "./figures.js";
import { SchemaError } from "./schema.js";

export interface CliArgs {
  kind: FigureKind;
  in: string;
  out: string;
  schemes?: string;
  title?: string;
  logY: boolean;
}

export function renderFigure(kind: FigureKind, inputPath: string, opts: FigureOptions): string {
  switch (kind) {
    case "measurements":
      return measurementsFigure(readResults(inputPath), opts);
    case "effective-rate":
      return effectiveRateFigure(readResults(inputPath), opts);
    case "cdf":
      return cdfFigure(readCdf(inputPath), opts);
    case "multiuser-rate":
      return multiuserRateFigure(readResults(inputPath), opts);
  }
}

/** Parse args, render, write.  Returns the process exit code; all input
 * problems come back as code 1 with a message on stderr and no file
 * written (rendering happens before the write). */
export function run(argv: string[]): number {
  const args = yargs(argv)
    .scriptName("swift-plot")
    .usage("$0 --kind KIND --in results.csv --out fig.svg")
    .option("kind", {
      describe: "figure to render",
      choices: FIGURE_KINDS,
      demandOption: true,
    })
    .option("in", {
      describe: "input CSV (results.csv, or cdf.csv for --kind cdf)",
      type: "string",
      demandOption: true,
    })
    .option("out", {
      describe: "output SVG path",
      type: "string",
      demandOption: true,
    })
    .option("schemes", {
      describe: "comma-separated scheme subset; every name must be in the CSV",
      type: "string",
    })
    .option("title", { describe: "override the figure title", type: "string" })
    .option("log-y", { describe: "log-10 y axis", type: "boolean", default: false })
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new SchemaError(msg);
    })
    .help();

  let parsed: CliArgs;
  try {
    parsed = args.parseSync() as unknown as CliArgs;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }

  const opts: FigureOptions = {
    schemes: parsed.schemes
      ? parsed.schemes.split(",").map((s) => s.trim()).filter((s) => s.length > 0)
      : undefined,
    title: parsed.title,
    logY: parsed.logY,
  };
  try {
    const svg = renderFigure(parsed.kind, parsed.in, opts);
    writeFileSync(parsed.out, svg);
    console.error(`wrote ${parsed.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof Error) {
      console.error(`error: ${(err as Error).message}`);
      return 1;
    }
    throw err;
  }
}

function invokedDirectly(): boolean {
  // compare against the realpath so the npm bin symlink also counts
  if (process.argv[1] === undefined) return false;
  try {
    return import.meta.url === pathToFileURL(realpathSync(process.argv[1])).href;
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  process.exit(run(hideBin(process.argv)));
}
