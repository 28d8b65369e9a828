#!/usr/bin/env node
/**
 * Render a double-logarithmic convergence figure from a study CSV.
 *
 * Usage:
 *   plot <csv> [--refs p1,p2:column,...] [--out fig.svg] [--title "..."]
 *
 * Reference slopes draw dashed guide lines y ~ dofs^p, anchored at the second
 * data point of the named curve (or of the curve with the closest measured
 * decay rate when no column is given).  Output is always SVG, regardless of
 * the output file extension.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { buildPlotData, parseCsv, parseRefSpecs, PlotError, RefSpec } from "./series.js";
import { renderSvg } from "./svg.js";

interface CliArgs {
  csv: string;
  refs: RefSpec[];
  out: string;
  title?: string;
}

export function parseArgs(argv: string[]): CliArgs {
  const positional: string[] = [];
  let refs: RefSpec[] = [];
  let out = "plot.svg";
  let title: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "--refs") {
      refs = parseRefSpecs(argv[++i] ?? "");
    } else if (a === "--out") {
      out = argv[++i] ?? out;
    } else if (a === "--title") {
      title = argv[++i];
    } else if (a.startsWith("--")) {
      throw new PlotError(`unknown option ${a}`);
    } else {
      positional.push(a);
    }
  }
  if (positional.length !== 1) {
    throw new PlotError("expected exactly one CSV path");
  }
  return { csv: positional[0], refs, out, title };
}

export function run(argv: string[]): void {
  const args = parseArgs(argv);
  const table = parseCsv(readFileSync(args.csv, "utf-8"));
  const data = buildPlotData(table, args.refs);
  const svg = renderSvg(data, { title: args.title });
  writeFileSync(args.out, svg, "utf-8");
  console.log(`wrote ${args.out} (${data.series.length} curves, ${data.refs.length} reference lines)`);
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  try {
    run(process.argv.slice(2));
  } catch (err) {
    if (err instanceof PlotError || (err as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(err as Error).message}`);
      process.exit(1);
    }
    throw err;
  }
}
