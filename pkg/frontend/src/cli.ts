#!/usr/bin/env node
/**
 * Render an rdmud sweep CSV as an SVG plot.
 *
 * Usage:
 *   rdmud-plot --input sweep.csv --output sweep.svg [--linear]
 *              [--detector rdd] [--hide-baseline]
 */

import { readFileSync, realpathSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { renderSweepPlot } from "./render.js";
import { parseSweepCsv } from "./schema.js";

export interface PlotSpec {
  input: string;
  output: string;
  logScale: boolean;
  detector?: string;
  baseline: boolean;
}

export function specFromArgv(argv: string[]): PlotSpec {
  const { values } = parseArgs({
    args: argv,
    options: {
      input: { type: "string", short: "i" },
      output: { type: "string", short: "o" },
      linear: { type: "boolean", default: false },
      detector: { type: "string" },
      "hide-baseline": { type: "boolean", default: false },
    },
  });
  if (!values.input || !values.output) {
    throw new Error("both --input <csv> and --output <svg> are required");
  }
  return {
    input: values.input,
    output: values.output,
    logScale: !values.linear,
    detector: values.detector,
    baseline: !values["hide-baseline"],
  };
}

/** Read, render, write; the output file is only written on success. */
export function renderFile(spec: PlotSpec): string {
  const text = readFileSync(spec.input, "utf8");
  const rows = parseSweepCsv(text);
  const svg = renderSweepPlot(rows, {
    logScale: spec.logScale,
    detector: spec.detector,
    baseline: spec.baseline,
  });
  writeFileSync(spec.output, svg);
  return svg;
}

export function run(argv: string[]): number {
  try {
    const spec = specFromArgv(argv);
    renderFile(spec);
    console.log(`wrote ${spec.output}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
}

function invokedDirectly(): boolean {
  if (!process.argv[1]) {
    return false;
  }
  try {
    return import.meta.url === pathToFileURL(realpathSync(process.argv[1])).href;
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  process.exit(run(process.argv.slice(2)));
}
