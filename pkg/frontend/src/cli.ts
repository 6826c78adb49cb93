/**
 * Command line entry point:
 *
 *   plot --csv results/sweep.csv --axis K --out fig.svg \
 *        [--solutions S1,S2] [--title "U = 12"]
 */

import { readFileSync, writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { parseSweepCsv } from "./csv.js";
import { renderSweepSvg } from "./plot.js";

interface Options {
  csv: string;
  axis: string;
  out: string;
  solutions?: string[];
  title?: string;
}

export function parseArgs(argv: string[]): Options {
  if (argv[0] !== "plot") {
    throw new Error(`expected the "plot" command, got "${argv[0] ?? ""}"`);
  }
  const options: Partial<Options> = {};
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i]!;
    const value = argv[i + 1];
    if (value === undefined) {
      throw new Error(`flag ${flag} needs a value`);
    }
    switch (flag) {
      case "--csv":
        options.csv = value;
        break;
      case "--axis":
        if (value !== "K" && value !== "U") {
          throw new Error(`--axis must be K or U, got "${value}"`);
        }
        options.axis = value;
        break;
      case "--out":
        options.out = value;
        break;
      case "--solutions":
        options.solutions = value
          .split(",")
          .map((s) => s.trim())
          .filter((s) => s !== "");
        break;
      case "--title":
        options.title = value;
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  for (const required of ["csv", "axis", "out"] as const) {
    if (options[required] === undefined) {
      throw new Error(`--${required} is required`);
    }
  }
  return options as Options;
}

export function main(argv: string[]): number {
  try {
    const options = parseArgs(argv);
    const rows = parseSweepCsv(readFileSync(options.csv, "utf-8"));
    const svg = renderSweepSvg(rows, {
      axis: options.axis,
      solutions: options.solutions,
      title: options.title,
    });
    writeFileSync(options.out, svg, "utf-8");
    console.log(`wrote ${options.out}`);
    return 0;
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    console.error(`error: ${message}`);
    return 2;
  }
}

const invokedDirectly =
  typeof process.argv[1] === "string" &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
