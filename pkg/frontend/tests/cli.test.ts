import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { main, parseArgs } from "../src/cli.js";

const GOLDEN = `axis,value,solution,mean_gm,stderr_gm,realizations,seed
K,1,S1,7092000.5,81000.25,50,1
K,2,S1,13270000.0,190000.5,50,1
K,1,S2,7092000.5,81000.25,50,1
K,2,S2,13250000.0,195000.75,50,1
`;

describe("parseArgs", () => {
  it("parses a full command line", () => {
    const options = parseArgs([
      "plot", "--csv", "a.csv", "--axis", "K", "--out", "fig.svg",
      "--solutions", "S1, S2", "--title", "U = 12",
    ]);
    expect(options).toEqual({
      csv: "a.csv",
      axis: "K",
      out: "fig.svg",
      solutions: ["S1", "S2"],
      title: "U = 12",
    });
  });

  it("rejects missing command, unknown flags, and bad axes", () => {
    expect(() => parseArgs([])).toThrowError(/plot/);
    expect(() => parseArgs(["plot", "--nope", "x"])).toThrowError(/--nope/);
    expect(() => parseArgs(["plot", "--axis", "Z"])).toThrowError(/K or U/);
    expect(() => parseArgs(["plot", "--csv", "a", "--axis", "K"]))
      .toThrowError(/--out is required/);
    expect(() => parseArgs(["plot", "--csv"])).toThrowError(/needs a value/);
  });
});

describe("main", () => {
  let dir: string;
  let errors: string[];

  beforeEach(() => {
    dir = mkdtempSync(join(tmpdir(), "ulrrm-plots-"));
    errors = [];
    vi.spyOn(console, "error").mockImplementation((msg) => {
      errors.push(String(msg));
    });
    vi.spyOn(console, "log").mockImplementation(() => {});
  });

  afterEach(() => {
    vi.restoreAllMocks();
  });

  it("writes an SVG and exits 0", () => {
    const csv = join(dir, "sweep.csv");
    const out = join(dir, "fig.svg");
    writeFileSync(csv, GOLDEN);
    const code = main(["plot", "--csv", csv, "--axis", "K", "--out", out]);
    expect(code).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg).toContain('data-mean-gm="7092000.5"');
  });

  it("exits 2 with a named column on a truncated CSV", () => {
    const csv = join(dir, "broken.csv");
    writeFileSync(
      csv,
      GOLDEN.split("\n")
        .map((line) => line.split(",").slice(0, 4).join(","))
        .join("\n"),
    );
    const code = main(["plot", "--csv", csv, "--axis", "K",
                       "--out", join(dir, "fig.svg")]);
    expect(code).toBe(2);
    expect(errors.join("\n")).toContain("missing column: stderr_gm");
  });

  it("exits 2 when the CSV file does not exist", () => {
    const code = main(["plot", "--csv", join(dir, "nope.csv"),
                       "--axis", "K", "--out", join(dir, "fig.svg")]);
    expect(code).toBe(2);
    expect(errors.join("\n")).toMatch(/error:/);
  });

  it("exits 2 on an axis mismatch", () => {
    const csv = join(dir, "sweep.csv");
    writeFileSync(csv, GOLDEN);
    const code = main(["plot", "--csv", csv, "--axis", "U",
                       "--out", join(dir, "fig.svg")]);
    expect(code).toBe(2);
    expect(errors.join("\n")).toContain("axis mismatch");
  });
});
