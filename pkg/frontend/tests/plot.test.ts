import { describe, expect, it } from "vitest";

import { parseSweepCsv } from "../src/csv.js";
import { engineeringLabel, niceCeil, renderSweepSvg } from "../src/plot.js";

const SOLUTIONS = ["B", "S0", "S1", "S2", "S2WF"];
const K_VALUES = [1, 2, 4, 6, 8, 12];

function goldenCsv(): string {
  // shapes loosely follow a real sweep; exact values are what matters here
  const lines = ["axis,value,solution,mean_gm,stderr_gm,realizations,seed"];
  K_VALUES.forEach((k, ki) => {
    SOLUTIONS.forEach((sol, si) => {
      const mean = 5.5e6 + ki * 2.1e6 + si * 7.3e5 + ki * si * 1234.5;
      const stderr = 1.5e5 + si * 1e4 + ki * 500.25;
      lines.push(`K,${k},${sol},${mean},${stderr},50,1`);
    });
  });
  return lines.join("\n") + "\n";
}

function markers(svg: string) {
  const out: Array<{ solution: string; x: number; mean: number; stderr: number; cy: number }> = [];
  const re =
    /<circle cx="[^"]+" cy="([^"]+)" r="[^"]+" fill="[^"]+" data-solution="([^"]+)" data-x="([^"]+)" data-mean-gm="([^"]+)" data-stderr-gm="([^"]+)"\/>/g;
  for (const m of svg.matchAll(re)) {
    out.push({
      cy: Number(m[1]),
      solution: m[2]!,
      x: Number(m[3]),
      mean: Number(m[4]),
      stderr: Number(m[5]),
    });
  }
  return out;
}

describe("renderSweepSvg", () => {
  it("plots every mean_gm from the CSV exactly (criterion 10)", () => {
    const rows = parseSweepCsv(goldenCsv());
    const svg = renderSweepSvg(rows, { axis: "K" });
    const points = markers(svg);
    expect(points).toHaveLength(rows.length);
    for (const row of rows) {
      const match = points.find(
        (p) => p.solution === row.solution && p.x === row.value,
      );
      expect(match, `${row.solution}@K=${row.value}`).toBeDefined();
      expect(match!.mean).toBe(row.meanGm);
      expect(match!.stderr).toBe(row.stderrGm);
    }
  });

  it("fails on a CSV missing stderr_gm, naming the column (criterion 10)", () => {
    const broken = goldenCsv()
      .split("\n")
      .map((line, i) => {
        if (line.trim() === "") return line;
        const cells = line.split(",");
        cells.splice(i === 0 ? 4 : 4, 1);
        return cells.join(",");
      })
      .join("\n");
    expect(() => parseSweepCsv(broken)).toThrowError("missing column: stderr_gm");
  });

  it("draws one curve and six markers per solution", () => {
    const rows = parseSweepCsv(goldenCsv());
    const svg = renderSweepSvg(rows, { axis: "K" });
    for (const sol of SOLUTIONS) {
      const polylines = svg.match(
        new RegExp(`<polyline [^>]*data-solution="${sol}"`, "g"),
      );
      expect(polylines).toHaveLength(1);
      expect(markers(svg).filter((p) => p.solution === sol)).toHaveLength(6);
    }
  });

  it("maps larger means to higher positions on a shared scale", () => {
    const rows = parseSweepCsv(goldenCsv());
    const points = markers(renderSweepSvg(rows, { axis: "K" }));
    for (const a of points) {
      for (const b of points) {
        if (a.mean > b.mean) expect(a.cy).toBeLessThan(b.cy);
        if (a.mean === b.mean && a !== b) expect(a.cy).toBe(b.cy);
      }
    }
  });

  it("is deterministic for identical input", () => {
    const rows = parseSweepCsv(goldenCsv());
    const spec = { axis: "K", title: "U = 12" };
    expect(renderSweepSvg(rows, spec)).toBe(renderSweepSvg(rows, spec));
  });

  it("honors an explicit solution subset in order", () => {
    const rows = parseSweepCsv(goldenCsv());
    const svg = renderSweepSvg(rows, { axis: "K", solutions: ["S2", "S1"] });
    expect(markers(svg)).toHaveLength(12);
    expect(svg.indexOf('data-solution="S2"')).toBeLessThan(
      svg.indexOf('data-solution="S1"'),
    );
    expect(svg).not.toContain('data-solution="B"');
  });

  it("renders a single-solution CSV as a single curve", () => {
    const rows = parseSweepCsv(goldenCsv()).filter((r) => r.solution === "S2");
    const svg = renderSweepSvg(rows, { axis: "K" });
    expect(svg.match(/<polyline /g)).toHaveLength(1);
  });

  it("rejects unknown solutions and axis mismatches", () => {
    const rows = parseSweepCsv(goldenCsv());
    expect(() => renderSweepSvg(rows, { axis: "K", solutions: ["S9"] }))
      .toThrowError(/no rows for solution S9/);
    expect(() => renderSweepSvg(rows, { axis: "U" }))
      .toThrowError(/axis mismatch/);
    expect(() => renderSweepSvg(rows, { axis: "K", solutions: [] }))
      .toThrowError(/no solutions selected/);
  });

  it("draws error bars only for positive standard errors", () => {
    const rows = parseSweepCsv(
      "axis,value,solution,mean_gm,stderr_gm,realizations,seed\n" +
        "K,1,S0,10.0,0.0,1,1\nK,2,S0,20.0,2.5,1,1\n",
    );
    const svg = renderSweepSvg(rows, { axis: "K" });
    const barLines = svg
      .split("\n")
      .filter((l) => l.startsWith("<line") && l.includes('stroke="#0072b2"')
        && !l.includes("stroke-width"));  // legend swatches carry a width
    // one vertical bar plus two caps for the single errored point
    expect(barLines).toHaveLength(3);
  });

  it("escapes markup in titles and solution names", () => {
    const rows = parseSweepCsv(
      "axis,value,solution,mean_gm,stderr_gm,realizations,seed\n" +
        "K,1,a<b,1.0,0.0,1,1\n",
    );
    const svg = renderSweepSvg(rows, { axis: "K", title: 'x "&" y' });
    expect(svg).toContain("a&lt;b");
    expect(svg).toContain("x &quot;&amp;&quot; y");
    expect(svg).not.toContain("a<b");
  });
});

describe("scale helpers", () => {
  it("niceCeil snaps to 1/2/5 decades", () => {
    expect(niceCeil(3.2e6)).toBe(5e6);
    expect(niceCeil(0.9)).toBe(1);
    expect(niceCeil(10)).toBe(10);
    expect(niceCeil(11)).toBe(20);
    expect(niceCeil(0)).toBe(1);
  });

  it("engineeringLabel uses k/M/G suffixes", () => {
    expect(engineeringLabel(0)).toBe("0");
    expect(engineeringLabel(2.5e6)).toBe("2.50M");
    expect(engineeringLabel(3e3)).toBe("3.00k");
    expect(engineeringLabel(1.2e9)).toBe("1.20G");
    expect(engineeringLabel(250e6)).toBe("250M");
  });
});
