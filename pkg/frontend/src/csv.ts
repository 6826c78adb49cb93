/** Strict reader for the simulator's sweep.csv tables. */

export interface SweepRow {
  axis: string;
  value: number;
  solution: string;
  meanGm: number;
  stderrGm: number;
  realizations: number;
  seed: number;
}

export const REQUIRED_COLUMNS = [
  "axis",
  "value",
  "solution",
  "mean_gm",
  "stderr_gm",
  "realizations",
  "seed",
] as const;

function parseNumber(field: string, raw: string, line: number): number {
  const value = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(value)) {
    throw new Error(`line ${line}: column ${field} is not a number: "${raw}"`);
  }
  return value;
}

function parseInteger(field: string, raw: string, line: number): number {
  const value = parseNumber(field, raw, line);
  if (!Number.isInteger(value)) {
    throw new Error(`line ${line}: column ${field} must be an integer, got "${raw}"`);
  }
  return value;
}

/**
 * Parse a sweep table. The header must contain every required column;
 * extra columns are ignored. Any missing column, short row, or
 * non-numeric cell is an error.
 */
export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text
    .split("\n")
    .map((line) => line.replace(/\r$/, ""))
    .filter((line) => line.trim() !== "");
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  const header = lines[0]!.split(",").map((h) => h.trim());
  const index = new Map<string, number>();
  header.forEach((name, i) => index.set(name, i));
  for (const column of REQUIRED_COLUMNS) {
    if (!index.has(column)) {
      throw new Error(`missing column: ${column}`);
    }
  }

  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i]!.split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `line ${i + 1}: expected ${header.length} fields, got ${cells.length}`,
      );
    }
    const cell = (name: string): string => cells[index.get(name)!]!;
    rows.push({
      axis: cell("axis").trim(),
      value: parseInteger("value", cell("value"), i + 1),
      solution: cell("solution").trim(),
      meanGm: parseNumber("mean_gm", cell("mean_gm"), i + 1),
      stderrGm: parseNumber("stderr_gm", cell("stderr_gm"), i + 1),
      realizations: parseInteger("realizations", cell("realizations"), i + 1),
      seed: parseInteger("seed", cell("seed"), i + 1),
    });
  }
  if (rows.length === 0) {
    throw new Error("CSV has a header but no data rows");
  }
  return rows;
}
