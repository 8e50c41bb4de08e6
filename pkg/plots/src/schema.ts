/** CSV schemas for the simulator's artifacts. */

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export const SWEEP_COLUMNS = [
  "epsilon",
  "model",
  "phase_terms",
  "L_measured",
  "e_measured",
  "L_analytic",
  "e_analytic",
  "validity_flag",
] as const;

export const TRAJECTORY_COLUMNS = [
  "zeta",
  "om1_re", "om1_im", "om2_re", "om2_im",
  "e1_re", "e1_im", "e2_re", "e2_im",
  "I_om1", "I_om2", "I_e1", "I_e2",
  "phi", "c1", "c2", "c3", "c4", "lambda0",
] as const;

const SWEEP_TEXT_COLUMNS = new Set(["model", "phase_terms", "validity_flag"]);

export interface SweepRow {
  epsilon: number;
  model: string;
  phase_terms: "on" | "off";
  L_measured: number;
  e_measured: number;
  L_analytic: number;
  e_analytic: number;
  validity_flag: string;
}

export type TrajectoryTable = Map<string, number[]>;

function splitLines(text: string): string[] {
  return text.split(/\r?\n/).filter((line) => line.length > 0);
}

function parseNumber(cell: string, column: string, line: number): number {
  if (cell === "nan") return NaN;
  if (cell === "inf") return Infinity;
  if (cell === "-inf") return -Infinity;
  const value = Number(cell);
  if (cell.trim() === "" || Number.isNaN(value)) {
    throw new SchemaError(
      `line ${line}: column ${column} has non-numeric cell ${JSON.stringify(cell)}`,
    );
  }
  return value;
}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = splitLines(text);
  if (lines.length === 0) throw new SchemaError("empty sweep CSV");
  const header = lines[0].split(",");
  if (header.join(",") !== SWEEP_COLUMNS.join(",")) {
    throw new SchemaError(
      `sweep header mismatch: expected ${SWEEP_COLUMNS.join(",")}, got ${lines[0]}`,
    );
  }
  return lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== SWEEP_COLUMNS.length) {
      throw new SchemaError(`line ${i + 2}: expected ${SWEEP_COLUMNS.length} cells`);
    }
    const row: Record<string, number | string> = {};
    SWEEP_COLUMNS.forEach((name, j) => {
      row[name] = SWEEP_TEXT_COLUMNS.has(name)
        ? cells[j]
        : parseNumber(cells[j], name, i + 2);
    });
    if (row.phase_terms !== "on" && row.phase_terms !== "off") {
      throw new SchemaError(`line ${i + 2}: phase_terms must be on/off`);
    }
    return row as unknown as SweepRow;
  });
}

export function parseTrajectoryCsv(text: string): TrajectoryTable {
  const lines = splitLines(text);
  if (lines.length === 0) throw new SchemaError("empty trajectory CSV");
  if (lines[0] !== TRAJECTORY_COLUMNS.join(",")) {
    throw new SchemaError(`trajectory header mismatch: got ${lines[0]}`);
  }
  const table: TrajectoryTable = new Map(
    TRAJECTORY_COLUMNS.map((name) => [name, []]),
  );
  lines.slice(1).forEach((line, i) => {
    const cells = line.split(",");
    if (cells.length !== TRAJECTORY_COLUMNS.length) {
      throw new SchemaError(
        `line ${i + 2}: expected ${TRAJECTORY_COLUMNS.length} cells`,
      );
    }
    TRAJECTORY_COLUMNS.forEach((name, j) => {
      table.get(name)!.push(parseNumber(cells[j], name, i + 2));
    });
  });
  return table;
}
