/** Declarative figure request deserialized from a JSON spec file. */
import * as fs from "node:fs";

export type FigureKind =
  | "sweep_L_vs_eps"
  | "trajectory_intensities"
  | "trajectory_phase";

const KINDS: ReadonlySet<string> = new Set([
  "sweep_L_vs_eps",
  "trajectory_intensities",
  "trajectory_phase",
]);

export interface FigureSpec {
  input_paths: string[];
  kind: FigureKind;
  output_path: string;
  log_x: boolean;
  log_y: boolean;
}

export class SpecError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SpecError";
  }
}

export function parseFigureSpec(raw: unknown): FigureSpec {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new SpecError("figure spec must be a JSON object");
  }
  const doc = raw as Record<string, unknown>;
  const paths = doc.input_paths;
  if (
    !Array.isArray(paths) ||
    paths.length === 0 ||
    !paths.every((p) => typeof p === "string")
  ) {
    throw new SpecError("input_paths must be a non-empty list of strings");
  }
  if (typeof doc.kind !== "string" || !KINDS.has(doc.kind)) {
    throw new SpecError(`kind must be one of ${[...KINDS].join(", ")}`);
  }
  if (typeof doc.output_path !== "string" || doc.output_path.length === 0) {
    throw new SpecError("output_path must be a non-empty string");
  }
  for (const key of Object.keys(doc)) {
    if (!["input_paths", "kind", "output_path", "log_x", "log_y"].includes(key)) {
      throw new SpecError(`unknown figure spec key ${JSON.stringify(key)}`);
    }
  }
  const logDefault = doc.kind === "sweep_L_vs_eps";
  const spec: FigureSpec = {
    input_paths: paths as string[],
    kind: doc.kind as FigureKind,
    output_path: doc.output_path,
    log_x: typeof doc.log_x === "boolean" ? doc.log_x : logDefault,
    log_y: typeof doc.log_y === "boolean" ? doc.log_y : false,
  };
  for (const p of spec.input_paths) {
    if (!fs.existsSync(p)) throw new SpecError(`input file not found: ${p}`);
  }
  return spec;
}

export function loadFigureSpec(path: string): FigureSpec {
  let text: string;
  try {
    text = fs.readFileSync(path, "utf-8");
  } catch (err) {
    throw new SpecError(`cannot read figure spec ${path}: ${err}`);
  }
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (err) {
    throw new SpecError(`figure spec is not valid JSON: ${err}`);
  }
  return parseFigureSpec(doc);
}
