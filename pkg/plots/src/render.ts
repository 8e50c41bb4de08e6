/** Figure construction for the three supported kinds. */
import * as fs from "node:fs";

import { FigureSpec } from "./figure";
import { SchemaError, SweepRow, parseSweepCsv, parseTrajectoryCsv } from "./schema";
import { Scale, linearScale, logScale } from "./scales";
import { FigureContent, HEIGHT, MARGIN, Series, WIDTH, composeSvg } from "./svg";

const X_RANGE: [number, number] = [MARGIN.left, WIDTH - MARGIN.right];
const Y_RANGE: [number, number] = [HEIGHT - MARGIN.bottom, MARGIN.top];

function finiteExtent(values: number[]): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v));
  if (finite.length === 0) throw new SchemaError("no finite values to plot");
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (lo === hi) {
    const pad = Math.abs(lo) > 0 ? 0.1 * Math.abs(lo) : 1;
    lo -= pad;
    hi += pad;
  }
  return [lo, hi];
}

function makeScale(log: boolean, extent: [number, number], range: [number, number]): Scale {
  if (log) return logScale(extent, range);
  const pad = 0.04 * (extent[1] - extent[0]);
  return linearScale([extent[0] - pad, extent[1] + pad], range);
}

function sweepSeries(rows: SweepRow[]): Series[] {
  const pick = (phase: "on" | "off", column: "L_measured" | "L_analytic") =>
    rows
      .filter((r) => r.phase_terms === phase && Number.isFinite(r[column]))
      .sort((a, b) => a.epsilon - b.epsilon);

  const make = (
    phase: "on" | "off",
    column: "L_measured" | "L_analytic",
    label: string,
    color: string,
    dashed: boolean,
    cssClass: string,
  ): Series => {
    const selected = pick(phase, column);
    return {
      label,
      x: selected.map((r) => r.epsilon),
      y: selected.map((r) => r[column]),
      color,
      dashed,
      markers: !dashed,
      cssClass,
    };
  };

  return [
    make("on", "L_measured", "with phase terms (measured)", "#1f5fa8", false, "measured-on"),
    make("off", "L_measured", "without phase terms (measured)", "#b33030", false, "measured-off"),
    make("on", "L_analytic", "with phase terms (analytic)", "#7fa8d0", true, "analytic-on"),
    make("off", "L_analytic", "without phase terms (analytic)", "#d99090", true, "analytic-off"),
  ];
}

function sweepFigure(spec: FigureSpec, text: string): FigureContent {
  const rows = parseSweepCsv(text);
  if (rows.length === 0) throw new SchemaError("sweep CSV has no data rows");
  const series = sweepSeries(rows).filter((s) => s.x.length > 0);
  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y);
  return {
    title: "Conversion distance vs seed intensity",
    xLabel: "seed intensity ratio",
    yLabel: "conversion length (Delta/kappa)",
    series,
    logX: spec.log_x,
    logY: spec.log_y,
    xScale: makeScale(spec.log_x, finiteExtent(xs), X_RANGE),
    yScale: makeScale(spec.log_y, finiteExtent(ys), Y_RANGE),
  };
}

const INTENSITY_CHANNELS: Array<[string, string, string]> = [
  ["I_om1", "pump 1", "#1f5fa8"],
  ["I_om2", "pump 2", "#58a05c"],
  ["I_e1", "generated 1", "#b33030"],
  ["I_e2", "generated 2", "#c08a2d"],
];

function trajectoryFigure(spec: FigureSpec, text: string): FigureContent {
  const table = parseTrajectoryCsv(text);
  const zeta = table.get("zeta")!;
  if (zeta.length === 0) throw new SchemaError("trajectory CSV has no data rows");
  let series: Series[];
  let yLabel: string;
  if (spec.kind === "trajectory_intensities") {
    series = INTENSITY_CHANNELS.map(([column, label, color]) => ({
      label,
      x: zeta,
      y: table.get(column)!,
      color,
      dashed: false,
      markers: false,
      cssClass: column.toLowerCase().replace("_", "-"),
    }));
    yLabel = "intensity (pump units)";
  } else {
    series = [
      {
        label: "relative phase",
        x: zeta,
        y: table.get("phi")!,
        color: "#1f5fa8",
        dashed: false,
        markers: false,
        cssClass: "phi",
      },
    ];
    yLabel = "relative phase (rad)";
  }
  const ys = series.flatMap((s) => s.y);
  return {
    title:
      spec.kind === "trajectory_intensities"
        ? "Field intensities along the medium"
        : "Relative phase along the medium",
    xLabel: "propagation distance (Delta/kappa)",
    yLabel,
    series,
    logX: spec.log_x,
    logY: spec.log_y,
    xScale: makeScale(spec.log_x, finiteExtent(zeta), X_RANGE),
    yScale: makeScale(spec.log_y, finiteExtent(ys), Y_RANGE),
  };
}

export function renderToString(spec: FigureSpec): string {
  const text = fs.readFileSync(spec.input_paths[0], "utf-8");
  const content =
    spec.kind === "sweep_L_vs_eps"
      ? sweepFigure(spec, text)
      : trajectoryFigure(spec, text);
  return composeSvg(content);
}

export function render(spec: FigureSpec): void {
  const svg = renderToString(spec);
  fs.writeFileSync(spec.output_path, svg, "utf-8");
}
