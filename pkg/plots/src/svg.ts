/** SVG document assembly: axes, series, legend. No runtime dependencies. */
import { Scale, formatTick } from "./scales";

export const WIDTH = 760;
export const HEIGHT = 520;
export const MARGIN = { top: 40, right: 30, bottom: 64, left: 84 };

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dashed: boolean;
  markers: boolean;
  cssClass: string;
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(value: number): string {
  return Number(value.toFixed(3)).toString();
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  children: string[] = [],
  text?: string,
): string {
  const attrText = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(v)}"`)
    .join(" ");
  const open = attrText.length > 0 ? `<${tag} ${attrText}>` : `<${tag}>`;
  if (children.length === 0 && text === undefined) {
    return open.replace(/>$/, "/>");
  }
  return `${open}${text !== undefined ? esc(text) : ""}${children.join("")}</${tag}>`;
}

function seriesPath(s: Series, sx: Scale, sy: Scale): string[] {
  const pts: Array<[number, number]> = [];
  for (let i = 0; i < s.x.length; i += 1) {
    if (Number.isFinite(s.x[i]) && Number.isFinite(s.y[i])) {
      pts.push([sx(s.x[i]), sy(s.y[i])]);
    }
  }
  const parts: string[] = [];
  if (pts.length >= 2) {
    const d =
      `M ${fmt(pts[0][0])} ${fmt(pts[0][1])} ` +
      pts.slice(1).map(([x, y]) => `L ${fmt(x)} ${fmt(y)}`).join(" ");
    const attrs: Record<string, string | number> = {
      class: s.cssClass,
      d,
      fill: "none",
      stroke: s.color,
      "stroke-width": 1.8,
    };
    if (s.dashed) attrs["stroke-dasharray"] = "7 4";
    parts.push(el("path", attrs));
  }
  if (s.markers || pts.length === 1) {
    for (const [x, y] of pts) {
      parts.push(
        el("circle", {
          class: `${s.cssClass}-marker`,
          cx: x,
          cy: y,
          r: 2.6,
          fill: s.color,
          stroke: "none",
        }),
      );
    }
  }
  return parts;
}

function axis(
  sx: Scale,
  sy: Scale,
  logX: boolean,
  logY: boolean,
  xLabel: string,
  yLabel: string,
): string[] {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const parts: string[] = [];
  parts.push(el("line", { x1: x0, y1: y0, x2: x1, y2: y0, stroke: "#000" }));
  parts.push(el("line", { x1: x0, y1: y0, x2: x0, y2: y1, stroke: "#000" }));
  for (const t of sx.ticks()) {
    const px = sx(t);
    parts.push(el("line", { x1: px, y1: y0, x2: px, y2: y0 + 6, stroke: "#000" }));
    parts.push(
      el(
        "text",
        { x: px, y: y0 + 22, "text-anchor": "middle", "font-size": 12 },
        [],
        formatTick(t),
      ),
    );
  }
  for (const t of sy.ticks()) {
    const py = sy(t);
    parts.push(el("line", { x1: x0 - 6, y1: py, x2: x0, y2: py, stroke: "#000" }));
    parts.push(
      el(
        "text",
        { x: x0 - 10, y: py + 4, "text-anchor": "end", "font-size": 12 },
        [],
        formatTick(t),
      ),
    );
  }
  parts.push(
    el(
      "text",
      {
        x: (x0 + x1) / 2,
        y: HEIGHT - 18,
        "text-anchor": "middle",
        "font-size": 14,
      },
      [],
      xLabel + (logX ? " (log scale)" : ""),
    ),
  );
  parts.push(
    el(
      "text",
      {
        x: 22,
        y: (y0 + y1) / 2,
        "text-anchor": "middle",
        "font-size": 14,
        transform: `rotate(-90 22 ${fmt((y0 + y1) / 2)})`,
      },
      [],
      yLabel + (logY ? " (log scale)" : ""),
    ),
  );
  return parts;
}

function legend(series: Series[]): string[] {
  const parts: string[] = [];
  const x = MARGIN.left + 14;
  let y = MARGIN.top + 8;
  for (const s of series) {
    const attrs: Record<string, string | number> = {
      x1: x,
      y1: y,
      x2: x + 34,
      y2: y,
      stroke: s.color,
      "stroke-width": 1.8,
    };
    if (s.dashed) attrs["stroke-dasharray"] = "7 4";
    parts.push(el("line", attrs));
    parts.push(
      el(
        "text",
        { x: x + 42, y: y + 4, "font-size": 12, "text-anchor": "start" },
        [],
        s.label,
      ),
    );
    y += 18;
  }
  return parts;
}

export interface FigureContent {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logX: boolean;
  logY: boolean;
  xScale: Scale;
  yScale: Scale;
}

export function composeSvg(content: FigureContent): string {
  const body: string[] = [
    el("rect", {
      x: 0,
      y: 0,
      width: WIDTH,
      height: HEIGHT,
      fill: "#ffffff",
    }),
    el(
      "text",
      {
        x: WIDTH / 2,
        y: 24,
        "text-anchor": "middle",
        "font-size": 16,
        "font-weight": "bold",
      },
      [],
      content.title,
    ),
    ...axis(
      content.xScale,
      content.yScale,
      content.logX,
      content.logY,
      content.xLabel,
      content.yLabel,
    ),
  ];
  for (const s of content.series) {
    body.push(...seriesPath(s, content.xScale, content.yScale));
  }
  body.push(...legend(content.series));
  return (
    `<?xml version="1.0" encoding="UTF-8"?>\n` +
    el(
      "svg",
      {
        xmlns: "http://www.w3.org/2000/svg",
        width: WIDTH,
        height: HEIGHT,
        viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
        "font-family": "Helvetica, Arial, sans-serif",
      },
      body,
    ) +
    "\n"
  );
}
