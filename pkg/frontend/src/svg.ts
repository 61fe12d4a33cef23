/**
 * Minimal deterministic SVG scene builder.  Numbers are formatted with a
 * fixed precision and nothing time- or environment-dependent enters the
 * output, so identical inputs give byte-identical files.
 */

import type { Scale } from "./scale.js";

const FMT = (v: number): string => {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate ${v}`);
  return v.toFixed(2).replace(/^-0\.00$/, "0.00");
};

export const WIDTH = 800;
export const HEIGHT = 520;
export const MARGIN = { left: 70, right: 20, top: 40, bottom: 50 };

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#17becf", "#7f7f7f",
];

export class Svg {
  private parts: string[] = [];

  rect(x: number, y: number, w: number, h: number, style: string): void {
    this.parts.push(
      `<rect x="${FMT(x)}" y="${FMT(y)}" width="${FMT(w)}" height="${FMT(h)}" style="${style}"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, style: string): void {
    this.parts.push(
      `<line x1="${FMT(x1)}" y1="${FMT(y1)}" x2="${FMT(x2)}" y2="${FMT(y2)}" style="${style}"/>`,
    );
  }

  polyline(points: Array<[number, number]>, style: string): void {
    const path = points.map(([x, y]) => `${FMT(x)},${FMT(y)}`).join(" ");
    this.parts.push(`<polyline points="${path}" style="${style}" fill="none"/>`);
  }

  circle(cx: number, cy: number, r: number, style: string): void {
    this.parts.push(`<circle cx="${FMT(cx)}" cy="${FMT(cy)}" r="${FMT(r)}" style="${style}"/>`);
  }

  text(x: number, y: number, content: string, style = "font-size:12px", anchor = "start"): void {
    this.parts.push(
      `<text x="${FMT(x)}" y="${FMT(y)}" text-anchor="${anchor}" style="${style};font-family:monospace">${escapeXml(content)}</text>`,
    );
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      ...this.parts,
      "</svg>",
      "",
    ].join("\n");
  }
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Frame {
  svg: Svg;
  x: Scale;
  y: Scale;
}

/** Axes, tick marks and labels around the plotting area. */
export function drawFrame(
  svg: Svg,
  x: Scale,
  y: Scale,
  opts: {
    title: string;
    xLabel: string;
    yLabel: string;
    xTicks: number[];
    yTicks: number[];
    tickFormat?: (v: number) => string;
  },
): void {
  const fmt = opts.tickFormat ?? ((v: number) => formatTick(v));
  const [x0, x1] = x.range;
  const [y0, y1] = y.range;
  svg.line(x0, y0, x1, y0, "stroke:#333;stroke-width:1");
  svg.line(x0, y0, x0, y1, "stroke:#333;stroke-width:1");
  for (const t of opts.xTicks) {
    const px = x(t);
    svg.line(px, y0, px, y0 + 5, "stroke:#333;stroke-width:1");
    svg.line(px, y0, px, y1, "stroke:#eee;stroke-width:0.5");
    svg.text(px, y0 + 18, fmt(t), "font-size:11px", "middle");
  }
  for (const t of opts.yTicks) {
    const py = y(t);
    svg.line(x0 - 5, py, x0, py, "stroke:#333;stroke-width:1");
    svg.line(x0, py, x1, py, "stroke:#eee;stroke-width:0.5");
    svg.text(x0 - 8, py + 4, fmt(t), "font-size:11px", "end");
  }
  svg.text((x0 + x1) / 2, HEIGHT - 12, opts.xLabel, "font-size:13px", "middle");
  svg.text(16, MARGIN.top - 16, opts.yLabel, "font-size:13px");
  svg.text((x0 + x1) / 2, 22, opts.title, "font-size:15px", "middle");
}

export function formatTick(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e4 || Math.abs(v) < 1e-3)) {
    return v.toExponential(0);
  }
  return Number(v.toPrecision(6)).toString();
}
