/**
 * The four figure kinds.  Every kind consumes CSV artifacts only (no
 * physics is recomputed here) and returns the SVG text.
 */

import { column, pick, readTable, textColumn, whereEqual } from "./csv.js";
import {
  decadeTicks,
  extent,
  leastSquares,
  linearScale,
  linearTicks,
  logScale,
} from "./scale.js";
import { drawFrame, HEIGHT, MARGIN, PALETTE, Svg, WIDTH } from "./svg.js";

const PLOT_X: [number, number] = [MARGIN.left, WIDTH - MARGIN.right];
const PLOT_Y: [number, number] = [HEIGHT - MARGIN.bottom, MARGIN.top];

const CURVE_STYLES: Record<string, string> = {
  BL: `stroke:${PALETTE[0]};stroke-width:2`,
  R2: `stroke:${PALETTE[1]};stroke-width:2`,
  S2: `stroke:${PALETTE[2]};stroke-width:1.5;stroke-dasharray:6 4`,
  sonic: "stroke:#666;stroke-width:1;stroke-dasharray:2 3",
};

const MARKER_LABELS: Record<string, string> = {
  far_field: "(v+, u+)",
  transonic: "(v*, u*)",
  boundary: "u_b",
};

export interface PhasePlaneSpec {
  curves: string;
  markers: string;
}

export function phasePlane(spec: PhasePlaneSpec): string {
  const curves = readTable(spec.curves);
  const markers = readTable(spec.markers);
  const v = column(curves, "v");
  const u = column(curves, "u");
  const mv = column(markers, "v");
  const mu = column(markers, "u");
  const names = textColumn(markers, "name");

  // frame the view around the markers, not the (much longer) curves
  const vSpan = extent(mv, 0.6);
  const uSpan = extent(mu, 0.6);
  const x = linearScale([Math.max(0, vSpan[0]), vSpan[1]], PLOT_X);
  const y = linearScale(uSpan, PLOT_Y);

  const svg = new Svg();
  drawFrame(svg, x, y, {
    title: "phase plane: wall line, fan curve, shock curve, sonic boundary",
    xLabel: "specific volume v",
    yLabel: "velocity u",
    xTicks: linearTicks(x.domain),
    yTicks: linearTicks(y.domain),
  });
  if (y.domain[0] < 0 && y.domain[1] > 0) {
    svg.line(PLOT_X[0], y(0), PLOT_X[1], y(0), "stroke:#bbb;stroke-width:1");
  }

  for (const tag of Object.keys(CURVE_STYLES)) {
    const idx = whereEqual(curves, "curve", tag);
    if (idx.length === 0) continue;
    const pts = idx
      .map((i): [number, number] => [v[i], u[i]])
      .filter(([vv, uu]) => vv >= x.domain[0] && vv <= x.domain[1]
        && uu >= y.domain[0] && uu <= y.domain[1])
      .map(([vv, uu]): [number, number] => [x(vv), y(uu)]);
    if (pts.length > 1) svg.polyline(pts, CURVE_STYLES[tag]);
  }

  names.forEach((name, i) => {
    svg.circle(x(mv[i]), y(mu[i]), 5, "fill:#000");
    svg.text(x(mv[i]) + 8, y(mu[i]) - 6, MARKER_LABELS[name] ?? name);
  });
  return svg.render();
}

export interface DecayLoglogSpec {
  csv: string;
  xColumn: string;
  yColumn: string;
  title?: string;
}

export function decayLoglog(spec: DecayLoglogSpec): string {
  const table = readTable(spec.csv);
  const tAll = column(table, spec.xColumn);
  const vAll = column(table, spec.yColumn);
  const keep = tAll.map((t, i) => i).filter((i) => tAll[i] > 0 && vAll[i] > 0);
  if (keep.length < 2) throw new Error("need at least two positive samples");
  const t = pick(tAll, keep);
  const v = pick(vAll, keep);

  const x = logScale(extentLog(t), PLOT_X);
  const y = logScale(extentLog(v), PLOT_Y);
  const fit = leastSquares(t.map(Math.log10), v.map(Math.log10));

  const svg = new Svg();
  drawFrame(svg, x, y, {
    title: spec.title ?? `${spec.yColumn} against ${spec.xColumn}`,
    xLabel: spec.xColumn,
    yLabel: spec.yColumn,
    xTicks: decadeTicks(x.domain),
    yTicks: decadeTicks(y.domain),
  });
  svg.polyline(t.map((ti, i): [number, number] => [x(ti), y(v[i])]),
    `stroke:${PALETTE[0]};stroke-width:1`);
  t.forEach((ti, i) => svg.circle(x(ti), y(v[i]), 2.5, `fill:${PALETTE[0]}`));

  const fitted = (ti: number): number => 10 ** (fit.intercept + fit.slope * Math.log10(ti));
  svg.polyline(
    [[x(t[0]), y(fitted(t[0]))], [x(t[t.length - 1]), y(fitted(t[t.length - 1]))]],
    `stroke:${PALETTE[1]};stroke-width:1.5;stroke-dasharray:7 4`,
  );
  svg.text(PLOT_X[1] - 10, PLOT_Y[1] + 18, `fit slope = ${fit.slope.toFixed(2)}`,
    `font-size:13px;fill:${PALETTE[1]}`, "end");
  return svg.render();
}

function extentLog(values: number[]): [number, number] {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  return [lo / 1.3, hi * 1.3];
}

export interface ProfileEvolutionSpec {
  snapshots: string[];
  field: string;
}

export function profileEvolution(spec: ProfileEvolutionSpec): string {
  if (spec.snapshots.length === 0) throw new Error("need at least one snapshot CSV");
  const tables = spec.snapshots.map((path) => ({ path, table: readTable(path) }));
  const overlayColumn = spec.field.startsWith("rho") ? "rho_hat" : "u_hat";

  const allValues: number[] = [];
  for (const { table } of tables) {
    allValues.push(...column(table, spec.field), ...column(table, overlayColumn));
  }
  const xs = column(tables[0].table, "x");
  const x = linearScale([xs[0], xs[xs.length - 1]], PLOT_X);
  const y = linearScale(extent(allValues), PLOT_Y);

  const svg = new Svg();
  drawFrame(svg, x, y, {
    title: `${spec.field} against the background wave`,
    xLabel: "x",
    yLabel: spec.field,
    xTicks: linearTicks(x.domain),
    yTicks: linearTicks(y.domain),
  });
  tables.forEach(({ path, table }, k) => {
    const xi = column(table, "x");
    const color = PALETTE[k % PALETTE.length];
    svg.polyline(
      column(table, overlayColumn).map((vv, i): [number, number] => [x(xi[i]), y(vv)]),
      `stroke:${color};stroke-width:1;stroke-dasharray:5 4;opacity:0.6`,
    );
    svg.polyline(
      column(table, spec.field).map((vv, i): [number, number] => [x(xi[i]), y(vv)]),
      `stroke:${color};stroke-width:1.6`,
    );
    const name = path.split("/").pop() ?? path;
    svg.text(PLOT_X[0] + 10, PLOT_Y[1] + 16 + 14 * k, name,
      `font-size:11px;fill:${color}`);
  });
  return svg.render();
}

export interface EnergyBudgetSpec {
  csv: string;
}

const BUDGET_COLUMNS = ["energy_total", "diss_psi", "diss_weighted"];

export function energyBudget(spec: EnergyBudgetSpec): string {
  const table = readTable(spec.csv);
  const tAll = column(table, "t");
  const series = BUDGET_COLUMNS.map((name) => column(table, name));

  const positive: number[] = [];
  for (const s of series) positive.push(...s.filter((v) => v > 0));
  if (positive.length === 0) throw new Error("energy columns are identically zero");
  const x = linearScale([tAll[0], tAll[tAll.length - 1]], PLOT_X);
  const y = logScale(extentLog(positive), PLOT_Y);

  const svg = new Svg();
  drawFrame(svg, x, y, {
    title: "energy and dissipation functionals",
    xLabel: "t",
    yLabel: "functional value",
    xTicks: linearTicks(x.domain),
    yTicks: decadeTicks(y.domain),
  });
  series.forEach((s, k) => {
    const pts: Array<[number, number]> = [];
    s.forEach((vv, i) => {
      if (vv > 0) pts.push([x(tAll[i]), y(vv)]);
    });
    if (pts.length > 1) {
      svg.polyline(pts, `stroke:${PALETTE[k]};stroke-width:1.6`);
    }
    svg.text(PLOT_X[0] + 10, PLOT_Y[1] + 16 + 14 * k, BUDGET_COLUMNS[k],
      `font-size:11px;fill:${PALETTE[k]}`);
  });
  return svg.render();
}
