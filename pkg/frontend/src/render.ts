/**
 * CLI: render figures from nsp-outflow CSV artifacts.
 *
 *   render --spec figure.json
 *   render phase-plane --curves prof/phase_curves.csv --markers prof/phase_markers.csv --out fig.svg
 *   render decay-loglog --csv timeseries.csv --x t --y sup_E --out fig.svg
 *   render profile-evolution --snapshots a.csv b.csv --field u_i --out fig.svg
 *   render energy-budget --csv timeseries.csv --out fig.svg
 *
 * A spec file is {"kind": ..., "output": ..., ...kind-specific keys}.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { decayLoglog, energyBudget, phasePlane, profileEvolution } from "./figures.js";

type Args = Map<string, string[]>;

function parseArgs(argv: string[]): { positional: string[]; flags: Args } {
  const flags: Args = new Map();
  const positional: string[] = [];
  let current: string | null = null;
  for (const token of argv) {
    if (token.startsWith("--")) {
      current = token.slice(2);
      if (!flags.has(current)) flags.set(current, []);
    } else if (current !== null) {
      flags.get(current)!.push(token);
    } else {
      positional.push(token);
    }
  }
  return { positional, flags };
}

function one(flags: Args, name: string): string {
  const values = flags.get(name);
  if (!values || values.length !== 1) {
    throw new Error(`flag --${name} expects exactly one value`);
  }
  return values[0];
}

function renderKind(kind: string, opts: Record<string, unknown>): string {
  switch (kind) {
    case "phase-plane":
      return phasePlane({
        curves: String(opts.curves),
        markers: String(opts.markers),
      });
    case "decay-loglog":
      return decayLoglog({
        csv: String(opts.csv),
        xColumn: String(opts.x ?? "t"),
        yColumn: String(opts.y),
        title: opts.title === undefined ? undefined : String(opts.title),
      });
    case "profile-evolution":
      return profileEvolution({
        snapshots: (opts.snapshots as string[]) ?? [],
        field: String(opts.field ?? "u_i"),
      });
    case "energy-budget":
      return energyBudget({ csv: String(opts.csv) });
    default:
      throw new Error(
        `unknown figure kind '${kind}' (phase-plane, decay-loglog, profile-evolution, energy-budget)`,
      );
  }
}

export function main(argv: string[]): number {
  const { positional, flags } = parseArgs(argv);
  try {
    let kind: string;
    let opts: Record<string, unknown>;
    let output: string;
    if (flags.has("spec")) {
      const spec = JSON.parse(readFileSync(one(flags, "spec"), "utf8"));
      kind = String(spec.kind);
      output = String(spec.output);
      opts = spec;
    } else {
      if (positional.length !== 1) {
        process.stderr.write(
          "usage: render --spec FILE | render KIND --out FILE [kind flags]\n",
        );
        return 2;
      }
      kind = positional[0];
      output = one(flags, "out");
      opts = {
        curves: flags.has("curves") ? one(flags, "curves") : undefined,
        markers: flags.has("markers") ? one(flags, "markers") : undefined,
        csv: flags.has("csv") ? one(flags, "csv") : undefined,
        x: flags.has("x") ? one(flags, "x") : undefined,
        y: flags.has("y") ? one(flags, "y") : undefined,
        title: flags.has("title") ? one(flags, "title") : undefined,
        snapshots: flags.get("snapshots"),
        field: flags.has("field") ? one(flags, "field") : undefined,
      };
    }
    const svg = renderKind(kind, opts);
    mkdirSync(dirname(output), { recursive: true });
    writeFileSync(output, svg);
    process.stdout.write(`${output}\n`);
    return 0;
  } catch (err) {
    process.stderr.write(`render failed: ${(err as Error).message}\n`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("render.js")) {
  process.exit(main(process.argv.slice(2)));
}
