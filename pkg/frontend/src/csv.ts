import { readFileSync } from "node:fs";

export interface Table {
  columns: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) throw new Error("empty CSV");
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  return { columns, rows };
}

export function readTable(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"));
}

/** Numeric column by header name; missing headers are schema errors. */
export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column '${name}' (have: ${table.columns.join(", ")})`);
  }
  return table.rows.map((row) => Number(row[idx]));
}

/** String column (for tag columns like curve or marker names). */
export function textColumn(table: Table, name: string): string[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column '${name}' (have: ${table.columns.join(", ")})`);
  }
  return table.rows.map((row) => row[idx]);
}

/** Row indices where a tag column takes the given value. */
export function whereEqual(table: Table, name: string, value: string): number[] {
  const tags = textColumn(table, name);
  const out: number[] = [];
  tags.forEach((tag, i) => {
    if (tag === value) out.push(i);
  });
  return out;
}

export function pick(values: number[], indices: number[]): number[] {
  return indices.map((i) => values[i]);
}
