import * as fs from "fs";

// Frozen schemas written by the simulation harness. The first line of every
// CSV is "# schema=<name>"; the reader refuses anything it does not know.
export const SCHEMAS = {
  metrics: "semvec.metrics.v1",
  rewardCurve: "semvec.reward_curve.v1",
  episodes: "semvec.episodes.v1",
  sweepLine: "semvec.sweep_line.v1",
} as const;

export type SchemaName = (typeof SCHEMAS)[keyof typeof SCHEMAS];

export interface Table {
  path: string;
  schema: string;
  header: string[];
  rows: string[][];
}

const KNOWN_SCHEMAS: string[] = Object.values(SCHEMAS);

export function readTable(path: string): Table {
  const text = fs.readFileSync(path, "utf8");
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty file`);
  }
  if (!lines[0].startsWith("# schema=")) {
    throw new Error(`${path}: missing "# schema=" comment line`);
  }
  const schema = lines[0].slice("# schema=".length).trim();
  if (!KNOWN_SCHEMAS.includes(schema)) {
    throw new Error(
      `${path}: unknown schema "${schema}" (known: ${KNOWN_SCHEMAS.join(", ")})`
    );
  }
  if (lines.length < 2) {
    throw new Error(`${path}: missing header row`);
  }
  const header = lines[1].split(",");
  const rows = lines.slice(2).map((line) => line.split(","));
  rows.forEach((row, i) => {
    if (row.length !== header.length) {
      throw new Error(
        `${path}: row ${i + 3} has ${row.length} cells, header has ${header.length}`
      );
    }
  });
  console.log(`read ${rows.length} rows from ${path} (${schema})`);
  return { path, schema, header, rows };
}

export function requireSchema(table: Table, schema: SchemaName): void {
  if (table.schema !== schema) {
    throw new Error(
      `${table.path}: expected schema ${schema}, got ${table.schema}`
    );
  }
}

export function requireRows(table: Table): void {
  // A figure is never rendered from zero rows.
  if (table.rows.length === 0) {
    throw new Error(`${table.path}: no data rows`);
  }
}

export function columnIndex(table: Table, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`${table.path}: missing column "${name}"`);
  }
  return idx;
}

export function column(table: Table, name: string): string[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row) => row[idx]);
}

export function numericColumn(table: Table, name: string): number[] {
  const idx = columnIndex(table, name);
  return table.rows.map((row, r) => {
    const value = Number(row[idx]);
    if (!Number.isFinite(value)) {
      throw new Error(
        `${table.path}: column "${name}" row ${r + 3}: not a number: "${row[idx]}"`
      );
    }
    return value;
  });
}

// Several --in files of one schema are treated as one table; headers must
// agree cell for cell so column indices stay meaningful.
export function concatTables(tables: Table[]): Table {
  if (tables.length === 0) {
    throw new Error("no input tables");
  }
  const first = tables[0];
  for (const t of tables.slice(1)) {
    if (t.schema !== first.schema) {
      throw new Error(
        `${t.path}: schema ${t.schema} does not match ${first.path} (${first.schema})`
      );
    }
    if (t.header.join(",") !== first.header.join(",")) {
      throw new Error(`${t.path}: header differs from ${first.path}`);
    }
  }
  return {
    path: tables.map((t) => t.path).join("+"),
    schema: first.schema,
    header: first.header.slice(),
    rows: tables.flatMap((t) => t.rows),
  };
}
