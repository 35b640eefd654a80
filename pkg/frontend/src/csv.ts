import { readFileSync, existsSync } from "node:fs";
import { join } from "node:path";
import Papa from "papaparse";

import { FigureSchemaError } from "./errors.js";
import { STUDY_FILES, StudyTables, Table } from "./schema.js";

/**
 * Read one CSV and check its header exactly.
 *
 * Cells are kept as raw strings so values written back out (for example the
 * heat-map cell annotations) are byte-identical to the source file.
 */
export function readStudyCsv(
  dir: string,
  name: string,
  header: readonly string[],
): Table {
  const path = join(dir, name);
  const expected = [...header];
  if (!existsSync(path)) {
    throw new FigureSchemaError(name, expected, "file not found");
  }
  const text = readFileSync(path, "utf8");
  const parsed = Papa.parse<string[]>(text.trim(), {
    delimiter: ",",
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new FigureSchemaError(name, expected, `parse error: ${first.message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new FigureSchemaError(name, expected, "file is empty");
  }
  const got = rows[0]!;
  if (got.length !== expected.length || got.some((c, i) => c !== expected[i])) {
    throw new FigureSchemaError(
      name,
      expected,
      `unexpected header: ${got.join(",")}`,
    );
  }
  if (rows.length === 1) {
    throw new FigureSchemaError(name, expected, "no data rows");
  }
  const out: Table = [];
  for (let r = 1; r < rows.length; r++) {
    const cells = rows[r]!;
    if (cells.length !== expected.length) {
      throw new FigureSchemaError(
        name,
        expected,
        `row ${r + 1} has ${cells.length} fields, expected ${expected.length}`,
      );
    }
    const rec: Record<string, string> = {};
    expected.forEach((col, i) => {
      rec[col] = cells[i]!;
    });
    out.push(rec);
  }
  return out;
}

/** Load and validate all five study CSVs from a directory. */
export function loadStudyTables(dir: string): StudyTables {
  return {
    avarTrajectory: readStudyCsv(
      dir, STUDY_FILES.avarTrajectory.name, STUDY_FILES.avarTrajectory.header),
    mMeasure: readStudyCsv(
      dir, STUDY_FILES.mMeasure.name, STUDY_FILES.mMeasure.header),
    allocation: readStudyCsv(
      dir, STUDY_FILES.allocation.name, STUDY_FILES.allocation.header),
    perRunAllocation: readStudyCsv(
      dir, STUDY_FILES.perRunAllocation.name, STUDY_FILES.perRunAllocation.header),
    trials: readStudyCsv(
      dir, STUDY_FILES.trials.name, STUDY_FILES.trials.header),
  };
}

/** Distinct values of one column in first-appearance order. */
export function distinct(table: Table, column: string): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const row of table) {
    const v = row[column]!;
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}
