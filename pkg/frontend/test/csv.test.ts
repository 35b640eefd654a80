import { cpSync, mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterEach, describe, expect, it } from "vitest";

import { FigureSchemaError } from "../src/errors.js";
import { loadStudyTables, readStudyCsv } from "../src/csv.js";
import { STUDY_FILES } from "../src/schema.js";

const FIXTURE = fileURLToPath(
  new URL("./fixtures/study_small", import.meta.url),
);

const cleanups: string[] = [];

function scratchCopy(): string {
  const dir = mkdtempSync(join(tmpdir(), "figtest-"));
  cleanups.push(dir);
  cpSync(FIXTURE, dir, { recursive: true });
  return dir;
}

afterEach(() => {
  while (cleanups.length > 0) {
    rmSync(cleanups.pop()!, { recursive: true, force: true });
  }
});

describe("loadStudyTables", () => {
  it("reads all five CSVs with exact headers", () => {
    const tables = loadStudyTables(FIXTURE);
    expect(tables.avarTrajectory.length).toBeGreaterThan(0);
    expect(tables.mMeasure.length).toBeGreaterThan(0);
    expect(tables.allocation.length).toBeGreaterThan(0);
    expect(tables.perRunAllocation.length).toBeGreaterThan(0);
    expect(tables.trials.length).toBeGreaterThan(0);
    const row = tables.perRunAllocation[0]!;
    expect(Object.keys(row)).toEqual(["strategy", "run", "q", "fraction"]);
  });

  it("keeps cell values as verbatim strings", () => {
    const tables = loadStudyTables(FIXTURE);
    for (const row of tables.allocation) {
      expect(typeof row["fraction"]).toBe("string");
    }
  });
});

describe("readStudyCsv failures", () => {
  it("names the file and expected header when a CSV is missing", () => {
    const dir = scratchCopy();
    rmSync(join(dir, "m_measure.csv"));
    let err: unknown;
    try {
      loadStudyTables(dir);
    } catch (e) {
      err = e;
    }
    expect(err).toBeInstanceOf(FigureSchemaError);
    const schemaErr = err as FigureSchemaError;
    expect(schemaErr.file).toBe("m_measure.csv");
    expect(schemaErr.message).toContain("m_measure.csv");
    expect(schemaErr.message).toContain("strategy,run,M");
  });

  it("rejects a wrong header", () => {
    const dir = scratchCopy();
    writeFileSync(
      join(dir, "allocation.csv"),
      "strategy,level,fraction\na,0.35,1.0\n",
    );
    expect(() => loadStudyTables(dir)).toThrowError(FigureSchemaError);
  });

  it("rejects an empty allocation.csv", () => {
    const dir = scratchCopy();
    writeFileSync(join(dir, "allocation.csv"), "");
    let err: unknown;
    try {
      loadStudyTables(dir);
    } catch (e) {
      err = e;
    }
    expect(err).toBeInstanceOf(FigureSchemaError);
    expect((err as FigureSchemaError).message).toContain("allocation.csv");
  });

  it("rejects a header-only file (no data rows)", () => {
    const dir = scratchCopy();
    writeFileSync(join(dir, "allocation.csv"), "strategy,q,fraction\n");
    expect(() => loadStudyTables(dir)).toThrowError(/no data rows/);
  });

  it("rejects a ragged data row", () => {
    const dir = scratchCopy();
    writeFileSync(
      join(dir, "allocation.csv"),
      "strategy,q,fraction\na,0.35\n",
    );
    expect(() => loadStudyTables(dir)).toThrowError(/row 2/);
  });

  it("exposes the five file specs", () => {
    expect(Object.values(STUDY_FILES).map((f) => f.name).sort()).toEqual([
      "allocation.csv",
      "avar_trajectory.csv",
      "m_measure.csv",
      "per_run_allocation.csv",
      "trials.csv",
    ]);
  });

  it("readStudyCsv works standalone", () => {
    const table = readStudyCsv(
      FIXTURE, "m_measure.csv", ["strategy", "run", "M"]);
    expect(table.length).toBeGreaterThan(0);
    expect(table[0]!["strategy"]).toBe("a");
  });
});
