import { existsSync, mkdtempSync, readFileSync, readdirSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterEach, describe, expect, it } from "vitest";

import { loadStudyTables } from "../src/csv.js";
import {
  allocationFigure, avarFigure, labelOrder, mFigure, perRunFigure,
} from "../src/figures.js";
import { strategyColor } from "../src/palette.js";
import { renderAll } from "../src/render.js";

const SMALL = fileURLToPath(
  new URL("./fixtures/study_small", import.meta.url),
);
const DEFAULT_STUDY = fileURLToPath(
  new URL("./fixtures/default_study", import.meta.url),
);

const cleanups: string[] = [];

function scratchDir(): string {
  const dir = mkdtempSync(join(tmpdir(), "figout-"));
  cleanups.push(dir);
  return dir;
}

afterEach(() => {
  while (cleanups.length > 0) {
    rmSync(cleanups.pop()!, { recursive: true, force: true });
  }
});

/** Deterministic small PRNG so "randomly chosen" cells are reproducible. */
function lcg(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (Math.imul(s, 1664525) + 1013904223) >>> 0;
    return s / 2 ** 32;
  };
}

interface HeatCell {
  strategy: string;
  run: string;
  q: string;
  value: string;
}

function heatCells(svg: string): HeatCell[] {
  const out: HeatCell[] = [];
  const re =
    /<rect [^>]*data-strategy="([^"]*)" data-run="([^"]*)" data-q="([^"]*)" data-value="([^"]*)"/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(svg)) !== null) {
    out.push({ strategy: m[1]!, run: m[2]!, q: m[3]!, value: m[4]! });
  }
  return out;
}

describe("figure pipeline on the shipped default study (S1)", () => {
  it("renderAll yields 4 images and heat cells match the CSV exactly", async () => {
    expect(
      existsSync(DEFAULT_STUDY),
      "default_study fixture missing; regenerate with the simulate command",
    ).toBe(true);
    const out = scratchDir();
    const written = await renderAll({
      inDir: DEFAULT_STUDY, outDir: out, format: "svg",
    });
    expect(written.length).toBe(4);
    expect(readdirSync(out).sort()).toEqual([
      "allocation.svg",
      "avar_trajectory.svg",
      "m_measure.svg",
      "per_run_allocation.svg",
    ]);

    const svg = readFileSync(join(out, "per_run_allocation.svg"), "utf8");
    const cells = heatCells(svg);
    const tables = loadStudyTables(DEFAULT_STUDY);
    expect(cells.length).toBe(tables.perRunAllocation.length);

    const byKey = new Map<string, string>();
    for (const row of tables.perRunAllocation) {
      byKey.set(`${row.strategy}|${row.run}|${row.q}`, row.fraction!);
    }
    const rand = lcg(20260825);
    for (let pick = 0; pick < 3; pick++) {
      const cell = cells[Math.floor(rand() * cells.length)]!;
      const expected = byKey.get(`${cell.strategy}|${cell.run}|${cell.q}`);
      expect(expected, `CSV row for ${cell.strategy} run ${cell.run} q ${cell.q}`)
        .toBeDefined();
      expect(cell.value).toBe(expected);
    }
  });
});

describe("figure construction", () => {
  const tables = loadStudyTables(SMALL);
  const labels = labelOrder(tables);

  it("derives the label order from the data", () => {
    expect(labels).toEqual(["a", "b", "c", "d", "e"]);
  });

  it("labels the axes", () => {
    expect(avarFigure(tables, labels)).toContain(">AVar<");
    expect(avarFigure(tables, labels)).toContain(">run<");
    expect(mFigure(tables, labels)).toContain(">M<");
    expect(allocationFigure(tables, labels)).toContain(">fraction of runs<");
    expect(allocationFigure(tables, labels)).toContain(">stress level q<");
    expect(perRunFigure(tables, labels)).toContain(">stress level q<");
    expect(perRunFigure(tables, labels)).toContain(">run<");
  });

  it("uses one stable color per strategy across all figures", () => {
    for (const lab of labels) {
      const color = strategyColor(lab);
      expect(avarFigure(tables, labels)).toContain(color);
      expect(mFigure(tables, labels)).toContain(color);
      expect(allocationFigure(tables, labels)).toContain(color);
      expect(perRunFigure(tables, labels)).toContain(color);
      // same label always maps to the same color
      expect(strategyColor(lab)).toBe(color);
    }
  });

  it("shades heat cells dark for large and light for small fractions", () => {
    const svg = perRunFigure(tables, labels);
    // fraction 0 -> white, fraction 1 -> black
    const zero = /data-value="0\.0"/.exec(svg);
    expect(zero).not.toBeNull();
    expect(svg).toContain('fill="rgb(255,255,255)"');
    const cells = heatCells(svg);
    const big = cells.filter((c) => Number(c.value) >= 0.9);
    if (big.length > 0) {
      const m = new RegExp(
        `fill="rgb\\((\\d+),\\1,\\1\\)"[^>]*data-value="${big[0]!.value}"`,
      ).exec(svg);
      expect(m).not.toBeNull();
      expect(Number(m![1])).toBeLessThanOrEqual(26);
    }
  });

  it("rendering is idempotent", async () => {
    const out1 = scratchDir();
    const out2 = scratchDir();
    await renderAll({ inDir: SMALL, outDir: out1, format: "svg" });
    await renderAll({ inDir: SMALL, outDir: out2, format: "svg" });
    for (const name of readdirSync(out1)) {
      expect(readFileSync(join(out1, name), "utf8"))
        .toBe(readFileSync(join(out2, name), "utf8"));
    }
  });

  it("renders PNG files with a PNG signature", async () => {
    const out = scratchDir();
    const written = await renderAll({
      inDir: SMALL, outDir: out, format: "png",
    });
    expect(written.length).toBe(4);
    for (const path of written) {
      const buf = readFileSync(path);
      expect([...buf.subarray(0, 4)]).toEqual([0x89, 0x50, 0x4e, 0x47]);
    }
  });
});
