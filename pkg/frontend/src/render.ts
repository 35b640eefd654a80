import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { loadStudyTables } from "./csv.js";
import {
  allocationFigure, avarFigure, labelOrder, mFigure, perRunFigure,
} from "./figures.js";
import { FigureJob } from "./schema.js";

const FIGURES: [string, (t: any, labels: string[]) => string][] = [
  ["avar_trajectory", avarFigure],
  ["m_measure", mFigure],
  ["allocation", allocationFigure],
  ["per_run_allocation", perRunFigure],
];

/**
 * Render the four study figures; returns the written file paths.
 *
 * Inputs are read-only; rendering the same directory twice produces
 * identical files.
 */
export async function renderAll(job: FigureJob): Promise<string[]> {
  const tables = loadStudyTables(job.inDir);
  const labels = labelOrder(tables, job.labelOrder);
  mkdirSync(job.outDir, { recursive: true });

  const written: string[] = [];
  for (const [stem, build] of FIGURES) {
    const svg = build(tables, labels);
    if (job.format === "svg") {
      const path = join(job.outDir, `${stem}.svg`);
      writeFileSync(path, svg, "utf8");
      written.push(path);
    } else {
      const { default: sharp } = await import("sharp");
      const png = await sharp(Buffer.from(svg), { density: 144 })
        .png()
        .toBuffer();
      const path = join(job.outDir, `${stem}.png`);
      writeFileSync(path, png);
      written.push(path);
    }
  }
  return written;
}
