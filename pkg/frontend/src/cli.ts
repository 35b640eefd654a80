#!/usr/bin/env node
import { pathToFileURL } from "node:url";

import { FigureSchemaError, UsageError } from "./errors.js";
import { renderAll } from "./render.js";
import { FigureJob } from "./schema.js";

const USAGE =
  "usage: render_figures --in <dir> --out <dir> --format png|svg";

export function parseArgs(argv: string[]): FigureJob {
  let inDir: string | undefined;
  let outDir: string | undefined;
  let format: string | undefined;
  const labels: string[] = [];

  for (let i = 0; i < argv.length; i++) {
    const a = argv[i]!;
    const next = () => {
      i++;
      const v = argv[i];
      if (v === undefined) {
        throw new UsageError(`missing value for ${a}`);
      }
      return v;
    };
    switch (a) {
      case "--in":
        inDir = next();
        break;
      case "--out":
        outDir = next();
        break;
      case "--format":
        format = next();
        break;
      case "--labels":
        labels.push(...next().split(",").filter((s) => s.length > 0));
        break;
      case "--help":
      case "-h":
        console.log(USAGE);
        process.exit(0);
        break;
      default:
        throw new UsageError(`unknown argument: ${a}`);
    }
  }
  if (inDir === undefined || outDir === undefined) {
    throw new UsageError("--in and --out are required");
  }
  if (format === undefined) {
    format = "svg";
  }
  if (format !== "png" && format !== "svg") {
    throw new UsageError(`--format must be png or svg, got ${format}`);
  }
  const job: FigureJob = { inDir, outDir, format };
  if (labels.length > 0) {
    job.labelOrder = labels;
  }
  return job;
}

export async function main(argv: string[]): Promise<number> {
  let job: FigureJob;
  try {
    job = parseArgs(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`error: ${err.message}`);
      console.error(USAGE);
      return 2;
    }
    throw err;
  }
  try {
    const written = await renderAll(job);
    for (const path of written) {
      console.log(path);
    }
    return 0;
  } catch (err) {
    if (err instanceof FigureSchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    if (err instanceof Error && "code" in err) {
      console.error(`i/o error: ${err.message}`);
      return 4;
    }
    throw err;
  }
}

const entry = process.argv[1];
if (entry !== undefined && import.meta.url === pathToFileURL(entry).href) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
