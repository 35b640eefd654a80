/** File names and exact column headers of the five study CSVs. */
export const STUDY_FILES = {
  avarTrajectory: {
    name: "avar_trajectory.csv",
    header: ["strategy", "run", "mean_avar", "se"],
  },
  mMeasure: {
    name: "m_measure.csv",
    header: ["strategy", "run", "M"],
  },
  allocation: {
    name: "allocation.csv",
    header: ["strategy", "q", "fraction"],
  },
  perRunAllocation: {
    name: "per_run_allocation.csv",
    header: ["strategy", "run", "q", "fraction"],
  },
  trials: {
    name: "trials.csv",
    header: [
      "strategy", "trial", "run", "criterion", "q", "t", "delta",
      "A_hat", "B_hat", "nu_hat", "avar", "flags",
    ],
  },
} as const;

export type StudyFileKey = keyof typeof STUDY_FILES;

/** One parsed CSV: rows of raw string cells keyed by column name. */
export type Table = Record<string, string>[];

/** Everything renderAll needs to run. */
export interface FigureJob {
  /** Directory holding the five study CSVs. */
  inDir: string;
  /** Directory the four images are written into (created if absent). */
  outDir: string;
  /** Output image format. */
  format: "png" | "svg";
  /** Strategy label order for panels, legends, and colors. */
  labelOrder?: string[];
}

export interface StudyTables {
  avarTrajectory: Table;
  mMeasure: Table;
  allocation: Table;
  perRunAllocation: Table;
  trials: Table;
}
