export { FigureSchemaError, UsageError } from "./errors.js";
export { loadStudyTables, readStudyCsv } from "./csv.js";
export {
  allocationFigure, avarFigure, labelOrder, mFigure, perRunFigure,
} from "./figures.js";
export { strategyColor } from "./palette.js";
export { renderAll } from "./render.js";
export { FigureJob, STUDY_FILES, StudyTables, Table } from "./schema.js";
