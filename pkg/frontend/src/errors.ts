/** Raised when an input CSV is missing, mis-headed, or empty. */
export class FigureSchemaError extends Error {
  readonly file: string;
  readonly expectedHeader: string[];

  constructor(file: string, expectedHeader: string[], detail: string) {
    super(
      `${file}: ${detail} (expected header: ${expectedHeader.join(",")})`,
    );
    this.name = "FigureSchemaError";
    this.file = file;
    this.expectedHeader = expectedHeader;
  }
}

/** Raised for bad command-line usage. */
export class UsageError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "UsageError";
  }
}
