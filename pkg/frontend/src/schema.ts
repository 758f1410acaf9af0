/** Strict parsing of the separability-sweep CSV table. */

export const FIG2_HEADER = "n,trials,M,N,mean_freq,min_freq,max_freq,bound_eq12,seed";

export interface Fig2Row {
  n: number;
  trials: number;
  m: number;
  nProbe: number;
  meanFreq: number;
  minFreq: number;
  maxFreq: number;
  boundEq12: number;
  seed: number;
}

export class SchemaError extends Error {
  /** 1-based line number of the offending row (1 = header). */
  readonly line: number;

  constructor(line: number, message: string) {
    super(`line ${line}: ${message}`);
    this.line = line;
  }
}

function parseCount(field: string, name: string, line: number): number {
  if (!/^\d+$/.test(field)) {
    throw new SchemaError(line, `${name} must be a non-negative integer, got "${field}"`);
  }
  return Number(field);
}

function parseUnit(field: string, name: string, line: number): number {
  const v = Number(field);
  if (field.trim() === "" || !Number.isFinite(v) || v < 0 || v > 1) {
    throw new SchemaError(line, `${name} must be a number in [0, 1], got "${field}"`);
  }
  return v;
}

/** Parse the CSV text, rejecting anything off-schema with its row number. */
export function parseFig2Csv(text: string): Fig2Row[] {
  const lines = text.split(/\r?\n/);
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new SchemaError(1, "empty file");
  }
  if (lines[0] !== FIG2_HEADER) {
    throw new SchemaError(1, `header must be exactly "${FIG2_HEADER}"`);
  }
  const rows: Fig2Row[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = i + 1;
    const fields = lines[i].split(",");
    if (fields.length !== 9) {
      throw new SchemaError(line, `expected 9 fields, got ${fields.length}`);
    }
    const row: Fig2Row = {
      n: parseCount(fields[0], "n", line),
      trials: parseCount(fields[1], "trials", line),
      m: parseCount(fields[2], "M", line),
      nProbe: parseCount(fields[3], "N", line),
      meanFreq: parseUnit(fields[4], "mean_freq", line),
      minFreq: parseUnit(fields[5], "min_freq", line),
      maxFreq: parseUnit(fields[6], "max_freq", line),
      boundEq12: parseUnit(fields[7], "bound_eq12", line),
      seed: parseCount(fields[8], "seed", line),
    };
    if (row.n < 1) {
      throw new SchemaError(line, "n must be >= 1");
    }
    if (!(row.minFreq <= row.meanFreq && row.meanFreq <= row.maxFreq)) {
      throw new SchemaError(
        line,
        `needs min_freq <= mean_freq <= max_freq, got ${row.minFreq}, ${row.meanFreq}, ${row.maxFreq}`,
      );
    }
    rows.push(row);
  }
  return rows;
}
