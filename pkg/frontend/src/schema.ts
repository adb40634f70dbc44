/**
 * Sweep CSV schema: parsing and validation.
 *
 * The expected layout is the simulation harness output, one row per
 * (detector, M, SNR) grid point.
 */

import Papa from "papaparse";

export const REQUIRED_COLUMNS = [
  "detector",
  "N",
  "K",
  "M",
  "L",
  "snr_db",
  "trials",
  "errors",
  "pe",
  "ci_lo",
  "ci_hi",
  "mu_mean",
  "seed",
] as const;

export interface SweepRow {
  detector: string;
  n: number;
  k: number;
  m: number;
  l: number;
  snrDb: number;
  trials: number;
  errors: number;
  pe: number;
  ciLo: number;
  ciHi: number;
  muMean: number;
  seed: number;
}

/** Raised when the CSV does not match the harness schema; names the column. */
export class SchemaMismatch extends Error {
  readonly column: string;

  constructor(column: string, detail: string) {
    super(`schema mismatch in column '${column}': ${detail}`);
    this.name = "SchemaMismatch";
    this.column = column;
  }
}

function toNumber(raw: string, column: string, line: number): number {
  const value = Number(raw);
  if (raw.trim() === "" || Number.isNaN(value)) {
    throw new SchemaMismatch(column, `cannot parse '${raw}' on data row ${line}`);
  }
  return value;
}

/** Parse sweep CSV text, enforcing the exact column set and order. */
export function parseSweepCsv(text: string): SweepRow[] {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const err = parsed.errors[0];
    throw new SchemaMismatch("detector", `unreadable CSV: ${err.message}`);
  }
  const rows = parsed.data;
  const header = rows.length > 0 ? rows[0] : [];
  for (let i = 0; i < REQUIRED_COLUMNS.length; i += 1) {
    if (header[i] !== REQUIRED_COLUMNS[i]) {
      throw new SchemaMismatch(
        REQUIRED_COLUMNS[i],
        header[i] === undefined
          ? "column missing from header"
          : `found '${header[i]}' at position ${i}`
      );
    }
  }
  if (header.length > REQUIRED_COLUMNS.length) {
    throw new SchemaMismatch(header[REQUIRED_COLUMNS.length], "unexpected extra column");
  }
  return rows.slice(1).map((cells, index) => {
    const line = index + 1;
    if (cells.length !== REQUIRED_COLUMNS.length) {
      throw new SchemaMismatch(
        REQUIRED_COLUMNS[Math.min(cells.length, REQUIRED_COLUMNS.length - 1)],
        `data row ${line} has ${cells.length} fields`
      );
    }
    return {
      detector: cells[0],
      n: toNumber(cells[1], "N", line),
      k: toNumber(cells[2], "K", line),
      m: toNumber(cells[3], "M", line),
      l: toNumber(cells[4], "L", line),
      snrDb: toNumber(cells[5], "snr_db", line),
      trials: toNumber(cells[6], "trials", line),
      errors: toNumber(cells[7], "errors", line),
      pe: toNumber(cells[8], "pe", line),
      ciLo: toNumber(cells[9], "ci_lo", line),
      ciHi: toNumber(cells[10], "ci_hi", line),
      muMean: toNumber(cells[11], "mu_mean", line),
      seed: toNumber(cells[12], "seed", line),
    };
  });
}
