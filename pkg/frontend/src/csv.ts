import { readFileSync } from "node:fs";
import Papa from "papaparse";
import { z } from "zod";

import {
  CDF_COLUMNS,
  CdfRow,
  RESULT_COLUMNS,
  ResultRow,
  SchemaError,
  cdfRowSchema,
  resultRowSchema,
} from "./schema.js";

function parseCsv<T>(
  path: string,
  required: readonly string[],
  rowSchema: z.ZodType<T, z.ZodTypeDef, unknown>,
): T[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`${path}: cannot read file (${(err as Error).message})`);
  }
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0]!;
    const where = e.row === undefined ? "" : ` at data row ${e.row + 1}`;
    throw new SchemaError(`${path}: malformed CSV${where}: ${e.message}`);
  }
  const header = parsed.meta.fields ?? [];
  const missing = required.filter((c) => !header.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`${path}: missing required column(s): ${missing.join(", ")}`);
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return parsed.data.map((raw, i) => {
    const res = rowSchema.safeParse(raw);
    if (!res.success) {
      const issue = res.error.issues[0]!;
      const column = issue.path.join(".") || "row";
      throw new SchemaError(`${path}: data row ${i + 1}, column ${column}: ${issue.message}`);
    }
    return res.data;
  });
}

/** Read and validate a `results.csv` produced by the simulation harness. */
export function readResults(path: string): ResultRow[] {
  return parseCsv(path, RESULT_COLUMNS, resultRowSchema);
}

/** Read and validate a `cdf.csv` produced by the simulation harness. */
export function readCdf(path: string): CdfRow[] {
  return parseCsv(path, CDF_COLUMNS, cdfRowSchema);
}
