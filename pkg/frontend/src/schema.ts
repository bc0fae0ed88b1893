import { z } from "zod";

/** Raised on any input problem: missing columns, bad cells, empty files,
 * or requested schemes that the CSV does not contain. */
export class SchemaError extends Error {}

/** CSV cells arrive as strings; `Number("")` is 0, so coerce by hand. */
const num = z.string().transform((s, ctx) => {
  const v = Number(s);
  if (s.trim() === "" || Number.isNaN(v)) {
    ctx.addIssue({ code: z.ZodIssueCode.custom, message: `not a number: "${s}"` });
    return z.NEVER;
  }
  return v;
});

export const RESULT_COLUMNS = [
  "scheme",
  "sweep_var",
  "sweep_value",
  "metric",
  "mean",
  "stderr",
  "trials",
  "seed",
] as const;

export const resultRowSchema = z.object({
  scheme: z.string().min(1),
  sweep_var: z.enum(["snr_db", "num_users"]),
  sweep_value: num,
  metric: z.string().min(1),
  mean: num,
  stderr: num.pipe(z.number().nonnegative()),
  trials: num.pipe(z.number().int().positive()),
  seed: num.pipe(z.number().int()),
});

export type ResultRow = z.infer<typeof resultRowSchema>;

export const CDF_COLUMNS = ["scheme", "snr_db", "t_e", "cdf"] as const;

export const cdfRowSchema = z.object({
  scheme: z.string().min(1),
  snr_db: num,
  t_e: num,
  cdf: num.pipe(z.number().min(0).max(1)),
});

export type CdfRow = z.infer<typeof cdfRowSchema>;
