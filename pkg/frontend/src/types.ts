/** JSON payloads of the analysis service, field for field. */

export interface UploadDoc {
  id: string;
  rows_in: number;
  rows_kept: number;
  rows_rejected: number;
  reason_counts: Record<string, number>;
}

export interface IntegerSummaryDoc {
  min: number;
  max: number;
  mean: number;
  median: number;
  q25: number;
  q75: number;
}

export interface CategoricalSummaryDoc {
  counts: Record<string, number>;
  affiliate_totals: Record<string, number> | null;
}

export interface SummaryDoc {
  row_count: number;
  integer_columns: Record<string, IntegerSummaryDoc | null>;
  categorical_columns: Record<string, CategoricalSummaryDoc>;
}

export interface DistributionEntry {
  level: string;
  record_count: number;
  affiliate_total: number;
}

export interface DistributionDoc {
  variable: string;
  entries: DistributionEntry[];
}

export interface RowsDoc {
  columns: string[];
  rows: (string | number)[][];
  offset: number;
  limit: number;
  total: number;
}

export interface FilterDoc {
  id: string;
  parent_id: string;
  row_count: number;
}

export interface FitTermDoc {
  label: string;
  column: string;
  level: string | null;
  estimate: number | null;
  std_error: number | null;
  t: number | null;
  p: number | null;
  p_display: string | null;
  aliased: boolean;
}

export interface FitModelDoc {
  n: number;
  rank: number;
  df_residual: number;
  df_model: number;
  rss: number;
  tss: number;
  sigma2: number;
  r_squared: number;
  adj_r_squared: number;
  f_statistic: number | null;
  f_pvalue: number | null;
  f_pvalue_display: string | null;
  intercept: boolean;
}

export interface FitDoc {
  terms: FitTermDoc[];
  model: FitModelDoc;
  reference_levels: Record<string, string>;
  fitted?: number[];
  residuals?: number[];
}

export interface DensityDoc {
  grid: number[];
  density: number[];
  bandwidth: number;
  weighted: boolean;
}

export interface RegionDoc {
  region: string;
  total_affiliates: number;
  record_count: number;
  lat: number | null;
  lon: number | null;
}

export interface RegionsDoc {
  regions: RegionDoc[];
  warnings: string[];
}

export interface ScatterDoc {
  x: string;
  y: string;
  z: string;
  points: [number, number, number][];
  plane: Record<string, number | null>;
  axis_levels: Record<string, string[]>;
}

export interface CorrelationDoc {
  labels: string[];
  matrix: (number | null)[][];
  undefined_pairs: [string, string][];
}

export interface ApiErrorDoc {
  code: string;
  message: string;
  detail: unknown;
}

export const CATEGORICAL_COLUMNS = [
  "REGION",
  "NATIONAL_FOREIGN",
  "INEI_SCOPE",
  "INSURANCE_PLAN",
] as const;

export const INTEGER_COLUMNS = ["AGE", "TOTAL_AFFILIATES"] as const;

export const DEFAULT_PREDICTORS = [
  "INSURANCE_PLAN",
  "REGION",
  "AGE",
  "NATIONAL_FOREIGN",
  "INEI_SCOPE",
] as const;
