import type { CorrelationDoc, DensityDoc, FitDoc, RegionsDoc, ScatterDoc } from "../src/types.js";

/** Same 30-row fixture the backend test suite uses (Spanish headers). */
export const FIXTURE_CSV = `REGION,EDAD,NACIONAL EXTRANJERO,AMBITO INEI,PLAN DE SEGURO,TOTAL AFILIADOS
AREQUIPA,47,PERUANO,URBANO,SIS FREE,6
CUSCO,27,EXTRANJERO,URBANO,SIS FOR ALL,14
LIMA,36,PERUANO,RURAL,INDEPENDENT SIS,7
PUNO,55,EXTRANJERO,RURAL,SIS NRUS,27
TACNA,33,PERUANO,URBANO,SIS MICROENTERPRISES,42
AREQUIPA,21,EXTRANJERO,URBANO,SIS FOR ALL,33
CUSCO,34,PERUANO,RURAL,INDEPENDENT SIS,45
LIMA,32,EXTRANJERO,RURAL,SIS NRUS,35
PUNO,44,PERUANO,URBANO,SIS MICROENTERPRISES,53
TACNA,25,EXTRANJERO,URBANO,SIS FREE,9
AREQUIPA,30,PERUANO,RURAL,INDEPENDENT SIS,30
CUSCO,38,EXTRANJERO,RURAL,SIS NRUS,51
LIMA,32,PERUANO,URBANO,SIS MICROENTERPRISES,11
PUNO,50,EXTRANJERO,URBANO,SIS FREE,37
TACNA,20,PERUANO,RURAL,SIS FOR ALL,17
AREQUIPA,29,EXTRANJERO,RURAL,SIS NRUS,51
CUSCO,41,PERUANO,URBANO,SIS MICROENTERPRISES,32
LIMA,57,EXTRANJERO,URBANO,SIS FREE,26
PUNO,47,PERUANO,RURAL,SIS FOR ALL,20
TACNA,65,EXTRANJERO,RURAL,INDEPENDENT SIS,56
AREQUIPA,68,PERUANO,URBANO,SIS MICROENTERPRISES,45
CUSCO,61,EXTRANJERO,URBANO,SIS FREE,26
LIMA,30,PERUANO,RURAL,SIS FOR ALL,57
PUNO,57,EXTRANJERO,RURAL,INDEPENDENT SIS,30
TACNA,67,PERUANO,URBANO,SIS NRUS,13
AREQUIPA,60,EXTRANJERO,URBANO,SIS FREE,57
CUSCO,18,PERUANO,RURAL,SIS FOR ALL,46
LIMA,54,EXTRANJERO,RURAL,INDEPENDENT SIS,49
PUNO,69,PERUANO,URBANO,SIS NRUS,10
TACNA,61,EXTRANJERO,URBANO,SIS MICROENTERPRISES,53
`;

export const FIT_DOC: FitDoc = {
  terms: [
    {
      label: "intercept", column: "intercept", level: null,
      estimate: 12.345678901234567, std_error: 3.25, t: 3.798, p: 0.0009,
      p_display: "0.0009", aliased: false,
    },
    {
      label: "AGE", column: "AGE", level: null,
      estimate: 0.5125, std_error: 0.125, t: 4.1, p: 1e-20,
      p_display: "< 2.2e-16", aliased: false,
    },
    {
      label: "REGION=PUNO", column: "REGION", level: "PUNO",
      estimate: null, std_error: null, t: null, p: null, p_display: null, aliased: true,
    },
  ],
  model: {
    n: 30, rank: 2, df_residual: 28, df_model: 1, rss: 100.5, tss: 300.25,
    sigma2: 3.589, r_squared: 0.6653, adj_r_squared: 0.6534,
    f_statistic: 16.81, f_pvalue: 3e-4, f_pvalue_display: "0.0003", intercept: true,
  },
  reference_levels: { REGION: "AREQUIPA" },
};

export const DENSITY_DOC: DensityDoc = {
  grid: [0, 1, 2, 3, 4],
  density: [0.05, 0.2, 0.5, 0.2, 0.05],
  bandwidth: 1.25,
  weighted: false,
};

export const REGIONS_DOC: RegionsDoc = {
  regions: [
    { region: "LIMA", total_affiliates: 120, record_count: 6, lat: -11.96, lon: -76.79 },
    { region: "MORDOR", total_affiliates: 7, record_count: 1, lat: null, lon: null },
    { region: "PUNO", total_affiliates: 80, record_count: 4, lat: -14.99, lon: -69.92 },
  ],
  warnings: ["region MORDOR has no known position"],
};

export const SCATTER_DOC: ScatterDoc = {
  x: "AGE",
  y: "INSURANCE_PLAN",
  z: "TOTAL_AFFILIATES",
  points: [
    [20, 0, 10],
    [30, 1, 20],
    [40, 2, 15],
    [50, 1, 40],
  ],
  plane: { intercept: 1.5, AGE: 0.25, INSURANCE_PLAN: -2.0 },
  axis_levels: { INSURANCE_PLAN: ["SIS FOR ALL", "SIS FREE", "SIS NRUS"] },
};

export const CORRELATION_DOC: CorrelationDoc = {
  labels: ["AGE", "TOTAL_AFFILIATES"],
  matrix: [
    [1.0, 0.42],
    [0.42, 1.0],
  ],
  undefined_pairs: [],
};
