/**
 * Session state and its reducer.
 *
 * Every screen is a function of this state alone; the reducer is pure
 * (no mutation, no I/O), so replaying an event log reproduces the exact
 * same state and therefore the exact same screen.
 */

import type {
  CorrelationDoc,
  DensityDoc,
  DistributionDoc,
  FilterDoc,
  FitDoc,
  RegionsDoc,
  RowsDoc,
  ScatterDoc,
  SummaryDoc,
  UploadDoc,
} from "./types.js";
import { DEFAULT_PREDICTORS } from "./types.js";

export type TabId = "home" | "data" | "entry" | "regression" | "density" | "map";

export const TABS: { id: TabId; title: string }[] = [
  { id: "home", title: "Home" },
  { id: "data", title: "Data" },
  { id: "entry", title: "Data Entry" },
  { id: "regression", title: "Regression Analysis" },
  { id: "density", title: "Affiliate Density" },
  { id: "map", title: "Active Affiliates" },
];

export interface EntryFilters {
  regions: string[];
  plans: string[];
  scope: string | null;
  ageMin: number | null;
  ageMax: number | null;
}

export interface SessionState {
  activeTab: TabId;
  error: string | null;
  pending: Record<string, boolean>;
  upload: UploadDoc | null;
  baseId: string | null;
  datasetId: string | null;
  filteredRowCount: number | null;
  summary: SummaryDoc | null;
  rowsPage: RowsDoc | null;
  dataVariable: string;
  distribution: DistributionDoc | null;
  entry: EntryFilters;
  entryVariable: string;
  entryChart: "bar" | "pie";
  entryDistribution: DistributionDoc | null;
  predictors: string[];
  fit: FitDoc | null;
  scatterAxes: { x: string; y: string; z: string };
  scatter: ScatterDoc | null;
  correlation: CorrelationDoc | null;
  densityVariable: string;
  densityWeighted: boolean;
  density: DensityDoc | null;
  regions: RegionsDoc | null;
}

export const EMPTY_FILTERS: EntryFilters = {
  regions: [],
  plans: [],
  scope: null,
  ageMin: null,
  ageMax: null,
};

export function initialState(): SessionState {
  return {
    activeTab: "home",
    error: null,
    pending: {},
    upload: null,
    baseId: null,
    datasetId: null,
    filteredRowCount: null,
    summary: null,
    rowsPage: null,
    dataVariable: "INSURANCE_PLAN",
    distribution: null,
    entry: EMPTY_FILTERS,
    entryVariable: "REGION",
    entryChart: "bar",
    entryDistribution: null,
    predictors: [...DEFAULT_PREDICTORS],
    fit: null,
    scatterAxes: { x: "AGE", y: "INSURANCE_PLAN", z: "TOTAL_AFFILIATES" },
    scatter: null,
    correlation: null,
    densityVariable: "AGE",
    densityWeighted: false,
    density: null,
    regions: null,
  };
}

export type AppEvent =
  | { kind: "tab"; tab: TabId }
  | { kind: "request"; key: string }
  | { kind: "response"; key: string }
  | { kind: "failed"; key: string; message: string }
  | { kind: "error-dismissed" }
  | { kind: "uploaded"; doc: UploadDoc }
  | { kind: "summary"; doc: SummaryDoc }
  | { kind: "rows"; doc: RowsDoc }
  | { kind: "data-variable"; variable: string }
  | { kind: "distribution"; doc: DistributionDoc }
  | { kind: "entry-filters"; filters: EntryFilters }
  | { kind: "entry-variable"; variable: string }
  | { kind: "entry-chart"; chart: "bar" | "pie" }
  | { kind: "entry-distribution"; doc: DistributionDoc }
  | { kind: "filtered"; doc: FilterDoc }
  | { kind: "filters-cleared" }
  | { kind: "predictors"; predictors: string[] }
  | { kind: "fit"; doc: FitDoc }
  | { kind: "scatter-axes"; x: string; y: string; z: string }
  | { kind: "scatter"; doc: ScatterDoc }
  | { kind: "correlation"; doc: CorrelationDoc }
  | { kind: "density-variable"; variable: string }
  | { kind: "density-weighted"; weighted: boolean }
  | { kind: "density"; doc: DensityDoc }
  | { kind: "regions"; doc: RegionsDoc };

export function reduce(state: SessionState, event: AppEvent): SessionState {
  switch (event.kind) {
    case "tab":
      return { ...state, activeTab: event.tab };
    case "request":
      return { ...state, pending: { ...state.pending, [event.key]: true }, error: null };
    case "response":
      return { ...state, pending: { ...state.pending, [event.key]: false } };
    case "failed":
      return { ...state, pending: { ...state.pending, [event.key]: false }, error: event.message };
    case "error-dismissed":
      return { ...state, error: null };
    case "uploaded":
      // a new base dataset resets everything derived from the old one
      return {
        ...initialState(),
        activeTab: state.activeTab,
        dataVariable: state.dataVariable,
        upload: event.doc,
        baseId: event.doc.id,
        datasetId: event.doc.id,
      };
    case "summary":
      return { ...state, summary: event.doc };
    case "rows":
      return { ...state, rowsPage: event.doc };
    case "data-variable":
      return { ...state, dataVariable: event.variable };
    case "distribution":
      return { ...state, distribution: event.doc };
    case "entry-filters":
      return { ...state, entry: event.filters };
    case "entry-variable":
      return { ...state, entryVariable: event.variable };
    case "entry-chart":
      return { ...state, entryChart: event.chart };
    case "entry-distribution":
      return { ...state, entryDistribution: event.doc };
    case "filtered":
      // later tabs now operate on the derived dataset
      return { ...state, datasetId: event.doc.id, filteredRowCount: event.doc.row_count };
    case "filters-cleared":
      return {
        ...state,
        entry: EMPTY_FILTERS,
        datasetId: state.baseId,
        filteredRowCount: null,
      };
    case "predictors":
      return { ...state, predictors: event.predictors };
    case "fit":
      return { ...state, fit: event.doc };
    case "scatter-axes":
      return { ...state, scatterAxes: { x: event.x, y: event.y, z: event.z } };
    case "scatter":
      return { ...state, scatter: event.doc };
    case "correlation":
      return { ...state, correlation: event.doc };
    case "density-variable":
      return { ...state, densityVariable: event.variable };
    case "density-weighted":
      return { ...state, densityWeighted: event.weighted };
    case "density":
      return { ...state, density: event.doc };
    case "regions":
      return { ...state, regions: event.doc };
  }
}

export function replay(events: AppEvent[], start?: SessionState): SessionState {
  return events.reduce(reduce, start ?? initialState());
}
