/**
 * HTML builders: SessionState in, markup out. No fetching, no statistics;
 * the coefficient table and every other figure quote API payload fields
 * verbatim so each on-screen number is traceable to a response field.
 */

import {
  barChart,
  correlationHeatmap,
  densityCurve,
  escapeHtml,
  pieChart,
  regionMap,
  scatterProjection,
} from "./charts.js";
import type { SessionState } from "./state.js";
import { TABS } from "./state.js";
import { CATEGORICAL_COLUMNS, DEFAULT_PREDICTORS, INTEGER_COLUMNS } from "./types.js";

const PLAN_LIST = [
  "SIS Free",
  "SIS For All",
  "Independent SIS",
  "SIS NRUS",
  "SIS Microenterprises",
];

export function renderApp(state: SessionState): string {
  const tabs = TABS.map(
    (tab) =>
      `<button class="tab${state.activeTab === tab.id ? " active" : ""}" data-action="tab" data-tab="${tab.id}">` +
      `${tab.title}</button>`,
  ).join("");
  const busy = Object.values(state.pending).some(Boolean);
  return (
    `<header><h1>SIS Affiliate Explorer</h1><nav class="tabs">${tabs}</nav>` +
    `${busy ? '<div class="busy" id="busy">working…</div>' : ""}` +
    `${state.error ? `<div class="error" id="error">${escapeHtml(state.error)} <button data-action="dismiss-error">×</button></div>` : ""}` +
    `</header><main>${renderActiveTab(state)}</main>`
  );
}

export function renderActiveTab(state: SessionState): string {
  switch (state.activeTab) {
    case "home":
      return renderHome();
    case "data":
      return renderData(state);
    case "entry":
      return renderEntry(state);
    case "regression":
      return renderRegression(state);
    case "density":
      return renderDensity(state);
    case "map":
      return renderMap(state);
  }
}

export function renderHome(): string {
  const plans = PLAN_LIST.map((p) => `<li class="plan">${p}</li>`).join("");
  return (
    `<section id="tab-home"><h2>Comprehensive Health Insurance (SIS)</h2>` +
    `<p>SIS is Peru's public comprehensive health insurance, giving low-income residents access to` +
    ` health services. This dashboard explores the table of active affiliates: upload the CSV export` +
    ` on the <em>Data</em> tab, then filter, fit regressions, and map enrollment by region.</p>` +
    `<h3>Insurance plans</h3><ul id="plan-list">${plans}</ul>` +
    `<h3>Keeping SIS active</h3><p>Affiliation stays active while the holder remains eligible for` +
    ` their plan; eligibility and affiliation status can be checked on the official portals below.</p>` +
    `<p><a href="https://www.gob.pe/sis" target="_blank" rel="noopener">About SIS plans</a> · ` +
    `<a href="http://app.sis.gob.pe/SisConsultaEnLinea/Consulta/frmConsultaEnLinea.aspx" target="_blank" rel="noopener">` +
    `Check affiliation</a></p></section>`
  );
}

function noData(): string {
  return `<p class="placeholder">Upload a CSV on the <b>Data</b> tab first.</p>`;
}

export function renderData(state: SessionState): string {
  const uploader =
    `<div class="upload-box"><label>Affiliate CSV: ` +
    `<input type="file" id="upload-input" data-action="upload-file" accept=".csv,text/csv"></label></div>`;
  if (!state.upload || !state.datasetId) {
    return `<section id="tab-data"><h2>Data</h2>${uploader}${noData()}</section>`;
  }
  const badge =
    `<div class="badges"><span class="badge" id="row-count-badge">${state.upload.rows_kept}</span> rows kept` +
    ` of ${state.upload.rows_in} (${state.upload.rows_rejected} rejected)` +
    (state.filteredRowCount !== null
      ? ` · filtered view: <span id="filtered-count">${state.filteredRowCount}</span> rows`
      : "") +
    `</div>`;
  const table = state.rowsPage
    ? renderRowsTable(state)
    : `<p class="placeholder">loading rows…</p>`;
  const summary = state.summary ? renderSummary(state) : `<p class="placeholder">loading summary…</p>`;
  const options = CATEGORICAL_COLUMNS.map(
    (c) => `<option value="${c}"${state.dataVariable === c ? " selected" : ""}>${c}</option>`,
  ).join("");
  const chart = state.distribution
    ? barChart(state.distribution.entries)
    : `<p class="placeholder">pick a variable</p>`;
  return (
    `<section id="tab-data"><h2>Data</h2>${uploader}${badge}` +
    `<div class="columns"><div>${table}</div><div>${summary}</div></div>` +
    `<h3>Distribution</h3><label>Variable <select id="data-variable" data-action="data-variable">${options}</select></label>` +
    `<div id="data-distribution">${chart}</div></section>`
  );
}

function renderRowsTable(state: SessionState): string {
  const page = state.rowsPage!;
  const head = page.columns.map((c) => `<th>${escapeHtml(c)}</th>`).join("");
  const body = page.rows
    .map((row) => `<tr>${row.map((v) => `<td>${escapeHtml(v)}</td>`).join("")}</tr>`)
    .join("");
  const from = page.total === 0 ? 0 : page.offset + 1;
  const to = Math.min(page.offset + page.rows.length, page.total);
  return (
    `<table class="data-table" id="rows-table"><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table>` +
    `<div class="pager">rows ${from}–${to} of ${page.total} ` +
    `<button data-action="rows-page" data-dir="-1"${page.offset === 0 ? " disabled" : ""}>prev</button>` +
    `<button data-action="rows-page" data-dir="1"${to >= page.total ? " disabled" : ""}>next</button></div>`
  );
}

function renderSummary(state: SessionState): string {
  const summary = state.summary!;
  const integerRows = Object.entries(summary.integer_columns)
    .map(([name, stats]) =>
      stats
        ? `<tr><td>${name}</td><td>${stats.min}</td><td>${stats.max}</td><td>${stats.mean}</td>` +
          `<td>${stats.median}</td><td>${stats.q25}</td><td>${stats.q75}</td></tr>`
        : `<tr><td>${name}</td><td colspan="6">no values</td></tr>`,
    )
    .join("");
  const categoricalRows = Object.entries(summary.categorical_columns)
    .map(([name, cats]) => {
      const levels = Object.keys(cats.counts).length;
      return `<tr><td>${name}</td><td>${levels}</td></tr>`;
    })
    .join("");
  return (
    `<h3>Summary</h3><table class="summary-table" id="summary-table">` +
    `<thead><tr><th>column</th><th>min</th><th>max</th><th>mean</th><th>median</th><th>q25</th><th>q75</th></tr></thead>` +
    `<tbody>${integerRows}</tbody></table>` +
    `<table class="summary-table"><thead><tr><th>categorical</th><th>levels</th></tr></thead>` +
    `<tbody>${categoricalRows}</tbody></table>`
  );
}

export function renderEntry(state: SessionState): string {
  if (!state.baseId) return `<section id="tab-entry"><h2>Data Entry</h2>${noData()}</section>`;
  const levels = (column: string): string[] =>
    state.summary ? Object.keys(state.summary.categorical_columns[column]?.counts ?? {}) : [];
  const regionOptions = levels("REGION")
    .map((r) => `<option value="${escapeHtml(r)}"${state.entry.regions.includes(r) ? " selected" : ""}>${escapeHtml(r)}</option>`)
    .join("");
  const planOptions = levels("INSURANCE_PLAN")
    .map((p) => `<option value="${escapeHtml(p)}"${state.entry.plans.includes(p) ? " selected" : ""}>${escapeHtml(p)}</option>`)
    .join("");
  const scopeOptions = ['<option value="">any</option>']
    .concat(levels("INEI_SCOPE").map(
      (s) => `<option value="${escapeHtml(s)}"${state.entry.scope === s ? " selected" : ""}>${escapeHtml(s)}</option>`,
    ))
    .join("");
  const variableOptions = CATEGORICAL_COLUMNS.map(
    (c) => `<option value="${c}"${state.entryVariable === c ? " selected" : ""}>${c}</option>`,
  ).join("");
  const chart = state.entryDistribution
    ? state.entryChart === "bar"
      ? barChart(state.entryDistribution.entries)
      : pieChart(state.entryDistribution.entries)
    : `<p class="placeholder">apply filters or pick a variable</p>`;
  return (
    `<section id="tab-entry"><h2>Data Entry</h2>` +
    `<form id="filter-form" data-action="apply-filters"><fieldset><legend>Filters</legend>` +
    `<label>Regions <select id="filter-regions" multiple size="4">${regionOptions}</select></label>` +
    `<label>Plans <select id="filter-plans" multiple size="4">${planOptions}</select></label>` +
    `<label>Scope <select id="filter-scope">${scopeOptions}</select></label>` +
    `<label>Age <input id="filter-age-min" type="number" min="0" max="120" value="${state.entry.ageMin ?? ""}" placeholder="min">` +
    ` – <input id="filter-age-max" type="number" min="0" max="120" value="${state.entry.ageMax ?? ""}" placeholder="max"></label>` +
    `<button type="submit" id="apply-filters">Apply</button>` +
    `<button type="button" data-action="clear-filters" id="clear-filters">Clear</button>` +
    `</fieldset></form>` +
    `<div class="badges">${state.filteredRowCount !== null
      ? `filtered rows: <span id="entry-row-count">${state.filteredRowCount}</span>`
      : "no filter applied"}</div>` +
    `<label>Chart variable <select id="entry-variable" data-action="entry-variable">${variableOptions}</select></label> ` +
    `<label><input type="radio" name="chart-kind" value="bar" data-action="entry-chart"${state.entryChart === "bar" ? " checked" : ""}> bars</label>` +
    `<label><input type="radio" name="chart-kind" value="pie" data-action="entry-chart"${state.entryChart === "pie" ? " checked" : ""}> pie</label>` +
    `<div id="entry-chart">${chart}</div></section>`
  );
}

export function renderRegression(state: SessionState): string {
  if (!state.datasetId) return `<section id="tab-regression"><h2>Regression Analysis</h2>${noData()}</section>`;
  const boxes = DEFAULT_PREDICTORS.map(
    (p) =>
      `<label class="predictor"><input type="checkbox" data-action="predictor" value="${p}"` +
      `${state.predictors.includes(p) ? " checked" : ""}> ${p}</label>`,
  ).join("");
  const disabled = state.predictors.length === 0 ? " disabled" : "";
  const table = state.fit ? renderCoefficientTable(state) : `<p class="placeholder">run the regression</p>`;
  const allColumns = [...INTEGER_COLUMNS, ...CATEGORICAL_COLUMNS];
  const axisPicker = (axis: "x" | "y" | "z") =>
    `<label>${axis} <select data-action="scatter-axis" data-axis="${axis}" id="scatter-axis-${axis}">` +
    allColumns
      .map((c) => `<option value="${c}"${state.scatterAxes[axis] === c ? " selected" : ""}>${c}</option>`)
      .join("") +
    `</select></label>`;
  const scatter = state.scatter ? scatterProjection(state.scatter) : "";
  const planeLegend = state.scatter
    ? `<p class="plane-legend" id="plane-legend">plane: ` +
      Object.entries(state.scatter.plane)
        .map(([k, v]) => `${escapeHtml(k)} = ${v === null ? "aliased" : v}`)
        .join(", ") +
      `</p>`
    : "";
  const heatmap = state.correlation ? correlationHeatmap(state.correlation) : "";
  return (
    `<section id="tab-regression"><h2>Regression Analysis</h2>` +
    `<p>Response: <b>TOTAL_AFFILIATES</b></p><div class="predictors">${boxes}</div>` +
    `<button id="run-regression" data-action="run-regression"${disabled}>Fit model</button>` +
    `<div id="fit-output">${table}</div>` +
    `${state.fit
      ? `<h3>3D scatter</h3><div class="axis-pickers">${axisPicker("x")} ${axisPicker("y")} ${axisPicker("z")}</div>` +
        `<div id="scatter-output">${scatter}${planeLegend}</div>`
      : ""}` +
    `${state.fit ? `<h3>Correlation</h3><div id="correlation-output">${heatmap}</div>` : ""}` +
    `</section>`
  );
}

function renderCoefficientTable(state: SessionState): string {
  const fit = state.fit!;
  const rows = fit.terms
    .map((term) => {
      if (term.aliased) {
        return (
          `<tr data-term="${escapeHtml(term.label)}"><td>${escapeHtml(term.label)}</td>` +
          `<td colspan="4" class="aliased">aliased</td></tr>`
        );
      }
      return (
        `<tr data-term="${escapeHtml(term.label)}"><td>${escapeHtml(term.label)}</td>` +
        `<td class="estimate">${term.estimate}</td><td class="std-error">${term.std_error}</td>` +
        `<td class="t-value">${term.t}</td><td class="p-value">${escapeHtml(term.p_display)}</td></tr>`
      );
    })
    .join("");
  const model = fit.model;
  return (
    `<table class="coef-table" id="coef-table">` +
    `<thead><tr><th>term</th><th>estimate</th><th>std. error</th><th>t</th><th>p</th></tr></thead>` +
    `<tbody>${rows}</tbody></table>` +
    `<p class="model-line" id="model-line">n = <span id="model-n">${model.n}</span>, ` +
    `R² = <span id="model-r2">${model.r_squared}</span>, adjusted R² = ${model.adj_r_squared}, ` +
    `F = ${model.f_statistic} on ${model.df_model} and ${model.df_residual} df` +
    ` (p ${escapeHtml(model.f_pvalue_display)})</p>`
  );
}

export function renderDensity(state: SessionState): string {
  if (!state.datasetId) return `<section id="tab-density"><h2>Affiliate Density</h2>${noData()}</section>`;
  const options = [...INTEGER_COLUMNS, ...CATEGORICAL_COLUMNS]
    .map((c) => {
      const allowed = (INTEGER_COLUMNS as readonly string[]).includes(c);
      return `<option value="${c}"${state.densityVariable === c ? " selected" : ""}${allowed ? "" : " disabled"}>${c}</option>`;
    })
    .join("");
  const curve = state.density
    ? densityCurve(state.density) +
      `<p id="bandwidth-line">bandwidth = <span id="bandwidth-value">${state.density.bandwidth}</span>` +
      ` (${state.density.weighted ? "weighted by TOTAL_AFFILIATES" : "unweighted"})</p>`
    : `<p class="placeholder">pick a variable</p>`;
  return (
    `<section id="tab-density"><h2>Affiliate Density</h2>` +
    `<label>Variable <select id="density-variable" data-action="density-variable">${options}</select></label> ` +
    `<label><input type="checkbox" id="density-weighted" data-action="density-weighted"` +
    `${state.densityWeighted ? " checked" : ""}> weight by TOTAL_AFFILIATES</label>` +
    `<div id="density-output">${curve}</div></section>`
  );
}

export function renderMap(state: SessionState): string {
  if (!state.datasetId) return `<section id="tab-map"><h2>Active Affiliates</h2>${noData()}</section>`;
  if (!state.regions) return `<section id="tab-map"><h2>Active Affiliates</h2><p class="placeholder">loading…</p></section>`;
  const doc = state.regions;
  const located = doc.regions.filter((r) => r.lat !== null);
  const missing = doc.regions.filter((r) => r.lat === null);
  const rows = doc.regions
    .map(
      (r) =>
        `<tr data-region-row="${escapeHtml(r.region)}"><td>` +
        `<button class="linkish" data-action="pick-region" data-region="${escapeHtml(r.region)}">${escapeHtml(r.region)}</button>` +
        `</td><td class="region-total">${r.total_affiliates}</td><td>${r.record_count}</td></tr>`,
    )
    .join("");
  const missingPanel = missing.length
    ? `<div class="missing-panel" id="missing-regions"><h3>No map position</h3><ul>` +
      missing.map((r) => `<li>${escapeHtml(r.region)}: ${r.total_affiliates}</li>`).join("") +
      `</ul></div>`
    : "";
  const warnings = doc.warnings.length
    ? `<ul class="warnings" id="region-warnings">${doc.warnings.map((w) => `<li>${escapeHtml(w)}</li>`).join("")}</ul>`
    : "";
  return (
    `<section id="tab-map"><h2>Active Affiliates</h2>` +
    `<p>Bars and dots scale with each region's active affiliates; click a region to filter the session.</p>` +
    `<div class="columns"><div>${regionMap({ regions: located, warnings: [] })}</div>` +
    `<div><table class="summary-table" id="region-table">` +
    `<thead><tr><th>region</th><th>affiliates</th><th>records</th></tr></thead><tbody>${rows}</tbody></table>` +
    `${missingPanel}${warnings}</div></div></section>`
  );
}
