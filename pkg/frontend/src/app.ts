/**
 * Application shell: owns the state, dispatches events through the pure
 * reducer, re-renders, and runs the async API flows. DOM events are
 * delegated from the root so re-rendering never re-binds listeners.
 */

import { ApiClient, ApiError } from "./api.js";
import { renderApp } from "./render.js";
import type { AppEvent, SessionState, TabId } from "./state.js";
import { initialState, reduce } from "./state.js";

const ROWS_PER_PAGE = 15;

interface FileLike {
  name: string;
  text(): Promise<string>;
}

export class App {
  state: SessionState = initialState();
  readonly log: AppEvent[] = [];

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  dispatch(event: AppEvent): void {
    this.log.push(event);
    this.state = reduce(this.state, event);
    this.render();
  }

  render(): void {
    this.root.innerHTML = renderApp(this.state);
  }

  mount(): void {
    this.render();
    this.root.addEventListener("click", (ev) => this.onClick(ev));
    this.root.addEventListener("change", (ev) => this.onChange(ev));
    this.root.addEventListener("submit", (ev) => this.onSubmit(ev));
  }

  private actionTarget(ev: Event): HTMLElement | null {
    let node = ev.target as HTMLElement | null;
    while (node && node !== this.root) {
      if (node.dataset && node.dataset.action) return node;
      node = node.parentElement;
    }
    return null;
  }

  private onClick(ev: Event): void {
    const target = this.actionTarget(ev);
    if (!target) return;
    switch (target.dataset.action) {
      case "tab":
        void this.selectTab(target.dataset.tab as TabId);
        break;
      case "dismiss-error":
        this.dispatch({ kind: "error-dismissed" });
        break;
      case "rows-page":
        void this.turnRowsPage(Number(target.dataset.dir));
        break;
      case "run-regression":
        void this.runRegression();
        break;
      case "clear-filters":
        void this.clearFilters();
        break;
      case "pick-region":
        void this.pickRegion(target.dataset.region ?? "");
        break;
    }
  }

  private onChange(ev: Event): void {
    const target = this.actionTarget(ev);
    if (!target) return;
    const input = target as HTMLInputElement;
    switch (target.dataset.action) {
      case "upload-file": {
        const file = input.files && input.files[0];
        if (file) void this.handleFileSelected(file as unknown as FileLike);
        break;
      }
      case "data-variable":
        void this.loadDataDistribution((target as unknown as HTMLSelectElement).value);
        break;
      case "entry-variable":
        void this.loadEntryDistribution((target as unknown as HTMLSelectElement).value);
        break;
      case "entry-chart":
        this.dispatch({ kind: "entry-chart", chart: input.value as "bar" | "pie" });
        break;
      case "predictor":
        this.togglePredictor(input.value, input.checked);
        break;
      case "scatter-axis":
        void this.changeScatterAxis(target.dataset.axis as "x" | "y" | "z", input.value);
        break;
      case "density-variable":
        void this.loadDensity((target as unknown as HTMLSelectElement).value, this.state.densityWeighted);
        break;
      case "density-weighted":
        void this.loadDensity(this.state.densityVariable, input.checked);
        break;
    }
  }

  private onSubmit(ev: Event): void {
    const target = this.actionTarget(ev);
    if (target?.dataset.action === "apply-filters") {
      ev.preventDefault();
      void this.applyFilters();
    }
  }

  private async guard<T>(key: string, work: () => Promise<T>): Promise<T | null> {
    this.dispatch({ kind: "request", key });
    try {
      const result = await work();
      this.dispatch({ kind: "response", key });
      return result;
    } catch (err) {
      if ((err as Error).name === "AbortError") return null; // superseded request
      const message = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
      this.dispatch({ kind: "failed", key, message });
      return null;
    }
  }

  async selectTab(tab: TabId): Promise<void> {
    this.dispatch({ kind: "tab", tab });
    if (!this.state.datasetId) return;
    if (tab === "map" && !this.state.regions) await this.loadRegions();
    if (tab === "density" && !this.state.density) {
      await this.loadDensity(this.state.densityVariable, this.state.densityWeighted);
    }
  }

  async handleFileSelected(file: FileLike): Promise<void> {
    const text = await file.text();
    await this.uploadCsv(text);
  }

  async uploadCsv(text: string): Promise<void> {
    const doc = await this.guard("upload", () => this.api.upload(text));
    if (!doc) return;
    this.dispatch({ kind: "uploaded", doc });
    await Promise.all([this.loadSummary(), this.loadRows(0), this.loadDataDistribution(this.state.dataVariable)]);
  }

  async loadSummary(): Promise<void> {
    if (!this.state.datasetId) return;
    const doc = await this.guard("summary", () => this.api.summary(this.state.datasetId!));
    if (doc) this.dispatch({ kind: "summary", doc });
  }

  async loadRows(offset: number): Promise<void> {
    if (!this.state.datasetId) return;
    const doc = await this.guard("rows", () => this.api.rows(this.state.datasetId!, offset, ROWS_PER_PAGE));
    if (doc) this.dispatch({ kind: "rows", doc });
  }

  private async turnRowsPage(direction: number): Promise<void> {
    const page = this.state.rowsPage;
    if (!page) return;
    const offset = Math.max(0, page.offset + direction * page.limit);
    await this.loadRows(offset);
  }

  async loadDataDistribution(variable: string): Promise<void> {
    if (!this.state.datasetId) return;
    this.dispatch({ kind: "data-variable", variable });
    const doc = await this.guard("distribution", () =>
      this.api.distribution(this.state.datasetId!, variable, "distribution"),
    );
    if (doc) this.dispatch({ kind: "distribution", doc });
  }

  async loadEntryDistribution(variable: string): Promise<void> {
    if (!this.state.datasetId) return;
    this.dispatch({ kind: "entry-variable", variable });
    const doc = await this.guard("entry-distribution", () =>
      this.api.distribution(this.state.datasetId!, variable, "entry-distribution"),
    );
    if (doc) this.dispatch({ kind: "entry-distribution", doc });
  }

  private readFilterForm(): void {
    const doc = this.root.ownerDocument;
    const selected = (id: string): string[] => {
      const select = doc.getElementById(id) as HTMLSelectElement | null;
      if (!select) return [];
      return Array.from(select.selectedOptions ?? []).map((o) => o.value);
    };
    const numeric = (id: string): number | null => {
      const input = doc.getElementById(id) as HTMLInputElement | null;
      if (!input || input.value === "") return null;
      const parsed = Number(input.value);
      return Number.isFinite(parsed) ? parsed : null;
    };
    const scopeSelect = doc.getElementById("filter-scope") as HTMLSelectElement | null;
    this.dispatch({
      kind: "entry-filters",
      filters: {
        regions: selected("filter-regions"),
        plans: selected("filter-plans"),
        scope: scopeSelect && scopeSelect.value !== "" ? scopeSelect.value : null,
        ageMin: numeric("filter-age-min"),
        ageMax: numeric("filter-age-max"),
      },
    });
  }

  filterClauses(): object[] {
    const { regions, plans, scope, ageMin, ageMax } = this.state.entry;
    const clauses: object[] = [];
    if (regions.length) clauses.push({ column: "REGION", op: "in-set", values: regions });
    if (plans.length) clauses.push({ column: "INSURANCE_PLAN", op: "in-set", values: plans });
    if (scope) clauses.push({ column: "INEI_SCOPE", op: "equals", value: scope });
    if (ageMin !== null || ageMax !== null) {
      clauses.push({ column: "AGE", op: "range", min: ageMin, max: ageMax });
    }
    return clauses;
  }

  async applyFilters(): Promise<void> {
    if (!this.state.baseId) return;
    this.readFilterForm();
    const clauses = this.filterClauses();
    const doc = await this.guard("filter", () => this.api.filter(this.state.baseId!, clauses));
    if (!doc) return;
    this.dispatch({ kind: "filtered", doc });
    await Promise.all([
      this.loadSummary(),
      this.loadRows(0),
      this.loadEntryDistribution(this.state.entryVariable),
    ]);
  }

  async clearFilters(): Promise<void> {
    this.dispatch({ kind: "filters-cleared" });
    await Promise.all([
      this.loadSummary(),
      this.loadRows(0),
      this.loadEntryDistribution(this.state.entryVariable),
    ]);
  }

  private togglePredictor(name: string, checked: boolean): void {
    const current = new Set(this.state.predictors);
    if (checked) current.add(name);
    else current.delete(name);
    const ordered = ["INSURANCE_PLAN", "REGION", "AGE", "NATIONAL_FOREIGN", "INEI_SCOPE"].filter((p) =>
      current.has(p),
    );
    this.dispatch({ kind: "predictors", predictors: ordered });
  }

  async runRegression(): Promise<void> {
    if (!this.state.datasetId || this.state.predictors.length === 0) return;
    const id = this.state.datasetId;
    const fit = await this.guard("regression", () => this.api.regression(id, this.state.predictors));
    if (!fit) return;
    this.dispatch({ kind: "fit", doc: fit });
    const axes = this.state.scatterAxes;
    const [scatter, correlation] = await Promise.all([
      this.guard("scatter3d", () => this.api.scatter3d(id, axes.x, axes.y, axes.z)),
      this.guard("correlation", () =>
        this.api.correlation(id, [...this.state.predictors, "TOTAL_AFFILIATES"]),
      ),
    ]);
    if (scatter) this.dispatch({ kind: "scatter", doc: scatter });
    if (correlation) this.dispatch({ kind: "correlation", doc: correlation });
  }

  async changeScatterAxis(axis: "x" | "y" | "z", column: string): Promise<void> {
    const axes = { ...this.state.scatterAxes, [axis]: column };
    this.dispatch({ kind: "scatter-axes", x: axes.x, y: axes.y, z: axes.z });
    if (!this.state.datasetId || new Set([axes.x, axes.y, axes.z]).size !== 3) return;
    const doc = await this.guard("scatter3d", () =>
      this.api.scatter3d(this.state.datasetId!, axes.x, axes.y, axes.z),
    );
    if (doc) this.dispatch({ kind: "scatter", doc });
  }

  async loadDensity(variable: string, weighted: boolean): Promise<void> {
    if (!this.state.datasetId) return;
    this.dispatch({ kind: "density-variable", variable });
    this.dispatch({ kind: "density-weighted", weighted });
    const doc = await this.guard("density", () => this.api.density(this.state.datasetId!, variable, weighted));
    if (doc) this.dispatch({ kind: "density", doc });
  }

  async loadRegions(): Promise<void> {
    if (!this.state.datasetId) return;
    const doc = await this.guard("regions", () => this.api.regions(this.state.datasetId!));
    if (doc) this.dispatch({ kind: "regions", doc });
  }

  /** Map click: the region becomes a session filter feeding the Data Entry tab. */
  async pickRegion(region: string): Promise<void> {
    if (!region || !this.state.baseId) return;
    this.dispatch({
      kind: "entry-filters",
      filters: { ...this.state.entry, regions: [region] },
    });
    const doc = await this.guard("filter", () => this.api.filter(this.state.baseId!, this.filterClauses()));
    if (!doc) return;
    this.dispatch({ kind: "filtered", doc });
    this.dispatch({ kind: "tab", tab: "entry" });
    await Promise.all([this.loadSummary(), this.loadEntryDistribution(this.state.entryVariable), this.loadRegions()]);
  }
}
