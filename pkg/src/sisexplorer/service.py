"""HTTP JSON service over the library: upload, summarize, filter, fit, density, regions.

Datasets are content-addressed: the id is the SHA-256 of the cleaned
canonical CSV, so re-uploading the same bytes is idempotent and filters
(which create derived datasets) compose naturally.  The in-memory
registry evicts least-recently-used entries over capacity, but never an
entry that a request currently holds.

All responses are canonically serialized JSON (sorted keys, compact),
so a given (dataset bytes, request) pair always yields identical bytes.
Errors use the shape {"code", "message", "detail"}.
"""

import os
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass

from fastapi import Body, FastAPI, Query, Request, Response
from fastapi.concurrency import run_in_threadpool
from fastapi.exceptions import RequestValidationError

from . import __version__
from .dataset import (
    CleaningReport,
    Dataset,
    FilterSpec,
    aggregate_by,
    clean,
    filter_rows,
    load_region_centroids,
    parse_csv,
    region_totals,
    summarize,
)
from .density import kde
from .errors import (
    EmptyInputError,
    EncodingError,
    ExplorerError,
    SchemaError,
)
from .jsonutil import canonical_json
from .regression import ModelSpec, correlation_matrix, fit_model, scatter3d_data
from .schema import TOTAL_AFFILIATES


class UnknownDatasetError(ExplorerError):
    code = "unknown_dataset"


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    max_upload_bytes: int = 128 * 1024 * 1024
    max_datasets: int = 16
    max_total_rows: int = 8_000_000
    centroids_path: str | None = None
    ui_dir: str | None = "frontend/dist"

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        base = cls()
        return cls(
            host=os.environ.get("SISX_HOST", base.host),
            port=int(os.environ.get("SISX_PORT", base.port)),
            max_upload_bytes=int(os.environ.get("SISX_MAX_UPLOAD_BYTES", base.max_upload_bytes)),
            max_datasets=int(os.environ.get("SISX_MAX_DATASETS", base.max_datasets)),
            max_total_rows=int(os.environ.get("SISX_MAX_TOTAL_ROWS", base.max_total_rows)),
            centroids_path=os.environ.get("SISX_CENTROIDS_PATH", base.centroids_path),
            ui_dir=os.environ.get("SISX_UI_DIR", base.ui_dir),
        )


class _Entry:
    __slots__ = ("dataset", "report", "created_at", "inflight")

    def __init__(self, dataset: Dataset, report: CleaningReport):
        self.dataset = dataset
        self.report = report
        self.created_at = time.time()
        self.inflight = 0


class DatasetRegistry:
    """Thread-safe LRU registry of immutable datasets keyed by content digest."""

    def __init__(self, max_datasets: int, max_total_rows: int):
        self.max_datasets = max_datasets
        self.max_total_rows = max_total_rows
        self._lock = threading.Lock()
        self._entries: dict[str, _Entry] = {}
        self._order: list[str] = []  # least recently used first

    def _touch(self, dataset_id: str) -> None:
        self._order.remove(dataset_id)
        self._order.append(dataset_id)

    def _evict_over_capacity(self) -> None:
        def over() -> bool:
            total_rows = sum(e.dataset.row_count for e in self._entries.values())
            return len(self._entries) > self.max_datasets or total_rows > self.max_total_rows

        # walk LRU-first; entries someone still holds are skipped, never removed
        idx = 0
        while over() and idx < len(self._order):
            candidate = self._order[idx]
            if self._entries[candidate].inflight > 0:
                idx += 1
                continue
            self._order.pop(idx)
            del self._entries[candidate]

    def add(self, dataset: Dataset, report: CleaningReport) -> tuple[str, bool]:
        dataset_id = dataset.source_digest
        with self._lock:
            if dataset_id in self._entries:
                self._touch(dataset_id)
                return dataset_id, False
            self._entries[dataset_id] = _Entry(dataset, report)
            self._order.append(dataset_id)
            self._evict_over_capacity()
            return dataset_id, True

    @contextmanager
    def acquire(self, dataset_id: str):
        with self._lock:
            entry = self._entries.get(dataset_id)
            if entry is None:
                raise UnknownDatasetError(f"unknown dataset id {dataset_id}")
            entry.inflight += 1
            self._touch(dataset_id)
        try:
            yield entry
        finally:
            with self._lock:
                entry.inflight -= 1

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


def _json(payload, status: int = 200) -> Response:
    return Response(canonical_json(payload), status_code=status, media_type="application/json")


def _error_response(exc: ExplorerError, status: int) -> Response:
    detail = None
    if isinstance(exc, EncodingError):
        detail = {"byte_offset": exc.byte_offset}
    return _json({"code": exc.code, "message": str(exc), "detail": detail}, status)


def _status_for(exc: ExplorerError) -> int:
    if isinstance(exc, UnknownDatasetError):
        return 404
    if isinstance(exc, (SchemaError, EncodingError, EmptyInputError)):
        return 400
    return 422  # validation, domain, numeric, insufficient data


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    registry = DatasetRegistry(config.max_datasets, config.max_total_rows)
    centroids = load_region_centroids(config.centroids_path)
    app = FastAPI(title="sisexplorer", version=__version__)
    app.state.registry = registry
    app.state.config = config

    # the dashboard is served same-origin under /ui in production, but dev
    # setups run it from another port; responses carry no credentials
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(ExplorerError)
    def explorer_error_handler(_request: Request, exc: ExplorerError):
        return _error_response(exc, _status_for(exc))

    @app.exception_handler(RequestValidationError)
    def request_validation_handler(_request: Request, exc: RequestValidationError):
        return _json({"code": "validation_error", "message": "invalid request", "detail": str(exc)}, 422)

    @app.get("/health")
    def health():
        return _json({"status": "ok", "version": __version__})

    def _ingest(data: bytes):
        parsed, parse_report = parse_csv(data)
        cleaned, clean_report = clean(parsed)
        merged = CleaningReport(
            rows_in=parse_report.rows_in,
            rows_kept=clean_report.rows_kept,
            rows_rejected=parse_report.rows_rejected + clean_report.rows_rejected,
            rejections=parse_report.rejections + clean_report.rejections,
        )
        return registry.add(cleaned, merged), merged

    @app.post("/datasets")
    async def upload_dataset(request: Request):
        data = await request.body()
        if len(data) > config.max_upload_bytes:
            return _json({
                "code": "payload_too_large",
                "message": f"upload of {len(data)} bytes exceeds limit {config.max_upload_bytes}",
                "detail": None,
            }, 413)
        if not data:
            return _error_response(EmptyInputError("empty upload body"), 400)
        try:
            (dataset_id, created), report = await run_in_threadpool(_ingest, data)
        except ExplorerError as exc:
            return _error_response(exc, _status_for(exc))
        payload = {"id": dataset_id, **report.to_json_dict()}
        return _json(payload, 201 if created else 200)

    @app.get("/datasets/{dataset_id}/summary")
    def dataset_summary(dataset_id: str):
        with registry.acquire(dataset_id) as entry:
            return _json(summarize(entry.dataset).to_json_dict())

    @app.get("/datasets/{dataset_id}/distribution")
    def dataset_distribution(dataset_id: str, variable: str = Query(...)):
        with registry.acquire(dataset_id) as entry:
            entries = aggregate_by(entry.dataset, variable)
            return _json({"variable": variable, "entries": [e.to_json_dict() for e in entries]})

    @app.post("/datasets/{dataset_id}/filter")
    def dataset_filter(dataset_id: str, payload: dict = Body(...)):
        spec = FilterSpec.from_json_dict(payload)
        with registry.acquire(dataset_id) as entry:
            derived = filter_rows(entry.dataset, spec)
        derived_report = CleaningReport(derived.row_count, derived.row_count, 0, ())
        derived_id, _created = registry.add(derived, derived_report)
        return _json({"id": derived_id, "parent_id": dataset_id, "row_count": derived.row_count})

    @app.get("/datasets/{dataset_id}/rows")
    def dataset_rows(dataset_id: str, offset: int = Query(0, ge=0), limit: int = Query(50, ge=1, le=1000)):
        with registry.acquire(dataset_id) as entry:
            ds = entry.dataset
            return _json({
                "columns": list(ds.column_names()),
                "rows": ds.rows_slice(offset, limit),
                "offset": offset,
                "limit": limit,
                "total": ds.row_count,
            })

    @app.get("/datasets/{dataset_id}/regions")
    def dataset_regions(dataset_id: str):
        with registry.acquire(dataset_id) as entry:
            return _json(region_totals(entry.dataset, centroids).to_json_dict())

    @app.get("/datasets/{dataset_id}/scatter3d")
    def dataset_scatter3d(dataset_id: str, x: str = Query(...), y: str = Query(...), z: str = Query(...),
                          max_points: int = Query(5000, ge=1), seed: int = Query(0)):
        with registry.acquire(dataset_id) as entry:
            return _json(scatter3d_data(entry.dataset, x, y, z, max_points=max_points, seed=seed).to_json_dict())

    @app.get("/datasets/{dataset_id}/correlation")
    def dataset_correlation(dataset_id: str, variables: str = Query(...)):
        names = tuple(v for v in variables.split(",") if v)
        with registry.acquire(dataset_id) as entry:
            return _json(correlation_matrix(entry.dataset, names).to_json_dict())

    @app.post("/datasets/{dataset_id}/regression")
    def dataset_regression(dataset_id: str, payload: dict = Body(default={})):
        spec = ModelSpec.from_json_dict(payload)
        verbose = bool(payload.get("verbose", False))
        with registry.acquire(dataset_id) as entry:
            fit = fit_model(entry.dataset, spec)
            return _json(fit.to_json_dict(include_arrays=verbose))

    @app.get("/datasets/{dataset_id}/density")
    def dataset_density(dataset_id: str, variable: str = Query(...),
                        weighted: bool = Query(False),
                        bandwidth: float | None = Query(None)):
        with registry.acquire(dataset_id) as entry:
            ds = entry.dataset
            values = ds.integer_values(variable)  # 422 for categorical columns
            weights = None
            if weighted:
                weights = ds.integer_values(TOTAL_AFFILIATES)
            estimate = kde(values, weights=weights, bandwidth=bandwidth)
            return _json(estimate.to_json_dict())

    if config.ui_dir and os.path.isdir(config.ui_dir):
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def serve(config: ServiceConfig | None = None) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    config = config or ServiceConfig.from_env()
    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="info")
