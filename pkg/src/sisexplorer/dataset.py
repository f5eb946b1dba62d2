"""Typed, column-oriented store for the SIS affiliate table.

Ingestion is split in two stages.  ``parse_csv`` decodes bytes, matches
headers through the alias table and coerces cell types, rejecting (never
repairing) rows that fail coercion.  ``clean`` then applies the semantic
rules: categorical cells are trimmed and upper-cased, AGE must lie in
[0, 120] and TOTAL_AFFILIATES must be at least 1.  Both stages report
every rejected row with its column, raw value and reason.

Datasets are immutable after construction: all operations here are pure
functions returning new datasets, safe to call concurrently.
"""

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import (
    EmptyInputError,
    EncodingError,
    InsufficientDataError,
    SchemaError,
    ValidationError,
)
from .schema import (
    AGE,
    CATEGORICAL,
    DEFAULT_SCHEMA,
    NONNEGATIVE_INTEGER,
    REGION,
    TOTAL_AFFILIATES,
    ColumnSchema,
    alias_lookup,
    normalize_header,
)


@dataclass(frozen=True)
class Rejection:
    """One reason a row was rejected; a row may have several."""

    row: int            # 0-based data-row index (header excluded)
    column: str | None  # None for structural problems (wrong field count)
    value: str
    reason: str

    def to_json_dict(self) -> dict:
        return {"row": self.row, "column": self.column, "value": self.value, "reason": self.reason}


@dataclass(frozen=True)
class CleaningReport:
    rows_in: int
    rows_kept: int
    rows_rejected: int
    rejections: tuple[Rejection, ...]

    def __post_init__(self):
        if self.rows_kept + self.rows_rejected != self.rows_in:
            raise ValueError("cleaning report arithmetic violated")

    def reason_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for r in self.rejections:
            counts[r.reason] = counts.get(r.reason, 0) + 1
        return dict(sorted(counts.items()))

    def to_json_dict(self) -> dict:
        return {
            "rows_in": self.rows_in,
            "rows_kept": self.rows_kept,
            "rows_rejected": self.rows_rejected,
            "reason_counts": self.reason_counts(),
        }


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable columnar table.

    Integer columns are int64 arrays; categorical columns are int32 code
    arrays indexing into ``levels[name]``, which is always the sorted
    (by code point) list of distinct values actually present.
    """

    schema: tuple[ColumnSchema, ...]
    columns: dict[str, np.ndarray]
    levels: dict[str, tuple[str, ...]]
    row_count: int
    source_digest: str

    def schema_for(self, name: str) -> ColumnSchema:
        for col in self.schema:
            if col.name == name:
                return col
        raise ValidationError(f"unknown column {name!r}")

    def is_categorical(self, name: str) -> bool:
        return self.schema_for(name).kind == CATEGORICAL

    def column_names(self) -> tuple[str, ...]:
        return tuple(col.name for col in self.schema)

    def integer_values(self, name: str) -> np.ndarray:
        if self.is_categorical(name):
            raise ValidationError(f"column {name!r} is categorical, not integer")
        return self.columns[name]

    def codes(self, name: str) -> np.ndarray:
        if not self.is_categorical(name):
            raise ValidationError(f"column {name!r} is not categorical")
        return self.columns[name]

    def decoded(self, name: str) -> list[str]:
        """Categorical column as its string values."""
        lvl = self.levels[name]
        return [lvl[c] for c in self.columns[name]]

    def rows_slice(self, offset: int, limit: int) -> list[list]:
        """Decoded row values in canonical column order, for table display."""
        if offset < 0 or limit < 1:
            raise ValidationError("offset must be >= 0 and limit >= 1")
        stop = min(offset + limit, self.row_count)
        out = []
        for i in range(offset, stop):
            row = []
            for col in self.schema:
                if col.kind == CATEGORICAL:
                    row.append(self.levels[col.name][self.columns[col.name][i]])
                else:
                    row.append(int(self.columns[col.name][i]))
            out.append(row)
        return out

    def to_csv_bytes(self) -> bytes:
        """Canonical serialization: UTF-8, comma, canonical header, original row order."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        names = self.column_names()
        writer.writerow(names)
        cells = []
        for name in names:
            if self.is_categorical(name):
                lvl = self.levels[name]
                cells.append([lvl[c] for c in self.columns[name]])
            else:
                cells.append([str(v) for v in self.columns[name].tolist()])
        for row in zip(*cells) if cells else []:
            writer.writerow(row)
        return buf.getvalue().encode("utf-8")

    def canonical_digest(self) -> str:
        return hashlib.sha256(self.to_csv_bytes()).hexdigest()


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _make_dataset(schema, columns, levels, row_count, digest) -> Dataset:
    return Dataset(
        schema=tuple(schema),
        columns={k: _freeze(v) for k, v in columns.items()},
        levels={k: tuple(v) for k, v in levels.items()},
        row_count=row_count,
        source_digest=digest,
    )


def _make_content_addressed(schema, columns, levels, row_count) -> Dataset:
    """Dataset whose digest is the hash of its own canonical serialization."""
    ds = _make_dataset(schema, columns, levels, row_count, "")
    return Dataset(
        schema=ds.schema, columns=ds.columns, levels=ds.levels,
        row_count=row_count, source_digest=ds.canonical_digest(),
    )


def _encode_categorical(values: list[str]) -> tuple[np.ndarray, list[str]]:
    levels = sorted(set(values))
    index = {v: i for i, v in enumerate(levels)}
    codes = np.fromiter((index[v] for v in values), dtype=np.int32, count=len(values))
    return codes, levels


def parse_csv(data: bytes, schema: tuple[ColumnSchema, ...] = DEFAULT_SCHEMA):
    """Parse CSV bytes into a Dataset plus a report of rejected rows.

    The delimiter (comma or semicolon) is chosen by majority count on the
    header row; headers match canonical columns case-insensitively after
    trimming and accent folding, through each column's alias list.  Rows
    whose cells fail type coercion are rejected, never altered.

    Raises SchemaError for a missing required column, EncodingError for
    undecodable bytes (with the byte offset) and EmptyInputError when no
    data rows are present at all.
    """
    if data.startswith(b"\xef\xbb\xbf"):
        data = data[3:]
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"input is not valid UTF-8 at byte {exc.start}", byte_offset=exc.start) from exc

    first_line_end = text.find("\n")
    header_line = text if first_line_end < 0 else text[:first_line_end]
    delimiter = ";" if header_line.count(";") > header_line.count(",") else ","

    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyInputError("input contains no header row") from None

    aliases = alias_lookup(schema)
    positions: dict[str, int] = {}
    for pos, cell in enumerate(header):
        canonical = aliases.get(normalize_header(cell))
        if canonical is None:
            continue  # unrecognized extra column: ignored
        if canonical in positions:
            raise SchemaError(f"column {canonical} matched by more than one header")
        positions[canonical] = pos
    missing = [col.name for col in schema if col.required and col.name not in positions]
    if missing:
        raise SchemaError(f"required column(s) not found in header: {', '.join(missing)}")

    present = [col for col in schema if col.name in positions]
    n_fields = len(header)
    kept_cells: dict[str, list] = {col.name: [] for col in present}
    rejections: list[Rejection] = []
    rows_in = 0

    for row in reader:
        if not row:
            continue  # blank line
        row_index = rows_in
        rows_in += 1
        problems: list[Rejection] = []
        if len(row) != n_fields:
            problems.append(Rejection(
                row_index, None, delimiter.join(row),
                f"expected {n_fields} fields, found {len(row)}",
            ))
        else:
            coerced = {}
            for col in present:
                cell = row[positions[col.name]]
                if col.kind == NONNEGATIVE_INTEGER:
                    stripped = cell.strip()
                    if stripped == "":
                        problems.append(Rejection(row_index, col.name, cell, f"empty {col.name}"))
                        continue
                    try:
                        value = int(stripped, 10)
                    except ValueError:
                        problems.append(Rejection(row_index, col.name, cell, f"non-integer {col.name}"))
                        continue
                    if value < 0:
                        problems.append(Rejection(row_index, col.name, cell, f"negative {col.name}"))
                        continue
                    coerced[col.name] = value
                else:
                    if cell.strip() == "":
                        problems.append(Rejection(row_index, col.name, cell, f"empty {col.name}"))
                        continue
                    coerced[col.name] = cell
        if problems:
            rejections.extend(problems)
            continue
        for col in present:
            kept_cells[col.name].append(coerced[col.name])

    if rows_in == 0:
        raise EmptyInputError("input contains a header but no data rows")

    row_count = len(kept_cells[present[0].name]) if present else 0
    columns: dict[str, np.ndarray] = {}
    levels: dict[str, list[str]] = {}
    for col in present:
        if col.kind == NONNEGATIVE_INTEGER:
            columns[col.name] = np.asarray(kept_cells[col.name], dtype=np.int64)
        else:
            codes, lvls = _encode_categorical(kept_cells[col.name])
            columns[col.name] = codes
            levels[col.name] = lvls

    digest = hashlib.sha256(data).hexdigest()
    dataset = _make_dataset([c for c in present], columns, levels, row_count, digest)
    report = CleaningReport(rows_in, row_count, rows_in - row_count, tuple(rejections))
    return dataset, report


@dataclass(frozen=True)
class CleaningRules:
    age_min: int = 0
    age_max: int = 120
    min_affiliates: int = 1


def clean(dataset: Dataset, rules: CleaningRules = CleaningRules()):
    """Apply the semantic cleaning rules; always succeeds, possibly keeping zero rows.

    Categorical cells are trimmed and upper-cased; AGE outside
    [age_min, age_max] and TOTAL_AFFILIATES below min_affiliates are
    rejected.  Level lists are recomputed from the surviving rows and the
    digest becomes the content hash of the cleaned canonical serialization.
    """
    keep = np.ones(dataset.row_count, dtype=bool)
    rejections: list[Rejection] = []

    if AGE in dataset.columns:
        ages = dataset.columns[AGE]
        bad = (ages < rules.age_min) | (ages > rules.age_max)
        for i in np.nonzero(bad)[0]:
            rejections.append(Rejection(int(i), AGE, str(int(ages[i])), "AGE out of range"))
        keep &= ~bad
    if TOTAL_AFFILIATES in dataset.columns:
        totals = dataset.columns[TOTAL_AFFILIATES]
        bad = totals < rules.min_affiliates
        for i in np.nonzero(bad)[0]:
            rejections.append(Rejection(int(i), TOTAL_AFFILIATES, str(int(totals[i])), "TOTAL_AFFILIATES out of range"))
        keep &= ~bad

    rejections.sort(key=lambda r: (r.row, r.column or ""))
    kept_idx = np.nonzero(keep)[0]

    columns: dict[str, np.ndarray] = {}
    levels: dict[str, list[str]] = {}
    for col in dataset.schema:
        arr = dataset.columns[col.name][kept_idx]
        if col.kind == CATEGORICAL:
            old_levels = dataset.levels[col.name]
            normalized = [lvl.strip().upper() for lvl in old_levels]
            values = [normalized[c] for c in arr]
            codes, lvls = _encode_categorical(values) if values else (np.empty(0, np.int32), [])
            columns[col.name] = codes
            levels[col.name] = lvls
        else:
            columns[col.name] = arr.copy()

    cleaned = _make_content_addressed(dataset.schema, columns, levels, int(kept_idx.size))
    report = CleaningReport(dataset.row_count, int(kept_idx.size), int(dataset.row_count - kept_idx.size), tuple(rejections))
    return cleaned, report


def take_rows(dataset: Dataset, indices) -> Dataset:
    """New dataset holding the given rows (in the given order); levels recomputed."""
    idx = np.asarray(indices, dtype=np.int64)
    columns: dict[str, np.ndarray] = {}
    levels: dict[str, list[str]] = {}
    for col in dataset.schema:
        arr = dataset.columns[col.name][idx]
        if col.kind == CATEGORICAL:
            old_levels = dataset.levels[col.name]
            uniq, inverse = np.unique(arr, return_inverse=True)
            columns[col.name] = inverse.astype(np.int32)
            levels[col.name] = [old_levels[u] for u in uniq]
        else:
            columns[col.name] = arr
    return _make_content_addressed(dataset.schema, columns, levels, int(idx.size))


EQUALS = "equals"
IN_SET = "in-set"
RANGE = "range"


@dataclass(frozen=True)
class FilterClause:
    column: str
    op: str
    value: object  # str for equals, tuple[str, ...] for in-set, (lo, hi) for range


@dataclass(frozen=True)
class FilterSpec:
    """Conjunction of clauses; an empty clause list selects every row."""

    clauses: tuple[FilterClause, ...] = ()

    @classmethod
    def from_json_dict(cls, obj: dict) -> "FilterSpec":
        if not isinstance(obj, dict) or not isinstance(obj.get("clauses", []), list):
            raise ValidationError("filter spec must be an object with a 'clauses' array")
        clauses = []
        for raw in obj.get("clauses", []):
            if not isinstance(raw, dict) or "column" not in raw or "op" not in raw:
                raise ValidationError("each clause needs 'column' and 'op'")
            op = raw["op"]
            if op == EQUALS:
                if "value" not in raw or not isinstance(raw["value"], str):
                    raise ValidationError("equals clause needs a string 'value'")
                clauses.append(FilterClause(raw["column"], EQUALS, raw["value"]))
            elif op == IN_SET:
                values = raw.get("values")
                if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
                    raise ValidationError("in-set clause needs a string array 'values'")
                clauses.append(FilterClause(raw["column"], IN_SET, tuple(values)))
            elif op == RANGE:
                lo, hi = raw.get("min"), raw.get("max")
                for bound in (lo, hi):
                    if bound is not None and not isinstance(bound, int):
                        raise ValidationError("range bounds must be integers or null")
                clauses.append(FilterClause(raw["column"], RANGE, (lo, hi)))
            else:
                raise ValidationError(f"unknown filter operator {op!r}")
        return cls(tuple(clauses))

    def to_json_dict(self) -> dict:
        out = []
        for c in self.clauses:
            if c.op == EQUALS:
                out.append({"column": c.column, "op": c.op, "value": c.value})
            elif c.op == IN_SET:
                out.append({"column": c.column, "op": c.op, "values": list(c.value)})
            else:
                lo, hi = c.value
                out.append({"column": c.column, "op": c.op, "min": lo, "max": hi})
        return {"clauses": out}


def _clause_mask(dataset: Dataset, clause: FilterClause) -> np.ndarray:
    col = dataset.schema_for(clause.column)
    if clause.op in (EQUALS, IN_SET):
        if col.kind != CATEGORICAL:
            raise ValidationError(f"operator {clause.op} applies only to categorical columns, not {col.name}")
        lvls = dataset.levels[col.name]
        wanted = (clause.value,) if clause.op == EQUALS else clause.value
        codes = {lvls.index(v) for v in wanted if v in lvls}
        if not codes:
            return np.zeros(dataset.row_count, dtype=bool)
        return np.isin(dataset.columns[col.name], sorted(codes))
    if clause.op == RANGE:
        if col.kind != NONNEGATIVE_INTEGER:
            raise ValidationError(f"range applies only to integer columns, not {col.name}")
        lo, hi = clause.value
        arr = dataset.columns[col.name]
        mask = np.ones(dataset.row_count, dtype=bool)
        if lo is not None:
            mask &= arr >= lo
        if hi is not None:
            mask &= arr <= hi
        return mask
    raise ValidationError(f"unknown filter operator {clause.op!r}")


def filter_rows(dataset: Dataset, spec: FilterSpec) -> Dataset:
    """Rows satisfying every clause, in original order. Idempotent by construction."""
    if not spec.clauses:
        return dataset
    mask = np.ones(dataset.row_count, dtype=bool)
    for clause in spec.clauses:
        mask &= _clause_mask(dataset, clause)
    return take_rows(dataset, np.nonzero(mask)[0])


def interpolated_quantile(sorted_values, p: float) -> float:
    """Quantile at rank h = (n-1)p + 1 with linear interpolation between order statistics."""
    n = len(sorted_values)
    if n == 0:
        raise InsufficientDataError("quantile of an empty vector")
    if n == 1:
        return float(sorted_values[0])
    h = (n - 1) * p
    lo = int(math.floor(h))
    hi = min(lo + 1, n - 1)
    frac = h - lo
    return float(sorted_values[lo]) + (float(sorted_values[hi]) - float(sorted_values[lo])) * frac


@dataclass(frozen=True)
class IntegerSummary:
    minimum: int
    maximum: int
    mean: float
    median: float
    q25: float
    q75: float

    def to_json_dict(self) -> dict:
        return {
            "min": self.minimum, "max": self.maximum, "mean": self.mean,
            "median": self.median, "q25": self.q25, "q75": self.q75,
        }


@dataclass(frozen=True)
class CategoricalSummary:
    counts: dict[str, int]
    affiliate_totals: dict[str, int] | None

    def to_json_dict(self) -> dict:
        return {"counts": self.counts, "affiliate_totals": self.affiliate_totals}


@dataclass(frozen=True)
class SummaryReport:
    row_count: int
    integer_columns: dict[str, IntegerSummary | None]
    categorical_columns: dict[str, CategoricalSummary]

    def to_json_dict(self) -> dict:
        return {
            "row_count": self.row_count,
            "integer_columns": {
                k: (v.to_json_dict() if v is not None else None)
                for k, v in self.integer_columns.items()
            },
            "categorical_columns": {k: v.to_json_dict() for k, v in self.categorical_columns.items()},
        }


def summarize(dataset: Dataset) -> SummaryReport:
    """Per-column statistics; empty columns yield None instead of fabricated zeros."""
    integers: dict[str, IntegerSummary | None] = {}
    categoricals: dict[str, CategoricalSummary] = {}
    weights = dataset.columns.get(TOTAL_AFFILIATES)
    for col in dataset.schema:
        if col.kind == NONNEGATIVE_INTEGER:
            arr = dataset.columns[col.name]
            if arr.size == 0:
                integers[col.name] = None
                continue
            s = np.sort(arr)
            integers[col.name] = IntegerSummary(
                minimum=int(s[0]),
                maximum=int(s[-1]),
                mean=float(arr.mean()),
                median=interpolated_quantile(s, 0.5),
                q25=interpolated_quantile(s, 0.25),
                q75=interpolated_quantile(s, 0.75),
            )
        else:
            lvls = dataset.levels[col.name]
            codes = dataset.columns[col.name]
            counts = np.bincount(codes, minlength=len(lvls)) if codes.size else np.zeros(len(lvls), np.int64)
            totals = None
            if weights is not None:
                sums = np.bincount(codes, weights=weights, minlength=len(lvls)) if codes.size else np.zeros(len(lvls))
                totals = {lvl: int(sums[i]) for i, lvl in enumerate(lvls)}
            categoricals[col.name] = CategoricalSummary(
                counts={lvl: int(counts[i]) for i, lvl in enumerate(lvls)},
                affiliate_totals=totals,
            )
    return SummaryReport(dataset.row_count, integers, categoricals)


@dataclass(frozen=True)
class AggregateEntry:
    level: str
    record_count: int
    affiliate_total: int

    def to_json_dict(self) -> dict:
        return {"level": self.level, "record_count": self.record_count, "affiliate_total": self.affiliate_total}


def aggregate_by(dataset: Dataset, variable: str) -> tuple[AggregateEntry, ...]:
    """Level-by-level record counts and TOTAL_AFFILIATES sums, sorted by level."""
    col = dataset.schema_for(variable)
    if col.kind != CATEGORICAL:
        raise ValidationError(f"aggregate_by requires a categorical column, {variable} is integer")
    lvls = dataset.levels[variable]
    codes = dataset.columns[variable]
    counts = np.bincount(codes, minlength=len(lvls)) if codes.size else np.zeros(len(lvls), np.int64)
    weights = dataset.columns.get(TOTAL_AFFILIATES)
    if weights is not None and codes.size:
        sums = np.bincount(codes, weights=weights, minlength=len(lvls))
    else:
        sums = np.zeros(len(lvls))
    return tuple(
        AggregateEntry(lvl, int(counts[i]), int(sums[i]))
        for i, lvl in enumerate(lvls)
    )


@dataclass(frozen=True)
class RegionAggregate:
    region: str
    total_affiliates: int
    record_count: int
    lat: float | None
    lon: float | None

    def to_json_dict(self) -> dict:
        return {
            "region": self.region, "total_affiliates": self.total_affiliates,
            "record_count": self.record_count, "lat": self.lat, "lon": self.lon,
        }


@dataclass(frozen=True)
class RegionTotalsResult:
    regions: tuple[RegionAggregate, ...]
    warnings: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "regions": [r.to_json_dict() for r in self.regions],
            "warnings": list(self.warnings),
        }


def load_region_centroids(path: str | None = None) -> dict[str, tuple[float, float]]:
    """Region -> (lat, lon) map; defaults to the centroid table shipped with the package."""
    if path is None:
        raw = resources.files("sisexplorer.data").joinpath("region_centroids.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    entries = json.loads(raw)
    return {e["region"]: (float(e["lat"]), float(e["lon"])) for e in entries}


def region_totals(dataset: Dataset, centroids: dict[str, tuple[float, float]] | None = None) -> RegionTotalsResult:
    """Affiliate totals per region joined with centroid positions.

    Regions missing from the centroid table still appear, with null
    position and a warning naming them.
    """
    if centroids is None:
        centroids = load_region_centroids()
    aggregates = aggregate_by(dataset, REGION)
    out = []
    warnings = []
    for entry in aggregates:
        pos = centroids.get(entry.level)
        if pos is None:
            warnings.append(f"region {entry.level} has no known position")
            out.append(RegionAggregate(entry.level, entry.affiliate_total, entry.record_count, None, None))
        else:
            out.append(RegionAggregate(entry.level, entry.affiliate_total, entry.record_count, pos[0], pos[1]))
    return RegionTotalsResult(tuple(out), tuple(warnings))
