"""Differential harness: service responses must equal direct library results byte for byte."""

import json

import numpy as np

from sisexplorer import (
    AGE,
    INSURANCE_PLAN,
    REGION,
    TOTAL_AFFILIATES,
    FilterSpec,
    ModelSpec,
    aggregate_by,
    clean,
    correlation_matrix,
    filter_rows,
    fit_model,
    kde,
    parse_csv,
    region_totals,
    scatter3d_data,
    summarize,
)
from sisexplorer.errors import ExplorerError
from sisexplorer.jsonutil import canonical_json

from datagen import random_affiliates_csv

OPS = ("summary", "distribution", "filter", "regions", "regression", "density",
       "rows", "correlation", "scatter3d")


def run_sequence(client, seed: int, steps: int = 8) -> list[tuple[str, bytes]]:
    """One randomized upload-and-analyze session.

    Every response is checked against the equivalent direct library call
    on a dataset tracked in parallel; the transcript of (operation,
    response bytes) is returned so callers can assert determinism.
    """
    rng = np.random.default_rng(seed)
    transcript: list[tuple[str, bytes]] = []
    data = random_affiliates_csv(rng, int(rng.integers(20, 120)))
    parsed, _ = parse_csv(data)
    expected, _ = clean(parsed)

    resp = client.post("/datasets", content=data)
    assert resp.status_code in (200, 201)
    doc = json.loads(resp.content)
    assert doc["id"] == expected.source_digest
    assert doc["rows_kept"] == expected.row_count
    transcript.append(("upload", resp.content))

    datasets = {doc["id"]: expected}
    current = doc["id"]

    for _ in range(steps):
        op = OPS[rng.integers(len(OPS))]
        ds = datasets[current]
        if op == "summary":
            resp = client.get(f"/datasets/{current}/summary")
            want = canonical_json(summarize(ds).to_json_dict()).encode()
            assert resp.status_code == 200 and resp.content == want
        elif op == "distribution":
            variable = (REGION, INSURANCE_PLAN)[rng.integers(2)]
            resp = client.get(f"/datasets/{current}/distribution", params={"variable": variable})
            want = canonical_json({
                "variable": variable,
                "entries": [e.to_json_dict() for e in aggregate_by(ds, variable)],
            }).encode()
            assert resp.status_code == 200 and resp.content == want
        elif op == "filter":
            lvls = ds.levels[REGION]
            if not lvls:
                continue
            lo = int(rng.integers(0, 60))
            spec_doc = {"clauses": [
                {"column": REGION, "op": "in-set", "values": list(lvls[: max(1, len(lvls) // 2)])},
                {"column": AGE, "op": "range", "min": lo, "max": lo + 40},
            ]}
            resp = client.post(f"/datasets/{current}/filter", json=spec_doc)
            derived = filter_rows(ds, FilterSpec.from_json_dict(spec_doc))
            want = canonical_json({
                "id": derived.source_digest, "parent_id": current, "row_count": derived.row_count,
            }).encode()
            assert resp.status_code == 200 and resp.content == want
            datasets[derived.source_digest] = derived
            if derived.row_count > 0 and rng.integers(2):
                current = derived.source_digest
        elif op == "regions":
            resp = client.get(f"/datasets/{current}/regions")
            want = canonical_json(region_totals(ds).to_json_dict()).encode()
            assert resp.status_code == 200 and resp.content == want
        elif op == "regression":
            spec_doc = {"predictors": [AGE, REGION]} if rng.integers(2) else {"predictors": [AGE]}
            resp = client.post(f"/datasets/{current}/regression", json=spec_doc)
            try:
                fit = fit_model(ds, ModelSpec.from_json_dict(spec_doc))
            except ExplorerError:
                assert resp.status_code == 422
            else:
                want = canonical_json(fit.to_json_dict()).encode()
                assert resp.status_code == 200 and resp.content == want
        elif op == "density":
            variable = (AGE, TOTAL_AFFILIATES)[rng.integers(2)]
            weighted = bool(rng.integers(2))
            resp = client.get(
                f"/datasets/{current}/density",
                params={"variable": variable, "weighted": str(weighted).lower()},
            )
            try:
                weights = ds.integer_values(TOTAL_AFFILIATES) if weighted else None
                estimate = kde(ds.integer_values(variable), weights=weights)
            except ExplorerError:
                assert resp.status_code == 422
            else:
                want = canonical_json(estimate.to_json_dict()).encode()
                assert resp.status_code == 200 and resp.content == want
        elif op == "rows":
            offset = int(rng.integers(0, max(1, ds.row_count)))
            limit = int(rng.integers(1, 40))
            resp = client.get(f"/datasets/{current}/rows", params={"offset": offset, "limit": limit})
            want = canonical_json({
                "columns": list(ds.column_names()),
                "rows": ds.rows_slice(offset, limit),
                "offset": offset, "limit": limit, "total": ds.row_count,
            }).encode()
            assert resp.status_code == 200 and resp.content == want
        elif op == "correlation":
            variables = (AGE, TOTAL_AFFILIATES)
            resp = client.get(f"/datasets/{current}/correlation", params={"variables": ",".join(variables)})
            try:
                result = correlation_matrix(ds, variables)
            except ExplorerError:
                assert resp.status_code == 422
            else:
                want = canonical_json(result.to_json_dict()).encode()
                assert resp.status_code == 200 and resp.content == want
        else:
            resp = client.get(
                f"/datasets/{current}/scatter3d",
                params={"x": AGE, "y": REGION, "z": TOTAL_AFFILIATES, "max_points": 40, "seed": 3},
            )
            try:
                result = scatter3d_data(ds, AGE, REGION, TOTAL_AFFILIATES, max_points=40, seed=3)
            except ExplorerError:
                assert resp.status_code == 422
            else:
                want = canonical_json(result.to_json_dict()).encode()
                assert resp.status_code == 200 and resp.content == want
        transcript.append((op, resp.content))
    return transcript
