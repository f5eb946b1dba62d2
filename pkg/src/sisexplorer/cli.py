"""Batch command line over the library: every analysis the service offers, as files.

Subcommands mirror the HTTP endpoints (summary, distribution, filter,
fit, density, regions) plus sample-size, sample and serve.  JSON output
is canonical, so repeated runs over the same inputs are byte-identical
and match the service's responses.

Exit codes: 0 success, 1 validation/usage error, 2 I/O error.
"""

import argparse
import os
import sys

from .dataset import (
    FilterClause,
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
from .errors import ExplorerError, ValidationError
from .jsonutil import canonical_json
from .regression import ModelSpec, correlation_matrix, fit_model, scatter3d_data
from .sampling import SampleSizeParams, draw_sample, sample_size, z_value
from .schema import TOTAL_AFFILIATES


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_dataset(path: str):
    with open(path, "rb") as fh:
        data = fh.read()
    parsed, _ = parse_csv(data)
    cleaned, report = clean(parsed)
    return cleaned, report


def _emit_text(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _emit_json(payload, output: str | None) -> None:
    _emit_text(canonical_json(payload), output)


def _use_color() -> bool:
    return sys.stdout.isatty() and not os.environ.get("NO_COLOR")


def _stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    if p < 0.1:
        return "."
    return ""


def _coefficient_table(fit_doc: dict) -> str:
    rows = fit_doc["terms"]
    width = max([len(r["label"]) for r in rows] + [12])
    header = f"{'term':<{width}}  {'estimate':>13} {'std.error':>13} {'t value':>11} {'p value':>12}"
    if _use_color():
        header = f"\x1b[1m{header}\x1b[0m"
    lines = [header]
    for r in rows:
        if r["aliased"]:
            lines.append(f"{r['label']:<{width}}  {'(aliased)':>13}")
            continue
        lines.append(
            f"{r['label']:<{width}}  {r['estimate']:>13.6g} {r['std_error']:>13.6g} "
            f"{r['t']:>11.4f} {r['p_display']:>12} {_stars(r['p'])}"
        )
    model = fit_doc["model"]
    lines.append("---")
    lines.append("Signif. codes: '***' 0.001, '**' 0.01, '*' 0.05, '.' 0.1")
    lines.append(
        f"n = {model['n']}, rank = {model['rank']}, residual df = {model['df_residual']}, "
        f"sigma2 = {model['sigma2']:.6g}"
    )
    lines.append(
        f"R-squared = {model['r_squared']:.6g}, adjusted = {model['adj_r_squared']:.6g}"
    )
    if model["f_statistic"] is not None:
        p_text = model["f_pvalue_display"]
        if not p_text.startswith("<"):
            p_text = f"= {p_text}"
        lines.append(
            f"F = {model['f_statistic']:.6g} on {model['df_model']} and {model['df_residual']} df, p {p_text}"
        )
    return "\n".join(lines)


def _parse_filter_flags(args) -> FilterSpec:
    clauses = []
    for raw in args.equals or []:
        column, sep, value = raw.partition("=")
        if not sep:
            raise ValidationError(f"--equals expects COLUMN=VALUE, got {raw!r}")
        clauses.append(FilterClause(column, "equals", value))
    for raw in args.in_set or []:
        column, sep, values = raw.partition("=")
        if not sep or not values:
            raise ValidationError(f"--in expects COLUMN=V1|V2|..., got {raw!r}")
        clauses.append(FilterClause(column, "in-set", tuple(values.split("|"))))
    for raw in args.range or []:
        column, sep, bounds = raw.partition("=")
        lo_s, sep2, hi_s = bounds.partition(":")
        if not sep or not sep2:
            raise ValidationError(f"--range expects COLUMN=LO:HI, got {raw!r}")
        try:
            lo = int(lo_s) if lo_s else None
            hi = int(hi_s) if hi_s else None
        except ValueError:
            raise ValidationError(f"--range bounds must be integers, got {raw!r}") from None
        clauses.append(FilterClause(column, "range", (lo, hi)))
    return FilterSpec(tuple(clauses))


def _cmd_sample_size(args) -> int:
    params = SampleSizeParams(
        population_size=args.population,
        confidence_level=args.confidence,
        margin_of_error=args.margin,
        proportion=args.proportion,
    )
    n = sample_size(params)
    z = z_value(args.confidence)
    sys.stdout.write(f"n = {n}\nz = {z:.6f}\n")
    return 0


def _cmd_sample(args) -> int:
    dataset, _ = _load_dataset(args.input)
    sampled = draw_sample(dataset, args.n, args.seed)
    text = sampled.to_csv_bytes().decode("utf-8")
    _emit_text(text, args.output)
    return 0


def _cmd_summary(args) -> int:
    dataset, _ = _load_dataset(args.input)
    _emit_json(summarize(dataset).to_json_dict(), args.output)
    return 0


def _cmd_distribution(args) -> int:
    dataset, _ = _load_dataset(args.input)
    entries = aggregate_by(dataset, args.variable)
    _emit_json({"variable": args.variable, "entries": [e.to_json_dict() for e in entries]}, args.output)
    return 0


def _cmd_filter(args) -> int:
    dataset, _ = _load_dataset(args.input)
    spec = _parse_filter_flags(args)
    derived = filter_rows(dataset, spec)
    if args.csv_out:
        _emit_text(derived.to_csv_bytes().decode("utf-8"), args.csv_out)
    payload = {
        "id": derived.source_digest,
        "parent_id": dataset.source_digest,
        "row_count": derived.row_count,
    }
    _emit_json(payload, args.output)
    return 0


def _cmd_fit(args) -> int:
    dataset, _ = _load_dataset(args.input)
    kwargs = {}
    if args.response:
        kwargs["response"] = args.response
    if args.predictors:
        kwargs["predictors"] = tuple(args.predictors.split(","))
    if args.no_intercept:
        kwargs["intercept"] = False
    spec = ModelSpec(**kwargs)
    fit = fit_model(dataset, spec)
    doc = fit.to_json_dict(include_arrays=args.arrays)
    if args.output == "-":
        _emit_json(doc, None)
    else:
        sys.stdout.write(_coefficient_table(doc) + "\n")
        if args.output:
            _emit_json(doc, args.output)
    return 0


def _cmd_rows(args) -> int:
    dataset, _ = _load_dataset(args.input)
    payload = {
        "columns": list(dataset.column_names()),
        "rows": dataset.rows_slice(args.offset, args.limit),
        "offset": args.offset,
        "limit": args.limit,
        "total": dataset.row_count,
    }
    _emit_json(payload, args.output)
    return 0


def _cmd_scatter3d(args) -> int:
    dataset, _ = _load_dataset(args.input)
    result = scatter3d_data(dataset, args.x, args.y, args.z, max_points=args.max_points, seed=args.seed)
    _emit_json(result.to_json_dict(), args.output)
    return 0


def _cmd_correlation(args) -> int:
    dataset, _ = _load_dataset(args.input)
    names = tuple(v for v in args.variables.split(",") if v)
    _emit_json(correlation_matrix(dataset, names).to_json_dict(), args.output)
    return 0


def _cmd_density(args) -> int:
    dataset, _ = _load_dataset(args.input)
    values = dataset.integer_values(args.variable)
    weights = dataset.integer_values(TOTAL_AFFILIATES) if args.weighted else None
    estimate = kde(values, weights=weights, bandwidth=args.bandwidth)
    _emit_json(estimate.to_json_dict(), args.output)
    return 0


def _cmd_regions(args) -> int:
    dataset, _ = _load_dataset(args.input)
    centroids = load_region_centroids(args.centroids)
    _emit_json(region_totals(dataset, centroids).to_json_dict(), args.output)
    return 0


def _cmd_serve(args) -> int:
    from .service import ServiceConfig, serve

    config = ServiceConfig.from_env()
    if args.host:
        config.host = args.host
    if args.port is not None:
        config.port = args.port
    if args.ui_dir:
        config.ui_dir = args.ui_dir
    serve(config)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="sisexplorer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample-size", help="compute the survey sample size and z value")
    p.add_argument("--population", type=int, required=True)
    p.add_argument("--confidence", type=float, required=True)
    p.add_argument("--margin", type=float, required=True)
    p.add_argument("--proportion", type=float, default=0.5)
    p.set_defaults(handler=_cmd_sample_size)

    p = sub.add_parser("sample", help="draw a seeded random sample as CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_sample)

    p = sub.add_parser("summary", help="per-column summary as JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_summary)

    p = sub.add_parser("distribution", help="level counts and affiliate totals for a categorical column")
    p.add_argument("--input", required=True)
    p.add_argument("--variable", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_distribution)

    p = sub.add_parser("filter", help="filter rows; prints the derived dataset id and size")
    p.add_argument("--input", required=True)
    p.add_argument("--equals", action="append", metavar="COLUMN=VALUE")
    p.add_argument("--in", dest="in_set", action="append", metavar="COLUMN=V1|V2")
    p.add_argument("--range", action="append", metavar="COLUMN=LO:HI")
    p.add_argument("--csv-out", default=None, help="also write the filtered rows as CSV")
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_filter)

    p = sub.add_parser("fit", help="multiple linear regression with inference")
    p.add_argument("--input", required=True)
    p.add_argument("--response", default=None)
    p.add_argument("--predictors", default=None, help="comma-separated predictor columns")
    p.add_argument("--no-intercept", action="store_true")
    p.add_argument("--arrays", action="store_true", help="include fitted/residual arrays in the JSON")
    p.add_argument("--output", default=None, help="write the fit JSON here ('-' prints JSON instead of the table)")
    p.set_defaults(handler=_cmd_fit)

    p = sub.add_parser("rows", help="decoded row values as JSON (paginated)")
    p.add_argument("--input", required=True)
    p.add_argument("--offset", type=int, default=0)
    p.add_argument("--limit", type=int, default=50)
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_rows)

    p = sub.add_parser("scatter3d", help="3D scatter points plus fitted-plane coefficients")
    p.add_argument("--input", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--z", required=True)
    p.add_argument("--max-points", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_scatter3d)

    p = sub.add_parser("correlation", help="Pearson correlation matrix over encoded variables")
    p.add_argument("--input", required=True)
    p.add_argument("--variables", required=True, help="comma-separated column names")
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_correlation)

    p = sub.add_parser("density", help="kernel density estimate for an integer column")
    p.add_argument("--input", required=True)
    p.add_argument("--variable", required=True)
    p.add_argument("--weighted", action="store_true", help="weight records by TOTAL_AFFILIATES")
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_density)

    p = sub.add_parser("regions", help="affiliate totals per region with map positions")
    p.add_argument("--input", required=True)
    p.add_argument("--centroids", default=None, help="path to a custom centroid JSON file")
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_regions)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--ui-dir", default=None)
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits directly for usage errors and --help
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except ExplorerError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
