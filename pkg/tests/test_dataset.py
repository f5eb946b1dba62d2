import numpy as np
import pytest

from sisexplorer import (
    AGE,
    INSURANCE_PLAN,
    REGION,
    TOTAL_AFFILIATES,
    FilterClause,
    FilterSpec,
    aggregate_by,
    clean,
    filter_rows,
    interpolated_quantile,
    load_region_centroids,
    parse_csv,
    region_totals,
    summarize,
)
from sisexplorer.errors import (
    EmptyInputError,
    EncodingError,
    SchemaError,
    ValidationError,
)

SIMPLE = (
    "REGION,AGE,NATIONAL FOREIGN,INEI SCOPE,INSURANCE PLAN,TOTAL AFFILIATES\n"
    "PUNO,25,PERUVIAN,URBAN,SIS FREE,10\n"
    "LIMA,40,PERUVIAN,RURAL,SIS FOR ALL,5\n"
    "PUNO,33,FOREIGN,URBAN,SIS FREE,7\n"
).encode()


class TestParseCsv:
    def test_spanish_aliases_map_to_canonical_columns(self):
        data = (
            "REGION,EDAD,NACIONAL EXTRANJERO,AMBITO INEI,PLAN DE SEGURO,TOTAL AFILIADOS\n"
            "PUNO,25,PERUANO,URBANO,SIS GRATUITO,10\n"
            "LIMA,40,PERUANO,RURAL,SIS PARA TODOS,5\n"
            "PUNO,33,EXTRANJERO,URBANO,SIS GRATUITO,7\n"
        ).encode()
        dataset, report = parse_csv(data)
        assert dataset.row_count == 3
        assert report.rows_rejected == 0
        assert dataset.column_names() == (
            "REGION", "AGE", "NATIONAL_FOREIGN", "INEI_SCOPE", "INSURANCE_PLAN", "TOTAL_AFFILIATES",
        )

    def test_accented_headers_and_case(self):
        data = (
            "Región,Edad,Nacional_Extranjero,Ámbito_INEI,Plan_de_Seguro,Total_Afiliados\n"
            "PUNO,25,PERUANO,URBANO,SIS GRATUITO,10\n"
        ).encode()
        dataset, _ = parse_csv(data)
        assert dataset.row_count == 1

    def test_semicolon_delimiter_detected(self):
        data = SIMPLE.replace(b",", b";")
        dataset, _ = parse_csv(data)
        assert dataset.row_count == 3
        assert dataset.levels[REGION] == ("LIMA", "PUNO")

    def test_bom_is_stripped(self):
        dataset, _ = parse_csv(b"\xef\xbb\xbf" + SIMPLE)
        assert dataset.row_count == 3

    def test_non_integer_age_rejected_others_kept(self):
        data = SIMPLE + b"CUSCO,abc,PERUVIAN,URBAN,SIS NRUS,4\n"
        dataset, report = parse_csv(data)
        assert dataset.row_count == 3
        assert report.rows_in == 4
        assert report.rows_rejected == 1
        rejection = report.rejections[0]
        assert rejection.column == AGE
        assert rejection.reason == "non-integer AGE"
        assert rejection.value == "abc"

    def test_negative_and_empty_cells_rejected(self):
        data = SIMPLE + b"CUSCO,-3,PERUVIAN,URBAN,SIS NRUS,4\nCUSCO,20,,URBAN,SIS NRUS,4\n"
        dataset, report = parse_csv(data)
        assert dataset.row_count == 3
        reasons = {r.reason for r in report.rejections}
        assert reasons == {"negative AGE", "empty NATIONAL_FOREIGN"}

    def test_wrong_field_count_rejected(self):
        data = SIMPLE + b"CUSCO,20,PERUVIAN\n"
        dataset, report = parse_csv(data)
        assert dataset.row_count == 3
        assert report.rows_rejected == 1
        assert report.rejections[0].column is None

    def test_missing_required_column_names_it(self):
        data = b"REGION,AGE\nPUNO,25\n"
        with pytest.raises(SchemaError, match="TOTAL_AFFILIATES"):
            parse_csv(data)

    def test_bad_utf8_reports_offset(self):
        data = SIMPLE[:20] + b"\xff\xfe" + SIMPLE[20:]
        with pytest.raises(EncodingError) as err:
            parse_csv(data)
        assert err.value.byte_offset == 20

    def test_header_only_is_empty_input(self):
        with pytest.raises(EmptyInputError):
            parse_csv(b"REGION,AGE,NATIONAL FOREIGN,INEI SCOPE,INSURANCE PLAN,TOTAL AFFILIATES\n")

    def test_extra_columns_ignored(self):
        data = (
            "UBIGEO,REGION,AGE,NATIONAL FOREIGN,INEI SCOPE,INSURANCE PLAN,TOTAL AFFILIATES\n"
            "010101,PUNO,25,PERUVIAN,URBAN,SIS FREE,10\n"
        ).encode()
        dataset, _ = parse_csv(data)
        assert dataset.row_count == 1
        assert "UBIGEO" not in dataset.columns

    def test_levels_sorted_and_complete(self, make_affiliates_csv):
        rng = np.random.default_rng(3)
        dataset, _ = parse_csv(make_affiliates_csv(rng, 200))
        for name, lvls in dataset.levels.items():
            assert list(lvls) == sorted(set(lvls))
            assert max(dataset.columns[name]) < len(lvls)


class TestClean:
    def test_trims_and_uppercases(self):
        data = SIMPLE.replace(b"PUNO,25", b" puno ,25")
        dataset, _ = parse_csv(data)
        cleaned, report = clean(dataset)
        assert report.rows_rejected == 0
        assert "PUNO" in cleaned.levels[REGION]
        assert all(lvl == lvl.strip().upper() for lvl in cleaned.levels[REGION])

    def test_age_out_of_range_rejected(self):
        data = SIMPLE + b"CUSCO,150,PERUVIAN,URBAN,SIS NRUS,4\n"
        dataset, _ = parse_csv(data)
        cleaned, report = clean(dataset)
        assert cleaned.row_count == 3
        assert report.rejections[0].reason == "AGE out of range"
        assert report.rejections[0].value == "150"

    def test_zero_affiliates_rejected(self):
        data = SIMPLE + b"CUSCO,20,PERUVIAN,URBAN,SIS NRUS,0\n"
        dataset, _ = parse_csv(data)
        cleaned, report = clean(dataset)
        assert cleaned.row_count == 3
        assert report.rejections[0].reason == "TOTAL_AFFILIATES out of range"

    def test_clean_dataset_is_identity(self):
        dataset, _ = parse_csv(SIMPLE)
        cleaned, report = clean(dataset)
        assert report.rows_rejected == 0
        assert cleaned.to_csv_bytes() == dataset.to_csv_bytes()

    def test_report_arithmetic_always_holds(self, make_affiliates_csv):
        rng = np.random.default_rng(13)
        base = make_affiliates_csv(rng, 50).decode().splitlines()
        # splice in assorted dirty rows
        dirty = base[:1] + base[1:] + [
            "PUNO,999,PERUVIAN,URBAN,SIS FREE,3",
            "PUNO,12,PERUVIAN,URBAN,SIS FREE,0",
            "LIMA,xx,PERUVIAN,URBAN,SIS FREE,5",
        ]
        dataset, parse_report = parse_csv(("\n".join(dirty) + "\n").encode())
        assert parse_report.rows_kept + parse_report.rows_rejected == parse_report.rows_in
        cleaned, clean_report = clean(dataset)
        assert clean_report.rows_kept + clean_report.rows_rejected == clean_report.rows_in
        assert clean_report.rows_in == dataset.row_count
        rejected_rows = {r.row for r in clean_report.rejections}
        assert len(rejected_rows) == clean_report.rows_rejected

    def test_can_reject_all_rows(self):
        data = (
            "REGION,AGE,NATIONAL FOREIGN,INEI SCOPE,INSURANCE PLAN,TOTAL AFFILIATES\n"
            "PUNO,500,PERUVIAN,URBAN,SIS FREE,10\n"
        ).encode()
        dataset, _ = parse_csv(data)
        cleaned, report = clean(dataset)
        assert cleaned.row_count == 0
        assert report.rows_rejected == 1
        # downstream operations still work on the empty dataset
        summary = summarize(cleaned)
        assert summary.integer_columns[AGE] is None


class TestRoundTrip:
    def test_serialize_then_parse_is_identical(self, fixture_dataset):
        recovered, report = parse_csv(fixture_dataset.to_csv_bytes())
        assert report.rows_rejected == 0
        assert recovered.to_csv_bytes() == fixture_dataset.to_csv_bytes()
        assert recovered.canonical_digest() == fixture_dataset.canonical_digest()


class TestFilter:
    def test_empty_spec_is_identity(self, fixture_dataset):
        assert filter_rows(fixture_dataset, FilterSpec()) is fixture_dataset

    def test_equals_counts(self):
        dataset, _ = parse_csv(SIMPLE)
        out = filter_rows(dataset, FilterSpec((FilterClause(REGION, "equals", "PUNO"),)))
        assert out.row_count == 2

    def test_conjunction_matches_brute_force_scan(self, make_affiliates_dataset):
        rng = np.random.default_rng(41)
        dataset = make_affiliates_dataset(rng, 300)
        spec = FilterSpec((
            FilterClause(AGE, "range", (18, 65)),
            FilterClause(INSURANCE_PLAN, "in-set", ("SIS FREE", "SIS NRUS")),
        ))
        out = filter_rows(dataset, spec)
        # brute-force row scan over the decoded rows
        ages = dataset.integer_values(AGE)
        plans = dataset.decoded(INSURANCE_PLAN)
        expected = [
            i for i in range(dataset.row_count)
            if 18 <= ages[i] <= 65 and plans[i] in ("SIS FREE", "SIS NRUS")
        ]
        assert out.row_count == len(expected)
        assert out.integer_values(AGE).tolist() == [int(ages[i]) for i in expected]

    def test_filter_is_idempotent_and_subset(self, make_affiliates_dataset):
        rng = np.random.default_rng(43)
        dataset = make_affiliates_dataset(rng, 120)
        spec = FilterSpec((FilterClause(REGION, "equals", "PUNO"),))
        once = filter_rows(dataset, spec)
        twice = filter_rows(once, spec)
        assert once.to_csv_bytes() == twice.to_csv_bytes()
        rows = set(dataset.to_csv_bytes().decode().splitlines()[1:])
        assert set(once.to_csv_bytes().decode().splitlines()[1:]) <= rows

    def test_validation_errors(self, fixture_dataset):
        with pytest.raises(ValidationError):
            filter_rows(fixture_dataset, FilterSpec((FilterClause("NOPE", "equals", "X"),)))
        with pytest.raises(ValidationError):
            filter_rows(fixture_dataset, FilterSpec((FilterClause(AGE, "equals", "12"),)))
        with pytest.raises(ValidationError):
            filter_rows(fixture_dataset, FilterSpec((FilterClause(REGION, "range", (1, 2)),)))
        with pytest.raises(ValidationError):
            FilterSpec.from_json_dict({"clauses": [{"column": REGION, "op": "like", "value": "P%"}]})

    def test_from_json_round_trip(self):
        doc = {"clauses": [
            {"column": REGION, "op": "equals", "value": "PUNO"},
            {"column": INSURANCE_PLAN, "op": "in-set", "values": ["SIS FREE"]},
            {"column": AGE, "op": "range", "min": 18, "max": None},
        ]}
        spec = FilterSpec.from_json_dict(doc)
        assert spec.to_json_dict() == doc


class TestSummarize:
    def test_quantiles_by_interpolated_order_statistics(self):
        rows = "\n".join(
            f"PUNO,{age},PERUVIAN,URBAN,SIS FREE,1" for age in range(1, 11)
        )
        header = "REGION,AGE,NATIONAL FOREIGN,INEI SCOPE,INSURANCE PLAN,TOTAL AFFILIATES\n"
        dataset, _ = parse_csv((header + rows + "\n").encode())
        stats = summarize(dataset).integer_columns[AGE]
        # frozen from the rank h = (n-1)p + 1 interpolation rule on 1..10
        assert stats.median == pytest.approx(5.5)
        assert stats.q25 == pytest.approx(3.25)
        assert stats.q75 == pytest.approx(7.75)
        assert stats.minimum == 1 and stats.maximum == 10
        assert stats.mean == pytest.approx(5.5)

    def test_eleven_point_grid_is_exact(self):
        grid = list(range(11))
        for k in range(11):
            assert interpolated_quantile(grid, k / 10) == float(k)

    def test_single_row_degenerate(self):
        data = (
            "REGION,AGE,NATIONAL FOREIGN,INEI SCOPE,INSURANCE PLAN,TOTAL AFFILIATES\n"
            "PUNO,37,PERUVIAN,URBAN,SIS FREE,10\n"
        ).encode()
        dataset, _ = parse_csv(data)
        stats = summarize(dataset).integer_columns[AGE]
        assert stats.minimum == stats.maximum == stats.mean == stats.median == 37

    def test_categorical_counts(self):
        dataset, _ = parse_csv(SIMPLE)
        cats = summarize(dataset).categorical_columns[INSURANCE_PLAN]
        assert cats.counts == {"SIS FOR ALL": 1, "SIS FREE": 2}

    def test_count_and_total_invariants(self, make_affiliates_dataset):
        rng = np.random.default_rng(47)
        dataset = make_affiliates_dataset(rng, 150)
        report = summarize(dataset)
        total = int(dataset.integer_values(TOTAL_AFFILIATES).sum())
        for cat in report.categorical_columns.values():
            assert sum(cat.counts.values()) == dataset.row_count
            assert sum(cat.affiliate_totals.values()) == total


class TestAggregate:
    def test_totals(self):
        dataset, _ = parse_csv(SIMPLE)
        entries = aggregate_by(dataset, REGION)
        assert [(e.level, e.affiliate_total) for e in entries] == [("LIMA", 5), ("PUNO", 17)]

    def test_single_level(self):
        data = (
            "REGION,AGE,NATIONAL FOREIGN,INEI SCOPE,INSURANCE PLAN,TOTAL AFFILIATES\n"
            "PUNO,20,PERUVIAN,URBAN,SIS FREE,4\n"
            "PUNO,30,PERUVIAN,URBAN,SIS FREE,6\n"
        ).encode()
        dataset, _ = parse_csv(data)
        entries = aggregate_by(dataset, REGION)
        assert len(entries) == 1
        assert entries[0].affiliate_total == 10

    def test_sum_across_levels_is_dataset_total(self, make_affiliates_dataset):
        rng = np.random.default_rng(53)
        dataset = make_affiliates_dataset(rng, 200)
        entries = aggregate_by(dataset, INSURANCE_PLAN)
        assert sum(e.affiliate_total for e in entries) == int(dataset.integer_values(TOTAL_AFFILIATES).sum())
        assert sum(e.record_count for e in entries) == dataset.row_count

    def test_integer_column_rejected(self, fixture_dataset):
        with pytest.raises(ValidationError):
            aggregate_by(fixture_dataset, AGE)


class TestRegionTotals:
    def test_every_region_appears_with_centroid(self, fixture_dataset):
        result = region_totals(fixture_dataset)
        names = [r.region for r in result.regions]
        assert names == sorted(names)
        assert set(names) == set(fixture_dataset.levels[REGION])
        assert all(r.lat is not None and r.lon is not None for r in result.regions)
        assert result.warnings == ()

    def test_unknown_region_gets_null_position_and_warning(self):
        data = SIMPLE + b"MORDOR,20,PERUVIAN,URBAN,SIS FREE,4\n"
        dataset, _ = parse_csv(data)
        result = region_totals(dataset)
        mordor = next(r for r in result.regions if r.region == "MORDOR")
        assert mordor.lat is None and mordor.lon is None
        assert any("MORDOR" in w for w in result.warnings)

    def test_totals_match_aggregate_by(self, make_affiliates_dataset):
        rng = np.random.default_rng(59)
        dataset = make_affiliates_dataset(rng, 180)
        by_region = {e.level: e.affiliate_total for e in aggregate_by(dataset, REGION)}
        result = region_totals(dataset)
        assert {r.region: r.total_affiliates for r in result.regions} == by_region

    def test_centroid_table_covers_25_regions(self):
        assert len(load_region_centroids()) == 25
