"""sisexplorer: statistical exploration of SIS health-insurance affiliation data.

Library surface in one place; the HTTP service lives in
``sisexplorer.service`` and the command line in ``sisexplorer.cli``.
"""

__version__ = "0.1.0"

from .dataset import (
    AggregateEntry,
    CleaningReport,
    CleaningRules,
    Dataset,
    FilterClause,
    FilterSpec,
    RegionAggregate,
    RegionTotalsResult,
    SummaryReport,
    aggregate_by,
    clean,
    filter_rows,
    interpolated_quantile,
    load_region_centroids,
    parse_csv,
    region_totals,
    summarize,
    take_rows,
)
from .density import DensityEstimate, bandwidth_auto, kde
from .regression import (
    DesignMatrix,
    FitResult,
    ModelSpec,
    PartialFTest,
    build_design_matrix,
    correlation_matrix,
    design_for_new_rows,
    fit_model,
    fit_ols,
    partial_f_test,
    predict,
    scatter3d_data,
)
from .sampling import SampleSizeParams, SplitMix64, draw_sample, sample_indices, sample_size, z_value
from .schema import (
    AGE,
    DEFAULT_SCHEMA,
    INEI_SCOPE,
    INSURANCE_PLAN,
    NATIONAL_FOREIGN,
    REGION,
    TOTAL_AFFILIATES,
    ColumnSchema,
)
from .special import (
    erf,
    f_cdf,
    format_p_value,
    normal_cdf,
    normal_quantile,
    regularized_incomplete_beta,
    student_t_cdf,
    two_sided_p_value,
)

__all__ = [name for name in dir() if not name.startswith("_")]
