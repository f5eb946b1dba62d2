"""Multiple linear regression with treatment-coded categorical predictors.

Categorical predictors are encoded as indicator columns for every level
except the lexicographically first, which becomes the reference, so each
coefficient is a contrast against that reference.  Fitting minimizes the
residual sum of squares through a column-pivoted Householder QR
factorization; pivoted columns whose diagonal falls below
``n * eps * max|r_ii|`` are reported as aliased and excluded from the
solve instead of failing the whole fit.  Standard errors come from the
inverted triangular factor, t statistics and p-values from the Student-t
CDF, and the overall F test compares the model against the intercept.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset, take_rows
from .errors import (
    DegeneratePredictorError,
    InsufficientDataError,
    NumericError,
    SchemaMismatchError,
    UnseenLevelError,
    ValidationError,
)
from .schema import (
    AGE,
    CATEGORICAL,
    INEI_SCOPE,
    INSURANCE_PLAN,
    NATIONAL_FOREIGN,
    REGION,
    TOTAL_AFFILIATES,
)
from .special import clamp_underflow, f_cdf, format_p_value, two_sided_p_value

DEFAULT_PREDICTORS = (INSURANCE_PLAN, REGION, AGE, NATIONAL_FOREIGN, INEI_SCOPE)
INTERCEPT = "intercept"


@dataclass(frozen=True)
class ModelSpec:
    """Response, ordered predictors and intercept switch for one regression."""

    response: str = TOTAL_AFFILIATES
    predictors: tuple[str, ...] = DEFAULT_PREDICTORS
    intercept: bool = True

    def __post_init__(self):
        if not self.predictors:
            raise ValidationError("model needs at least one predictor")
        if len(set(self.predictors)) != len(self.predictors):
            raise ValidationError("predictors must be distinct")
        if self.response in self.predictors:
            raise ValidationError("response cannot also be a predictor")

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ModelSpec":
        if not isinstance(obj, dict):
            raise ValidationError("model spec must be a JSON object")
        kwargs = {}
        if "response" in obj:
            if not isinstance(obj["response"], str):
                raise ValidationError("'response' must be a string")
            kwargs["response"] = obj["response"]
        if "predictors" in obj:
            preds = obj["predictors"]
            if not isinstance(preds, list) or not all(isinstance(p, str) for p in preds):
                raise ValidationError("'predictors' must be an array of column names")
            kwargs["predictors"] = tuple(preds)
        if "intercept" in obj:
            if not isinstance(obj["intercept"], bool):
                raise ValidationError("'intercept' must be a boolean")
            kwargs["intercept"] = obj["intercept"]
        return cls(**kwargs)

    def to_json_dict(self) -> dict:
        return {"response": self.response, "predictors": list(self.predictors), "intercept": self.intercept}


@dataclass(frozen=True)
class Term:
    """One design-matrix column: the intercept, a numeric copy, or a level indicator."""

    label: str
    column: str
    level: str | None


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    values: np.ndarray  # (n, k) float64
    terms: tuple[Term, ...]
    reference_levels: dict[str, str]


def build_design_matrix(dataset: Dataset, spec: ModelSpec):
    """Encode the predictors into a design matrix and extract the response vector.

    Term order is deterministic: intercept first, then predictors in spec
    order, with a categorical predictor's indicator columns in level order.
    """
    if dataset.row_count == 0:
        raise InsufficientDataError("cannot build a design matrix from an empty dataset")
    response_col = dataset.schema_for(spec.response)
    if response_col.kind == CATEGORICAL:
        raise ValidationError(f"response {spec.response} must be an integer column")
    for name in spec.predictors:
        dataset.schema_for(name)  # raises for unknown columns

    n = dataset.row_count
    terms: list[Term] = []
    cols: list[np.ndarray] = []
    references: dict[str, str] = {}
    if spec.intercept:
        terms.append(Term(INTERCEPT, INTERCEPT, None))
        cols.append(np.ones(n))
    for name in spec.predictors:
        if dataset.is_categorical(name):
            lvls = dataset.levels[name]
            if len(lvls) < 2:
                raise DegeneratePredictorError(f"categorical predictor {name} has a single level")
            references[name] = lvls[0]
            codes = dataset.columns[name]
            for j, lvl in enumerate(lvls[1:], start=1):
                terms.append(Term(f"{name}={lvl}", name, lvl))
                cols.append((codes == j).astype(np.float64))
        else:
            terms.append(Term(name, name, None))
            cols.append(dataset.columns[name].astype(np.float64))
    values = np.column_stack(cols)
    y = dataset.columns[spec.response].astype(np.float64)
    return DesignMatrix(values, tuple(terms), references), y


def design_for_new_rows(dataset: Dataset, reference: DesignMatrix) -> DesignMatrix:
    """Encode new rows with the terms and reference levels of an existing design.

    Raises UnseenLevelError when the new data contains a categorical level
    that has neither an indicator column nor reference status in the
    original encoding.
    """
    allowed: dict[str, set[str]] = {col: {ref} for col, ref in reference.reference_levels.items()}
    for term in reference.terms:
        if term.level is not None:
            allowed.setdefault(term.column, set()).add(term.level)
    for col, levels_allowed in allowed.items():
        observed = set(dataset.levels[col])
        unseen = observed - levels_allowed
        if unseen:
            raise UnseenLevelError(
                f"column {col} contains levels not present in the fitted encoding: {sorted(unseen)}"
            )
    n = dataset.row_count
    cols = []
    for term in reference.terms:
        if term.column == INTERCEPT:
            cols.append(np.ones(n))
        elif term.level is None:
            cols.append(dataset.integer_values(term.column).astype(np.float64))
        else:
            lvls = dataset.levels[term.column]
            if term.level in lvls:
                code = lvls.index(term.level)
                cols.append((dataset.columns[term.column] == code).astype(np.float64))
            else:
                cols.append(np.zeros(n))
    return DesignMatrix(np.column_stack(cols), reference.terms, dict(reference.reference_levels))


def _pivoted_householder_qr(x: np.ndarray, y: np.ndarray):
    """Householder QR with column pivoting, applied to x and y in tandem.

    Returns (r, qty, piv): the upper-triangular factor of the pivoted
    matrix, Q^T y, and the pivot permutation.  Column norms are tracked by
    downdating and recomputed when cancellation makes them unreliable.
    """
    a = np.array(x, dtype=np.float64, order="F")
    qty = np.array(y, dtype=np.float64)
    n, k = a.shape
    piv = np.arange(k)
    norms2 = np.einsum("ij,ij->j", a, a)
    orig2 = norms2.copy()
    for j in range(min(n, k)):
        rel = j + int(np.argmax(norms2[j:]))
        if rel != j:
            a[:, [j, rel]] = a[:, [rel, j]]
            norms2[[j, rel]] = norms2[[rel, j]]
            orig2[[j, rel]] = orig2[[rel, j]]
            piv[[j, rel]] = piv[[rel, j]]
        col = a[j:, j]
        xnorm = float(np.linalg.norm(col))
        if xnorm == 0.0:
            continue  # remaining column is exactly zero; leaves a zero diagonal
        alpha = -math.copysign(xnorm, col[0]) if col[0] != 0.0 else -xnorm
        v = col.copy()
        v[0] -= alpha
        vtv = float(v @ v)
        if j + 1 < k:
            w = a[j:, j + 1:].T @ v
            w *= 2.0 / vtv
            a[j:, j + 1:] -= np.outer(v, w)
        qty[j:] -= (2.0 * float(v @ qty[j:]) / vtv) * v
        a[j, j] = alpha
        if j + 1 <= n - 1:
            a[j + 1:, j] = 0.0
        if j + 1 < k:
            norms2[j + 1:] -= a[j, j + 1:] ** 2
            stale = norms2[j + 1:] < 1e-10 * orig2[j + 1:]
            if stale.any():
                for c in np.nonzero(stale)[0] + j + 1:
                    fresh = float(a[j + 1:, c] @ a[j + 1:, c])
                    norms2[c] = fresh
                    orig2[c] = fresh if fresh > 0.0 else 1.0
    r = np.triu(a[: min(n, k), :])
    return r, qty, piv


def _solve_upper(r: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Back substitution for upper-triangular r against columns of b."""
    out = np.array(b, dtype=np.float64)
    if out.ndim == 1:
        out = out[:, None]
        squeeze = True
    else:
        squeeze = False
    for i in range(r.shape[0] - 1, -1, -1):
        out[i] = (out[i] - r[i, i + 1:] @ out[i + 1:]) / r[i, i]
    return out[:, 0] if squeeze else out


@dataclass(eq=False)
class FitResult:
    """Coefficients, inference and diagnostics of one least-squares fit."""

    terms: tuple[Term, ...]
    reference_levels: dict[str, str]
    coefficients: np.ndarray      # NaN for aliased terms
    standard_errors: np.ndarray
    t_statistics: np.ndarray
    p_values: np.ndarray
    aliased: tuple[bool, ...]
    residuals: np.ndarray
    fitted: np.ndarray
    sigma2: float
    rank: int
    n_obs: int
    df_residual: int
    df_model: int
    rss: float
    tss: float
    r_squared: float
    adj_r_squared: float
    f_statistic: float | None
    f_pvalue: float | None
    intercept: bool

    @property
    def aliased_terms(self) -> tuple[str, ...]:
        return tuple(t.label for t, a in zip(self.terms, self.aliased) if a)

    def to_json_dict(self, include_arrays: bool = False) -> dict:
        term_rows = []
        for i, term in enumerate(self.terms):
            if self.aliased[i]:
                term_rows.append({
                    "label": term.label, "column": term.column, "level": term.level,
                    "estimate": None, "std_error": None, "t": None,
                    "p": None, "p_display": None, "aliased": True,
                })
            else:
                p = float(self.p_values[i])
                term_rows.append({
                    "label": term.label, "column": term.column, "level": term.level,
                    "estimate": float(self.coefficients[i]),
                    "std_error": float(self.standard_errors[i]),
                    "t": float(self.t_statistics[i]),
                    "p": p, "p_display": format_p_value(p), "aliased": False,
                })
        model = {
            "n": self.n_obs,
            "rank": self.rank,
            "df_residual": self.df_residual,
            "df_model": self.df_model,
            "rss": self.rss,
            "tss": self.tss,
            "sigma2": self.sigma2,
            "r_squared": self.r_squared,
            "adj_r_squared": self.adj_r_squared,
            "f_statistic": self.f_statistic,
            "f_pvalue": self.f_pvalue,
            "f_pvalue_display": None if self.f_pvalue is None else format_p_value(self.f_pvalue),
            "intercept": self.intercept,
        }
        doc = {
            "terms": term_rows,
            "model": model,
            "reference_levels": dict(sorted(self.reference_levels.items())),
        }
        if include_arrays:
            doc["fitted"] = [float(v) for v in self.fitted]
            doc["residuals"] = [float(v) for v in self.residuals]
        return doc


def fit_ols(design: DesignMatrix, y: np.ndarray) -> FitResult:
    """Least-squares fit of y on the design, with full inference.

    Raises InsufficientDataError when no residual degrees of freedom
    remain and NumericError for non-finite inputs.
    """
    x = design.values
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 1 or x.shape[0] != y.shape[0]:
        raise ValidationError("design matrix and response have mismatched shapes")
    if not np.isfinite(x).all() or not np.isfinite(y).all():
        raise NumericError("design matrix and response must be finite")
    n, k = x.shape

    r, qty, piv = _pivoted_householder_qr(x, y)
    diag = np.abs(np.diag(r))
    tol = n * np.finfo(np.float64).eps * (float(diag.max()) if diag.size else 0.0)
    rank = 0
    for d in diag:
        if d > tol:
            rank += 1
        else:
            break
    if n - rank <= 0:
        raise InsufficientDataError(
            f"no residual degrees of freedom: n={n}, rank={rank}"
        )

    aliased = np.ones(k, dtype=bool)
    aliased[piv[:rank]] = False
    coefficients = np.full(k, np.nan)
    standard_errors = np.full(k, np.nan)
    t_statistics = np.full(k, np.nan)
    p_values = np.full(k, np.nan)

    rr = r[:rank, :rank]
    beta_perm = _solve_upper(rr, qty[:rank])
    coefficients[piv[:rank]] = beta_perm

    coef_for_predict = np.where(aliased, 0.0, coefficients)
    fitted = x @ coef_for_predict
    residuals = y - fitted
    rss = float(residuals @ residuals)
    df_residual = n - rank
    sigma2 = rss / df_residual

    r_inv = _solve_upper(rr, np.eye(rank))
    var_perm = sigma2 * (r_inv ** 2).sum(axis=1)
    standard_errors[piv[:rank]] = np.sqrt(var_perm)

    for idx in piv[:rank]:
        se = standard_errors[idx]
        t = coefficients[idx] / se if se > 0 else math.inf
        t_statistics[idx] = t
        p_values[idx] = two_sided_p_value(t, df_residual)

    has_intercept = any(t.column == INTERCEPT for t in design.terms)
    if has_intercept:
        centered = y - y.mean()
        tss = float(centered @ centered)
    else:
        tss = float(y @ y)
    if tss > 0.0:
        r_squared = 1.0 - rss / tss
    else:
        r_squared = 1.0 if rss == 0.0 else 0.0
    r_squared = min(max(r_squared, 0.0), 1.0)
    denom = n - rank
    numer = n - (1 if has_intercept else 0)
    adj_r_squared = 1.0 - (1.0 - r_squared) * numer / denom

    df_model = rank - (1 if has_intercept else 0)
    if df_model > 0 and sigma2 > 0.0:
        f_statistic = ((tss - rss) / df_model) / sigma2
        f_statistic = max(f_statistic, 0.0)
        f_pvalue = clamp_underflow(max(0.0, min(1.0, 1.0 - f_cdf(f_statistic, df_model, df_residual))))
    else:
        f_statistic = None
        f_pvalue = None

    return FitResult(
        terms=design.terms,
        reference_levels=dict(design.reference_levels),
        coefficients=coefficients,
        standard_errors=standard_errors,
        t_statistics=t_statistics,
        p_values=p_values,
        aliased=tuple(bool(a) for a in aliased),
        residuals=residuals,
        fitted=fitted,
        sigma2=sigma2,
        rank=rank,
        n_obs=n,
        df_residual=df_residual,
        df_model=df_model,
        rss=rss,
        tss=tss,
        r_squared=r_squared,
        adj_r_squared=adj_r_squared,
        f_statistic=f_statistic,
        f_pvalue=f_pvalue,
        intercept=has_intercept,
    )


def fit_model(dataset: Dataset, spec: ModelSpec) -> FitResult:
    """Build the design for a spec and fit it in one step."""
    design, y = build_design_matrix(dataset, spec)
    return fit_ols(design, y)


@dataclass(frozen=True)
class PartialFTest:
    variable: str
    f_statistic: float
    df_numerator: int
    df_denominator: int
    p_value: float

    def to_json_dict(self) -> dict:
        return {
            "variable": self.variable,
            "f_statistic": self.f_statistic,
            "df_numerator": self.df_numerator,
            "df_denominator": self.df_denominator,
            "p_value": self.p_value,
            "p_display": format_p_value(self.p_value),
        }


def partial_f_test(fit: FitResult, dataset: Dataset, spec: ModelSpec, variable: str) -> PartialFTest:
    """Significance of one predictor by comparing against the model without it.

    F = ((RSS_reduced - RSS_full) / df dropped) / sigma2_full, with the
    p-value from the F distribution on (df dropped, df_residual_full).
    """
    if variable not in spec.predictors:
        raise ValidationError(f"variable {variable} is not a predictor of this model")
    remaining = tuple(p for p in spec.predictors if p != variable)
    if remaining:
        reduced = fit_model(dataset, replace(spec, predictors=remaining))
    else:
        if not spec.intercept:
            raise DegeneratePredictorError(
                "cannot reduce a model with a single predictor and no intercept"
            )
        design = DesignMatrix(
            np.ones((dataset.row_count, 1)), (Term(INTERCEPT, INTERCEPT, None),), {},
        )
        reduced = fit_ols(design, dataset.columns[spec.response].astype(np.float64))
    df_drop = fit.rank - reduced.rank
    if df_drop <= 0:
        raise DegeneratePredictorError(
            f"removing {variable} changes no effective degrees of freedom (fully aliased)"
        )
    f_stat = max(0.0, (reduced.rss - fit.rss) / df_drop) / fit.sigma2
    p = clamp_underflow(max(0.0, min(1.0, 1.0 - f_cdf(f_stat, df_drop, fit.df_residual))))
    return PartialFTest(variable, f_stat, df_drop, fit.df_residual, p)


def predict(fit: FitResult, design: DesignMatrix) -> np.ndarray:
    """Predictions X @ beta for rows encoded with the fit's own terms."""
    if design.terms != fit.terms or design.reference_levels != fit.reference_levels:
        raise SchemaMismatchError("design terms do not match the fitted model")
    coef = np.array([0.0 if a else c for c, a in zip(fit.coefficients, fit.aliased)])
    return design.values @ coef


@dataclass(frozen=True, eq=False)
class CorrelationResult:
    labels: tuple[str, ...]
    matrix: np.ndarray  # NaN marks undefined entries
    undefined_pairs: tuple[tuple[str, str], ...]

    def to_json_dict(self) -> dict:
        rows = []
        for i in range(len(self.labels)):
            rows.append([
                None if math.isnan(self.matrix[i, j]) else float(self.matrix[i, j])
                for j in range(len(self.labels))
            ])
        return {
            "labels": list(self.labels),
            "matrix": rows,
            "undefined_pairs": [list(p) for p in self.undefined_pairs],
        }


def correlation_matrix(dataset: Dataset, variables: tuple[str, ...] | list[str]) -> CorrelationResult:
    """Pearson correlations between (encoded) variables.

    Categorical variables expand to their indicator columns (reference
    level dropped).  Constant columns give undefined entries, reported in
    ``undefined_pairs`` rather than propagating NaN into the diagonal.
    """
    if dataset.row_count < 2:
        raise InsufficientDataError("correlation needs at least 2 rows")
    if not variables:
        raise ValidationError("correlation needs at least one variable")
    if len(set(variables)) != len(variables):
        raise ValidationError("correlation variables must be distinct")
    labels: list[str] = []
    cols: list[np.ndarray] = []
    for name in variables:
        if dataset.is_categorical(name):
            lvls = dataset.levels[name]
            if len(lvls) < 2:
                raise DegeneratePredictorError(f"categorical variable {name} has a single level")
            codes = dataset.columns[name]
            for j, lvl in enumerate(lvls[1:], start=1):
                labels.append(f"{name}={lvl}")
                cols.append((codes == j).astype(np.float64))
        else:
            labels.append(name)
            cols.append(dataset.columns[name].astype(np.float64))
    m = len(cols)
    data = np.column_stack(cols)
    centered = data - data.mean(axis=0)
    ss = np.sqrt((centered ** 2).sum(axis=0))
    out = np.full((m, m), np.nan)
    undefined: list[tuple[str, str]] = []
    for i in range(m):
        out[i, i] = 1.0
        for j in range(i + 1, m):
            if ss[i] == 0.0 or ss[j] == 0.0:
                undefined.append((labels[i], labels[j]))
                continue
            r = float(centered[:, i] @ centered[:, j]) / (ss[i] * ss[j])
            out[i, j] = out[j, i] = min(max(r, -1.0), 1.0)
    return CorrelationResult(tuple(labels), out, tuple(undefined))


@dataclass(frozen=True, eq=False)
class Scatter3DData:
    x_label: str
    y_label: str
    z_label: str
    points: np.ndarray  # (m, 3)
    plane: dict[str, float | None]
    axis_levels: dict[str, tuple[str, ...]]

    def to_json_dict(self) -> dict:
        return {
            "x": self.x_label, "y": self.y_label, "z": self.z_label,
            "points": [[float(a), float(b), float(c)] for a, b, c in self.points],
            "plane": dict(self.plane),
            "axis_levels": {k: list(v) for k, v in self.axis_levels.items()},
        }


def scatter3d_data(dataset: Dataset, x: str, y: str, z: str,
                   max_points: int = 5000, seed: int = 0) -> Scatter3DData:
    """Point triples for a 3-D scatter plus the least-squares plane of z on (x, y).

    Categorical axes are mapped to their level indices (level lists are
    returned for tick labeling).  When the dataset exceeds ``max_points``
    a seeded subsample is drawn, and the plane is fitted on the returned
    points so the rendered plane matches the rendered cloud.
    """
    if len({x, y, z}) != 3:
        raise ValidationError("scatter3d needs three distinct columns")
    if max_points < 1:
        raise ValidationError("max_points must be positive")
    subset = dataset
    if dataset.row_count > max_points:
        from .sampling import sample_indices
        subset = take_rows(dataset, sample_indices(dataset.row_count, max_points, seed))
    if subset.row_count == 0:
        raise InsufficientDataError("scatter3d needs at least one row")

    # categorical columns are already level-index codes, so one cast covers both kinds
    xv, yv, zv = (subset.columns[name].astype(np.float64) for name in (x, y, z))
    points = np.column_stack([xv, yv, zv])
    design = DesignMatrix(
        np.column_stack([np.ones(subset.row_count), xv, yv]),
        (Term(INTERCEPT, INTERCEPT, None), Term(x, x, None), Term(y, y, None)),
        {},
    )
    plane: dict[str, float | None] = {INTERCEPT: None, x: None, y: None}
    try:
        fit = fit_ols(design, zv)
        for term, coef, is_aliased in zip(fit.terms, fit.coefficients, fit.aliased):
            plane[term.label] = None if is_aliased else float(coef)
    except InsufficientDataError:
        pass  # fewer points than plane parameters: render points without a plane
    axis_levels = {
        name: subset.levels[name]
        for name in (x, y, z)
        if subset.is_categorical(name)
    }
    return Scatter3DData(x, y, z, points, plane, axis_levels)
