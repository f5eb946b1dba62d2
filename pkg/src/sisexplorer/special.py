"""Statistical special functions built on double-precision scalar arithmetic.

Everything here is self-contained (stdlib ``math`` only): the error
function via the regularized incomplete gamma, the standard-normal CDF
and its inverse, the regularized incomplete beta via continued fraction,
and the Student-t and F cumulative distributions derived from it.  The
continued fractions use the modified Lentz scheme with a hard iteration
cap so worst-case latency stays bounded; hitting the cap raises
:class:`NumericError` rather than returning a silently wrong value.
"""

import math

from .errors import DomainError, NumericError

# Convergence targets. _CF_EPS is well below the 1e-12 relative accuracy
# the callers rely on; _FPMIN guards Lentz denominators from vanishing.
_CF_EPS = 1e-15
_FPMIN = 1e-300
_MAX_ITER = 300

# p-values smaller than this are clamped to 0.0 (underflow); the display
# convention renders anything below P_DISPLAY_FLOOR as "< 2.2e-16".
UNDERFLOW_FLOOR = 1e-300
P_DISPLAY_FLOOR = 2.22e-16
P_DISPLAY_STRING = "< 2.2e-16"

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _gamma_p_series(a: float, x: float) -> float:
    """Lower regularized incomplete gamma P(a, x) by its power series (x < a+1)."""
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(_MAX_ITER):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * _CF_EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise NumericError(f"incomplete gamma series failed to converge (a={a}, x={x})")


def _gamma_q_cf(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x) by continued fraction (x >= a+1)."""
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise NumericError(f"incomplete gamma continued fraction failed to converge (a={a}, x={x})")


def erf(x: float) -> float:
    """Error function, via erf(x) = P(1/2, x^2) for x >= 0."""
    if x == 0.0:
        return 0.0
    x2 = x * x
    if x2 < 1.5:
        p = _gamma_p_series(0.5, x2)
        return p if x > 0 else -p
    q = _gamma_q_cf(0.5, x2)
    return 1.0 - q if x > 0 else q - 1.0


def erfc(x: float) -> float:
    """Complementary error function, with full relative accuracy in the right tail."""
    if x <= 0.0:
        return 1.0 + erf(-x) if x < 0 else 1.0
    x2 = x * x
    if x2 < 1.5:
        return 1.0 - _gamma_p_series(0.5, x2)
    return _gamma_q_cf(0.5, x2)


def normal_pdf(z: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


def normal_cdf(z: float) -> float:
    """Standard normal CDF. Accurate in the lower tail (relative error), not just absolutely."""
    return 0.5 * erfc(-z / _SQRT2)


# Rational approximation of the inverse normal CDF (P. Acklam's minimax
# fit, |relative error| < 1.15e-9); used only as the starting point for
# Newton refinement against normal_cdf above.
_ACKLAM_A = (
    -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
    1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00,
)
_ACKLAM_B = (
    -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
    6.680131188771972e+01, -1.328068155288572e+01,
)
_ACKLAM_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
    -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00,
)
_ACKLAM_D = (
    7.784695709041462e-03, 3.224671290700398e-01,
    2.445134137142996e+00, 3.754408661907416e+00,
)
_ACKLAM_SPLIT = 0.02425


def _normal_quantile_estimate(p: float) -> float:
    a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
    if p < _ACKLAM_SPLIT:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    if p > 1.0 - _ACKLAM_SPLIT:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / \
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)


def normal_quantile(p: float) -> float:
    """Inverse standard-normal CDF on the open interval (0, 1).

    A rational initial estimate is polished with Newton steps against
    :func:`normal_cdf`, so the result satisfies ``normal_cdf(z) == p``
    to well below 1e-10 in p.
    """
    if not (0.0 < p < 1.0) or math.isnan(p):
        raise DomainError(f"normal_quantile requires 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    z = _normal_quantile_estimate(p)
    for _ in range(3):
        density = normal_pdf(z)
        if density < 1e-280:
            break
        step = (normal_cdf(z) - p) / density
        z -= step
        if abs(step) < 1e-14 * max(1.0, abs(z)):
            break
    return z


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz scheme)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise NumericError(
        f"incomplete beta continued fraction failed to converge after {_MAX_ITER} iterations "
        f"(a={a}, b={b}, x={x})"
    )


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_x(a, b) for 0 <= x <= 1, a > 0, b > 0.

    Uses the continued fraction directly when x < (a+1)/(a+b+2) and the
    symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise, so the fraction is
    always evaluated in its fast-converging region.
    """
    if not (a > 0.0) or not (b > 0.0):
        raise DomainError(f"incomplete beta requires a > 0 and b > 0, got a={a!r}, b={b!r}")
    if math.isnan(x) or not (0.0 <= x <= 1.0):
        raise DomainError(f"incomplete beta requires 0 <= x <= 1, got x={x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def student_t_cdf(t: float, df: float) -> float:
    """Student-t CDF with df > 0 degrees of freedom.

    P(T <= t) through I_x(df/2, 1/2) at x = df/(df + t^2); symmetric,
    so cdf(-t) = 1 - cdf(t) holds exactly.
    """
    if not (df > 0.0):
        raise DomainError(f"student_t_cdf requires df > 0, got {df!r}")
    if math.isnan(t):
        raise DomainError("student_t_cdf requires a real t, got nan")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(x, 0.5 * df, 0.5)
    return tail if t < 0 else 1.0 - tail


def f_cdf(x: float, d1: float, d2: float) -> float:
    """F-distribution CDF for x >= 0 with (d1, d2) degrees of freedom."""
    if not (d1 > 0.0) or not (d2 > 0.0):
        raise DomainError(f"f_cdf requires positive degrees of freedom, got d1={d1!r}, d2={d2!r}")
    if math.isnan(x) or x < 0.0:
        raise DomainError(f"f_cdf requires x >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    z = d1 * x / (d1 * x + d2)
    return regularized_incomplete_beta(z, 0.5 * d1, 0.5 * d2)


def two_sided_p_value(t: float, df: float) -> float:
    """p = 2 * (1 - cdf(|t|, df)), clamped into [0, 1] and to 0 below the underflow floor."""
    p = 2.0 * (1.0 - student_t_cdf(abs(t), df))
    return clamp_underflow(min(max(p, 0.0), 1.0))


def clamp_underflow(p: float) -> float:
    """Clamp probabilities below UNDERFLOW_FLOOR to exactly 0.0."""
    if 0.0 < p < UNDERFLOW_FLOOR:
        return 0.0
    return p


def format_p_value(p: float) -> str:
    """Display convention for p-values: values below 2.22e-16 render as "< 2.2e-16"."""
    if math.isnan(p):
        return "nan"
    if p < P_DISPLAY_FLOOR:
        return P_DISPLAY_STRING
    return f"{p:.6g}"
