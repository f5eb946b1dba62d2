"""Survey sample-size calculation and deterministic simple random sampling.

The sample-size formula is the finite-population proportion formula

    n = ceil( z^2 * p * q / (e^2 + z^2 * p * q / N) )

with z the two-sided normal quantile at (1 + confidence) / 2 and
q = 1 - p; p defaults to the conservative maximum 0.5.

Sampling without replacement uses a partial Fisher-Yates shuffle driven
by SplitMix64, a fixed 64-bit generator whose recurrence is documented
on the class, so the selected index set for a given (row count, n, seed)
is identical on every platform and Python build.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

from .dataset import Dataset, take_rows
from .errors import BoundsError, DomainError
from .special import normal_quantile

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 generator (public-domain constants).

    state' = state + 0x9E3779B97F4A7C15            (mod 2^64)
    z = state'
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9        (mod 2^64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB        (mod 2^64)
    output = z ^ (z >> 31)
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound), unbiased via rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % bound)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound


@dataclass(frozen=True)
class SampleSizeParams:
    """Inputs of the sample-size formula; q is derived as 1 - p."""

    population_size: int
    confidence_level: float
    margin_of_error: float
    proportion: float = 0.5

    def __post_init__(self):
        if self.population_size < 1:
            raise DomainError(f"population_size must be >= 1, got {self.population_size}")
        if not (0.0 < self.confidence_level < 1.0):
            raise DomainError(f"confidence_level must lie in (0, 1), got {self.confidence_level}")
        if not (0.0 < self.margin_of_error <= 1.0):
            raise DomainError(f"margin_of_error must lie in (0, 1], got {self.margin_of_error}")
        if not (0.0 <= self.proportion <= 1.0):
            raise DomainError(f"proportion must lie in [0, 1], got {self.proportion}")

    @property
    def q(self) -> float:
        return 1.0 - self.proportion


@lru_cache(maxsize=1024)
def z_value(confidence_level: float) -> float:
    """Two-sided z for a confidence level: the normal quantile of (1 + level) / 2.

    Cached: services and batch sweeps evaluate the same confidence level
    over and over.
    """
    if not (0.0 < confidence_level < 1.0):
        raise DomainError(f"confidence_level must lie in (0, 1), got {confidence_level}")
    return normal_quantile((1.0 + confidence_level) / 2.0)


def sample_size(params: SampleSizeParams) -> int:
    """Required sample size, rounded up and clamped into [1, N]."""
    z = z_value(params.confidence_level)
    zpq = z * z * params.proportion * params.q
    raw = zpq / (params.margin_of_error ** 2 + zpq / params.population_size)
    n = math.ceil(raw)
    return max(1, min(n, params.population_size))


def sample_indices(row_count: int, n: int, seed: int) -> list[int]:
    """Indices of a uniform without-replacement sample, sorted ascending.

    Partial Fisher-Yates over [0, row_count): positions 0..n-1 are swapped
    with a uniformly chosen position in the remaining suffix, then the
    selected prefix is sorted so callers keep original row order.
    """
    if not (1 <= n <= row_count):
        raise BoundsError(f"sample size {n} out of bounds for {row_count} rows")
    rng = SplitMix64(seed)
    pool = list(range(row_count))
    for i in range(n):
        j = i + rng.below(row_count - i)
        pool[i], pool[j] = pool[j], pool[i]
    return sorted(pool[:n])


def draw_sample(dataset: Dataset, n: int, seed: int) -> Dataset:
    """Seeded simple random sample of n rows, preserving original row order."""
    indices = sample_indices(dataset.row_count, n, seed)
    return take_rows(dataset, indices)
