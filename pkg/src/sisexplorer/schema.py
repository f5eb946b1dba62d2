"""Column schema for the SIS active-affiliate table.

The canonical table has six columns: five demographic/administrative
attributes plus TOTAL_AFFILIATES, the record count for each attribute
combination.  Exports of the national platform circulate with either
English or Spanish headers, with inconsistent casing, accents and
underscore/space conventions, so each column carries an alias list and
headers are normalized (trimmed, accent-folded, upper-cased) before
matching.
"""

from dataclasses import dataclass
import unicodedata

CATEGORICAL = "categorical"
NONNEGATIVE_INTEGER = "nonnegative-integer"

REGION = "REGION"
AGE = "AGE"
NATIONAL_FOREIGN = "NATIONAL_FOREIGN"
INEI_SCOPE = "INEI_SCOPE"
INSURANCE_PLAN = "INSURANCE_PLAN"
TOTAL_AFFILIATES = "TOTAL_AFFILIATES"


@dataclass(frozen=True)
class ColumnSchema:
    """One canonical column: its value kind and the header spellings it accepts."""

    name: str
    kind: str
    aliases: tuple[str, ...]
    required: bool = True

    def __post_init__(self):
        if self.kind not in (CATEGORICAL, NONNEGATIVE_INTEGER):
            raise ValueError(f"unknown column kind {self.kind!r}")


def normalize_header(raw: str) -> str:
    """Canonicalize a header cell: strip accents, upper-case, collapse separators."""
    text = unicodedata.normalize("NFKD", raw)
    text = "".join(ch for ch in text if not unicodedata.combining(ch))
    text = text.replace("_", " ").replace("-", " ")
    return " ".join(text.upper().split())


DEFAULT_SCHEMA: tuple[ColumnSchema, ...] = (
    ColumnSchema(
        REGION,
        CATEGORICAL,
        aliases=("REGION", "REGION DE RESIDENCIA", "DEPARTAMENTO"),
    ),
    ColumnSchema(
        AGE,
        NONNEGATIVE_INTEGER,
        aliases=("AGE", "EDAD"),
    ),
    ColumnSchema(
        NATIONAL_FOREIGN,
        CATEGORICAL,
        aliases=("NATIONAL FOREIGN", "NACIONAL EXTRANJERO"),
    ),
    ColumnSchema(
        INEI_SCOPE,
        CATEGORICAL,
        aliases=("INEI SCOPE", "SCOPE INEI", "AMBITO INEI"),
    ),
    ColumnSchema(
        INSURANCE_PLAN,
        CATEGORICAL,
        aliases=("INSURANCE PLAN", "PLAN DE SEGURO", "PLAN SEGURO"),
    ),
    ColumnSchema(
        TOTAL_AFFILIATES,
        NONNEGATIVE_INTEGER,
        aliases=(
            "TOTAL AFFILIATES",
            "TOTAL OF AFFILIATES",
            "TOTAL AFILIADOS",
            "TOTAL DE AFILIADOS",
        ),
    ),
)

CANONICAL_NAMES = tuple(col.name for col in DEFAULT_SCHEMA)


def alias_lookup(schema: tuple[ColumnSchema, ...]) -> dict[str, str]:
    """Map every normalized alias (and the canonical name itself) to its column."""
    table: dict[str, str] = {}
    for col in schema:
        for spelling in (col.name, *col.aliases):
            key = normalize_header(spelling)
            existing = table.get(key)
            if existing is not None and existing != col.name:
                raise ValueError(f"alias {spelling!r} is ambiguous between {existing} and {col.name}")
            table[key] = col.name
    return table
