"""
Entropy-based degree of anonymity.

An attacker's belief is a probability profile over the splits (or over the
users). Its Shannon entropy H, compared with the maximum entropy log2(s) of s
equally likely outcomes, gives the degree of anonymity d = H / Hmax.
"""

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .errors import DomainError

TOLERANCE = 1e-9
DECREMENTAL_HEAD = 0.50
DECREMENTAL_TAIL = 0.01


class Subject(str, Enum):
    OVER_SPLITS = "over-splits"
    OVER_USERS = "over-users"


@dataclass(frozen=True)
class ProbabilityProfile:
    probabilities: Tuple[float, ...]
    subject: Subject = Subject.OVER_SPLITS

    def __post_init__(self):
        probabilities = tuple(float(p) for p in self.probabilities)
        object.__setattr__(self, "probabilities", probabilities)
        object.__setattr__(self, "subject", Subject(self.subject))
        if not probabilities:
            raise DomainError("a probability profile needs at least one outcome")
        if any(p < 0 or math.isnan(p) for p in probabilities):
            raise DomainError("probabilities must be non-negative")
        if abs(math.fsum(probabilities) - 1.0) > TOLERANCE:
            raise DomainError(f"probabilities sum to {math.fsum(probabilities)!r}, not 1")

    @classmethod
    def uniform(cls, s: int, subject: Subject = Subject.OVER_SPLITS) -> "ProbabilityProfile":
        if s < 1:
            raise DomainError(f"a profile needs at least one outcome, got {s}")
        return cls((1.0 / s,) * s, subject)

    @classmethod
    def normalized(cls, weights: Iterable[float], subject: Subject = Subject.OVER_SPLITS) -> "ProbabilityProfile":
        """Scale non-negative weights (such as 0.33, 0.33, 0.33) to sum to one."""
        weights = np.asarray(list(weights), dtype=float)
        total = weights.sum()
        if weights.size == 0 or total <= 0 or (weights < 0).any():
            raise DomainError("weights must be non-negative with a positive sum")
        return cls(tuple(weights / total), subject)

    @property
    def size(self) -> int:
        return len(self.probabilities)


@dataclass(frozen=True)
class AnonymityReport:
    entropy_bits: float
    max_entropy_bits: float
    degree: Optional[float]

    def to_dict(self) -> dict:
        return {"entropy_bits": self.entropy_bits, "max_entropy_bits": self.max_entropy_bits,
                "degree": self.degree}

    @classmethod
    def from_dict(cls, data: dict) -> "AnonymityReport":
        return cls(data["entropy_bits"], data["max_entropy_bits"], data["degree"])


def entropy(profile: ProbabilityProfile) -> float:
    """Shannon entropy in bits; zero-probability outcomes contribute nothing."""
    return float(stats.entropy(profile.probabilities, base=2))


def max_entropy(s: int) -> float:
    if s < 1:
        raise DomainError(f"maximum entropy needs s >= 1, got {s}")
    return math.log2(s)


def degree_of_anonymity(profile: ProbabilityProfile) -> Optional[float]:
    """``1 - (Hmax - H) / Hmax``; None when a single outcome makes Hmax zero."""
    h_max = max_entropy(profile.size)
    if h_max == 0:
        return None
    h = entropy(profile)
    if math.isclose(h, h_max, rel_tol=0.0, abs_tol=1e-12):
        return 1.0
    return 1 - (h_max - h) / h_max


def anonymity_report(profile: ProbabilityProfile) -> AnonymityReport:
    return AnonymityReport(entropy(profile), max_entropy(profile.size), degree_of_anonymity(profile))


def decremental_profile(s: int) -> ProbabilityProfile:
    """The strongest attacker's split profile: 0.50, then the rest, then 0.01 each."""
    if s < 3:
        raise DomainError(f"the decremental profile needs s >= 3, got {s}")
    tail = (DECREMENTAL_TAIL,) * (s - 2)
    second = round(1 - DECREMENTAL_HEAD - DECREMENTAL_TAIL * (s - 2), 12)
    return ProbabilityProfile((DECREMENTAL_HEAD, second, *tail))


def uniform_user_probability(n: int, table_reproduction: bool = False) -> float:
    """Probability that a given user is the originator among n users."""
    floor = 2 if table_reproduction else 3
    if n < floor:
        raise DomainError(f"the anonymity set needs at least {floor} users, got {n}")
    return 1.0 / n


def round_half_up(value: float, places: int = 2) -> float:
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


# Comparison tables --------------------------------------------------------------

@dataclass(frozen=True)
class SplitRow:
    m: int
    probabilities: Tuple[float, ...]
    entropy: float
    max_entropy: float
    degree: Optional[float]


@dataclass(frozen=True)
class UserRow:
    n: int
    probability: float


@dataclass(frozen=True)
class AnonymityTables:
    equal: Tuple[SplitRow, ...]
    variable: Tuple[SplitRow, ...]
    users: Tuple[UserRow, ...]
    recommended_aggregators: int

    def to_dict(self) -> dict:
        def split_rows(rows):
            return [{"m": r.m, "probabilities": list(r.probabilities), "entropy": r.entropy,
                     "max_entropy": r.max_entropy, "degree": r.degree} for r in rows]

        return {
            "equal_probability": split_rows(self.equal),
            "variable_probability": split_rows(self.variable),
            "user_probability": [{"n": r.n, "probability": r.probability} for r in self.users],
            "recommended_aggregators": self.recommended_aggregators,
        }

    def format_text(self) -> str:
        lines = []
        for title, rows in (("Degree of anonymity with equal probability", self.equal),
                            ("Degree of anonymity with variable probability", self.variable)):
            lines.append(title)
            lines.append(f"{'m':>3}  {'P_i':<32} {'H(ES)':>7} {'H(MaxES)':>9} {'d_a':>6}")
            for r in rows:
                probabilities = ", ".join(f"{p:.2f}" for p in r.probabilities)
                degree = "None" if r.degree is None else f"{r.degree:.2f}"
                lines.append(f"{r.m:>3}  {probabilities:<32} {r.entropy:>7.2f} "
                             f"{r.max_entropy:>9.2f} {degree:>6}")
            lines.append("")
        lines.append("Probability of a user being the originator")
        lines.append(f"{'n':>3}  {'P_user':>6}")
        for r in self.users:
            lines.append(f"{r.n:>3}  {r.probability:>6.2f}")
        lines.append("")
        lines.append(f"Recommended number of aggregators: {self.recommended_aggregators}")
        return "\n".join(lines) + "\n"


def _split_row(m: int, profile: ProbabilityProfile) -> SplitRow:
    report = anonymity_report(profile)
    degree = None if report.degree is None else round_half_up(report.degree)
    # printed with the negative sign the comparison tables use
    shown_entropy = round_half_up(report.entropy_bits)
    return SplitRow(m, tuple(round_half_up(p) for p in profile.probabilities),
                    -shown_entropy if shown_entropy else 0.0,
                    round_half_up(report.max_entropy_bits), degree)


def aggregator_sweep(max_m: int) -> List[Tuple[int, Optional[float], Optional[float]]]:
    """(m, degree under uniform splits, degree under the decremental profile) for m = 1..max_m."""
    if max_m < 1:
        raise DomainError("max_m must be at least 1")
    rows = []
    for m in range(1, max_m + 1):
        variable = degree_of_anonymity(decremental_profile(m)) if m >= 3 else None
        rows.append((m, degree_of_anonymity(ProbabilityProfile.uniform(m)), variable))
    return rows


def recommend_aggregator_count(candidates: Sequence[int] = (3, 4, 5)) -> int:
    """Smallest m > 2 whose decremental degree of anonymity is highest."""
    eligible = sorted(m for m in candidates if m >= 3)
    if not eligible:
        raise DomainError("at least one candidate must exceed two aggregators")
    return max(eligible, key=lambda m: (round(degree_of_anonymity(decremental_profile(m)), 12), -m))


def emit_anonymity_tables() -> AnonymityTables:
    """Equal-probability, variable-probability and per-user tables."""
    equal = tuple(_split_row(m, ProbabilityProfile.uniform(m)) for m in range(1, 6))
    variable = tuple(_split_row(m, decremental_profile(m)) for m in range(3, 6))
    users = tuple(UserRow(n, round_half_up(uniform_user_probability(n, table_reproduction=True)))
                  for n in range(2, 7))
    return AnonymityTables(equal, variable, users, recommend_aggregator_count())


# (m, entropy, max entropy, degree) as printed
GOLDEN_EQUAL = (
    (1, 0.00, 0.00, None),
    (2, -1.00, 1.00, 1.0),
    (3, -1.58, 1.58, 1.0),
    (4, -2.00, 2.00, 1.0),
    (5, -2.32, 2.32, 1.0),
)
GOLDEN_VARIABLE = (
    (3, -1.07, 1.58, 0.68),
    (4, -1.14, 2.00, 0.57),
    (5, -1.21, 2.32, 0.52),
)
GOLDEN_USERS = ((2, 0.50), (3, 0.33), (4, 0.25), (5, 0.20), (6, 0.17))


def published_values_check(tables: AnonymityTables) -> List[str]:
    """Cells that differ from the published values, as human-readable strings."""
    mismatches = []

    def compare(label, actual, expected):
        if expected is None or actual is None:
            if expected is not actual:
                mismatches.append(f"{label}: expected {expected}, got {actual}")
        elif abs(actual - expected) > 1e-9:
            mismatches.append(f"{label}: expected {expected:.2f}, got {actual:.2f}")

    for name, rows, golden in (("equal", tables.equal, GOLDEN_EQUAL),
                               ("variable", tables.variable, GOLDEN_VARIABLE)):
        if len(rows) != len(golden):
            mismatches.append(f"{name}: expected {len(golden)} rows, got {len(rows)}")
            continue
        for row, (m, h, h_max, d) in zip(rows, golden):
            compare(f"{name} m={m} m", row.m, m)
            compare(f"{name} m={m} H(ES)", row.entropy, h)
            compare(f"{name} m={m} H(MaxES)", row.max_entropy, h_max)
            compare(f"{name} m={m} d_a", row.degree, d)
    if len(tables.users) != len(GOLDEN_USERS):
        mismatches.append(f"users: expected {len(GOLDEN_USERS)} rows, got {len(tables.users)}")
    else:
        for row, (n, p) in zip(tables.users, GOLDEN_USERS):
            compare(f"users n={n} P_user", row.probability, p)
    return mismatches
