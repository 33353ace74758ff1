"""
Active and passive attackers over the aggregators' state.

An active attacker controls one or two aggregators and sees exactly what they
received. A passive attacker (the supplier side) sees every aggregator but has to
break the transport encryption first; that cost is carried as a delay annotation
rather than simulated.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .aggregation import AggregatorLedger
from .errors import DomainError
from .metrics import ProbabilityProfile, Subject, anonymity_report
from .model import AggregatorId, IntervalLike, MeterId, ShareScheme, as_ordinal
from .secret_sharing import naive_share, ring_sum

logger = logging.getLogger(__name__)

MAX_ACTIVE_COMPROMISE = 2


class AttackKind(str, Enum):
    ACTIVE = "active"
    PASSIVE = "passive"


@dataclass(frozen=True)
class AttackerModel:
    kind: AttackKind
    compromised: FrozenSet[int]

    def __post_init__(self):
        object.__setattr__(self, "kind", AttackKind(self.kind))
        object.__setattr__(self, "compromised", frozenset(int(a) for a in self.compromised))
        if self.kind is AttackKind.ACTIVE and not 1 <= len(self.compromised) <= MAX_ACTIVE_COMPROMISE:
            raise DomainError(f"an active attacker controls one or two aggregators, "
                              f"got {len(self.compromised)}")

    @classmethod
    def active(cls, *aggregators: int) -> "AttackerModel":
        return cls(AttackKind.ACTIVE, frozenset(aggregators))

    @classmethod
    def passive(cls, m: int) -> "AttackerModel":
        return cls(AttackKind.PASSIVE, frozenset(range(m)))

    def validate(self, m: int) -> "AttackerModel":
        unknown = [a for a in self.compromised if not 0 <= a < m]
        if unknown:
            raise DomainError(f"aggregators {sorted(unknown)} do not exist (m = {m})")
        if self.kind is AttackKind.PASSIVE and len(self.compromised) != m:
            raise DomainError("a passive attacker controls the whole aggregation system")
        return self


@dataclass(frozen=True)
class AttackerView:
    """Immutable snapshot of the compromised aggregators' ledgers."""

    m_aggregators: int
    n_meters: int
    n_intervals: int
    modulus: int
    cells: Mapping[int, np.ndarray]
    present: Mapping[int, np.ndarray]
    column_sums: Mapping[int, np.ndarray]

    @property
    def aggregators(self) -> Tuple[int, ...]:
        return tuple(sorted(self.cells))

    @property
    def visible_cell_count(self) -> int:
        return int(sum(mask.sum() for mask in self.present.values()))

    def cell(self, aggregator: int, meter: int, interval: IntervalLike) -> int:
        ordinal = as_ordinal(interval)
        if aggregator not in self.cells or not self.present[aggregator][meter, ordinal]:
            raise DomainError(f"cell (aggregator {aggregator}, meter {meter}, interval {ordinal}) "
                              f"is not visible to the attacker")
        return int(self.cells[aggregator][meter, ordinal])

    def visible_shares(self, meter: int, interval: IntervalLike) -> Dict[int, int]:
        ordinal = as_ordinal(interval)
        return {a: int(self.cells[a][meter, ordinal])
                for a in self.aggregators if self.present[a][meter, ordinal]}

    def column_sum(self, aggregator: int, interval: IntervalLike) -> int:
        if aggregator not in self.column_sums:
            raise DomainError(f"aggregator {aggregator} is not compromised")
        return int(self.column_sums[aggregator][as_ordinal(interval)])


def observe(model: AttackerModel, ledgers: Sequence[AggregatorLedger]) -> AttackerView:
    """Restrict the aggregation state to what ``model`` controls."""
    model.validate(len(ledgers))
    first = ledgers[0]
    cells, present, sums = {}, {}, {}
    for ledger in ledgers:
        if ledger.aggregator in model.compromised:
            cells[int(ledger.aggregator)], present[int(ledger.aggregator)], sums[int(ledger.aggregator)] = \
                ledger.snapshot()
    logger.debug("Attacker %s observes aggregators %s", model.kind.value, sorted(cells))
    return AttackerView(len(ledgers), first.n_meters, first.n_intervals, first.modulus, cells, present, sums)


def information_gain_fraction(model: AttackerModel, m: int) -> float:
    """Share of all transmitted information the attacker holds."""
    model.validate(m)
    return len(model.compromised) / m


@dataclass(frozen=True)
class GainedVsNeeded:
    aggregator: int
    gained: int
    needed: int
    equal: bool

    def to_dict(self) -> dict:
        return {"aggregator": self.aggregator, "gained": self.gained, "needed": self.needed,
                "equal": self.equal}


def _ordinals(view: AttackerView, intervals: Optional[Iterable[IntervalLike]]) -> List[int]:
    ordinals = list(range(view.n_intervals)) if intervals is None else [as_ordinal(t) for t in intervals]
    if not ordinals:
        raise DomainError("interval range is empty")
    return ordinals


def gained_vs_needed(view: AttackerView, target: MeterId, ground_truth: np.ndarray,
                     intervals: Optional[Iterable[IntervalLike]] = None) -> GainedVsNeeded:
    """Compare the compromised column total with the target meter's row total.

    Args:
        view: View of exactly one compromised aggregator
        target: Meter the attacker wants to deanonymize
        ground_truth: Plaintext readings, shape (meters, intervals)
        intervals: Interval range; the whole period when omitted

    Returns:
        GainedVsNeeded with both totals and whether they coincide
    """
    if len(view.aggregators) != 1:
        raise DomainError("the gained-versus-needed comparison is defined for one compromised aggregator")
    if not 0 <= target < view.n_meters:
        raise DomainError(f"meter {target} does not exist")
    aggregator = view.aggregators[0]
    ordinals = _ordinals(view, intervals)
    gained = int(ring_sum(view.column_sums[aggregator][ordinals], view.modulus, axis=0))
    needed = int(ring_sum(np.asarray(ground_truth, dtype=np.int64)[target, ordinals], view.modulus, axis=0))
    return GainedVsNeeded(aggregator, gained, needed, gained == needed)


@dataclass(frozen=True)
class ReadingEstimate:
    point_estimate: Optional[int]
    exact: bool
    error_bound: Optional[int]

    @property
    def known(self) -> bool:
        return self.point_estimate is not None

    def to_dict(self) -> dict:
        return {"point_estimate": self.point_estimate, "exact": self.exact, "error_bound": self.error_bound}


UNKNOWN = ReadingEstimate(None, False, None)


def estimate_reading(view: AttackerView, target: MeterId, interval: IntervalLike,
                     scheme: ShareScheme) -> ReadingEstimate:
    """Best guess of one reading from the visible shares.

    With every share visible the reading is reconstructed. Under the equal split a
    single share pins the reading to within the split remainder; under additive
    sharing any proper subset of shares says nothing.
    """
    shares = view.visible_shares(target, interval)
    if not shares:
        raise DomainError(f"no share of meter {target} at interval {as_ordinal(interval)} is visible")
    m = view.m_aggregators
    if len(shares) == m:
        return ReadingEstimate(sum(shares.values()) % view.modulus, True, 0)
    if ShareScheme(scheme) is ShareScheme.ADDITIVE_RANDOM:
        return UNKNOWN
    others = [s for a, s in shares.items() if a != 0]
    if others and 0 in shares:
        return ReadingEstimate(shares[0] + (m - 1) * others[0], True, 0)
    if others:
        return ReadingEstimate(m * others[0], True, m - 1)
    return ReadingEstimate(m * shares[0], True, (m - 1) ** 2)


def consistent_with(view: AttackerView, meter: int, interval: IntervalLike, scheme: ShareScheme,
                    energy: int) -> bool:
    """Whether the visible shares of ``meter`` could come from a reading of ``energy``."""
    shares = view.visible_shares(meter, interval)
    if not shares:
        return True
    if len(shares) == view.m_aggregators:
        return sum(shares.values()) % view.modulus == energy
    if ShareScheme(scheme) is ShareScheme.ADDITIVE_RANDOM:
        return True
    return all(naive_share(energy, view.m_aggregators, a) == s for a, s in shares.items())


def assign_user_probabilities(view: AttackerView, n: int, scheme: ShareScheme,
                              known_readings: Optional[Mapping[int, int]] = None) -> ProbabilityProfile:
    """Probability of each meter being the originator of ``known_readings``.

    Args:
        view: Attacker view
        n: Size of the anonymity set
        scheme: Share scheme in use
        known_readings: Interval ordinal -> energy the attacker tries to attribute

    Returns:
        Uniform over the meters whose visible shares are consistent with the
        known readings (uniform over everyone when nothing can be ruled out)
    """
    if n < 3 or n != view.n_meters:
        raise DomainError(f"anonymity set of {n} users does not match the view's {view.n_meters} meters")
    candidates = list(range(n))
    if known_readings:
        matching = [i for i in candidates
                    if all(consistent_with(view, i, t, scheme, e) for t, e in known_readings.items())]
        if matching:
            candidates = matching
    weights = np.zeros(n)
    weights[candidates] = 1.0
    return ProbabilityProfile.normalized(weights, Subject.OVER_USERS)


def information_matrix(view: AttackerView, ground_truth: np.ndarray,
                       intervals: Optional[Iterable[IntervalLike]] = None) -> dict:
    """Per-meter shares summed over ``intervals``: what the attacker holds versus what it needs.

    ``shares`` and ``column_totals`` are indexed by aggregator, None where the
    attacker sees nothing.
    """
    ordinals = _ordinals(view, intervals)
    truth = np.asarray(ground_truth, dtype=np.int64)
    rows = []
    for meter in range(view.n_meters):
        shares = []
        for a in range(view.m_aggregators):
            if a in view.cells and view.present[a][meter, ordinals].all():
                shares.append(int(ring_sum(view.cells[a][meter, ordinals], view.modulus, axis=0)))
            else:
                shares.append(None)
        rows.append({"meter": meter, "shares": shares,
                     "row_total": int(ring_sum(truth[meter, ordinals], view.modulus, axis=0))})
    columns = [int(ring_sum(view.column_sums[a][ordinals], view.modulus, axis=0)) if a in view.cells else None
               for a in range(view.m_aggregators)]
    return {"visible_aggregators": list(view.aggregators), "rows": rows, "column_totals": columns}


def run_attack(result, model: AttackerModel, target: MeterId = MeterId(0),
               decryption_delay_hours: float = 0.0) -> dict:
    """observe -> gained vs needed -> estimates -> user probabilities -> degree of anonymity.

    Args:
        result: Finished SimulationResult
        model: Attacker model
        target: Meter whose readings the attacker tries to attribute
        decryption_delay_hours: Annotation for the passive attacker's cipher-breaking time

    Returns:
        JSON-serialisable attack report
    """
    config = result.config
    view = observe(model, result.ledgers)
    if not 0 <= target < config.n_meters:
        raise DomainError(f"target meter {target} does not exist")
    logger.info("Running %s attack on aggregators %s", model.kind.value, sorted(model.compromised))

    if len(view.aggregators) == 1:
        comparison = gained_vs_needed(view, target, result.readings).to_dict()
    else:
        comparison = None

    estimates = []
    for meter in range(config.n_meters):
        estimate = estimate_reading(view, MeterId(meter), 0, config.scheme)
        actual = int(result.readings[meter, 0])
        exact_hits = sum(
            1 for t in range(result.n_intervals)
            if (e := estimate_reading(view, MeterId(meter), t, config.scheme)).known
            and abs(e.point_estimate - int(result.readings[meter, t])) <= e.error_bound
        )
        estimates.append({"meter": meter, "interval": 0, "actual": actual, **estimate.to_dict(),
                          "intervals_pinned": exact_hits})

    known = {t: int(result.readings[target, t]) for t in range(result.n_intervals)}
    profile = assign_user_probabilities(view, config.n_meters, config.scheme, known)
    anonymity = anonymity_report(profile)
    full_view = len(view.aggregators) == config.m_aggregators
    report = {
        "model": {"kind": model.kind.value, "compromised": sorted(model.compromised)},
        "scheme": config.scheme.value,
        "n_meters": config.n_meters,
        "m_aggregators": config.m_aggregators,
        "intervals": result.n_intervals,
        "information_gain_fraction": information_gain_fraction(model, config.m_aggregators),
        "visible_cells": view.visible_cell_count,
        "target": int(target),
        "gained_vs_needed": comparison,
        "information_matrix": information_matrix(view, result.readings),
        "estimates": estimates,
        "user_probabilities": list(profile.probabilities),
        "anonymity": anonymity.to_dict(),
    }
    if model.kind is AttackKind.PASSIVE:
        report["passive"] = {"full_reconstruction": full_view,
                             "decryption_delay_hours": decryption_delay_hours}
    logger.info("Degree of anonymity after attack: %s", anonymity.degree)
    return report
