"""
Aggregator and supplier state.

Data only flows meter -> aggregator -> supplier. Aggregators keep the shares they
receive and release per-interval column sums; at the end of a billing period they
release one period-level share sum per meter, from which the supplier reconstructs
bills without ever seeing a per-interval value of a single meter.
"""

import logging
from typing import Dict, Iterable, Mapping, Sequence

import numpy as np

from .errors import AvailabilityError, DomainError, ProtocolError
from .model import AggregatorId, IntervalLike, MeterId, as_ordinal
from .secret_sharing import ring_sum

logger = logging.getLogger(__name__)


class AggregatorLedger:
    """Append-only table of the shares one aggregator has received.

    Cells are indexed by (meter, interval); the running column sum of each
    interval is kept up to date on every ingestion. A ledger has a single writer.
    """

    def __init__(self, aggregator: AggregatorId, n_meters: int, n_intervals: int, modulus: int):
        """Initialize an empty ledger.

        Args:
            aggregator: Index of the aggregator owning this ledger
            n_meters: Number of meters reporting to it
            n_intervals: Number of intervals in the period
            modulus: Ring modulus of the shares
        """
        self.aggregator = AggregatorId(aggregator)
        self.n_meters = n_meters
        self.n_intervals = n_intervals
        self.modulus = modulus
        self._cells = np.zeros((n_meters, n_intervals), dtype=np.int64)
        self._present = np.zeros((n_meters, n_intervals), dtype=bool)
        self._column_sums = np.zeros(n_intervals, dtype=np.int64)

    def _check_cell(self, meter: int, ordinal: int):
        if not 0 <= meter < self.n_meters:
            raise ProtocolError(f"aggregator {self.aggregator} does not serve meter {meter}")
        if not 0 <= ordinal < self.n_intervals:
            raise ProtocolError(f"interval {ordinal} lies outside the period of aggregator {self.aggregator}")

    def ingest_share(self, meter: MeterId, interval: IntervalLike, share: int) -> "AggregatorLedger":
        """Store one share and update the interval's column sum.

        Raises:
            ProtocolError: the (meter, interval) cell was already filled
        """
        ordinal = as_ordinal(interval)
        self._check_cell(meter, ordinal)
        if self._present[meter, ordinal]:
            raise ProtocolError(f"duplicate share from meter {meter} for interval {ordinal} "
                                f"at aggregator {self.aggregator}")
        if not 0 <= share < self.modulus:
            raise DomainError(f"share {share} is not a ring element")
        self._cells[meter, ordinal] = share
        self._present[meter, ordinal] = True
        self._column_sums[ordinal] = (int(self._column_sums[ordinal]) + int(share)) % self.modulus
        return self

    def ingest_matrix(self, shares: np.ndarray, first_interval: int = 0) -> "AggregatorLedger":
        """Bulk ingestion of a (meters x intervals) block of shares.

        Equivalent to calling :meth:`ingest_share` for every cell of the block.
        """
        shares = np.asarray(shares, dtype=np.int64)
        if shares.ndim != 2 or shares.shape[0] != self.n_meters:
            raise ProtocolError(f"expected a block with {self.n_meters} meter rows, got shape {shares.shape}")
        stop = first_interval + shares.shape[1]
        if first_interval < 0 or stop > self.n_intervals:
            raise ProtocolError(f"intervals {first_interval}..{stop - 1} lie outside the period")
        window = self._present[:, first_interval:stop]
        if window.any():
            meter, offset = np.argwhere(window)[0]
            raise ProtocolError(f"duplicate share from meter {meter} for interval {first_interval + offset} "
                                f"at aggregator {self.aggregator}")
        if shares.size and (shares.min() < 0 or shares.max() >= self.modulus):
            raise DomainError("shares must be ring elements")
        self._cells[:, first_interval:stop] = shares
        window[:] = True
        self._column_sums[first_interval:stop] = (
            self._column_sums[first_interval:stop] + ring_sum(shares, self.modulus, axis=0)
        ) % self.modulus
        return self

    def missing_meters(self, interval: IntervalLike) -> list:
        ordinal = as_ordinal(interval)
        self._check_cell(0, ordinal)
        return [int(i) for i in np.flatnonzero(~self._present[:, ordinal])]

    def is_complete(self, interval: IntervalLike) -> bool:
        return not self.missing_meters(interval)

    def interval_column_sum(self, interval: IntervalLike) -> int:
        """Sum of all meters' shares for a complete interval.

        Raises:
            AvailabilityError: some meters have not reported for the interval
        """
        ordinal = as_ordinal(interval)
        missing = self.missing_meters(ordinal)
        if missing:
            raise AvailabilityError(f"interval {ordinal} is incomplete at aggregator {self.aggregator}",
                                    missing)
        return int(self._column_sums[ordinal])

    def period_share_sums(self, period: Sequence[IntervalLike]) -> Dict[MeterId, int]:
        """Per-meter sum of shares over a whole billing period (the coarse reveal).

        Raises:
            AvailabilityError: the period is not complete for every meter
        """
        ordinals = [as_ordinal(t) for t in period]
        if not ordinals:
            raise DomainError("a billing period needs at least one interval")
        for ordinal in ordinals:
            self._check_cell(0, ordinal)
        block = self._present[:, ordinals]
        if not block.all():
            missing = np.flatnonzero(~block.all(axis=1))
            raise AvailabilityError(f"billing period is incomplete at aggregator {self.aggregator}", missing)
        sums = ring_sum(self._cells[:, ordinals], self.modulus, axis=1)
        return {MeterId(i): int(v) for i, v in enumerate(sums)}

    def snapshot(self):
        """Read-only copies of (cells, presence mask, column sums)."""
        arrays = (self._cells.copy(), self._present.copy(), self._column_sums.copy())
        for array in arrays:
            array.flags.writeable = False
        return arrays

    def to_report(self) -> dict:
        return {
            "aggregator": int(self.aggregator),
            "column_sums": [
                {"interval": int(t), "column_sum": int(self._column_sums[t])}
                for t in range(self.n_intervals)
                if self._present[:, t].all()
            ],
        }


class SupplierState:
    """Interval totals and period bills held by the supplier."""

    def __init__(self, m_aggregators: int, modulus: int):
        self.m_aggregators = m_aggregators
        self.modulus = modulus
        self.interval_totals: Dict[int, int] = {}
        self.period_bills: Dict[MeterId, int] = {}

    def _require_all(self, provided: Iterable[int], what: str):
        provided = set(provided)
        expected = set(range(self.m_aggregators))
        unknown = provided - expected
        if unknown:
            raise ProtocolError(f"{what} from unknown aggregators {sorted(unknown)}")
        missing = expected - provided
        if missing:
            raise AvailabilityError(f"{what} incomplete", missing)

    def supplier_collect(self, column_sums: Mapping[AggregatorId, int], interval: IntervalLike) -> "SupplierState":
        """Combine one column sum per aggregator into the interval total."""
        ordinal = as_ordinal(interval)
        self._require_all(column_sums.keys(), f"column sums for interval {ordinal}")
        total = 0
        for value in column_sums.values():
            total = (total + int(value)) % self.modulus
        self.interval_totals[ordinal] = total
        return self

    def collect_block(self, column_sums: np.ndarray, first_interval: int = 0) -> "SupplierState":
        """Bulk :meth:`supplier_collect` for an (aggregators x intervals) block."""
        column_sums = np.asarray(column_sums, dtype=np.int64)
        if column_sums.ndim != 2:
            raise DomainError(f"column sums must form an (aggregators x intervals) block, "
                              f"got {column_sums.ndim} dimensions")
        self._require_all(range(column_sums.shape[0]), "column sums")
        totals = ring_sum(column_sums, self.modulus, axis=0)
        for offset, total in enumerate(totals):
            self.interval_totals[first_interval + offset] = int(total)
        return self

    def compute_bill(self, period: Sequence[IntervalLike],
                     per_meter_period_shares: Mapping[AggregatorId, Mapping[MeterId, int]]) -> Dict[MeterId, int]:
        """Reconstruct each meter's consumption over a billing period.

        Args:
            period: Intervals making up the billing period
            per_meter_period_shares: For every aggregator, each meter's share sum over the period

        Returns:
            Mapping meter -> billed energy; bills are addressed to meters by the supplier
        """
        if not period:
            raise DomainError("a billing period needs at least one interval")
        self._require_all(per_meter_period_shares.keys(), "period share sums")
        meters = set()
        for sums in per_meter_period_shares.values():
            meters |= set(sums)
        bills = {}
        for meter in sorted(meters):
            lacking = [a for a, sums in per_meter_period_shares.items() if meter not in sums]
            if lacking:
                raise AvailabilityError(f"period share sum for meter {meter} incomplete", lacking)
            total = 0
            for sums in per_meter_period_shares.values():
                total = (total + int(sums[meter])) % self.modulus
            bills[MeterId(meter)] = total
        self.period_bills.update(bills)
        logger.debug("Computed %d bills over %d intervals", len(bills), len(period))
        return bills

    def to_report(self) -> dict:
        return {
            "interval_totals": [
                {"interval": t, "total": v} for t, v in sorted(self.interval_totals.items())
            ],
            "bills": [{"meter": int(k), "energy": v} for k, v in sorted(self.period_bills.items())],
        }
