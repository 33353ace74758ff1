"""
End-to-end protocol run: split -> ingest -> aggregate -> supplier -> bill.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional

import numpy as np

from .aggregation import AggregatorLedger, SupplierState
from .errors import DomainError
from .loadgen import Archetype, LoadProfile, ProfileGenSpec, generate_profile
from .model import AggregatorId, Interval, MeterId, Reading, SimConfig, derive_rng
from .secret_sharing import ring_sum, split

logger = logging.getLogger(__name__)

DEFAULT_METER_SPEC = ProfileGenSpec(Archetype.DIURNAL, base_wh=60, peak_wh=450, noise_std=25.0)


@dataclass
class SimulationResult:
    """Everything a finished run produced, including the plaintext ground truth."""

    config: SimConfig
    readings: np.ndarray
    ledgers: List[AggregatorLedger]
    supplier: SupplierState
    bills: Dict[MeterId, int]
    conservation_ok: bool
    conservation_failures: List[int] = field(default_factory=list)

    @property
    def n_intervals(self) -> int:
        return self.readings.shape[1]

    def plaintext_bills(self) -> Dict[MeterId, int]:
        return {MeterId(i): int(v) for i, v in enumerate(self.readings.sum(axis=1))}

    def to_report(self) -> dict:
        return {
            "config": {
                "n_meters": self.config.n_meters,
                "m_aggregators": self.config.m_aggregators,
                "scheme": self.config.scheme.value,
                "modulus": self.config.modulus,
                "seed": self.config.seed,
                "intervals": self.n_intervals,
            },
            "conservation": {
                "ok": self.conservation_ok,
                "failed_intervals": self.conservation_failures,
            },
            "bills_match_plaintext": self.bills == self.plaintext_bills(),
            "aggregators": [ledger.to_report() for ledger in self.ledgers],
            "supplier": self.supplier.to_report(),
        }


class AggregationSimulation:
    """Runs one billing period of the distributed trust based aggregation system."""

    def __init__(self, config: SimConfig, profiles: Optional[Mapping[int, LoadProfile]] = None,
                 n_intervals: Optional[int] = None):
        """Initialize the simulation.

        Args:
            config: Simulation parameters
            profiles: Per-meter load profiles; generated from the seed when omitted
            n_intervals: Length of the simulated period; defaults to the profile
                length or ``config.intervals_per_period``
        """
        self.config = config
        if profiles is not None:
            self.readings = self._readings_from_profiles(profiles, n_intervals)
        else:
            length = n_intervals or config.intervals_per_period
            self.readings = generate_meter_readings(config, length)
        bound = config.energy_bound
        if self.readings.size and self.readings.max() >= bound:
            meter, ordinal = np.argwhere(self.readings >= bound)[0]
            raise DomainError(f"reading of meter {meter} at interval {ordinal} is not below "
                              f"the aggregation bound {bound}")

    def _readings_from_profiles(self, profiles: Mapping[int, LoadProfile], n_intervals: Optional[int]) -> np.ndarray:
        expected = list(range(self.config.n_meters))
        if sorted(profiles) != expected:
            raise DomainError(f"profiles must cover meters 0..{self.config.n_meters - 1}, "
                              f"got {sorted(profiles)}")
        lengths = {len(profiles[i]) for i in expected}
        if len(lengths) != 1:
            raise DomainError(f"profiles have different lengths: {sorted(lengths)}")
        length = lengths.pop()
        if n_intervals is not None:
            if n_intervals > length:
                raise DomainError(f"profiles cover {length} intervals, {n_intervals} requested")
            length = n_intervals
        return np.vstack([profiles[i].series[:length] for i in expected]).astype(np.int64)

    def run(self) -> SimulationResult:
        """Run the full pipeline over the configured period."""
        config = self.config
        n, m = config.n_meters, config.m_aggregators
        length = self.readings.shape[1]
        logger.info("Simulating %d meters, %d aggregators, %d intervals (%s)",
                    n, m, length, config.scheme.value)

        ledgers = [AggregatorLedger(AggregatorId(j), n, length, config.modulus) for j in range(m)]
        supplier = SupplierState(m, config.modulus)

        for ordinal in range(length):
            interval = Interval(ordinal)
            for meter in range(n):
                reading = Reading(MeterId(meter), interval, int(self.readings[meter, ordinal]))
                rng = derive_rng(config.seed, "shares", meter, ordinal)
                shares = split(reading, config, rng)
                for j, ledger in enumerate(ledgers):
                    ledger.ingest_share(reading.meter, interval, shares.share_for(j))
            supplier.supplier_collect(
                {ledger.aggregator: ledger.interval_column_sum(interval) for ledger in ledgers}, interval
            )

        expected = ring_sum(self.readings, config.modulus, axis=0)
        failures = [t for t in range(length) if supplier.interval_totals[t] != int(expected[t])]
        if failures:
            logger.error("Conservation failed for %d intervals", len(failures))
        else:
            logger.info("Conservation holds for all %d intervals", length)

        period = [Interval(t) for t in range(length)]
        bills = supplier.compute_bill(
            period, {ledger.aggregator: ledger.period_share_sums(period) for ledger in ledgers}
        )
        return SimulationResult(config, self.readings, ledgers, supplier, bills, not failures, failures)


def generate_meter_readings(config: SimConfig, length: int,
                            spec: ProfileGenSpec = DEFAULT_METER_SPEC) -> np.ndarray:
    """One generated profile per meter, each from its own derived stream."""
    spec = spec.with_length(length)
    rows = [
        generate_profile(spec, derive_rng(config.seed, "load", meter), bound=config.energy_bound).series
        for meter in range(config.n_meters)
    ]
    return np.vstack(rows).astype(np.int64)
