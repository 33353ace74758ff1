import numpy as np
import pytest

from src.core.aggregation import AggregatorLedger, SupplierState
from src.core.errors import AvailabilityError, DomainError, ProtocolError
from src.core.loadgen import LoadProfile
from src.core.model import Interval, ShareScheme, SimConfig
from src.core.simulation import AggregationSimulation

from .conftest import fill_ledgers

P = 2**61 - 1


def ledger(n=3, intervals=4):
    return AggregatorLedger(0, n, intervals, P)


class TestAggregatorLedger:
    def test_column_sum_of_complete_interval(self):
        book = ledger()
        for meter, share in enumerate([5, 7, 11]):
            book.ingest_share(meter, Interval(1), share)
        assert book.interval_column_sum(1) == 23
        assert book.is_complete(Interval(1))

    def test_column_sum_wraps_around_the_ring(self):
        book = ledger()
        for meter in range(3):
            book.ingest_share(meter, 0, P - 1)
        assert book.interval_column_sum(0) == (3 * (P - 1)) % P

    def test_duplicate_share_is_rejected(self):
        book = ledger().ingest_share(0, 0, 1)
        with pytest.raises(ProtocolError, match="duplicate"):
            book.ingest_share(0, Interval(0), 2)

    def test_incomplete_interval_lists_missing_meters(self):
        book = ledger().ingest_share(1, 2, 9)
        with pytest.raises(AvailabilityError) as info:
            book.interval_column_sum(2)
        assert info.value.missing == [0, 2]
        assert book.missing_meters(2) == [0, 2]

    def test_unknown_meter_or_interval(self):
        with pytest.raises(ProtocolError):
            ledger().ingest_share(3, 0, 1)
        with pytest.raises(ProtocolError):
            ledger().ingest_share(0, 4, 1)

    def test_share_must_be_ring_element(self):
        with pytest.raises(DomainError):
            ledger().ingest_share(0, 0, P)

    def test_matrix_ingestion_matches_cell_by_cell(self, rng):
        shares = rng.integers(0, P, size=(3, 4))
        bulk = ledger().ingest_matrix(shares)
        single = ledger()
        for meter in range(3):
            for t in range(4):
                single.ingest_share(meter, t, int(shares[meter, t]))
        for a, b in zip(bulk.snapshot(), single.snapshot()):
            assert np.array_equal(a, b)

    def test_matrix_ingestion_rejects_overlap(self):
        book = ledger().ingest_matrix(np.ones((3, 2), dtype=np.int64))
        with pytest.raises(ProtocolError, match="duplicate"):
            book.ingest_matrix(np.ones((3, 2), dtype=np.int64), first_interval=1)
        book.ingest_matrix(np.ones((3, 2), dtype=np.int64), first_interval=2)
        assert book.interval_column_sum(3) == 3

    def test_snapshot_is_read_only(self):
        cells, present, sums = ledger().ingest_share(0, 0, 4).snapshot()
        with pytest.raises(ValueError):
            cells[0, 0] = 0
        assert present[0, 0] and not present[1, 0]
        assert sums[0] == 4

    def test_period_share_sums(self):
        book = ledger(n=2, intervals=3).ingest_matrix(np.array([[1, 2, 3], [10, 20, 30]]))
        assert book.period_share_sums([Interval(t) for t in range(3)]) == {0: 6, 1: 60}
        assert book.period_share_sums([0, 2]) == {0: 4, 1: 40}

    def test_period_share_sums_need_complete_period(self):
        book = ledger(n=2, intervals=3).ingest_share(0, 0, 1)
        with pytest.raises(AvailabilityError):
            book.period_share_sums([0])
        with pytest.raises(DomainError):
            book.period_share_sums([])

    def test_report_lists_only_complete_intervals(self):
        book = ledger(n=2, intervals=2).ingest_share(0, 0, 1).ingest_share(1, 0, 2).ingest_share(0, 1, 5)
        assert book.to_report()["column_sums"] == [{"interval": 0, "column_sum": 3}]


class TestSupplier:
    def test_interval_total(self):
        supplier = SupplierState(3, P).supplier_collect({0: 10, 1: 20, 2: P - 5}, Interval(0))
        assert supplier.interval_totals[0] == 25

    def test_missing_aggregator(self):
        with pytest.raises(AvailabilityError) as info:
            SupplierState(3, P).supplier_collect({0: 1, 1: 2}, 0)
        assert info.value.missing == [2]

    def test_unknown_aggregator(self):
        with pytest.raises(ProtocolError):
            SupplierState(3, P).supplier_collect({0: 1, 1: 2, 2: 3, 3: 4}, 0)

    def test_collect_block(self):
        supplier = SupplierState(3, P).collect_block(np.array([[1, 2], [3, 4], [5, 6]]), first_interval=4)
        assert supplier.interval_totals == {4: 9, 5: 12}

    def test_collect_block_requires_every_aggregator(self):
        with pytest.raises(AvailabilityError):
            SupplierState(3, P).collect_block(np.array([[1, 2], [3, 4]]))

    def test_collect_block_rejects_extra_aggregators(self):
        with pytest.raises(ProtocolError, match=r"\[3\]"):
            SupplierState(3, P).collect_block(np.array([[1, 2], [3, 4], [5, 6], [7, 8]]))

    def test_collect_block_needs_a_matrix(self):
        with pytest.raises(DomainError):
            SupplierState(3, P).collect_block(np.array([1, 2, 3]))

    def test_bills(self):
        supplier = SupplierState(3, P)
        bills = supplier.compute_bill([0, 1], {0: {0: 3, 1: P - 1}, 1: {0: 4, 1: 2}, 2: {0: 5, 1: 0}})
        assert bills == {0: 12, 1: 1}
        assert supplier.to_report()["bills"] == [{"meter": 0, "energy": 12}, {"meter": 1, "energy": 1}]

    def test_bill_needs_every_aggregator_for_every_meter(self):
        with pytest.raises(AvailabilityError):
            SupplierState(3, P).compute_bill([0], {0: {0: 3, 1: 1}, 1: {0: 4}, 2: {0: 5, 1: 0}})

    def test_flow_is_one_way(self):
        """Nothing on the supplier reaches back to aggregators or meters."""
        public = {name for name in dir(SupplierState) if not name.startswith("_")}
        assert public == {"supplier_collect", "collect_block", "compute_bill", "to_report"}
        supplier = SupplierState(3, P)
        assert set(vars(supplier)) == {"m_aggregators", "modulus", "interval_totals", "period_bills"}

    def test_ledger_exposes_no_per_meter_reading(self):
        public = {name for name in dir(AggregatorLedger) if not name.startswith("_")}
        assert public == {"ingest_share", "ingest_matrix", "missing_meters", "is_complete",
                          "interval_column_sum", "period_share_sums", "snapshot", "to_report"}


class TestConservation:
    @pytest.mark.parametrize("scheme", ["naive-equal-split", "additive-random"])
    def test_supplier_totals_equal_plaintext_sums(self, scheme, rng):
        config = SimConfig(n_meters=6, scheme=scheme)
        readings = rng.integers(0, 5000, size=(6, 10))
        ledgers = fill_ledgers(readings, config, rng)
        supplier = SupplierState(3, config.modulus)
        for t in range(10):
            supplier.supplier_collect({b.aggregator: b.interval_column_sum(t) for b in ledgers}, t)
        assert [supplier.interval_totals[t] for t in range(10)] == list(readings.sum(axis=0))

    def test_simulation_bills_match_plaintext(self, additive_result):
        assert additive_result.conservation_ok
        assert additive_result.bills == additive_result.plaintext_bills()
        report = additive_result.to_report()
        assert report["bills_match_plaintext"]
        assert len(report["supplier"]["interval_totals"]) == 16

    def test_simulation_is_reproducible(self, additive_config):
        first = AggregationSimulation(additive_config, n_intervals=4).run()
        second = AggregationSimulation(additive_config, n_intervals=4).run()
        assert np.array_equal(first.readings, second.readings)
        assert np.array_equal(first.ledgers[1].snapshot()[0], second.ledgers[1].snapshot()[0])

    def test_randomised_runs_conserve(self):
        for seed in range(20):
            config = SimConfig(n_meters=4, m_aggregators=3 + seed % 3, seed=seed)
            result = AggregationSimulation(config, n_intervals=3).run()
            assert result.conservation_ok and result.bills == result.plaintext_bills()

    @pytest.mark.slow
    @pytest.mark.parametrize("scheme", list(ShareScheme))
    def test_conservation_across_topologies(self, scheme):
        for seed in range(1000):
            config = SimConfig(n_meters=3 + seed % 8, m_aggregators=3 + seed % 3, scheme=scheme, seed=seed)
            result = AggregationSimulation(config, n_intervals=2).run()
            assert result.conservation_ok, f"seed {seed}"
            assert result.bills == result.plaintext_bills(), f"seed {seed}"

    def test_explicit_profiles(self, naive_config):
        profiles = {i: LoadProfile([i, 2 * i, 3 * i]) for i in range(5)}
        result = AggregationSimulation(naive_config, profiles).run()
        assert result.n_intervals == 3
        assert result.bills == {i: 6 * i for i in range(5)}

    def test_profiles_must_cover_every_meter(self, naive_config):
        with pytest.raises(DomainError):
            AggregationSimulation(naive_config, {0: LoadProfile([1])})

    def test_reading_bound(self):
        config = SimConfig(n_meters=3, modulus=101)
        profiles = {i: LoadProfile([33 + i]) for i in range(3)}
        with pytest.raises(DomainError, match="bound"):
            AggregationSimulation(config, profiles)
