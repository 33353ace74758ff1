import json

import numpy as np
import pytest

from src.core.adversary import (
    UNKNOWN,
    AttackerModel,
    AttackKind,
    assign_user_probabilities,
    consistent_with,
    estimate_reading,
    gained_vs_needed,
    information_gain_fraction,
    information_matrix,
    observe,
    run_attack,
)
from src.core.errors import DomainError
from src.core.loadgen import LoadProfile
from src.core.metrics import degree_of_anonymity
from src.core.model import ShareScheme, SimConfig
from src.core.simulation import AggregationSimulation

from .conftest import fill_ledgers


class TestAttackerModel:
    def test_active_controls_one_or_two(self):
        assert AttackerModel.active(0).kind is AttackKind.ACTIVE
        assert AttackerModel.active(0, 2).compromised == frozenset({0, 2})
        with pytest.raises(DomainError):
            AttackerModel.active()
        with pytest.raises(DomainError):
            AttackerModel.active(0, 1, 2)

    def test_passive_controls_everything(self):
        assert AttackerModel.passive(4).compromised == frozenset(range(4))
        with pytest.raises(DomainError):
            AttackerModel(AttackKind.PASSIVE, frozenset({0})).validate(3)

    def test_unknown_aggregator(self):
        with pytest.raises(DomainError):
            AttackerModel.active(3).validate(3)

    @pytest.mark.parametrize("model, m, expected", [
        (AttackerModel.active(0), 3, 1 / 3),
        (AttackerModel.active(0, 1), 3, 2 / 3),
        (AttackerModel.passive(3), 3, 1.0),
        (AttackerModel.active(1), 5, 0.2),
    ])
    def test_information_gain(self, model, m, expected):
        assert information_gain_fraction(model, m) == pytest.approx(expected)


class TestObserve:
    def test_view_holds_only_compromised_cells(self, additive_result):
        view = observe(AttackerModel.active(1), additive_result.ledgers)
        assert view.aggregators == (1,)
        n, length = additive_result.config.n_meters, additive_result.n_intervals
        assert view.visible_cell_count == n * length
        with pytest.raises(DomainError):
            view.cell(0, 0, 0)
        with pytest.raises(DomainError):
            view.column_sum(2, 0)
        assert view.cell(1, 0, 0) == int(additive_result.ledgers[1].snapshot()[0][0, 0])

    def test_view_is_a_third_of_all_cells(self, additive_result):
        total = sum(int(ledger.snapshot()[1].sum()) for ledger in additive_result.ledgers)
        view = observe(AttackerModel.active(0), additive_result.ledgers)
        assert view.visible_cell_count * 3 == total

    def test_view_is_frozen(self, additive_result):
        view = observe(AttackerModel.active(0), additive_result.ledgers)
        with pytest.raises(ValueError):
            view.cells[0][0, 0] = 1


class TestGainedVsNeeded:
    def test_column_total_differs_from_row_total(self, additive_result):
        view = observe(AttackerModel.active(0), additive_result.ledgers)
        comparison = gained_vs_needed(view, 0, additive_result.readings)
        assert comparison.needed == int(additive_result.readings[0].sum())
        assert not comparison.equal

    def test_interval_range(self, naive_result):
        view = observe(AttackerModel.active(2), naive_result.ledgers)
        comparison = gained_vs_needed(view, 1, naive_result.readings, intervals=[0, 1])
        assert comparison.needed == int(naive_result.readings[1, :2].sum())
        expected = sum(int(x) // 3 for x in naive_result.readings[:, :2].ravel())
        assert comparison.gained == expected

    def test_single_meter_holds_a_third(self, rng):
        config = SimConfig(n_meters=1, m_aggregators=3, scheme=ShareScheme.NAIVE_EQUAL_SPLIT,
                           table_reproduction=True)
        view = observe(AttackerModel.active(1), fill_ledgers([[9]], config, rng))
        comparison = gained_vs_needed(view, 0, np.array([[9]]))
        assert (comparison.gained, comparison.needed, comparison.equal) == (3, 9, False)

    def test_all_zero_readings_coincide(self, naive_config, rng):
        readings = np.zeros((5, 4), dtype=np.int64)
        view = observe(AttackerModel.active(0), fill_ledgers(readings, naive_config, rng))
        comparison = gained_vs_needed(view, 2, readings)
        assert (comparison.gained, comparison.needed, comparison.equal) == (0, 0, True)

    @pytest.mark.slow
    def test_additive_coincidence_is_rare(self):
        runs = 1000
        coincidences = 0
        for seed in range(runs):
            config = SimConfig(n_meters=3 + seed % 8, scheme=ShareScheme.ADDITIVE_RANDOM, seed=seed)
            result = AggregationSimulation(config, n_intervals=3).run()
            view = observe(AttackerModel.active(seed % 3), result.ledgers)
            coincidences += gained_vs_needed(view, 0, result.readings).equal
        assert coincidences / runs <= 0.01

    def test_needs_single_aggregator(self, additive_result):
        view = observe(AttackerModel.active(0, 1), additive_result.ledgers)
        with pytest.raises(DomainError):
            gained_vs_needed(view, 0, additive_result.readings)

    def test_empty_range(self, additive_result):
        view = observe(AttackerModel.active(0), additive_result.ledgers)
        with pytest.raises(DomainError):
            gained_vs_needed(view, 0, additive_result.readings, intervals=[])


class TestEstimates:
    def setup_method(self):
        self.rng = np.random.default_rng(77)

    def _view(self, scheme, readings, model):
        config = SimConfig(n_meters=len(readings), scheme=scheme)
        return observe(model, fill_ledgers(readings, config, self.rng))

    def test_equal_split_single_share_reveals_reading(self):
        view = self._view(ShareScheme.NAIVE_EQUAL_SPLIT, [[9], [1], [2]], AttackerModel.active(1))
        estimate = estimate_reading(view, 0, 0, ShareScheme.NAIVE_EQUAL_SPLIT)
        assert estimate.point_estimate == 9 and estimate.exact

    def test_equal_split_estimate_within_bound(self):
        view = self._view(ShareScheme.NAIVE_EQUAL_SPLIT, [[11], [1], [2]], AttackerModel.active(2))
        estimate = estimate_reading(view, 0, 0, ShareScheme.NAIVE_EQUAL_SPLIT)
        assert abs(estimate.point_estimate - 11) <= estimate.error_bound == 2

    def test_equal_split_first_share_overshoots_within_bound(self):
        view = self._view(ShareScheme.NAIVE_EQUAL_SPLIT, [[11], [1], [2]], AttackerModel.active(0))
        estimate = estimate_reading(view, 0, 0, ShareScheme.NAIVE_EQUAL_SPLIT)
        assert estimate.point_estimate == 15
        assert abs(estimate.point_estimate - 11) <= estimate.error_bound

    def test_equal_split_two_shares_are_exact(self):
        view = self._view(ShareScheme.NAIVE_EQUAL_SPLIT, [[11], [1], [2]], AttackerModel.active(0, 2))
        estimate = estimate_reading(view, 0, 0, ShareScheme.NAIVE_EQUAL_SPLIT)
        assert (estimate.point_estimate, estimate.error_bound) == (11, 0)

    def test_additive_partial_view_is_unknown(self):
        view = self._view(ShareScheme.ADDITIVE_RANDOM, [[11], [1], [2]], AttackerModel.active(0, 1))
        assert estimate_reading(view, 0, 0, ShareScheme.ADDITIVE_RANDOM) is UNKNOWN
        assert not UNKNOWN.known

    def test_passive_reconstructs(self):
        view = self._view(ShareScheme.ADDITIVE_RANDOM, [[11], [1], [2]], AttackerModel.passive(3))
        estimate = estimate_reading(view, 0, 0, ShareScheme.ADDITIVE_RANDOM)
        assert (estimate.point_estimate, estimate.exact) == (11, True)

    def test_consistency(self):
        view = self._view(ShareScheme.NAIVE_EQUAL_SPLIT, [[9], [12], [9]], AttackerModel.active(1))
        assert consistent_with(view, 0, 0, ShareScheme.NAIVE_EQUAL_SPLIT, 9)
        assert consistent_with(view, 0, 0, ShareScheme.NAIVE_EQUAL_SPLIT, 10)
        assert not consistent_with(view, 1, 0, ShareScheme.NAIVE_EQUAL_SPLIT, 9)


class TestUserProbabilities:
    def test_additive_profile_is_uniform(self, additive_result):
        view = observe(AttackerModel.active(0), additive_result.ledgers)
        known = {t: int(additive_result.readings[2, t]) for t in range(additive_result.n_intervals)}
        profile = assign_user_probabilities(view, 5, ShareScheme.ADDITIVE_RANDOM, known)
        assert profile.probabilities == pytest.approx((0.2,) * 5)
        assert degree_of_anonymity(profile) == 1.0

    def test_equal_split_profile_singles_out_target(self):
        readings = [[300, 900], [301, 450], [150, 600]]
        config = SimConfig(n_meters=3, scheme=ShareScheme.NAIVE_EQUAL_SPLIT)
        view = observe(AttackerModel.active(1), fill_ledgers(readings, config, np.random.default_rng(0)))
        profile = assign_user_probabilities(view, 3, config.scheme, {0: 300, 1: 900})
        assert profile.probabilities == (1.0, 0.0, 0.0)
        assert degree_of_anonymity(profile) == 0.0

    def test_set_size_must_match_view(self, additive_result):
        view = observe(AttackerModel.active(0), additive_result.ledgers)
        with pytest.raises(DomainError):
            assign_user_probabilities(view, 4, ShareScheme.ADDITIVE_RANDOM)


def test_information_matrix(naive_result):
    view = observe(AttackerModel.active(0), naive_result.ledgers)
    matrix = information_matrix(view, naive_result.readings, intervals=range(4))
    assert matrix["visible_aggregators"] == [0]
    row = matrix["rows"][3]
    assert row["row_total"] == int(naive_result.readings[3, :4].sum())
    assert row["shares"][1] is None and row["shares"][0] is not None
    assert matrix["column_totals"][1] is None and matrix["column_totals"][2] is None
    assert matrix["column_totals"][0] == sum(
        int(x) // 3 + int(x) % 3 for x in naive_result.readings[:, :4].ravel()
    )


class TestRunAttack:
    def test_active_additive(self, additive_result):
        report = run_attack(additive_result, AttackerModel.active(0))
        assert all(e["point_estimate"] is None for e in report["estimates"])
        assert report["anonymity"]["degree"] == 1.0
        assert report["information_gain_fraction"] == pytest.approx(1 / 3)
        assert report["gained_vs_needed"]["equal"] is False
        assert "passive" not in report
        json.dumps(report)

    def test_active_equal_split(self, naive_result):
        report = run_attack(naive_result, AttackerModel.active(1))
        assert all(e["exact"] for e in report["estimates"])
        assert all(e["intervals_pinned"] == naive_result.n_intervals for e in report["estimates"])
        assert report["anonymity"]["degree"] < 1.0

    def test_report_carries_the_information_matrix(self, additive_result):
        report = run_attack(additive_result, AttackerModel.active(0))
        matrix = report["information_matrix"]
        assert matrix["visible_aggregators"] == [0]
        assert [row["row_total"] for row in matrix["rows"]] == [int(x) for x in additive_result.readings.sum(axis=1)]
        assert matrix["column_totals"][0] == report["gained_vs_needed"]["gained"]
        assert all(row["shares"][1] is None for row in matrix["rows"])
        json.dumps(report)

    def test_two_aggregators_skip_comparison(self, additive_result):
        report = run_attack(additive_result, AttackerModel.active(0, 2))
        assert report["gained_vs_needed"] is None
        assert report["anonymity"]["degree"] == 1.0

    def test_passive(self, additive_result):
        report = run_attack(additive_result, AttackerModel.passive(3), target=1, decryption_delay_hours=720)
        assert report["passive"] == {"full_reconstruction": True, "decryption_delay_hours": 720}
        assert [e["point_estimate"] for e in report["estimates"]] == [e["actual"] for e in report["estimates"]]
        assert report["user_probabilities"][1] > 0

    def test_unknown_target(self, additive_result):
        with pytest.raises(DomainError):
            run_attack(additive_result, AttackerModel.active(0), target=5)

    def test_identical_households_stay_hidden(self):
        config = SimConfig(n_meters=4, scheme=ShareScheme.NAIVE_EQUAL_SPLIT)
        profiles = {i: LoadProfile([120, 480, 90]) for i in range(4)}
        result = AggregationSimulation(config, profiles).run()
        report = run_attack(result, AttackerModel.active(0))
        assert report["anonymity"]["degree"] == 1.0
