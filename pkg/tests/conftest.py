"""
Shared fixtures for the simulator tests.
"""

import numpy as np
import pytest

from src.core.aggregation import AggregatorLedger
from src.core.model import AggregatorId, ShareScheme, SimConfig
from src.core.secret_sharing import split_matrix
from src.core.simulation import AggregationSimulation


@pytest.fixture
def additive_config():
    return SimConfig(n_meters=5, m_aggregators=3, scheme=ShareScheme.ADDITIVE_RANDOM, seed=11)


@pytest.fixture
def naive_config():
    return SimConfig(n_meters=5, m_aggregators=3, scheme=ShareScheme.NAIVE_EQUAL_SPLIT, seed=11)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def additive_result(additive_config):
    return AggregationSimulation(additive_config, n_intervals=16).run()


@pytest.fixture
def naive_result(naive_config):
    return AggregationSimulation(naive_config, n_intervals=16).run()


def fill_ledgers(readings, config, rng):
    """Ledgers holding fresh shares of ``readings`` (meters x intervals)."""
    readings = np.asarray(readings, dtype=np.int64)
    shares = split_matrix(readings, config, rng)
    return [AggregatorLedger(AggregatorId(j), readings.shape[0], readings.shape[1], config.modulus)
            .ingest_matrix(shares[:, :, j]) for j in range(config.m_aggregators)]
