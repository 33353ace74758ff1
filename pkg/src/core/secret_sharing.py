"""
Splitting readings into per-aggregator shares and putting them back together.

Two schemes are supported. ``NAIVE_EQUAL_SPLIT`` hands every aggregator the same
fraction of the reading (the remainder goes to aggregator 0); it is deterministic
and therefore leaks. ``ADDITIVE_RANDOM`` draws m-1 shares uniformly from the ring
and fixes share 0 so that all shares sum to the reading; any proper subset of its
shares is uniformly distributed.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .errors import DomainError
from .model import Interval, MeterId, Reading, ShareScheme, SimConfig


@dataclass(frozen=True)
class ShareVector:
    """The m shares of one reading, indexed by aggregator."""

    meter: MeterId
    interval: Interval
    shares: Tuple[int, ...]
    scheme: ShareScheme

    def share_for(self, aggregator: int) -> int:
        return self.shares[aggregator]


def naive_share(energy, m: int, aggregator: int):
    """Share that aggregator ``aggregator`` receives under the equal split.

    Works element-wise on numpy arrays as well as on plain integers.
    """
    share = energy // m
    if aggregator == 0:
        share = share + energy % m
    return share


def split(reading: Reading, config: SimConfig, rng: Optional[np.random.Generator] = None) -> ShareVector:
    """Split one reading into ``config.m_aggregators`` shares.

    Args:
        reading: Reading to split
        config: Simulation parameters (scheme, ring modulus, aggregator count)
        rng: Randomness stream; required for the additive scheme

    Returns:
        ShareVector whose shares sum to the reading's energy modulo the ring modulus
    """
    m, p = config.m_aggregators, config.modulus
    energy = reading.energy
    if energy >= p:
        raise DomainError(f"energy {energy} is not below the ring modulus {p}")

    if config.scheme is ShareScheme.NAIVE_EQUAL_SPLIT:
        shares = tuple(naive_share(energy, m, j) for j in range(m))
    else:
        if rng is None:
            raise DomainError("the additive scheme needs a seeded randomness stream")
        others = [int(x) for x in rng.integers(0, p, size=m - 1)]
        shares = ((energy - sum(others)) % p, *others)

    return ShareVector(reading.meter, reading.interval, shares, config.scheme)


def split_matrix(energies: np.ndarray, config: SimConfig,
                 rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Vectorised :func:`split` over an array of energies.

    Returns:
        int64 array of shape ``energies.shape + (m,)``
    """
    energies = np.asarray(energies, dtype=np.int64)
    m, p = config.m_aggregators, config.modulus
    if energies.size and (energies.min() < 0 or energies.max() >= p):
        raise DomainError(f"energies must lie in [0, {p})")

    shares = np.empty(energies.shape + (m,), dtype=np.int64)
    if config.scheme is ShareScheme.NAIVE_EQUAL_SPLIT:
        for j in range(m):
            shares[..., j] = naive_share(energies, m, j)
        return shares

    if rng is None:
        raise DomainError("the additive scheme needs a seeded randomness stream")
    shares[..., 1:] = rng.integers(0, p, size=energies.shape + (m - 1,), dtype=np.int64)
    first = energies % p
    for j in range(1, m):
        first = (first - shares[..., j]) % p
    shares[..., 0] = first
    return shares


def reconstruct(shares: ShareVector, config: SimConfig) -> int:
    """Recombine a full share vector into the original energy."""
    if len(shares.shares) != config.m_aggregators:
        raise DomainError(f"expected {config.m_aggregators} shares, got {len(shares.shares)}")
    return sum(shares.shares) % config.modulus


def ring_sum(values: np.ndarray, modulus: int, axis: int = -1) -> np.ndarray:
    """Sum int64 ring elements along ``axis`` without overflowing."""
    values = np.moveaxis(np.asarray(values, dtype=np.int64), axis, 0)
    total = np.zeros(values.shape[1:], dtype=np.int64)
    for row in values:
        total = (total + row) % modulus
    return total


@dataclass(frozen=True)
class PartialViewHistogram:
    """Empirical distribution of a proper subset of shares over repeated splits.

    Shares are binned into ``bins`` equal-width buckets of the ring per coordinate;
    ``counts`` is the joint histogram flattened to one dimension.
    """

    secret: int
    subset: Tuple[int, ...]
    bins: int
    trials: int
    counts: np.ndarray
    distinct: int

    def chi_square_against(self, other: "PartialViewHistogram") -> float:
        """p-value of a chi-square test that both histograms share one distribution."""
        if self.counts.shape != other.counts.shape:
            raise DomainError("histograms have different shapes")
        table = np.vstack([self.counts, other.counts])
        table = table[:, table.sum(axis=0) > 0]
        if table.shape[1] < 2:
            return 1.0 if np.array_equal(self.counts, other.counts) else 0.0
        return float(stats.chi2_contingency(table).pvalue)

    def chi_square_uniform(self) -> float:
        """p-value of a goodness-of-fit test against the uniform distribution."""
        return float(stats.chisquare(self.counts).pvalue)


def partial_view_distribution(secret: int, subset_size: int, trials: int, config: SimConfig,
                              rng: np.random.Generator, bins: int = 16,
                              subset: Optional[Sequence[int]] = None) -> PartialViewHistogram:
    """Histogram what ``subset_size`` colluding aggregators see over many splits of one secret.

    Args:
        secret: The reading that is split ``trials`` times
        subset_size: Number of shares observed; must be below m
        trials: Number of fresh splits
        config: Simulation parameters
        rng: Randomness stream for the splits
        bins: Buckets per observed coordinate
        subset: Which aggregators are observed (defaults to the first ``subset_size``)

    Returns:
        PartialViewHistogram of the observed share tuples
    """
    m = config.m_aggregators
    if not 1 <= subset_size < m:
        raise DomainError(f"subset size must lie in [1, {m - 1}], got {subset_size}")
    if trials < 1:
        raise DomainError("trials must be positive")
    chosen = tuple(subset) if subset is not None else tuple(range(subset_size))
    if len(chosen) != subset_size or len(set(chosen)) != subset_size or not all(0 <= j < m for j in chosen):
        raise DomainError(f"subset {chosen} is not {subset_size} distinct aggregators")

    shares = split_matrix(np.full(trials, secret, dtype=np.int64), config, rng)[:, list(chosen)]
    width = -(-config.modulus // bins)
    buckets = shares // width
    flat = np.zeros(trials, dtype=np.int64)
    for column in range(subset_size):
        flat = flat * bins + buckets[:, column]
    counts = np.bincount(flat, minlength=bins**subset_size)
    distinct = len(np.unique(shares, axis=0))
    return PartialViewHistogram(secret, chosen, bins, trials, counts, distinct)
