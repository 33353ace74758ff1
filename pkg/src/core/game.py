"""
The distinguishing game.

Each trial: the adversary fixes two load profiles; the challenger draws a secret
bit b, installs profile b at a random meter among n-1 fresh background meters,
runs the split/aggregate pipeline for one round and shows the adversary only its
observable. The adversary wins when its guess equals b. Bit 0 selects the first
profile, bit 1 the second.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .adversary import AttackerModel, observe
from .aggregation import AggregatorLedger, SupplierState
from .errors import DomainError
from .loadgen import Archetype, LoadProfile, ProfileGenSpec, generate_profile
from .model import INTERVALS_PER_DAY, AggregatorId, ShareScheme, SimConfig, derive_rng
from .secret_sharing import naive_share, ring_sum, split_matrix

logger = logging.getLogger(__name__)

DEFAULT_ROUND_LENGTH = INTERVALS_PER_DAY
DEFAULT_TRIALS = 5000
PROGRESS_EVERY = 1000

# flat versus peaky household: the adversary's easiest pair
DEFAULT_CHALLENGE = (
    ProfileGenSpec(Archetype.FLAT, base_wh=300),
    ProfileGenSpec(Archetype.PEAKY, base_wh=300, peak_wh=1500),
)
DEFAULT_BACKGROUND = ProfileGenSpec(Archetype.DIURNAL, base_wh=100, peak_wh=800, noise_std=50.0)


class Strategy(str, Enum):
    RANDOM_GUESS = "random-guess"
    COLUMN_SUM_MATCHER = "column-sum-matcher"
    TOTAL_SUM_MATCHER = "total-sum-matcher"


class Observable(str, Enum):
    SINGLE_AGGREGATOR = "single-aggregator"
    ALL_AGGREGATORS = "all-aggregators"
    SUPPLIER_TOTALS = "supplier-totals"


@dataclass(frozen=True)
class Distinguisher:
    strategy: Strategy
    observable: Observable

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "observable", Observable(self.observable))
        if self.strategy is Strategy.COLUMN_SUM_MATCHER and self.observable is Observable.SUPPLIER_TOTALS:
            raise DomainError("the column-sum matcher needs aggregator contents, not supplier totals")
        if self.strategy is Strategy.TOTAL_SUM_MATCHER and self.observable is not Observable.SUPPLIER_TOTALS:
            raise DomainError("the total-sum matcher works on supplier totals")

    def attacker_model(self, m: int) -> Optional[AttackerModel]:
        if self.observable is Observable.SINGLE_AGGREGATOR:
            return AttackerModel.active(0)
        if self.observable is Observable.ALL_AGGREGATORS:
            return AttackerModel.passive(m)
        return None


@dataclass
class GameTranscript:
    trials: int
    wins: int
    seed: int
    per_trial: Optional[List[Tuple[int, int]]] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.wins <= self.trials:
            raise DomainError(f"wins ({self.wins}) must lie in [0, trials={self.trials}]")

    @property
    def success_rate(self) -> float:
        return self.wins / self.trials

    @property
    def advantage(self) -> float:
        return abs(self.success_rate - 0.5)

    def to_dict(self) -> dict:
        report = {
            "trials": self.trials,
            "wins": self.wins,
            "success_rate": self.success_rate,
            "advantage": self.advantage,
            "seed": self.seed,
            "metadata": self.metadata,
        }
        if self.per_trial is not None:
            report["per_trial"] = [{"trial": i, "challenge_bit": b, "guess": g}
                                   for i, (b, g) in enumerate(self.per_trial)]
        return report

    def summary(self) -> str:
        return (f"{self.metadata.get('strategy', '?')} on {self.metadata.get('observable', '?')}: "
                f"success {self.success_rate:.4f} over {self.trials} trials, advantage {self.advantage:.4f}")


def binomial_band(trials: int, sigmas: float = 3.0) -> float:
    """Half-width of the ``sigmas`` band around 0.5 for a fair coin."""
    return sigmas * math.sqrt(0.25 / trials)


@dataclass(frozen=True)
class Band:
    max_advantage: Optional[float] = None
    min_success: Optional[float] = None

    def check(self, transcript: GameTranscript) -> Optional[str]:
        if self.max_advantage is not None and transcript.advantage > self.max_advantage:
            return f"advantage {transcript.advantage:.4f} exceeds {self.max_advantage:.4f}"
        if self.min_success is not None and transcript.success_rate < self.min_success:
            return f"success rate {transcript.success_rate:.4f} is below {self.min_success:.2f}"
        return None


def expected_band(distinguisher: Distinguisher, scheme: ShareScheme, trials: int) -> Optional[Band]:
    """Acceptance band for a configuration, or None when none is defined."""
    if distinguisher.strategy is Strategy.RANDOM_GUESS:
        return Band(max_advantage=binomial_band(trials))
    if distinguisher.strategy is Strategy.COLUMN_SUM_MATCHER:
        if distinguisher.observable is Observable.ALL_AGGREGATORS or scheme is ShareScheme.NAIVE_EQUAL_SPLIT:
            return Band(min_success=0.99)
        return Band(max_advantage=binomial_band(trials))
    return None


def _ring_distance(a: int, b: int, modulus: int) -> int:
    d = (a - b) % modulus
    return min(d, modulus - d)


def column_sum_matcher_guess(view, lf_1: LoadProfile, lf_2: LoadProfile, scheme: ShareScheme) -> int:
    """Guess which challenge profile hides in an aggregator view.

    With every aggregator visible the rows are reconstructed and compared with
    the profiles directly. With one equal-split aggregator the expected share
    pattern of each profile is matched against every visible row; an exact match
    wins. Under additive sharing one aggregator's rows carry nothing, so the
    guess falls back to the ring distance between the column total and each
    profile's share pattern.
    """
    m, p = view.m_aggregators, view.modulus
    candidates = (lf_1.series, lf_2.series)
    if len(view.aggregators) == m:
        rows = np.zeros_like(view.cells[0])
        for a in view.aggregators:
            rows = (rows + view.cells[a]) % p
        distances = [np.abs(rows - lf).sum(axis=1).min() for lf in candidates]
    elif len(view.aggregators) != 1:
        raise DomainError("the column-sum matcher expects one aggregator or all of them")
    else:
        aggregator = view.aggregators[0]
        rows = view.cells[aggregator]
        patterns = [naive_share(lf, m, aggregator) for lf in candidates]
        if ShareScheme(scheme) is ShareScheme.NAIVE_EQUAL_SPLIT:
            distances = [np.abs(rows - pattern).sum(axis=1).min() for pattern in patterns]
        else:
            observed = int(ring_sum(view.column_sums[aggregator], p, axis=0))
            distances = [_ring_distance(observed, int(pattern.sum()) % p, p) for pattern in patterns]
    return 0 if distances[0] <= distances[1] else 1


def total_sum_matcher_guess(totals: np.ndarray, lf_1: LoadProfile, lf_2: LoadProfile,
                            background_mean: np.ndarray) -> int:
    """Guess b minimising the squared gap between ``totals - lf_b`` and the expected background."""
    residuals = [np.asarray(totals, dtype=float) - lf.series - background_mean for lf in (lf_1, lf_2)]
    distances = [float(np.dot(r, r)) for r in residuals]
    return 0 if distances[0] <= distances[1] else 1


class DistinguishingGame:
    """Challenger for repeated trials of the distinguishing game."""

    def __init__(self, distinguisher: Distinguisher, n: int, config: SimConfig,
                 challenge: Tuple[LoadProfile, LoadProfile],
                 background: Optional[ProfileGenSpec] = None,
                 pool: Optional[Sequence[LoadProfile]] = None):
        """Initialize the challenger.

        Args:
            distinguisher: Adversary strategy and what it observes
            n: Number of meters per round (the challenge meter plus n-1 backgrounds)
            config: Scheme, modulus and aggregator count
            challenge: The adversary's two profiles; both must have the round length
            background: Generator for fresh background profiles
            pool: Fixed background profiles, sampled with replacement per trial
        """
        if n <= 2:
            raise DomainError(f"the game needs more than two meters, got {n}")
        lf_1, lf_2 = challenge
        if len(lf_1) != len(lf_2):
            raise DomainError("challenge profiles must have the same length")
        self.round_length = len(lf_1)
        if background is None and not pool:
            raise DomainError("the game needs background profiles: a non-empty pool or a generator")
        if pool and any(len(profile) != self.round_length for profile in pool):
            raise DomainError("background profiles must match the round length")
        self.distinguisher = distinguisher
        self.n = n
        self.config = config
        self.challenge = (lf_1, lf_2)
        self.background = background.with_length(self.round_length) if background is not None else None
        self.pool = list(pool) if pool else None
        self.bound = config.modulus // n
        for profile in (lf_1, lf_2, *(self.pool or [])):
            profile.check_bound(self.bound)
        self.background_mean = self._background_mean()

    def _background_mean(self) -> np.ndarray:
        if self.pool is not None:
            per_meter = np.mean([profile.series for profile in self.pool], axis=0)
        else:
            per_meter = self.background.mean_series()
        return (self.n - 1) * per_meter

    def _backgrounds(self, rng: np.random.Generator) -> np.ndarray:
        if self.pool is not None:
            picks = rng.integers(0, len(self.pool), size=self.n - 1)
            return np.vstack([self.pool[i].series for i in picks])
        return np.vstack([generate_profile(self.background, rng, bound=self.bound).series
                          for _ in range(self.n - 1)])

    def play_trial(self, seed: int, index: int) -> Tuple[int, int, float]:
        """One trial; returns (challenge bit, guess, std of the background sum around its mean)."""
        config = self.config
        rng = derive_rng(seed, "trial", index)
        bit = int(rng.integers(0, 2))
        slot = int(rng.integers(0, self.n))
        backgrounds = self._backgrounds(rng)
        readings = np.insert(backgrounds, slot, self.challenge[bit].series, axis=0)

        shares = split_matrix(readings, config, rng)
        ledgers = [AggregatorLedger(AggregatorId(j), self.n, self.round_length, config.modulus)
                   .ingest_matrix(shares[:, :, j]) for j in range(config.m_aggregators)]

        lf_1, lf_2 = self.challenge
        strategy = self.distinguisher.strategy
        if strategy is Strategy.RANDOM_GUESS:
            guess = int(rng.integers(0, 2))
        elif strategy is Strategy.COLUMN_SUM_MATCHER:
            view = observe(self.distinguisher.attacker_model(config.m_aggregators), ledgers)
            guess = column_sum_matcher_guess(view, lf_1, lf_2, config.scheme)
        else:
            supplier = SupplierState(config.m_aggregators, config.modulus)
            supplier.collect_block(np.vstack([ledger.snapshot()[2] for ledger in ledgers]))
            totals = np.array([supplier.interval_totals[t] for t in range(self.round_length)])
            guess = total_sum_matcher_guess(totals, lf_1, lf_2, self.background_mean)
        residual_std = float((backgrounds.sum(axis=0) - self.background_mean).std())
        return bit, guess, residual_std

    def run(self, trials: int, seed: int, record_trials: bool = False, workers: int = 1) -> GameTranscript:
        """Play ``trials`` independent trials; the transcript does not depend on ``workers``."""
        if trials < 1:
            raise DomainError("trials must be at least 1")
        logger.info("Game: %s on %s, %s, n=%d, %d trials",
                    self.distinguisher.strategy.value, self.distinguisher.observable.value,
                    self.config.scheme.value, self.n, trials)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(lambda i: self.play_trial(seed, i), range(trials)))
        else:
            outcomes = []
            for i in range(trials):
                outcomes.append(self.play_trial(seed, i))
                if (i + 1) % PROGRESS_EVERY == 0:
                    logger.info("Game progress: %d/%d trials", i + 1, trials)

        wins = sum(1 for bit, guess, _ in outcomes if bit == guess)
        ones = sum(bit for bit, _, _ in outcomes)
        lf_1, lf_2 = self.challenge
        metadata = {
            "strategy": self.distinguisher.strategy.value,
            "observable": self.distinguisher.observable.value,
            "scheme": self.config.scheme.value,
            "n_meters": self.n,
            "m_aggregators": self.config.m_aggregators,
            "round_length": self.round_length,
            "challenge_bit_ones": ones,
            "challenge_gap_wh": int(np.abs(lf_1.series - lf_2.series).max()),
            "background_residual_std_wh": float(np.mean([std for _, _, std in outcomes])),
        }
        transcript = GameTranscript(
            trials, wins, seed,
            [(bit, guess) for bit, guess, _ in outcomes] if record_trials else None,
            metadata,
        )
        logger.info("Game finished: %s", transcript.summary())
        return transcript


def run_game(distinguisher: Distinguisher, n: int, trials: int = DEFAULT_TRIALS,
             config: Optional[SimConfig] = None, seed: int = 0,
             challenge: Optional[Tuple[LoadProfile, LoadProfile]] = None,
             background: Optional[ProfileGenSpec] = DEFAULT_BACKGROUND,
             pool: Optional[Sequence[LoadProfile]] = None,
             round_length: int = DEFAULT_ROUND_LENGTH,
             record_trials: bool = False, workers: int = 1) -> GameTranscript:
    """Run the distinguishing game and return its transcript.

    ``challenge`` defaults to a flat and a peaky household of ``round_length``
    intervals, with the meal peaks squeezed into rounds shorter than a day;
    backgrounds come from ``pool`` when given, else from ``background``.
    """
    if n <= 2:
        raise DomainError(f"the game needs more than two meters, got {n}")
    if config is None:
        config = SimConfig(n_meters=n, seed=seed)
    if challenge is None:
        rng = derive_rng(seed, "challenge")
        challenge = tuple(generate_profile(spec.squeezed_into(round_length), rng) for spec in DEFAULT_CHALLENGE)
    if pool:
        background = None
    game = DistinguishingGame(distinguisher, n, config, challenge, background, pool)
    return game.run(trials, seed, record_trials, workers)
