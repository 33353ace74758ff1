"""
Domain types shared by every part of the simulator.

Meters, aggregators and intervals are identified by dense integer indices. All
values here are immutable and safe to share between threads.
"""

import hashlib
import logging
from dataclasses import asdict, dataclass, fields
from enum import Enum
from pathlib import Path
from typing import List, NewType, Union

import numpy as np
from sympy import isprime

from .errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

MeterId = NewType("MeterId", int)
AggregatorId = NewType("AggregatorId", int)

INTERVAL_MINUTES = 15
INTERVALS_PER_DAY = 24 * 60 // INTERVAL_MINUTES
DEFAULT_INTERVALS_PER_PERIOD = 30 * INTERVALS_PER_DAY
DEFAULT_MODULUS = 2**61 - 1


class ShareScheme(str, Enum):
    """How a reading is cut into per-aggregator shares."""

    NAIVE_EQUAL_SPLIT = "naive-equal-split"
    ADDITIVE_RANDOM = "additive-random"

    @classmethod
    def parse(cls, value: Union[str, "ShareScheme"]) -> "ShareScheme":
        try:
            return cls(value)
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise ConfigError(f"unknown share scheme '{value}' (choose from {choices})",
                              key="scheme") from None


@dataclass(frozen=True, order=True)
class Interval:
    """One 15-minute metering slot, numbered from the start of the period."""

    ordinal: int
    duration_minutes: int = INTERVAL_MINUTES

    def __post_init__(self):
        if self.ordinal < 0:
            raise DomainError(f"interval ordinal must be non-negative, got {self.ordinal}")
        if self.duration_minutes != INTERVAL_MINUTES:
            raise DomainError(f"intervals last {INTERVAL_MINUTES} minutes, "
                              f"got {self.duration_minutes}")

    @property
    def end_minute(self) -> int:
        return (self.ordinal + 1) * self.duration_minutes


IntervalLike = Union[Interval, int]


def as_ordinal(interval: IntervalLike) -> int:
    """Accept an Interval or a bare ordinal."""
    if isinstance(interval, Interval):
        return interval.ordinal
    ordinal = int(interval)
    if ordinal < 0:
        raise DomainError(f"interval ordinal must be non-negative, got {ordinal}")
    return ordinal


@dataclass(frozen=True)
class Reading:
    """One meter's consumption for one interval, in watt-hours."""

    meter: MeterId
    interval: Interval
    energy: int

    def __post_init__(self):
        if self.energy < 0:
            raise DomainError(f"energy must be non-negative, got {self.energy}")


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one simulated deployment.

    ``table_reproduction`` relaxes the ``n > 2`` and ``m > 2`` constraints so that
    the degenerate rows of the comparison tables (one or two aggregators or users)
    can be evaluated.
    """

    n_meters: int
    m_aggregators: int = 3
    scheme: ShareScheme = ShareScheme.ADDITIVE_RANDOM
    modulus: int = DEFAULT_MODULUS
    seed: int = 0
    intervals_per_period: int = DEFAULT_INTERVALS_PER_PERIOD
    table_reproduction: bool = False

    def __post_init__(self):
        object.__setattr__(self, "scheme", ShareScheme.parse(self.scheme))
        floor = 1 if self.table_reproduction else 3
        if self.n_meters < floor:
            raise ConfigError(f"n_meters must be greater than {floor - 1} "
                              f"(the anonymity set needs more than two users), got {self.n_meters}",
                              key="n_meters")
        if self.m_aggregators < floor:
            raise ConfigError(f"m_aggregators must be greater than {floor - 1}, "
                              f"got {self.m_aggregators}", key="m_aggregators")
        if not isprime(self.modulus):
            raise ConfigError(f"modulus must be prime, got {self.modulus}", key="modulus")
        if self.modulus >= 2**62:
            # two ring elements must add without leaving int64
            raise ConfigError("modulus must be below 2**62", key="modulus")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must fit in 64 bits, got {self.seed}", key="seed")
        if self.intervals_per_period < 1:
            raise ConfigError("intervals_per_period must be at least 1", key="intervals_per_period")

    @property
    def energy_bound(self) -> int:
        """Exclusive upper bound on one reading; keeps every aggregate below the modulus."""
        return self.modulus // self.n_meters

    def to_text(self) -> str:
        lines = []
        for key, value in asdict(self).items():
            if isinstance(value, ShareScheme):
                value = value.value
            elif isinstance(value, bool):
                value = str(value).lower()
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, **defaults) -> "SimConfig":
        values = {**defaults, **parse_config_text(text)}
        if "n_meters" not in values:
            raise ConfigError("n_meters is required", key="n_meters")
        return cls(**values)

    def to_file(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def from_file(cls, path: Union[str, Path], **defaults) -> "SimConfig":
        logger.debug("Loading simulation config from %s", path)
        return cls.from_text(Path(path).read_text(encoding="utf-8"), **defaults)


def parse_config_text(text: str) -> dict:
    """Parse `key = value` lines into typed SimConfig field values."""
    known = {f.name for f in fields(SimConfig)}
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got '{raw.strip()}'", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"unknown key '{key}'", key=key, line=number)
        try:
            values[key] = _coerce(key, value)
        except ValueError:
            raise ConfigError(f"invalid value '{value}' for {key}", key=key, line=number) from None
    return values


def _coerce(key: str, value: str):
    if key == "scheme":
        return ShareScheme.parse(value)
    if key == "table_reproduction":
        lowered = value.lower()
        if lowered not in ("true", "false"):
            raise ValueError(value)
        return lowered == "true"
    return int(value, 0)


def node_count(config: SimConfig) -> int:
    """Total number of nodes in the system, ``m * n``."""
    return config.m_aggregators * config.n_meters


def anonymity_set_size(config: SimConfig) -> int:
    """Size of the anonymity set: every meter is a possible originator."""
    return config.n_meters


def interval_schedule(count: int) -> List[dict]:
    """Label the first ``count`` intervals of a period by elapsed time.

    Returns:
        Rows with the ordinal, elapsed minutes and a human label such as
        ``15-mins``, ``6-hours`` or ``30-days``.
    """
    if count < 1:
        raise DomainError("schedule needs at least one interval")
    rows = []
    for ordinal in range(count):
        elapsed = Interval(ordinal).end_minute
        if elapsed % (24 * 60) == 0:
            label = f"{elapsed // (24 * 60)}-days"
        elif elapsed % 60 == 0:
            label = f"{elapsed // 60}-hours"
        else:
            label = f"{elapsed}-mins"
        rows.append({"ordinal": ordinal, "elapsed_minutes": elapsed, "label": label})
    return rows


def derive_seed(seed: int, *keys) -> int:
    """64-bit seed for an independent stream: ``seed XOR blake2b(keys)``."""
    keys = tuple(int(k) if isinstance(k, (int, np.integer)) else str(k) for k in keys)
    digest = hashlib.blake2b(repr(keys).encode("utf-8"), digest_size=8).digest()
    return seed ^ int.from_bytes(digest, "big")


def derive_rng(seed: int, *keys) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *keys))
