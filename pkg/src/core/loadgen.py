"""
Synthetic household load profiles.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError
from .model import INTERVALS_PER_DAY


class Archetype(str, Enum):
    FLAT = "flat"
    PEAKY = "peaky"
    DIURNAL = "diurnal"


# breakfast 07:30 and dinner 19:00
MEAL_SLOTS = (30, 76)


class LoadProfile:
    """Per-interval energy series of one meter, in watt-hours."""

    __slots__ = ("series",)

    def __init__(self, series: Sequence[int]):
        array = np.array(series, dtype=np.int64)
        if array.ndim != 1 or array.size == 0:
            raise DomainError("a load profile is a non-empty one-dimensional series")
        if array.min() < 0:
            raise DomainError("load profiles cannot contain negative energy")
        array.flags.writeable = False
        self.series = array

    def __len__(self) -> int:
        return int(self.series.size)

    def __eq__(self, other) -> bool:
        return isinstance(other, LoadProfile) and np.array_equal(self.series, other.series)

    def __hash__(self) -> int:
        return hash(self.series.tobytes())

    def __repr__(self) -> str:
        return f"LoadProfile(len={len(self)}, total={int(self.series.sum())})"

    def check_bound(self, bound: int) -> "LoadProfile":
        if self.series.max() >= bound:
            raise DomainError(f"load profile value {int(self.series.max())} is not below the bound {bound}")
        return self


@dataclass(frozen=True)
class ProfileGenSpec:
    """Recipe for a synthetic profile."""

    archetype: Archetype
    base_wh: int
    peak_wh: Optional[int] = None
    noise_std: float = 0.0
    length: int = INTERVALS_PER_DAY
    peak_slot: int = MEAL_SLOTS[1]
    meal_slots: Tuple[int, ...] = MEAL_SLOTS

    def __post_init__(self):
        object.__setattr__(self, "archetype", Archetype(self.archetype))
        if self.peak_wh is None:
            object.__setattr__(self, "peak_wh", self.base_wh)
        if self.base_wh < 0:
            raise DomainError(f"base_wh must be non-negative, got {self.base_wh}")
        if self.peak_wh < self.base_wh:
            raise DomainError(f"peak_wh ({self.peak_wh}) must not be below base_wh ({self.base_wh})")
        if self.noise_std < 0:
            raise DomainError("noise_std must be non-negative")
        if self.length < 1:
            raise DomainError("length must be at least one interval")
        if not 0 <= self.peak_slot < INTERVALS_PER_DAY:
            raise DomainError(f"peak_slot must lie within one day (0..{INTERVALS_PER_DAY - 1})")

    def with_length(self, length: int) -> "ProfileGenSpec":
        return replace(self, length=length)

    def squeezed_into(self, length: int) -> "ProfileGenSpec":
        """Like :meth:`with_length`, with the daily peaks moved proportionally into a shorter round."""
        if length >= INTERVALS_PER_DAY:
            return self.with_length(length)
        scale = length / INTERVALS_PER_DAY
        meal_slots = tuple(sorted({int(slot * scale) for slot in self.meal_slots}))
        return replace(self, length=length, meal_slots=meal_slots, peak_slot=int(self.peak_slot * scale))

    def mean_series(self) -> np.ndarray:
        """Noise-free series; the expected profile before clamping."""
        slots = np.arange(self.length) % INTERVALS_PER_DAY
        if self.archetype is Archetype.FLAT:
            return np.full(self.length, float(self.base_wh))
        if self.archetype is Archetype.PEAKY:
            series = np.full(self.length, float(self.base_wh))
            series[np.isin(slots, self.meal_slots)] = self.peak_wh
            return series
        phase = 2 * np.pi * (slots - self.peak_slot) / INTERVALS_PER_DAY
        return self.base_wh + (self.peak_wh - self.base_wh) * (1 + np.cos(phase)) / 2


def generate_profile(spec: ProfileGenSpec, rng: np.random.Generator,
                     bound: Optional[int] = None) -> LoadProfile:
    """Draw one profile from ``spec``.

    Args:
        spec: Archetype and parameters
        rng: Randomness stream for the Gaussian noise
        bound: Exclusive upper clamp (``modulus // n`` in a simulation)

    Returns:
        LoadProfile rounded to whole watt-hours and clamped to ``[0, bound)``
    """
    series = spec.mean_series()
    if spec.noise_std > 0:
        series = series + rng.normal(0.0, spec.noise_std, size=spec.length)
    upper = None if bound is None else bound - 1
    series = np.clip(np.rint(series), 0, upper)
    return LoadProfile(series.astype(np.int64))
