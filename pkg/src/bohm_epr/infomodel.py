"""What each analyzer station knows about the other, and when.

A ``SideTimeline`` is the switching history of one analyzer: a sorted
sequence of (time, angle) change points, the first of which must sit at
or before t = 0 so every query has an answer. ``SettingTimelines`` bundles
both sides with the station separation and the speed at which setting
news is allowed to travel.

``effective_settings`` builds the setting pair a given side uses when it
evaluates the guidance law at time t:

* its own angle is always the current one, ``angle_at(t)``;
* in nonlocal mode the partner angle is also current;
* in local mode the partner angle is the one in force a light-crossing
  ago, ``angle_at(t - separation / signal_speed)``, i.e. the freshest
  value a signal at ``signal_speed`` could have delivered.

With ``signal_speed`` set to the true speed of light the delay for any
bench-sized separation is nanoseconds, far shorter than a switching
interval, and the two modes coincide. The interesting regime drops
``signal_speed`` to beam-like values so a switch can stay invisible to
the far side for a whole pair flight.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .physconst import LIGHT_SPEED
from .velocity import SettingPair, Side


class InformationMode(enum.Enum):
    """How fast one station learns about the other's setting."""

    LOCAL = "local"
    NONLOCAL = "nonlocal"


@dataclass(frozen=True)
class SideTimeline:
    """Switching history of one analyzer as (time, angle) change points.

    Times must be strictly increasing and the first must be <= 0 (it may
    be -inf for a setting that predates the run). Consecutive angles must
    differ, so every entry is a real switch.
    """

    entries: tuple[tuple[float, float], ...]
    _times: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.entries:
            raise ConfigError("timeline needs at least one entry")
        times = []
        prev_t = -math.inf
        prev_angle = None
        for entry_time, angle in self.entries:
            if math.isnan(entry_time) or not math.isfinite(angle):
                raise ConfigError("timeline entries must be (time, finite angle)")
            if times and entry_time <= prev_t:
                raise ConfigError("timeline times must be strictly increasing")
            if prev_angle is not None and angle == prev_angle:
                raise ConfigError("consecutive timeline angles must differ")
            times.append(entry_time)
            prev_t = entry_time
            prev_angle = angle
        if times[0] > 0.0:
            raise ConfigError("timeline must start at or before t = 0")
        object.__setattr__(self, "_times", tuple(times))

    def angle_at(self, t: float) -> float:
        """The angle in force at time t (change points take effect at t)."""
        if math.isnan(t):
            raise ConfigError("query time must not be NaN")
        idx = bisect.bisect_right(self._times, t) - 1
        if idx < 0:
            raise ConfigError(f"no timeline entry at or before t = {t!r}")
        return self.entries[idx][1]

    def has_change_in(self, t0: float, t1: float) -> bool:
        """True when any switch time falls inside the closed window [t0, t1]."""
        if t1 < t0:
            raise ConfigError("window must be ordered")
        lo = bisect.bisect_left(self._times, t0)
        hi = bisect.bisect_right(self._times, t1)
        return hi > lo


def static_timeline(angle: float) -> SideTimeline:
    """A timeline that always held one angle."""
    return SideTimeline(entries=((-math.inf, angle),))


@dataclass(frozen=True)
class SettingTimelines:
    """Both switching histories plus the geometry of information flow."""

    side_a: SideTimeline
    side_b: SideTimeline
    separation: float
    signal_speed: float = LIGHT_SPEED

    def __post_init__(self) -> None:
        if not math.isfinite(self.separation) or self.separation < 0.0:
            raise ConfigError("separation must be finite and non-negative")
        if not math.isfinite(self.signal_speed) or self.signal_speed <= 0.0:
            raise ConfigError("signal_speed must be finite and positive")

    @property
    def news_delay(self) -> float:
        """Time for setting news to cross between the stations."""
        return self.separation / self.signal_speed


def effective_settings(
    side: Side,
    t_eval: float,
    timelines: SettingTimelines,
    mode: InformationMode,
) -> SettingPair:
    """The setting pair one side attributes to the apparatus at ``t_eval``."""
    if not math.isfinite(t_eval):
        raise ConfigError("t_eval must be finite")
    t_partner = t_eval if mode is InformationMode.NONLOCAL else t_eval - timelines.news_delay
    if side is Side.L:
        return SettingPair(
            angle_a=timelines.side_a.angle_at(t_eval),
            angle_b=timelines.side_b.angle_at(t_partner),
        )
    return SettingPair(
        angle_a=timelines.side_a.angle_at(t_partner),
        angle_b=timelines.side_b.angle_at(t_eval),
    )
