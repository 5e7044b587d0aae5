"""Two-particle transverse velocity field inside the magnets.

Both packets are guided by a single entangled spin-singlet wave. With
``z_l`` and ``z_r`` the transverse positions, the velocity of each
particle at time t is

    v_X = drift(t) * z_X + ratio_X(u, v) * spin_kick(t)

where

    drift(t)     = spread_rate^2 * t / (1 + (spread_rate * t)^2)
    spin_kick(t) = accel * t * (2 - (spread_rate * t)^2 / (1 + (spread_rate * t)^2))
    w(t)         = exp_coeff * t^2 / (1 + (spread_rate * t)^2)
    u            = w * (z_l + z_r) / 2
    v            = w * (z_l - z_r) / 2

and the coupling ratios mix the two branches of the singlet through the
relative analyzer angle, with s2 = sin^2((angle_a - angle_b)/2) and
c2 = cos^2 of the same half angle:

    ratio_L = (s2 sinh u + c2 sinh v) / (s2 cosh u + c2 cosh v)
    ratio_R = (s2 sinh u - c2 sinh v) / (s2 cosh u + c2 cosh v)

The hyperbolic arguments grow like exp_coeff * t^2 * z and reach 1e5-1e6
well before the exit of the magnet, far past where sinh/cosh overflow, so
the ratios need a guarded evaluation. Below ``_DIRECT_LIMIT`` the direct
formula is used (it is exquisitely accurate for small arguments, which
the aligned-analyzer reduction tests rely on); above it the numerator and
denominator are factored by the dominant exponential among the terms with
non-zero weight, which keeps every intermediate bounded. The result is
clamped to [-1, 1], the mathematical range of both ratios.

For exactly aligned analyzers (s2 == 0) the law collapses to

    v_L = drift * z_l + spin_kick * tanh(v)
    v_R = drift * z_r - spin_kick * tanh(v)

which ``aligned_velocity_pair`` implements directly; its agreement with
the general form is a standing regression test.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .physconst import DerivedCoefficients

_DIRECT_LIMIT = 300.0


class Side(enum.Enum):
    """Which particle of the pair: L flies to analyzer A, R to analyzer B."""

    L = "L"
    R = "R"


@dataclass(frozen=True)
class SettingPair:
    """Analyzer angles (radians) used to evaluate the guidance law.

    ``angle_a`` belongs to the left analyzer, ``angle_b`` to the right.
    Only the difference enters the dynamics.
    """

    angle_a: float
    angle_b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.angle_a) and math.isfinite(self.angle_b)):
            raise ConfigError("analyzer angles must be finite")

    def weights(self) -> tuple[float, float]:
        """(sin^2, cos^2) of half the angle difference."""
        half = 0.5 * (self.angle_a - self.angle_b)
        s = math.sin(half)
        s2 = s * s
        return s2, 1.0 - s2


@dataclass(frozen=True)
class TrajectoryState:
    """Positions of both particles at one instant."""

    z_l: float
    z_r: float
    t: float

    def __post_init__(self) -> None:
        for name in ("z_l", "z_r", "t"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.t < 0.0:
            raise ConfigError("t must be non-negative")


def exponent_scale(t: float, coeff: DerivedCoefficients) -> float:
    """w(t), the factor converting position sums into hyperbolic arguments."""
    if t < 0.0:
        raise ConfigError("t must be non-negative")
    kt = coeff.spread_rate * t
    return coeff.exp_coeff * t * t / (1.0 + kt * kt)


def _ratio_pair(u: float, v: float, s2: float, c2: float) -> tuple[float, float]:
    """Both coupling ratios, overflow-safe. Weights are assumed validated."""
    if max(abs(u), abs(v)) <= _DIRECT_LIMIT:
        den = s2 * math.cosh(u) + c2 * math.cosh(v)
        su = s2 * math.sinh(u)
        cv = c2 * math.sinh(v)
        rl = (su + cv) / den
        rr = (su - cv) / den
    else:
        # Factor out the largest exponential among terms that actually
        # carry weight; a zero-weight term must not dictate the scale or
        # the 0 * exp(large) products would go indeterminate.
        m = -math.inf
        if s2 > 0.0:
            m = abs(u)
        if c2 > 0.0 and abs(v) > m:
            m = abs(v)
        eu = s2 * math.exp(min(u - m, 0.0))
        enu = s2 * math.exp(min(-u - m, 0.0))
        ev = c2 * math.exp(min(v - m, 0.0))
        env = c2 * math.exp(min(-v - m, 0.0))
        den = eu + enu + ev + env
        rl = ((eu - enu) + (ev - env)) / den
        rr = ((eu - enu) - (ev - env)) / den
    return min(max(rl, -1.0), 1.0), min(max(rr, -1.0), 1.0)


def _check_ratio_args(u: float, v: float, s2: float, c2: float) -> None:
    if math.isnan(u) or math.isnan(v):
        raise ConfigError("hyperbolic arguments must not be NaN")
    if not (0.0 <= s2 <= 1.0 and 0.0 <= c2 <= 1.0):
        raise ConfigError("weights must lie in [0, 1]")
    if s2 + c2 <= 0.0:
        raise ConfigError("weights must not both vanish")


def stable_ratio(u: float, v: float, s2: float, c2: float, side: Side) -> float:
    """Coupling ratio of one side for given hyperbolic arguments and weights.

    Accepts arguments of any magnitude (infinities included); rejects NaN.
    """
    _check_ratio_args(u, v, s2, c2)
    rl, rr = _ratio_pair(u, v, s2, c2)
    return rl if side is Side.L else rr


def velocity_pair(
    state: TrajectoryState,
    settings: SettingPair,
    coeff: DerivedCoefficients,
) -> tuple[float, float]:
    """Transverse velocities (v_l, v_r) of both particles."""
    t = state.t
    kt = coeff.spread_rate * t
    kt2 = kt * kt
    denom = 1.0 + kt2
    w = coeff.exp_coeff * t * t / denom
    u = 0.5 * w * (state.z_l + state.z_r)
    v = 0.5 * w * (state.z_l - state.z_r)
    s2, c2 = settings.weights()
    rl, rr = _ratio_pair(u, v, s2, c2)
    drift = coeff.spread_rate * kt / denom
    spin_kick = coeff.accel * t * (2.0 - kt2 / denom)
    return drift * state.z_l + rl * spin_kick, drift * state.z_r + rr * spin_kick


def aligned_velocity_pair(
    state: TrajectoryState,
    coeff: DerivedCoefficients,
) -> tuple[float, float]:
    """Velocities for exactly aligned analyzers, via the tanh reduction."""
    t = state.t
    kt = coeff.spread_rate * t
    kt2 = kt * kt
    denom = 1.0 + kt2
    w = coeff.exp_coeff * t * t / denom
    v = 0.5 * w * (state.z_l - state.z_r)
    drift = coeff.spread_rate * kt / denom
    spin_kick = coeff.accel * t * (2.0 - kt2 / denom)
    tanh_v = math.tanh(v)
    return drift * state.z_l + spin_kick * tanh_v, drift * state.z_r - spin_kick * tanh_v


def ratio_pair_batch(
    u: np.ndarray,
    v: np.ndarray,
    s2: np.ndarray,
    c2: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized twin of the scalar ratio evaluation.

    Same two-branch scheme as ``stable_ratio``; element order in the input
    arrays does not affect any element's value.
    """
    biggest = np.maximum(np.abs(u), np.abs(v))
    small = biggest <= _DIRECT_LIMIT

    uc = np.clip(u, -_DIRECT_LIMIT, _DIRECT_LIMIT)
    vc = np.clip(v, -_DIRECT_LIMIT, _DIRECT_LIMIT)
    su = s2 * np.sinh(uc)
    cv = c2 * np.sinh(vc)
    den_s = s2 * np.cosh(uc) + c2 * np.cosh(vc)
    num_l_s = su + cv
    num_r_s = su - cv

    m_u = np.where(s2 > 0.0, np.abs(u), -np.inf)
    m_v = np.where(c2 > 0.0, np.abs(v), -np.inf)
    m = np.maximum(m_u, m_v)
    zero = np.zeros_like(m)
    eu = s2 * np.exp(np.minimum(u - m, zero))
    enu = s2 * np.exp(np.minimum(-u - m, zero))
    ev = c2 * np.exp(np.minimum(v - m, zero))
    env = c2 * np.exp(np.minimum(-v - m, zero))
    den_l = (eu + enu) + (ev + env)
    num_l_l = (eu - enu) + (ev - env)
    num_r_l = (eu - enu) - (ev - env)

    den = np.where(small, den_s, den_l)
    rl = np.where(small, num_l_s, num_l_l) / den
    rr = np.where(small, num_r_s, num_r_l) / den
    return np.clip(rl, -1.0, 1.0), np.clip(rr, -1.0, 1.0)


def velocity_pair_batch(
    t: float,
    z_l: np.ndarray,
    z_r: np.ndarray,
    s2: np.ndarray,
    c2: np.ndarray,
    coeff: DerivedCoefficients,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized twin of ``velocity_pair`` over many independent systems."""
    kt = coeff.spread_rate * t
    kt2 = kt * kt
    denom = 1.0 + kt2
    w = coeff.exp_coeff * t * t / denom
    u = 0.5 * w * (z_l + z_r)
    v = 0.5 * w * (z_l - z_r)
    rl, rr = ratio_pair_batch(u, v, s2, c2)
    drift = coeff.spread_rate * kt / denom
    spin_kick = coeff.accel * t * (2.0 - kt2 / denom)
    return drift * z_l + rl * spin_kick, drift * z_r + rr * spin_kick
