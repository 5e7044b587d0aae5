"""Fixed-step RK4 transport of particle pairs through the magnets.

Two entry points share one Butcher tableau:

* ``integrate_pair`` moves a single pair, in plain scalar arithmetic,
  under the (possibly different) setting pairs each observer attributes
  to the apparatus, and returns one trajectory per view.
* ``integrate_batch`` moves many independent two-particle systems at
  once as numpy arrays. It exists purely for speed; its agreement with
  the scalar path is a regression test.

Time is never accumulated: step i lives at t = i * dt exactly, so the
step count, not rounding, decides where the integration ends. The state
is checked for finiteness after every step and a non-finite value raises
``IntegrationDiverged`` carrying the step index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, IntegrationDiverged
from .physconst import DerivedCoefficients
from .velocity import SettingPair, TrajectoryState, velocity_pair, velocity_pair_batch

_MIN_STEPS = 10


@dataclass(frozen=True)
class IntegrationConfig:
    """Step size, total duration, and optional recording cadence.

    ``record_every = 0`` keeps only the endpoint; ``record_every = n``
    additionally stores every n-th step (step 0 and the final step are
    always included when recording is on).
    """

    dt: float = 1.0e-6
    duration: float = 3.0e-3
    record_every: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and math.isfinite(self.duration)):
            raise ConfigError("dt and duration must be finite")
        if self.dt <= 0.0:
            raise ConfigError("dt must be positive")
        if self.duration < self.dt:
            raise ConfigError("duration must be at least one step")
        if self.n_steps < _MIN_STEPS:
            raise ConfigError(
                f"duration/dt = {self.duration / self.dt:.3g} gives fewer than "
                f"{_MIN_STEPS} steps; refine dt"
            )
        if not isinstance(self.record_every, int) or self.record_every < 0:
            raise ConfigError("record_every must be a non-negative integer")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))


def sign_outcome(z: float) -> int:
    """Detector outcome from a final transverse position. Ties go up."""
    return 1 if z >= 0.0 else -1


@dataclass(frozen=True)
class PairTrajectory:
    """One observer's view of a transported pair.

    ``final`` always holds the endpoint; ``samples`` is empty unless
    recording was requested. The outcomes are the signs of both exit
    positions under this view, though an observer on one side only ever
    reads her own.
    """

    settings: SettingPair
    final: TrajectoryState
    outcome_l: int
    outcome_r: int
    samples: tuple[TrajectoryState, ...] = field(default=())


def sample_initial(rng: np.random.Generator, packet_width: float) -> tuple[float, float]:
    """Draw initial transverse positions for one pair.

    Each particle starts at a position drawn from the Born density of its
    packet, a centered normal with standard deviation ``packet_width``.
    The left position is drawn first.
    """
    draws = rng.normal(0.0, packet_width, size=2)
    return float(draws[0]), float(draws[1])


def _integrate_scalar(
    z_l0: float,
    z_r0: float,
    settings: SettingPair,
    coeff: DerivedCoefficients,
    cfg: IntegrationConfig,
) -> PairTrajectory:
    dt = cfg.dt
    n_steps = cfg.n_steps
    z_l, z_r = z_l0, z_r0
    samples: list[TrajectoryState] = []
    if cfg.record_every > 0:
        samples.append(TrajectoryState(z_l, z_r, 0.0))
    for i in range(n_steps):
        t = i * dt
        k1l, k1r = velocity_pair(TrajectoryState(z_l, z_r, t), settings, coeff)
        th = t + 0.5 * dt
        k2l, k2r = velocity_pair(
            TrajectoryState(z_l + 0.5 * dt * k1l, z_r + 0.5 * dt * k1r, th),
            settings, coeff)
        k3l, k3r = velocity_pair(
            TrajectoryState(z_l + 0.5 * dt * k2l, z_r + 0.5 * dt * k2r, th),
            settings, coeff)
        t1 = (i + 1) * dt
        k4l, k4r = velocity_pair(
            TrajectoryState(z_l + dt * k3l, z_r + dt * k3r, t1),
            settings, coeff)
        z_l = z_l + dt / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l)
        z_r = z_r + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        if not (math.isfinite(z_l) and math.isfinite(z_r)):
            raise IntegrationDiverged(step=i + 1)
        if cfg.record_every > 0 and ((i + 1) % cfg.record_every == 0 or i + 1 == n_steps):
            samples.append(TrajectoryState(z_l, z_r, t1))
    final = TrajectoryState(z_l, z_r, n_steps * dt)
    return PairTrajectory(
        settings=settings,
        final=final,
        outcome_l=sign_outcome(z_l),
        outcome_r=sign_outcome(z_r),
        samples=tuple(samples),
    )


def integrate_pair(
    init: tuple[float, float],
    settings_l: SettingPair,
    settings_r: SettingPair,
    coeff: DerivedCoefficients,
    cfg: IntegrationConfig,
) -> tuple[PairTrajectory, PairTrajectory]:
    """Transport one pair under each observer's attributed settings.

    ``settings_l`` is the setting pair the left observer believes is in
    force, ``settings_r`` the right observer's. When the two coincide the
    system is integrated once and the same trajectory is returned for
    both views; otherwise each view gets its own integration.
    """
    z_l0, z_r0 = init
    if not (math.isfinite(z_l0) and math.isfinite(z_r0)):
        raise ConfigError("initial positions must be finite")
    left_view = _integrate_scalar(z_l0, z_r0, settings_l, coeff, cfg)
    if settings_r == settings_l:
        return left_view, left_view
    right_view = _integrate_scalar(z_l0, z_r0, settings_r, coeff, cfg)
    return left_view, right_view


def integrate_batch(
    z_l0: np.ndarray,
    z_r0: np.ndarray,
    s2: np.ndarray,
    c2: np.ndarray,
    coeff: DerivedCoefficients,
    cfg: IntegrationConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Transport many independent systems at once; returns exit positions.

    All four arrays must share one length. Each element is an independent
    two-particle system with its own setting weights.
    """
    z_l = np.asarray(z_l0, dtype=float).copy()
    z_r = np.asarray(z_r0, dtype=float).copy()
    s2 = np.asarray(s2, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    if not (z_l.shape == z_r.shape == s2.shape == c2.shape):
        raise ConfigError("batch arrays must share one shape")
    dt = cfg.dt
    for i in range(cfg.n_steps):
        t = i * dt
        th = t + 0.5 * dt
        t1 = (i + 1) * dt
        k1l, k1r = velocity_pair_batch(t, z_l, z_r, s2, c2, coeff)
        k2l, k2r = velocity_pair_batch(
            th, z_l + 0.5 * dt * k1l, z_r + 0.5 * dt * k1r, s2, c2, coeff)
        k3l, k3r = velocity_pair_batch(
            th, z_l + 0.5 * dt * k2l, z_r + 0.5 * dt * k2r, s2, c2, coeff)
        k4l, k4r = velocity_pair_batch(
            t1, z_l + dt * k3l, z_r + dt * k3r, s2, c2, coeff)
        z_l += dt / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l)
        z_r += dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        bad_l = ~np.isfinite(z_l)
        bad_r = ~np.isfinite(z_r)
        if bad_l.any() or bad_r.any():
            bad = bad_l | bad_r
            raise IntegrationDiverged(
                step=i + 1, system_index=int(np.argmax(bad)))
    return z_l, z_r
