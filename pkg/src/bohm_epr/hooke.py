"""Two masses coupled by a Hooke spring, with optionally delayed coupling.

A sandbox for the information-delay idea in a setting where everything
can be checked against closed-form mechanics. Three couplings:

* ``INSTANTANEOUS``: each mass feels the spring stretched to where the
  other mass is right now,
      m1 x1'' = -k (x1 - x2),   m2 x2'' = -k (x2 - x1).
* ``RETARDED``: each mass feels the other's position a fixed delay tau
  ago. Before t = 0 the partners are taken to have sat at their initial
  positions. The delayed positions are read from the stored history by
  linear interpolation, so the step must resolve the delay: dt <= tau/4
  is enforced whenever tau > 0. With tau = 0 this is exactly the
  instantaneous system.
* ``EXPANDED``: the retarded force expanded to first order in tau,
      m1 x1'' = -k (x1 - x2) - k tau v2,
      m2 x2'' = -k (x2 - x1) - k tau v1,
  a pair of ordinary ODEs. Retarded and expanded trajectories agree to
  O(tau^2), which halving tau makes visible.

``center_of_mass_spring`` integrates each mass separately against the
analytically known center of mass X(t) = X0 + V t, using the equivalent
one-body forces m1 x1'' = -k (M/m2) (x1 - X(t)) and symmetrically for
x2. For the instantaneous coupling this decomposition is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError


class SpringMode(Enum):
    INSTANTANEOUS = "instantaneous"
    RETARDED = "retarded"
    EXPANDED = "expanded"


@dataclass(frozen=True)
class HookeParams:
    """Masses, stiffness, coupling delay, and initial conditions."""

    mass_1: float = 1.0
    mass_2: float = 2.0
    stiffness: float = 6.0
    delay: float = 0.0
    x1_0: float = -1.0
    v1_0: float = 0.0
    x2_0: float = 1.0
    v2_0: float = 0.0

    def __post_init__(self) -> None:
        for name in ("mass_1", "mass_2", "stiffness", "delay",
                     "x1_0", "v1_0", "x2_0", "v2_0"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.mass_1 <= 0.0 or self.mass_2 <= 0.0:
            raise ConfigError("masses must be positive")
        if self.stiffness <= 0.0:
            raise ConfigError("stiffness must be positive")
        if self.delay < 0.0:
            raise ConfigError("delay must be non-negative")

    @property
    def total_mass(self) -> float:
        return self.mass_1 + self.mass_2

    @property
    def reduced_mass(self) -> float:
        return self.mass_1 * self.mass_2 / self.total_mass

    @property
    def period(self) -> float:
        """Oscillation period of the instantaneous relative coordinate."""
        return 2.0 * math.pi * math.sqrt(self.reduced_mass / self.stiffness)


@dataclass(frozen=True)
class SpringTrajectory:
    """Sampled motion of both masses, one row per step."""

    t: np.ndarray
    x1: np.ndarray
    v1: np.ndarray
    x2: np.ndarray
    v2: np.ndarray


def _check_grid(duration: float, dt: float) -> int:
    if not (math.isfinite(duration) and math.isfinite(dt)):
        raise ConfigError("duration and dt must be finite")
    if dt <= 0.0 or duration < dt:
        raise ConfigError("need 0 < dt <= duration")
    return int(round(duration / dt))


def _rk4_ode(rhs, y0: tuple[float, ...], n_steps: int, dt: float) -> np.ndarray:
    """Plain RK4 on a small tuple state; returns (n_steps+1, len(y0))."""
    dim = len(y0)
    out = np.empty((n_steps + 1, dim))
    out[0] = y0
    y = y0
    for i in range(n_steps):
        t = i * dt
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, tuple(y[j] + 0.5 * dt * k1[j] for j in range(dim)))
        k3 = rhs(t + 0.5 * dt, tuple(y[j] + 0.5 * dt * k2[j] for j in range(dim)))
        k4 = rhs(t + dt, tuple(y[j] + dt * k3[j] for j in range(dim)))
        y = tuple(
            y[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            for j in range(dim)
        )
        out[i + 1] = y
    return out


def _traj_from_rows(rows: np.ndarray, dt: float) -> SpringTrajectory:
    n = rows.shape[0]
    return SpringTrajectory(
        t=np.arange(n) * dt,
        x1=rows[:, 0].copy(),
        v1=rows[:, 1].copy(),
        x2=rows[:, 2].copy(),
        v2=rows[:, 3].copy(),
    )


def _simulate_retarded(params: HookeParams, duration: float, dt: float) -> SpringTrajectory:
    tau = params.delay
    if dt > tau / 4.0:
        raise ConfigError(
            f"retarded coupling needs dt <= delay/4 ({tau / 4.0:.6g}), got dt = {dt:.6g}")
    n_steps = _check_grid(duration, dt)
    k1_m1 = params.stiffness / params.mass_1
    k1_m2 = params.stiffness / params.mass_2

    x1 = np.empty(n_steps + 1)
    v1 = np.empty(n_steps + 1)
    x2 = np.empty(n_steps + 1)
    v2 = np.empty(n_steps + 1)
    x1[0], v1[0], x2[0], v2[0] = params.x1_0, params.v1_0, params.x2_0, params.v2_0

    def delayed(hist: np.ndarray, init: float, t_query: float) -> float:
        # Constant prehistory: before launch each mass sat at its start.
        if t_query <= 0.0:
            return init
        pos = t_query / dt
        j = int(pos)
        frac = pos - j
        if frac == 0.0:
            return float(hist[j])
        return float(hist[j] * (1.0 - frac) + hist[j + 1] * frac)

    for i in range(n_steps):
        t = i * dt

        def rhs(ts: float, state: tuple[float, float, float, float]):
            s_x1, s_v1, s_x2, s_v2 = state
            x2_then = delayed(x2, params.x2_0, ts - tau)
            x1_then = delayed(x1, params.x1_0, ts - tau)
            return (
                s_v1,
                -k1_m1 * (s_x1 - x2_then),
                s_v2,
                -k1_m2 * (s_x2 - x1_then),
            )

        y = (x1[i], v1[i], x2[i], v2[i])
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, tuple(y[j] + 0.5 * dt * k1[j] for j in range(4)))
        k3 = rhs(t + 0.5 * dt, tuple(y[j] + 0.5 * dt * k2[j] for j in range(4)))
        k4 = rhs(t + dt, tuple(y[j] + dt * k3[j] for j in range(4)))
        x1[i + 1] = y[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        v1[i + 1] = y[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        x2[i + 1] = y[2] + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        v2[i + 1] = y[3] + dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])

    t_axis = np.arange(n_steps + 1) * dt
    return SpringTrajectory(t=t_axis, x1=x1, v1=v1, x2=x2, v2=v2)


def simulate_spring(
    params: HookeParams,
    mode: SpringMode,
    duration: float,
    dt: float,
) -> SpringTrajectory:
    """Integrate the pair under the chosen coupling with fixed-step RK4."""
    if mode is SpringMode.RETARDED and params.delay > 0.0:
        return _simulate_retarded(params, duration, dt)

    n_steps = _check_grid(duration, dt)
    k_m1 = params.stiffness / params.mass_1
    k_m2 = params.stiffness / params.mass_2
    tau = params.delay

    if mode is SpringMode.EXPANDED:
        def rhs(t: float, y: tuple[float, float, float, float]):
            x1, v1, x2, v2 = y
            stretch = x1 - x2
            return (v1, -k_m1 * stretch - k_m1 * tau * v2,
                    v2, k_m2 * stretch - k_m2 * tau * v1)
    else:
        # Instantaneous coupling; also the tau = 0 retarded system.
        def rhs(t: float, y: tuple[float, float, float, float]):
            x1, v1, x2, v2 = y
            stretch = x1 - x2
            return (v1, -k_m1 * stretch, v2, k_m2 * stretch)

    rows = _rk4_ode(
        rhs, (params.x1_0, params.v1_0, params.x2_0, params.v2_0), n_steps, dt)
    return _traj_from_rows(rows, dt)


def center_of_mass_spring(
    params: HookeParams,
    duration: float,
    dt: float,
) -> SpringTrajectory:
    """Each mass driven by the analytic center of mass, instantaneous coupling."""
    n_steps = _check_grid(duration, dt)
    m_total = params.total_mass
    x_cm0 = (params.mass_1 * params.x1_0 + params.mass_2 * params.x2_0) / m_total
    v_cm = (params.mass_1 * params.v1_0 + params.mass_2 * params.v2_0) / m_total
    rate_1 = params.stiffness * m_total / (params.mass_1 * params.mass_2)

    def rhs(t: float, y: tuple[float, float, float, float]):
        x1, v1, x2, v2 = y
        x_cm = x_cm0 + v_cm * t
        return (v1, -rate_1 * (x1 - x_cm), v2, -rate_1 * (x2 - x_cm))

    rows = _rk4_ode(
        rhs, (params.x1_0, params.v1_0, params.x2_0, params.v2_0), n_steps, dt)
    return _traj_from_rows(rows, dt)


def spring_energy(params: HookeParams, traj: SpringTrajectory) -> np.ndarray:
    """Total mechanical energy along a trajectory (instantaneous potential)."""
    kinetic = 0.5 * params.mass_1 * traj.v1**2 + 0.5 * params.mass_2 * traj.v2**2
    potential = 0.5 * params.stiffness * (traj.x1 - traj.x2) ** 2
    return kinetic + potential


def write_spring_csv(traj: SpringTrajectory, path) -> None:
    """Positions against time, header t,x1,x2."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,x1,x2\n")
        for i in range(len(traj.t)):
            fh.write(f"{float(traj.t[i])!r},{float(traj.x1[i])!r},{float(traj.x2[i])!r}\n")
