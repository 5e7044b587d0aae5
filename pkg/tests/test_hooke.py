"""Coupled spring sandbox: closed-form checks and delay expansions."""

import math

import numpy as np
import pytest

from bohm_epr import (
    ConfigError,
    HookeParams,
    SpringMode,
    center_of_mass_spring,
    simulate_spring,
    spring_energy,
)
from bohm_epr.hooke import write_spring_csv

PERIOD = 2.0 * math.pi / 3.0


def default_grid(periods=10.0, per_period=2000):
    duration = periods * PERIOD
    dt = PERIOD / per_period
    return duration, dt


def test_params_validation():
    with pytest.raises(ConfigError):
        HookeParams(mass_1=0.0)
    with pytest.raises(ConfigError):
        HookeParams(mass_2=-2.0)
    with pytest.raises(ConfigError):
        HookeParams(stiffness=0.0)
    with pytest.raises(ConfigError):
        HookeParams(delay=-0.1)
    with pytest.raises(ConfigError):
        HookeParams(x1_0=math.nan)
    with pytest.raises(ConfigError):
        HookeParams(v2_0=math.inf)


def test_default_period_and_masses():
    p = HookeParams()
    assert p.total_mass == 3.0
    assert p.reduced_mass == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert p.period == pytest.approx(PERIOD, rel=1e-15)


def test_grid_validation():
    p = HookeParams()
    with pytest.raises(ConfigError):
        simulate_spring(p, SpringMode.INSTANTANEOUS, duration=1.0, dt=0.0)
    with pytest.raises(ConfigError):
        simulate_spring(p, SpringMode.INSTANTANEOUS, duration=0.5, dt=1.0)
    with pytest.raises(ConfigError):
        simulate_spring(p, SpringMode.INSTANTANEOUS, duration=math.inf, dt=0.1)


def test_instantaneous_matches_closed_form():
    # relative coordinate -2 cos(3t) about a fixed center of mass at 1/3
    p = HookeParams()
    duration, dt = default_grid()
    traj = simulate_spring(p, SpringMode.INSTANTANEOUS, duration, dt)
    x1_exact = 1.0 / 3.0 - (4.0 / 3.0) * np.cos(3.0 * traj.t)
    x2_exact = 1.0 / 3.0 + (2.0 / 3.0) * np.cos(3.0 * traj.t)
    assert np.max(np.abs(traj.x1 - x1_exact)) < 1.0e-8
    assert np.max(np.abs(traj.x2 - x2_exact)) < 1.0e-8


def test_momentum_is_conserved_exactly():
    p = HookeParams(v1_0=0.5, v2_0=-0.2)
    duration, dt = default_grid(periods=5.0)
    traj = simulate_spring(p, SpringMode.INSTANTANEOUS, duration, dt)
    momentum = p.mass_1 * traj.v1 + p.mass_2 * traj.v2
    assert np.max(np.abs(momentum - momentum[0])) < 1.0e-12


def test_energy_drift_without_delay():
    p = HookeParams()
    duration, dt = default_grid(periods=10.0)
    traj = simulate_spring(p, SpringMode.INSTANTANEOUS, duration, dt)
    energy = spring_energy(p, traj)
    drift = np.max(np.abs(energy - energy[0])) / energy[0]
    assert drift < 1.0e-9


def test_retarded_with_zero_delay_is_instantaneous():
    p = HookeParams(delay=0.0)
    duration, dt = default_grid(periods=2.0)
    a = simulate_spring(p, SpringMode.RETARDED, duration, dt)
    b = simulate_spring(p, SpringMode.INSTANTANEOUS, duration, dt)
    assert np.array_equal(a.x1, b.x1)
    assert np.array_equal(a.v1, b.v1)
    assert np.array_equal(a.x2, b.x2)
    assert np.array_equal(a.v2, b.v2)


def test_retarded_requires_resolving_step():
    p = HookeParams(delay=0.05)
    with pytest.raises(ConfigError):
        simulate_spring(p, SpringMode.RETARDED, duration=1.0, dt=0.05)
    # dt exactly delay/4 is allowed
    simulate_spring(p, SpringMode.RETARDED, duration=0.5, dt=0.0125)


def test_retarded_minus_expanded_scales_as_delay_squared():
    duration = 2.0 * PERIOD
    tau_big = PERIOD / 50.0
    tau_small = PERIOD / 100.0
    dt = tau_small / 8.0
    diffs = []
    for tau in (tau_big, tau_small):
        p = HookeParams(delay=tau)
        ret = simulate_spring(p, SpringMode.RETARDED, duration, dt)
        exp = simulate_spring(p, SpringMode.EXPANDED, duration, dt)
        diffs.append(float(np.max(np.abs(ret.x1 - exp.x1))))
    ratio = diffs[0] / diffs[1]
    # halving tau should shrink the discrepancy about fourfold
    assert 3.0 < ratio < 5.5
    # and the expansion should be close to the real thing to begin with
    assert diffs[1] < 0.02


def test_center_of_mass_form_matches_coupled_form():
    p = HookeParams(v1_0=0.4, v2_0=0.1)
    duration, dt = default_grid(periods=4.0)
    coupled = simulate_spring(p, SpringMode.INSTANTANEOUS, duration, dt)
    split = center_of_mass_spring(p, duration, dt)
    assert np.max(np.abs(coupled.x1 - split.x1)) < 1.0e-9
    assert np.max(np.abs(coupled.x2 - split.x2)) < 1.0e-9
    # the drive really moves: nonzero net momentum here
    assert abs(split.x1[-1] - split.x1[0]) > 0.1


def test_spring_csv_format(tmp_path):
    p = HookeParams()
    traj = simulate_spring(p, SpringMode.INSTANTANEOUS, duration=0.1, dt=0.01)
    path = tmp_path / "spring.csv"
    write_spring_csv(traj, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x1,x2"
    assert len(lines) == 1 + len(traj.t)
    t0, x10, x20 = lines[1].split(",")
    assert float(t0) == 0.0
    assert float(x10) == -1.0
    assert float(x20) == 1.0
