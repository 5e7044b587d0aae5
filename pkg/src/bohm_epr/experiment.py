"""Run protocol for the two-analyzer bench and the CHSH bookkeeping.

A run launches ``n_pairs`` pairs, one every ``pair_period`` seconds. For
pair i:

1. Both analyzers (optionally) switch at the launch instant, each to a
   setting drawn from its two-angle menu by the pair's own random stream.
2. The pair flies ``source_to_magnet`` centimeters, entering the magnets
   at launch + flight time. A side whose analyzer switched during that
   window may lose its particle: a switched magnet gives the packet a
   longitudinal kick of relative size beam_speed / (beam_speed +
   light_speed), and in inefficient mode a kick at or above
   ``kick_threshold`` throws the particle out of the detected beam.
3. Inside the magnets the pair is transported by the two-particle
   guidance law. Each observer evaluates that law with the setting pair
   she can know: her own current angle always, the partner angle either
   current (nonlocal mode) or as old as the news delay
   separation / signal_speed (local mode). When the two attributions
   differ the pair is integrated once per view; each observer reads her
   own exit sign from her own view.
4. Outcomes of pairs with both particles detected feed four correlator
   cells keyed by the settings in force at magnet entry, and the cells
   combine into the CHSH statistic
   S = E(a,b) - E(a,b') + E(a',b) + E(a',b').

Every random draw comes from a stream derived from (master_seed, role,
index), so reruns with one seed are reproducible pair by pair and the
worker count cannot change any number.
"""

from __future__ import annotations

import enum
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, EstimationError, IntegrationDiverged
from .infomodel import (
    InformationMode,
    SettingTimelines,
    SideTimeline,
    effective_settings,
    static_timeline,
)
from .integrate import (
    IntegrationConfig,
    integrate_batch,
    sample_initial,
    sign_outcome,
)
from .physconst import LIGHT_SPEED, RawPhysicalInputs, SILVER, derive_coefficients
from .velocity import SettingPair, Side

CELL_LABELS = ("ab", "ab'", "a'b", "a'b'")
_CHSH_SIGNS = (1.0, -1.0, 1.0, 1.0)
_BATCH_CHUNK = 4096
_PAIR_STREAM = 0
_INIT_STREAM = 1
DEFAULT_SEED = 12345


class Efficiency(enum.Enum):
    """Whether switched magnets can lose particles."""

    EFFICIENT = "efficient"
    INEFFICIENT = "inefficient"


class Normalization(enum.Enum):
    """Denominator convention for the correlator cells.

    ``SINGLES`` divides each cell's coincidence product sum by the number
    of launches assigned to the cell; ``COINCIDENCES`` divides by the
    number of pairs with both particles detected. The two coincide when
    nothing is lost.
    """

    SINGLES = "singles"
    COINCIDENCES = "coincidences"


class SwitchPolicy(enum.Enum):
    """How one analyzer picks its angle over the run."""

    PER_PAIR_RANDOM = "per_pair_random"
    STATIC = "static"
    EXPLICIT_LIST = "explicit_list"


def kick_ratio(beam_speed: float, light_speed: float = LIGHT_SPEED) -> float:
    """Relative longitudinal kick from a switched magnet.

    The packet keeps fraction beam_speed / (beam_speed + light_speed) of
    the switching disturbance; slow beams barely notice, a (hypothetical)
    luminal beam gets exactly one half.
    """
    if not (math.isfinite(beam_speed) and math.isfinite(light_speed)):
        raise ConfigError("speeds must be finite")
    if beam_speed <= 0.0 or light_speed <= 0.0:
        raise ConfigError("speeds must be positive")
    if beam_speed > light_speed:
        raise ConfigError("beam_speed must not exceed light_speed")
    return beam_speed / (beam_speed + light_speed)


def detector_loss(
    switched: bool,
    efficiency: Efficiency,
    beam_speed: float,
    light_speed: float,
    kick_threshold: float,
) -> bool:
    """Whether the particle survives into the detected beam.

    Efficient detection survives everything. Inefficient detection loses
    the particle when its own analyzer switched during the flight and the
    kick is at or above the threshold.
    """
    if efficiency is Efficiency.EFFICIENT or not switched:
        return True
    return kick_ratio(beam_speed, light_speed) < kick_threshold


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one run."""

    physics: RawPhysicalInputs = SILVER
    n_pairs: int = 4000
    angles_a: tuple[float, float] = (0.0, math.pi / 2.0)
    angles_b: tuple[float, float] = (math.pi / 4.0, 3.0 * math.pi / 4.0)
    mode: InformationMode = InformationMode.NONLOCAL
    efficiency: Efficiency = Efficiency.EFFICIENT
    normalization: Normalization = Normalization.SINGLES
    kick_threshold: float = 1.0e-3
    master_seed: int = DEFAULT_SEED
    dt: float = 1.0e-6
    separation: float = 100.0
    source_to_magnet: float = 35.0
    pair_period: float = 1.0e-2
    signal_speed: float = 8.0e3
    switch_policy_a: SwitchPolicy = SwitchPolicy.PER_PAIR_RANDOM
    switch_policy_b: SwitchPolicy = SwitchPolicy.PER_PAIR_RANDOM
    explicit_a: tuple[tuple[float, float], ...] = ()
    explicit_b: tuple[tuple[float, float], ...] = ()
    workers: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.n_pairs, int) or self.n_pairs < 4:
            raise ConfigError("n_pairs must be an integer >= 4")
        for name in ("angles_a", "angles_b"):
            menu = getattr(self, name)
            if len(menu) != 2 or not all(math.isfinite(a) for a in menu):
                raise ConfigError(f"{name} must be two finite angles")
            if menu[0] == menu[1]:
                raise ConfigError(f"{name} must hold two distinct angles")
        if not math.isfinite(self.kick_threshold) or self.kick_threshold < 0.0:
            raise ConfigError("kick_threshold must be non-negative")
        if not isinstance(self.master_seed, int) or self.master_seed < 0:
            raise ConfigError("master_seed must be a non-negative integer")
        if not math.isfinite(self.dt) or self.dt <= 0.0:
            raise ConfigError("dt must be positive")
        if not math.isfinite(self.separation) or self.separation < 0.0:
            raise ConfigError("separation must be non-negative")
        if not math.isfinite(self.source_to_magnet) or self.source_to_magnet < 0.0:
            raise ConfigError("source_to_magnet must be non-negative")
        if not math.isfinite(self.signal_speed) or self.signal_speed <= 0.0:
            raise ConfigError("signal_speed must be positive")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers must be a positive integer")
        flight = self.source_to_magnet / self.physics.beam_speed
        transit = self.physics.magnet_length / self.physics.beam_speed
        if not math.isfinite(self.pair_period) or self.pair_period < flight + transit:
            raise ConfigError(
                "pair_period must cover flight plus magnet transit "
                f"({flight + transit:.6g} s)"
            )
        for policy_name, list_name in (
            ("switch_policy_a", "explicit_a"),
            ("switch_policy_b", "explicit_b"),
        ):
            policy = getattr(self, policy_name)
            entries = getattr(self, list_name)
            if policy is SwitchPolicy.EXPLICIT_LIST and not entries:
                raise ConfigError(f"{policy_name} is explicit_list but {list_name} is empty")
            if policy is not SwitchPolicy.EXPLICIT_LIST and entries:
                raise ConfigError(f"{list_name} given but {policy_name} is not explicit_list")

    @property
    def flight_time(self) -> float:
        return self.source_to_magnet / self.physics.beam_speed

    @property
    def switching_active(self) -> bool:
        return (self.switch_policy_a is not SwitchPolicy.STATIC
                or self.switch_policy_b is not SwitchPolicy.STATIC)

    def to_dict(self) -> dict:
        """JSON-safe echo of every field that can affect the numbers.

        The worker count is deliberately absent: it is an execution knob,
        not part of the experiment, and reports from the same experiment
        must compare equal whatever hardware ran them.
        """
        def entries_list(entries):
            return [[("-inf" if t == -math.inf else t), a] for t, a in entries]
        p = self.physics
        return {
            "physics": {
                "magnetic_moment": p.magnetic_moment,
                "mass": p.mass,
                "packet_width": p.packet_width,
                "field_gradient": p.field_gradient,
                "magnet_length": p.magnet_length,
                "beam_speed": p.beam_speed,
                "light_speed": p.light_speed,
            },
            "n_pairs": self.n_pairs,
            "angles_a": list(self.angles_a),
            "angles_b": list(self.angles_b),
            "mode": self.mode.value,
            "efficiency": self.efficiency.value,
            "normalization": self.normalization.value,
            "kick_threshold": self.kick_threshold,
            "master_seed": self.master_seed,
            "dt": self.dt,
            "separation": self.separation,
            "source_to_magnet": self.source_to_magnet,
            "pair_period": self.pair_period,
            "signal_speed": self.signal_speed,
            "switch_policy_a": self.switch_policy_a.value,
            "switch_policy_b": self.switch_policy_b.value,
            "explicit_a": entries_list(self.explicit_a),
            "explicit_b": entries_list(self.explicit_b),
        }


@dataclass(frozen=True)
class PairRecord:
    """Everything recorded about one launched pair."""

    pair_id: int
    setting_a: float
    setting_b: float
    a_index: int
    b_index: int
    seen_by_a: SettingPair
    seen_by_b: SettingPair
    outcome_a: int
    outcome_b: int
    survived_a: bool
    survived_b: bool

    @property
    def coincident(self) -> bool:
        return self.survived_a and self.survived_b


@dataclass(frozen=True)
class BellEstimate:
    """Four correlators with their cell sizes, combined into S.

    ``n_values`` are the denominators actually used, so their meaning
    follows the normalization convention of the run. Count rates are
    attached when a quiescent baseline is available.
    """

    e_values: tuple[float, float, float, float]
    n_values: tuple[int, int, int, int]
    s_signed: float
    s_abs: float
    sigma_s: float
    q1: float | None = None
    q1p: float | None = None
    c2: float | None = None
    c2p: float | None = None

    def per_setting(self) -> dict:
        return {
            label: {"E": self.e_values[i], "N": self.n_values[i]}
            for i, label in enumerate(CELL_LABELS)
        }

    def with_rates(self, rates: "CountRates") -> "BellEstimate":
        return replace(self, q1=rates.q1, q1p=rates.q1p, c2=rates.c2, c2p=rates.c2p)


@dataclass(frozen=True)
class CountRates:
    """Singles and coincidence rates, quiescent (unprimed) vs switching (primed)."""

    q1: float
    q1p: float
    c2: float
    c2p: float
    q1_a: float
    q1_b: float
    q1p_a: float
    q1p_b: float

    @property
    def singles_ratio(self) -> float:
        return self.q1p / self.q1

    @property
    def coincidence_ratio(self) -> float:
        return self.c2p / self.c2


@dataclass(frozen=True)
class ExperimentReport:
    """Full outcome of one run."""

    config: ExperimentConfig
    records: tuple[PairRecord, ...]
    bell: BellEstimate | None
    cell_counts: tuple[int, int, int, int]
    cell_sums: tuple[int, int, int, int]
    cell_launches: tuple[int, int, int, int]
    singles_a: int
    singles_b: int
    coincidences: int
    switching_active: bool
    runtime_s: float

    def correlator(self, cell: int) -> tuple[float, int]:
        """(E, N) of one cell under the run's normalization convention."""
        if self.config.normalization is Normalization.SINGLES:
            denom = self.cell_launches[cell]
        else:
            denom = self.cell_counts[cell]
        if denom == 0:
            raise EstimationError(f"empty setting cell {CELL_LABELS[cell]}")
        return self.cell_sums[cell] / denom, denom


def chsh(
    e_values: tuple[float, float, float, float] | list[float],
    n_values: tuple[int, int, int, int] | list[int],
) -> tuple[float, float, float]:
    """Combine the four correlators into (S_signed, S_abs, sigma_S).

    sigma_S is the quadrature sum of the per-cell standard errors
    sqrt((1 - E^2) / N).
    """
    if len(e_values) != 4 or len(n_values) != 4:
        raise EstimationError("need exactly four correlator cells")
    var = 0.0
    s_signed = 0.0
    for i, label in enumerate(CELL_LABELS):
        n = n_values[i]
        if n <= 0:
            raise EstimationError(f"empty setting cell {label}")
        e = e_values[i]
        if not math.isfinite(e):
            raise EstimationError(f"non-finite correlator in cell {label}")
        s_signed += _CHSH_SIGNS[i] * e
        var += max(0.0, 1.0 - e * e) / n
    return s_signed, abs(s_signed), math.sqrt(var)


def pair_stream(master_seed: int, pair_id: int) -> np.random.Generator:
    """The private random stream of one pair.

    Draw order inside the stream is fixed: analyzer A's menu index,
    analyzer B's menu index, left initial position, right initial
    position. Streams are independent across pairs and reproducible from
    (master_seed, pair_id) alone.
    """
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((master_seed, _PAIR_STREAM, pair_id))))


def init_stream(master_seed: int) -> np.random.Generator:
    """Stream for the pre-run analyzer angles (one draw per side)."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((master_seed, _INIT_STREAM))))


def derived_seed(*key: int) -> int:
    """A reproducible 64-bit seed from an integer key tuple."""
    return int(np.random.SeedSequence(key).generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class PreparedPair:
    """A pair after all randomness and information bookkeeping, before transport."""

    pair_id: int
    z_l0: float
    z_r0: float
    setting_a: float
    setting_b: float
    a_index: int
    b_index: int
    seen_by_a: SettingPair
    seen_by_b: SettingPair
    switched_a: bool
    switched_b: bool
    survived_a: bool
    survived_b: bool


def _menu_index(menu: tuple[float, float], angle: float) -> int:
    for i, value in enumerate(menu):
        if value == angle:
            return i
    return -1


def _policy_timeline(
    policy: SwitchPolicy,
    menu: tuple[float, float],
    rand_idx: np.ndarray,
    launches: np.ndarray,
    explicit: tuple[tuple[float, float], ...],
    init_idx: int,
) -> SideTimeline:
    if policy is SwitchPolicy.STATIC:
        return static_timeline(menu[0])
    if policy is SwitchPolicy.EXPLICIT_LIST:
        return SideTimeline(entries=tuple((float(t), float(a)) for t, a in explicit))
    entries: list[tuple[float, float]] = [(-math.inf, menu[init_idx])]
    current = menu[init_idx]
    for i in range(len(launches)):
        angle = menu[int(rand_idx[i])]
        if angle != current:
            entries.append((float(launches[i]), angle))
            current = angle
    return SideTimeline(entries=tuple(entries))


def prepare_pairs(cfg: ExperimentConfig, limit: int | None = None) -> list[PreparedPair]:
    """Draw, switch, propagate information, and apply losses for each pair.

    Returns the first ``limit`` pairs (all by default) ready for
    transport. Pairs that lose a particle are still prepared in full;
    their trajectories remain well defined even though only surviving
    outcomes reach the detectors.
    """
    n = cfg.n_pairs
    take = n if limit is None else min(limit, n)
    a_rand = np.empty(n, dtype=np.int64)
    b_rand = np.empty(n, dtype=np.int64)
    z_l0 = np.empty(n)
    z_r0 = np.empty(n)
    for i in range(n):
        rng = pair_stream(cfg.master_seed, i)
        a_rand[i] = int(rng.integers(0, 2))
        b_rand[i] = int(rng.integers(0, 2))
        z_l0[i], z_r0[i] = sample_initial(rng, cfg.physics.packet_width)

    rng_init = init_stream(cfg.master_seed)
    init_a = int(rng_init.integers(0, 2))
    init_b = int(rng_init.integers(0, 2))

    launches = np.arange(n, dtype=float) * cfg.pair_period
    timeline_a = _policy_timeline(
        cfg.switch_policy_a, cfg.angles_a, a_rand, launches, cfg.explicit_a, init_a)
    timeline_b = _policy_timeline(
        cfg.switch_policy_b, cfg.angles_b, b_rand, launches, cfg.explicit_b, init_b)
    timelines = SettingTimelines(
        side_a=timeline_a,
        side_b=timeline_b,
        separation=cfg.separation,
        signal_speed=cfg.signal_speed,
    )

    flight = cfg.flight_time
    v = cfg.physics.beam_speed
    c = cfg.physics.light_speed
    prepared: list[PreparedPair] = []
    for i in range(take):
        t_launch = launches[i]
        t_entry = t_launch + flight
        seen_a = effective_settings(Side.L, t_entry, timelines, cfg.mode)
        seen_b = effective_settings(Side.R, t_entry, timelines, cfg.mode)
        switched_a = timeline_a.has_change_in(t_launch, t_entry)
        switched_b = timeline_b.has_change_in(t_launch, t_entry)
        prepared.append(PreparedPair(
            pair_id=i,
            z_l0=float(z_l0[i]),
            z_r0=float(z_r0[i]),
            setting_a=seen_a.angle_a,
            setting_b=seen_b.angle_b,
            a_index=_menu_index(cfg.angles_a, seen_a.angle_a),
            b_index=_menu_index(cfg.angles_b, seen_b.angle_b),
            seen_by_a=seen_a,
            seen_by_b=seen_b,
            switched_a=switched_a,
            switched_b=switched_b,
            survived_a=detector_loss(
                switched_a, cfg.efficiency, v, c, cfg.kick_threshold),
            survived_b=detector_loss(
                switched_b, cfg.efficiency, v, c, cfg.kick_threshold),
        ))
    return prepared


def _transport_all(
    prepared: list[PreparedPair],
    cfg: ExperimentConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate every needed view; returns per-pair outcome arrays.

    Pairs whose two views coincide are integrated once; differing views
    get one system each. Systems are packed into fixed-size chunks so
    results do not depend on how many workers split the job.
    """
    coeff = derive_coefficients(cfg.physics)
    icfg = IntegrationConfig(dt=cfg.dt, duration=coeff.transit_time, record_every=0)

    sys_zl: list[float] = []
    sys_zr: list[float] = []
    sys_s2: list[float] = []
    sys_c2: list[float] = []
    sys_pair: list[int] = []
    a_sys = np.empty(len(prepared), dtype=np.int64)
    b_sys = np.empty(len(prepared), dtype=np.int64)

    def add_system(pair: PreparedPair, settings: SettingPair) -> int:
        s2, c2 = settings.weights()
        sys_zl.append(pair.z_l0)
        sys_zr.append(pair.z_r0)
        sys_s2.append(s2)
        sys_c2.append(c2)
        sys_pair.append(pair.pair_id)
        return len(sys_zl) - 1

    for j, pair in enumerate(prepared):
        idx_a = add_system(pair, pair.seen_by_a)
        a_sys[j] = idx_a
        if pair.seen_by_b == pair.seen_by_a:
            b_sys[j] = idx_a
        else:
            b_sys[j] = add_system(pair, pair.seen_by_b)

    zl = np.asarray(sys_zl)
    zr = np.asarray(sys_zr)
    s2 = np.asarray(sys_s2)
    c2 = np.asarray(sys_c2)
    m = len(zl)
    out_l = np.empty(m)
    out_r = np.empty(m)
    spans = [(lo, min(lo + _BATCH_CHUNK, m)) for lo in range(0, m, _BATCH_CHUNK)]

    def work(span: tuple[int, int]):
        lo, hi = span
        try:
            return lo, integrate_batch(
                zl[lo:hi], zr[lo:hi], s2[lo:hi], c2[lo:hi], coeff, icfg)
        except IntegrationDiverged as err:
            local = err.system_index if err.system_index is not None else 0
            raise IntegrationDiverged(
                step=err.step,
                system_index=lo + local,
                detail=f"pair {sys_pair[lo + local]}",
            ) from err

    if cfg.workers <= 1 or len(spans) <= 1:
        results = [work(span) for span in spans]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(work, spans))
    for lo, (chunk_l, chunk_r) in results:
        out_l[lo:lo + len(chunk_l)] = chunk_l
        out_r[lo:lo + len(chunk_r)] = chunk_r

    outcome_a = np.empty(len(prepared), dtype=np.int64)
    outcome_b = np.empty(len(prepared), dtype=np.int64)
    for j in range(len(prepared)):
        outcome_a[j] = sign_outcome(float(out_l[a_sys[j]]))
        outcome_b[j] = sign_outcome(float(out_r[b_sys[j]]))
    return outcome_a, outcome_b


def run_epr(cfg: ExperimentConfig) -> ExperimentReport:
    """Execute a full run and aggregate its statistics."""
    start = time.perf_counter()
    prepared = prepare_pairs(cfg)
    outcome_a, outcome_b = _transport_all(prepared, cfg)

    records: list[PairRecord] = []
    cell_counts = [0, 0, 0, 0]
    cell_sums = [0, 0, 0, 0]
    cell_launches = [0, 0, 0, 0]
    singles_a = 0
    singles_b = 0
    coincidences = 0
    for j, pair in enumerate(prepared):
        o_a = int(outcome_a[j])
        o_b = int(outcome_b[j])
        records.append(PairRecord(
            pair_id=pair.pair_id,
            setting_a=pair.setting_a,
            setting_b=pair.setting_b,
            a_index=pair.a_index,
            b_index=pair.b_index,
            seen_by_a=pair.seen_by_a,
            seen_by_b=pair.seen_by_b,
            outcome_a=o_a,
            outcome_b=o_b,
            survived_a=pair.survived_a,
            survived_b=pair.survived_b,
        ))
        singles_a += pair.survived_a
        singles_b += pair.survived_b
        if pair.a_index >= 0 and pair.b_index >= 0:
            cell = 2 * pair.a_index + pair.b_index
            cell_launches[cell] += 1
            if pair.survived_a and pair.survived_b:
                cell_counts[cell] += 1
                cell_sums[cell] += o_a * o_b
        if pair.survived_a and pair.survived_b:
            coincidences += 1

    if cfg.normalization is Normalization.SINGLES:
        denominators = cell_launches
    else:
        denominators = cell_counts
    bell: BellEstimate | None = None
    if all(d > 0 for d in denominators):
        e_values = tuple(cell_sums[i] / denominators[i] for i in range(4))
        s_signed, s_abs, sigma_s = chsh(e_values, tuple(denominators))
        bell = BellEstimate(
            e_values=e_values,
            n_values=tuple(denominators),
            s_signed=s_signed,
            s_abs=s_abs,
            sigma_s=sigma_s,
        )

    return ExperimentReport(
        config=cfg,
        records=tuple(records),
        bell=bell,
        cell_counts=tuple(cell_counts),
        cell_sums=tuple(cell_sums),
        cell_launches=tuple(cell_launches),
        singles_a=singles_a,
        singles_b=singles_b,
        coincidences=coincidences,
        switching_active=cfg.switching_active,
        runtime_s=time.perf_counter() - start,
    )


def count_rates(switched: ExperimentReport, quiescent: ExperimentReport) -> CountRates:
    """Singles and coincidence rates of a switching run against a baseline.

    The baseline must come from a run with both analyzers static; rates
    are per launch, and the unprimed values belong to the baseline.
    """
    if quiescent is None:
        raise EstimationError("count rates need a quiescent baseline run")
    if quiescent.switching_active:
        raise EstimationError("the quiescent baseline must not have switching enabled")
    n_q = quiescent.config.n_pairs
    n_s = switched.config.n_pairs
    q1_a = quiescent.singles_a / n_q
    q1_b = quiescent.singles_b / n_q
    q1p_a = switched.singles_a / n_s
    q1p_b = switched.singles_b / n_s
    q1 = 0.5 * (q1_a + q1_b)
    if q1 <= 0.0:
        raise EstimationError("quiescent baseline recorded no singles")
    c2 = quiescent.coincidences / n_q
    if c2 <= 0.0:
        raise EstimationError("quiescent baseline recorded no coincidences")
    return CountRates(
        q1=q1,
        q1p=0.5 * (q1p_a + q1p_b),
        c2=c2,
        c2p=switched.coincidences / n_s,
        q1_a=q1_a,
        q1_b=q1_b,
        q1p_a=q1p_a,
        q1p_b=q1p_b,
    )


def quiescent_config(cfg: ExperimentConfig) -> ExperimentConfig:
    """The same bench with both analyzers parked (for rate baselines)."""
    return replace(
        cfg,
        switch_policy_a=SwitchPolicy.STATIC,
        switch_policy_b=SwitchPolicy.STATIC,
        explicit_a=(),
        explicit_b=(),
    )


def report_json_dict(report: ExperimentReport) -> dict:
    """The canonical JSON form of a report."""
    bell = report.bell
    if bell is not None:
        per_setting = bell.per_setting()
        s_signed, s_abs, sigma_s = bell.s_signed, bell.s_abs, bell.sigma_s
        rates = {"Q1": bell.q1, "Q1p": bell.q1p, "C2": bell.c2, "C2p": bell.c2p}
    else:
        per_setting = {
            label: {"E": None, "N": 0} for label in CELL_LABELS
        }
        s_signed = s_abs = sigma_s = None
        rates = {"Q1": None, "Q1p": None, "C2": None, "C2p": None}
    return {
        "config_echo": report.config.to_dict(),
        "per_setting": per_setting,
        "S_signed": s_signed,
        "S_abs": s_abs,
        "sigma_S": sigma_s,
        "Q1": rates["Q1"],
        "Q1p": rates["Q1p"],
        "C2": rates["C2"],
        "C2p": rates["C2p"],
        "runtime_s": report.runtime_s,
        "seed": report.config.master_seed,
    }


EVENT_HEADER = ("pair_id,setting_A,setting_B,effective_B_seen_by_A,"
                "effective_A_seen_by_B,outcome_A,outcome_B,survived_A,survived_B")


def write_events_csv(report: ExperimentReport, path) -> None:
    """One line per launched pair, in launch order."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(EVENT_HEADER + "\n")
        for r in report.records:
            fh.write(
                f"{r.pair_id},{r.setting_a!r},{r.setting_b!r},"
                f"{r.seen_by_a.angle_b!r},{r.seen_by_b.angle_a!r},"
                f"{r.outcome_a},{r.outcome_b},"
                f"{int(r.survived_a)},{int(r.survived_b)}\n"
            )


TABLE1_ROWS = (
    ("local/singles/efficient", InformationMode.LOCAL,
     Efficiency.EFFICIENT, Normalization.SINGLES, 0),
    ("local/coincidences/inefficient", InformationMode.LOCAL,
     Efficiency.INEFFICIENT, Normalization.COINCIDENCES, 1),
    ("nonlocal/singles/efficient", InformationMode.NONLOCAL,
     Efficiency.EFFICIENT, Normalization.SINGLES, 2),
    ("nonlocal/coincidences/inefficient", InformationMode.NONLOCAL,
     Efficiency.INEFFICIENT, Normalization.COINCIDENCES, 1),
)


@dataclass(frozen=True)
class TableRow:
    """One summary-table row: its configuration fingerprint and estimate."""

    label: str
    mode: InformationMode
    efficiency: Efficiency
    normalization: Normalization
    seed: int
    bell: BellEstimate
    runtime_s: float


def table1_run(
    master_seed: int = DEFAULT_SEED,
    n_pairs: int = 4000,
    workers: int = 1,
    replicate: int = 0,
) -> list[TableRow]:
    """The four-row summary table over both modes and both loss settings.

    Each row runs with its own derived seed; the two inefficient rows
    deliberately share one, so their agreement (they integrate the same
    surviving pairs to the same outcomes) is visible in the output.
    Inefficient rows turn the kick threshold off so every switched magnet
    loses its particle.
    """
    rows: list[TableRow] = []
    for label, mode, efficiency, normalization, seed_key in TABLE1_ROWS:
        row_seed = derived_seed(master_seed, replicate, seed_key)
        inefficient = efficiency is Efficiency.INEFFICIENT
        cfg = ExperimentConfig(
            n_pairs=n_pairs,
            mode=mode,
            efficiency=efficiency,
            normalization=normalization,
            kick_threshold=0.0 if inefficient else 1.0e-3,
            master_seed=row_seed,
            workers=workers,
        )
        report = run_epr(cfg)
        if report.bell is None:
            raise EstimationError(f"row {label} left an empty setting cell")
        rows.append(TableRow(
            label=label,
            mode=mode,
            efficiency=efficiency,
            normalization=normalization,
            seed=row_seed,
            bell=report.bell,
            runtime_s=report.runtime_s,
        ))
    return rows
