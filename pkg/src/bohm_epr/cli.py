"""Command line front end.

Subcommands:

* ``run-epr``: one full run; writes report.json (plus events.csv on
  request) and a manifest.
* ``table1``: the four-row mode/efficiency summary table, optionally
  replicated to estimate the spread of S.
* ``kick-ratio``: print the switching kick for a beam speed.
* ``hooke-demo``: the delayed-spring toy, CSV per coupling.
* ``dump-trajectories``: recorded per-view trajectories for the first
  few pairs of a run.

Configuration comes from an INI file with flat key = value lines in
sections [physics], [integration], [experiment]; every flag overrides
its file counterpart, and the master seed resolves flag, then
BOHM_EPR_SEED, then file, then the built-in default. Exit codes: 0 on
success, 2 for configuration problems, 3 for numerical or estimation
failures.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import datetime
import hashlib
import io
import json
import math
import os
import sys

from . import __version__
from .errors import ConfigError, EstimationError, IntegrationDiverged
from .experiment import (
    DEFAULT_SEED,
    Efficiency,
    ExperimentConfig,
    Normalization,
    SwitchPolicy,
    count_rates,
    kick_ratio,
    prepare_pairs,
    quiescent_config,
    report_json_dict,
    run_epr,
    table1_run,
    write_events_csv,
)
from .hooke import (
    HookeParams,
    SpringMode,
    center_of_mass_spring,
    simulate_spring,
    spring_energy,
    write_spring_csv,
)
from .infomodel import InformationMode
from .integrate import IntegrationConfig, integrate_pair
from .physconst import RawPhysicalInputs, derive_coefficients

ENV_SEED = "BOHM_EPR_SEED"

_PHYSICS_KEYS = (
    "magnetic_moment", "mass", "packet_width", "field_gradient",
    "magnet_length", "beam_speed", "light_speed",
)
_INTEGRATION_KEYS = ("dt", "workers")
_EXPERIMENT_KEYS = (
    "n_pairs", "angles_a", "angles_b", "mode", "efficiency", "normalization",
    "kick_threshold", "seed", "separation", "source_to_magnet", "pair_period",
    "signal_speed", "switch_policy_a", "switch_policy_b",
    "explicit_a", "explicit_b",
)
_SECTIONS = {
    "physics": _PHYSICS_KEYS,
    "integration": _INTEGRATION_KEYS,
    "experiment": _EXPERIMENT_KEYS,
}


def _parse_float(text: str, where: str) -> float:
    try:
        value = float(text)
    except ValueError as err:
        raise ConfigError(f"{where}: not a number: {text!r}") from err
    if math.isnan(value):
        raise ConfigError(f"{where}: NaN is not allowed")
    return value


def _parse_int(text: str, where: str) -> int:
    try:
        return int(text)
    except ValueError as err:
        raise ConfigError(f"{where}: not an integer: {text!r}") from err


def _parse_pair_of_angles(text: str, where: str) -> tuple[float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{where}: expected two comma-separated angles")
    return (_parse_float(parts[0], where), _parse_float(parts[1], where))


def _parse_entries(text: str, where: str) -> tuple[tuple[float, float], ...]:
    text = text.strip()
    if not text:
        return ()
    entries = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 2:
            raise ConfigError(f"{where}: entries must look like time:angle")
        entries.append((_parse_float(parts[0], where), _parse_float(parts[1], where)))
    return tuple(entries)


def _parse_enum(enum_cls, text: str, where: str):
    try:
        return enum_cls(text.strip())
    except ValueError as err:
        allowed = ", ".join(m.value for m in enum_cls)
        raise ConfigError(f"{where}: must be one of {allowed}, got {text!r}") from err


def read_config_text(text: str) -> dict:
    """Parse INI text into a flat {section.key: string} dict, keys validated."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"config file is not valid INI: {err}") from err
    values: dict[str, str] = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            values[f"{section}.{key}"] = raw
    return values


def build_config(values: dict, overrides: dict | None = None,
                 env: dict | None = None) -> tuple[ExperimentConfig, dict]:
    """Turn flat file values plus flag overrides into an ExperimentConfig.

    Returns the config and a provenance dict recording which flags took
    effect and where the seed came from.
    """
    overrides = overrides or {}
    env = os.environ if env is None else env

    def fval(key: str, kind, default):
        if key in values:
            where = f"config key {key}"
            if kind is float:
                return _parse_float(values[key], where)
            if kind is int:
                return _parse_int(values[key], where)
            return kind(values[key], where)
        return default

    physics_defaults = RawPhysicalInputs()
    physics = RawPhysicalInputs(
        magnetic_moment=fval("physics.magnetic_moment", float, physics_defaults.magnetic_moment),
        mass=fval("physics.mass", float, physics_defaults.mass),
        packet_width=fval("physics.packet_width", float, physics_defaults.packet_width),
        field_gradient=fval("physics.field_gradient", float, physics_defaults.field_gradient),
        magnet_length=fval("physics.magnet_length", float, physics_defaults.magnet_length),
        beam_speed=fval("physics.beam_speed", float, physics_defaults.beam_speed),
        light_speed=fval("physics.light_speed", float, physics_defaults.light_speed),
    )

    defaults = _config_defaults()

    seed_source = "default"
    seed = DEFAULT_SEED
    if "experiment.seed" in values:
        seed = _parse_int(values["experiment.seed"], "config key experiment.seed")
        seed_source = "file"
    if env.get(ENV_SEED):
        seed = _parse_int(env[ENV_SEED], f"environment variable {ENV_SEED}")
        seed_source = "environment"
    if overrides.get("seed") is not None:
        seed = overrides["seed"]
        seed_source = "flag"

    def angles(key, default):
        return fval(key, _parse_pair_of_angles, default)

    cfg = ExperimentConfig(
        physics=physics,
        n_pairs=fval("experiment.n_pairs", int, defaults.n_pairs),
        angles_a=angles("experiment.angles_a", defaults.angles_a),
        angles_b=angles("experiment.angles_b", defaults.angles_b),
        mode=fval("experiment.mode",
                  lambda t, w: _parse_enum(InformationMode, t, w), defaults.mode),
        efficiency=fval("experiment.efficiency",
                        lambda t, w: _parse_enum(Efficiency, t, w), defaults.efficiency),
        normalization=fval("experiment.normalization",
                           lambda t, w: _parse_enum(Normalization, t, w),
                           defaults.normalization),
        kick_threshold=fval("experiment.kick_threshold", float, defaults.kick_threshold),
        master_seed=seed,
        dt=fval("integration.dt", float, defaults.dt),
        separation=fval("experiment.separation", float, defaults.separation),
        source_to_magnet=fval("experiment.source_to_magnet", float,
                              defaults.source_to_magnet),
        pair_period=fval("experiment.pair_period", float, defaults.pair_period),
        signal_speed=fval("experiment.signal_speed", float, defaults.signal_speed),
        switch_policy_a=fval("experiment.switch_policy_a",
                             lambda t, w: _parse_enum(SwitchPolicy, t, w),
                             defaults.switch_policy_a),
        switch_policy_b=fval("experiment.switch_policy_b",
                             lambda t, w: _parse_enum(SwitchPolicy, t, w),
                             defaults.switch_policy_b),
        explicit_a=fval("experiment.explicit_a", _parse_entries, defaults.explicit_a),
        explicit_b=fval("experiment.explicit_b", _parse_entries, defaults.explicit_b),
        workers=fval("integration.workers", int, defaults.workers),
    )

    applied = {}
    for name in ("n_pairs", "mode", "efficiency", "normalization", "workers"):
        value = overrides.get(name)
        if value is not None:
            applied[name] = value.value if hasattr(value, "value") else value
            cfg = dataclasses.replace(cfg, **{name: value})
    if seed_source == "flag":
        applied["seed"] = seed
    provenance = {"seed_source": seed_source, "flag_overrides": applied}
    return cfg, provenance


def _config_defaults() -> ExperimentConfig:
    return ExperimentConfig()


def emit_config(cfg: ExperimentConfig) -> str:
    """Render a config as INI text; parsing it back reproduces the config."""
    def entries_text(entries):
        return ";".join(f"{t!r}:{a!r}" for t, a in entries)

    p = cfg.physics
    out = io.StringIO()
    out.write("[physics]\n")
    for key in _PHYSICS_KEYS:
        out.write(f"{key} = {getattr(p, key)!r}\n")
    out.write("\n[integration]\n")
    out.write(f"dt = {cfg.dt!r}\n")
    out.write(f"workers = {cfg.workers}\n")
    out.write("\n[experiment]\n")
    out.write(f"n_pairs = {cfg.n_pairs}\n")
    out.write(f"angles_a = {cfg.angles_a[0]!r}, {cfg.angles_a[1]!r}\n")
    out.write(f"angles_b = {cfg.angles_b[0]!r}, {cfg.angles_b[1]!r}\n")
    out.write(f"mode = {cfg.mode.value}\n")
    out.write(f"efficiency = {cfg.efficiency.value}\n")
    out.write(f"normalization = {cfg.normalization.value}\n")
    out.write(f"kick_threshold = {cfg.kick_threshold!r}\n")
    out.write(f"seed = {cfg.master_seed}\n")
    out.write(f"separation = {cfg.separation!r}\n")
    out.write(f"source_to_magnet = {cfg.source_to_magnet!r}\n")
    out.write(f"pair_period = {cfg.pair_period!r}\n")
    out.write(f"signal_speed = {cfg.signal_speed!r}\n")
    out.write(f"switch_policy_a = {cfg.switch_policy_a.value}\n")
    out.write(f"switch_policy_b = {cfg.switch_policy_b.value}\n")
    out.write(f"explicit_a = {entries_text(cfg.explicit_a)}\n")
    out.write(f"explicit_b = {entries_text(cfg.explicit_b)}\n")
    return out.getvalue()


def parse_config(cfg_text: str, overrides: dict | None = None,
                 env: dict | None = None) -> tuple[ExperimentConfig, dict]:
    """read_config_text followed by build_config."""
    return build_config(read_config_text(cfg_text), overrides, env)


def config_digest(cfg: ExperimentConfig) -> str:
    """sha256 of the canonical (sorted-key) JSON form of the config."""
    canon = json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def write_manifest(out_dir: str, cfg: ExperimentConfig | None, files: list[str],
                   command: str, provenance: dict | None = None,
                   started: str | None = None) -> str:
    """Write manifest.json listing every artifact of this invocation."""
    manifest = {
        "tool": "bohm-epr",
        "version": __version__,
        "command": command,
        "started_utc": started,
        "finished_utc": _utc_now(),
        "config_sha256": config_digest(cfg) if cfg is not None else None,
        "seed": cfg.master_seed if cfg is not None else None,
        "provenance": provenance or {},
        "files": sorted(files),
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return path


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _ensure_out(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _load_file_values(path: str | None) -> dict:
    if path is None:
        return {}
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return read_config_text(fh.read())


def _overrides_from_args(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if getattr(args, "seed", None) is not None:
        if args.seed < 0 or args.seed >= 2**64:
            raise ConfigError("--seed must fit in an unsigned 64-bit integer")
        overrides["seed"] = args.seed
    if getattr(args, "pairs", None) is not None:
        overrides["n_pairs"] = args.pairs
    if getattr(args, "mode", None) is not None:
        overrides["mode"] = InformationMode(args.mode)
    if getattr(args, "efficiency", None) is not None:
        overrides["efficiency"] = Efficiency(args.efficiency)
    if getattr(args, "normalization", None) is not None:
        overrides["normalization"] = Normalization(args.normalization)
    if getattr(args, "workers", None) is not None:
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        overrides["workers"] = args.workers
    return overrides


def _cmd_run_epr(args: argparse.Namespace) -> int:
    started = _utc_now()
    cfg, provenance = build_config(_load_file_values(args.config),
                                   _overrides_from_args(args))
    out_dir = _ensure_out(args.out)
    report = run_epr(cfg)
    if args.rates:
        baseline = run_epr(quiescent_config(cfg))
        rates = count_rates(report, baseline)
        if report.bell is not None:
            report = dataclasses.replace(report, bell=report.bell.with_rates(rates))

    doc = report_json_dict(report)
    files = ["report.json", "manifest.json"]
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    if args.events:
        write_events_csv(report, os.path.join(out_dir, "events.csv"))
        files.append("events.csv")
    write_manifest(out_dir, cfg, files, "run-epr", provenance, started)

    bell = report.bell
    if bell is not None:
        print(f"run-epr: {cfg.mode.value}, {cfg.n_pairs} pairs, "
              f"S_signed = {bell.s_signed:+.4f} (sigma {bell.sigma_s:.4f}), "
              f"coincidences = {report.coincidences}")
    else:
        print(f"run-epr: {cfg.mode.value}, {cfg.n_pairs} pairs, "
              f"S undefined (empty setting cell), "
              f"coincidences = {report.coincidences}")
    print(f"wrote {', '.join(sorted(files))} in {out_dir}")
    return 0


def _cmd_table1(args: argparse.Namespace) -> int:
    started = _utc_now()
    seed = args.seed if args.seed is not None else _env_or_default_seed()
    replicates = args.replicates
    if replicates < 1:
        raise ConfigError("--replicates must be at least 1")
    out_dir = _ensure_out(args.out)

    all_rows = [
        table1_run(master_seed=seed, n_pairs=args.pairs,
                   workers=args.workers, replicate=r)
        for r in range(replicates)
    ]
    main_rows = all_rows[0]

    width = max(len(r.label) for r in main_rows)
    header = f"{'row':<{width}}  {'S_signed':>9}  {'sigma_S':>8}"
    if replicates > 1:
        header += f"  {'mean_S':>9}  {'std_S':>8}"
    print(header)
    rows_doc = []
    for i, row in enumerate(main_rows):
        line = (f"{row.label:<{width}}  {row.bell.s_signed:>+9.5f}  "
                f"{row.bell.sigma_s:>8.5f}")
        replicate_s = [rows[i].bell.s_signed for rows in all_rows]
        doc = {
            "label": row.label,
            "mode": row.mode.value,
            "efficiency": row.efficiency.value,
            "normalization": row.normalization.value,
            "seed": row.seed,
            "S_signed": row.bell.s_signed,
            "S_abs": row.bell.s_abs,
            "sigma_S": row.bell.sigma_s,
            "per_setting": row.bell.per_setting(),
        }
        if replicates > 1:
            mean = sum(replicate_s) / replicates
            var = sum((s - mean) ** 2 for s in replicate_s) / (replicates - 1)
            std = math.sqrt(var)
            line += f"  {mean:>+9.5f}  {std:>8.5f}"
            doc["replicate_S"] = replicate_s
            doc["mean_S"] = mean
            doc["std_S"] = std
        print(line)
        rows_doc.append(doc)

    table_doc = {
        "seed": seed,
        "n_pairs": args.pairs,
        "replicates": replicates,
        "rows": rows_doc,
    }
    with open(os.path.join(out_dir, "table1.json"), "w", encoding="utf-8") as fh:
        json.dump(table_doc, fh, indent=2)
        fh.write("\n")
    cfg_echo = ExperimentConfig(n_pairs=args.pairs, master_seed=seed,
                                workers=args.workers)
    write_manifest(out_dir, cfg_echo, ["table1.json", "manifest.json"],
                   "table1", {"seed_source": "flag" if args.seed is not None else "default"},
                   started)
    print(f"wrote table1.json, manifest.json in {out_dir}")
    return 0


def _env_or_default_seed() -> int:
    raw = os.environ.get(ENV_SEED)
    if raw:
        return _parse_int(raw, f"environment variable {ENV_SEED}")
    return DEFAULT_SEED


def _cmd_kick_ratio(args: argparse.Namespace) -> int:
    ratio = kick_ratio(args.speed, args.light_speed)
    lost = ratio >= args.threshold
    print(f"beam_speed = {args.speed!r} cm/s")
    print(f"light_speed = {args.light_speed!r} cm/s")
    print(f"kick_ratio = {ratio!r}")
    print(f"threshold = {args.threshold!r} -> "
          f"{'lost' if lost else 'kept'} on switch (inefficient mode)")
    return 0


def _cmd_hooke_demo(args: argparse.Namespace) -> int:
    started = _utc_now()
    params = HookeParams(delay=args.tau)
    duration = args.periods * params.period
    out_dir = _ensure_out(args.out)

    couplings = (["instantaneous", "retarded", "expanded", "cm"]
                 if args.coupling == "all" else [args.coupling])
    files = ["manifest.json"]
    for name in couplings:
        if name == "retarded" and args.tau > 0.0:
            dt = args.dt if args.dt is not None else args.tau / 8.0
        else:
            dt = args.dt if args.dt is not None else params.period / 2000.0
        if name == "cm":
            traj = center_of_mass_spring(params, duration, dt)
        else:
            traj = simulate_spring(params, SpringMode(name), duration, dt)
        fname = f"hooke_{name}.csv"
        write_spring_csv(traj, os.path.join(out_dir, fname))
        files.append(fname)
        energy = spring_energy(params, traj)
        drift = abs(float(energy[-1] - energy[0])) / abs(float(energy[0]))
        print(f"{name:<14} dt = {dt:.3g}  x1(T) = {traj.x1[-1]:+.6f}  "
              f"x2(T) = {traj.x2[-1]:+.6f}  energy drift = {drift:.3e}")
    write_manifest(out_dir, None, files, "hooke-demo",
                   {"tau": args.tau, "periods": args.periods}, started)
    print(f"wrote {', '.join(sorted(files))} in {out_dir}")
    return 0


def _cmd_dump_trajectories(args: argparse.Namespace) -> int:
    started = _utc_now()
    overrides = _overrides_from_args(args)
    n_dump = args.pairs if args.pairs is not None else 4
    overrides["n_pairs"] = max(4, n_dump)
    cfg, provenance = build_config(_load_file_values(args.config), overrides)
    if args.record_every < 1:
        raise ConfigError("--record-every must be at least 1")
    out_dir = _ensure_out(args.out)

    coeff = derive_coefficients(cfg.physics)
    icfg = IntegrationConfig(dt=cfg.dt, duration=coeff.transit_time,
                             record_every=args.record_every)
    prepared = prepare_pairs(cfg, limit=n_dump)
    path = os.path.join(out_dir, "trajectories.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("pair_id,view,step,t,z_L,z_R\n")
        for pair in prepared:
            left, right = integrate_pair(
                (pair.z_l0, pair.z_r0), pair.seen_by_a, pair.seen_by_b,
                coeff, icfg)
            for view, traj in (("A", left), ("B", right)):
                for state in traj.samples:
                    step = round(state.t / cfg.dt)
                    fh.write(f"{pair.pair_id},{view},{step},"
                             f"{state.t!r},{state.z_l!r},{state.z_r!r}\n")
    write_manifest(out_dir, cfg, ["trajectories.csv", "manifest.json"],
                   "dump-trajectories", provenance, started)
    print(f"dumped {len(prepared)} pairs to trajectories.csv in {out_dir}")
    return 0


def _add_common_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="PATH", help="INI config file")
    sub.add_argument("--seed", type=int, metavar="U64", help="master seed")
    sub.add_argument("--pairs", type=int, metavar="N", help="number of pairs")
    sub.add_argument("--mode", choices=[m.value for m in InformationMode],
                     help="information mode")
    sub.add_argument("--efficiency", choices=[e.value for e in Efficiency])
    sub.add_argument("--normalization", choices=[n.value for n in Normalization])
    sub.add_argument("--workers", type=int, metavar="N",
                     help="parallel integration workers")
    sub.add_argument("--out", metavar="DIR", default=".",
                     help="output directory (default: current)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bohm-epr",
        description="Two-particle pilot-wave transport through a dual "
                    "Stern-Gerlach bench, with CHSH statistics.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run-epr", help="run one experiment")
    _add_common_run_flags(run)
    run.add_argument("--events", action="store_true",
                     help="also write per-pair events.csv")
    run.add_argument("--rates", action="store_true",
                     help="also run a quiescent baseline and report count rates")
    run.set_defaults(func=_cmd_run_epr)

    table = subs.add_parser("table1", help="four-row mode/efficiency table")
    table.add_argument("--seed", type=int, metavar="U64")
    table.add_argument("--pairs", type=int, metavar="N", default=4000)
    table.add_argument("--replicates", type=int, metavar="R", default=1,
                       help="repeat with derived seeds and report the spread")
    table.add_argument("--workers", type=int, metavar="N", default=1)
    table.add_argument("--out", metavar="DIR", default=".")
    table.set_defaults(func=_cmd_table1)

    kick = subs.add_parser("kick-ratio", help="switching kick for a beam speed")
    kick.add_argument("--speed", type=float, metavar="V", default=1.0e4,
                      help="beam speed in cm/s (default 1e4)")
    kick.add_argument("--light-speed", type=float, metavar="C", default=2.998e10)
    kick.add_argument("--threshold", type=float, metavar="X", default=1.0e-3)
    kick.set_defaults(func=_cmd_kick_ratio)

    hooke = subs.add_parser("hooke-demo", help="delayed-spring toy model")
    hooke.add_argument("--coupling",
                       choices=["instantaneous", "retarded", "expanded", "cm", "all"],
                       default="all")
    hooke.add_argument("--tau", type=float, default=0.05,
                       help="coupling delay (default 0.05)")
    hooke.add_argument("--dt", type=float, default=None)
    hooke.add_argument("--periods", type=float, default=10.0)
    hooke.add_argument("--out", metavar="DIR", default=".")
    hooke.set_defaults(func=_cmd_hooke_demo)

    dump = subs.add_parser("dump-trajectories",
                           help="record per-view trajectories for a few pairs")
    _add_common_run_flags(dump)
    dump.add_argument("--record-every", type=int, metavar="N", default=10,
                      help="keep every N-th step (default 10)")
    dump.set_defaults(func=_cmd_dump_trajectories)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except (EstimationError, IntegrationDiverged) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
