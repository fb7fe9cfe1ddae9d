"""Experiment runner: deterministic sweeps over SNR, step size, swarm size.

Five experiment kinds are supported, each runnable from its own CLI
subcommand:

* ``particle_sweep``   global-best cost per iteration for several swarm sizes
* ``step_sweep``       LMS residual power across a step-size grid
* ``mse_vs_snr``       LMS versus PSO residual power across an SNR grid
* ``ber_awgn``         LMS versus PSO bit error rate, white noise only
* ``ber_nonlinear``    the same comparison under the named distortion profiles

Every run is a pure function of the resolved spec and the base seed.  The
seed of run (sweep_idx, seed_idx) is derived as
``SeedSequence(base_seed, spawn_key=(sweep_idx, seed_idx))`` collapsed to a
64-bit value, and that value is what appears in the ``seed`` column, so any
row can be reproduced in isolation.  Bit decisions are taken on the
noise-cancelled residual stream by default; ``run.decision_stream = output``
switches them to the filter output, aligned by the enhancer delay.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .ale import AleConfig, filter_frame
from .channel import DEFAULT_PROFILES, ChannelConfig, transmit
from .errors import ConfigError, DivergenceError
from .lms import LmsConfig, lms_run
from .metrics import mse
from .pso import PsoConfig, run_pso
from .signal import ModConfig, align_and_compare, demodulate, generate_bits, modulate

__all__ = [
    "KINDS",
    "ExperimentSpec",
    "ResultTable",
    "parse_config",
    "spec_to_text",
    "run_experiment",
    "emit_csv",
    "derive_run_seed",
]

KINDS = ("particle_sweep", "step_sweep", "mse_vs_snr", "ber_awgn", "ber_nonlinear")

DEFAULT_SNR_GRID = tuple(float(s) for s in range(-10, 11, 2))
DEFAULT_SWEEP_SNR = (-2.0,)
DEFAULT_PARTICLE_VALUES = (10.0, 20.0, 30.0, 40.0, 50.0, 60.0)
DEFAULT_STEP_VALUES = (0.005, 0.01, 0.02, 0.04, 0.08, 0.2)
DEFAULT_BASE_SEED = 12345


@dataclass(frozen=True)
class ExperimentSpec:
    """Fully-resolved description of one experiment."""

    kind: str = "mse_vs_snr"
    h: int = 10_000
    mod: ModConfig = field(default_factory=ModConfig)
    ale: AleConfig = field(default_factory=AleConfig)
    lms: LmsConfig = field(default_factory=LmsConfig)
    pso: PsoConfig = field(default_factory=PsoConfig)
    snr_grid: tuple[float, ...] = ()
    sweep_values: tuple[float, ...] = ()
    n_seeds: int = 10
    base_seed: int = DEFAULT_BASE_SEED
    decision_stream: str = "error"
    profiles: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.n_seeds < 1:
            raise ValueError(f"n_seeds must be >= 1, got {self.n_seeds}")
        if not (0 <= self.base_seed < 2**64):
            raise ValueError("base_seed must be an unsigned 64-bit value")
        if self.h < self.ale.taps + self.ale.delay + 1:
            raise ValueError(
                f"h={self.h} too small for taps={self.ale.taps}, delay={self.ale.delay}"
            )
        if self.decision_stream not in ("error", "output"):
            raise ValueError(f"decision_stream must be 'error' or 'output', got {self.decision_stream!r}")
        for name in self.profiles:
            if name not in DEFAULT_PROFILES:
                raise ValueError(f"unknown profile {name!r}")


@dataclass(frozen=True)
class ResultTable:
    """Raw per-seed rows plus seed-averaged rows and the resolved config."""

    kind: str
    raw_columns: tuple[str, ...]
    raw_rows: tuple[dict, ...]
    mean_columns: tuple[str, ...]
    mean_rows: tuple[dict, ...]
    metadata: str


# ---------------------------------------------------------------------------
# configuration parsing

def _parse_bool(text: str) -> bool:
    if text.lower() in ("true", "1", "yes"):
        return True
    if text.lower() in ("false", "0", "no"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_int(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError as err:
        raise ValueError(f"expected an integer, got {text!r}") from err


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError as err:
        raise ValueError(f"expected a number, got {text!r}") from err


def _parse_float_list(text: str) -> tuple[float, ...]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    if not items:
        raise ValueError("expected a non-empty comma-separated list")
    return tuple(_parse_float(item) for item in items)


def _parse_str_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


_SCHEMA = {
    "experiment.kind": str,
    "frame.h": _parse_int,
    "mod.m": _parse_int,
    "mod.phase_offset": _parse_float,
    "ale.taps": _parse_int,
    "ale.delay": _parse_int,
    "lms.mu": _parse_float,
    "pso.n_particles": _parse_int,
    "pso.c1": _parse_float,
    "pso.c2": _parse_float,
    "pso.max_iters": _parse_int,
    "pso.tol": _parse_float,
    "pso.patience": _parse_int,
    "pso.init_range": _parse_float,
    "pso.v_max": _parse_float,
    "pso.inertia": _parse_float,
    "pso.per_dimension_draws": _parse_bool,
    "run.snr_grid": _parse_float_list,
    "run.sweep_values": _parse_float_list,
    "run.n_seeds": _parse_int,
    "run.base_seed": _parse_int,
    "run.decision_stream": str,
    "channel.profiles": _parse_str_list,
}


def _parse_pairs(text: str) -> dict:
    """Strict key = value lines; unknown keys and malformed lines reject."""
    values = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(key, "unknown key")
        if key in values:
            raise ConfigError(key, "duplicate key")
        try:
            values[key] = _SCHEMA[key](value)
        except ValueError as err:
            raise ConfigError(key, str(err)) from err
    return values


def _default_grids(kind: str, values: dict) -> tuple[tuple, tuple, tuple]:
    snr = values.get("run.snr_grid")
    if snr is None:
        snr = DEFAULT_SWEEP_SNR if kind in ("particle_sweep", "step_sweep") else DEFAULT_SNR_GRID
    sweep = values.get("run.sweep_values")
    if sweep is None:
        if kind == "particle_sweep":
            sweep = DEFAULT_PARTICLE_VALUES
        elif kind == "step_sweep":
            sweep = DEFAULT_STEP_VALUES
        else:
            sweep = ()
    profiles = values.get("channel.profiles")
    if profiles is None:
        profiles = ("60MHz", "2.4GHz", "5.8GHz") if kind == "ber_nonlinear" else ()
    elif profiles == ("none",):
        profiles = ()
    return tuple(snr), tuple(sweep), tuple(profiles)


def parse_config(
    text: str, kind: str | None = None, overrides: dict[str, str] | None = None
) -> ExperimentSpec:
    """Build a resolved spec from a flat dotted-key document.

    Missing keys take the benchmark defaults (H=10,000 BPSK samples, a
    5-tap enhancer with delay 1, mu=0.01, 60 particles).  Unknown keys,
    type mismatches, and invariant violations raise ConfigError naming
    the offending key.  `kind` overrides any ``experiment.kind`` in the
    document; `overrides` maps keys to raw value strings that replace
    whatever the document says.
    """
    values = _parse_pairs(text)
    for key, raw in (overrides or {}).items():
        if key not in _SCHEMA:
            raise ConfigError(key, "unknown key")
        try:
            values[key] = _SCHEMA[key](raw)
        except ValueError as err:
            raise ConfigError(key, str(err)) from err
    resolved_kind = kind or values.get("experiment.kind", "mse_vs_snr")
    if resolved_kind not in KINDS:
        raise ConfigError("experiment.kind", f"must be one of {', '.join(KINDS)}")
    snr_grid, sweep_values, profiles = _default_grids(resolved_kind, values)

    def build(section, cls, mapping):
        kwargs = {}
        for key, fname in mapping.items():
            if key in values:
                kwargs[fname] = values[key]
        try:
            return cls(**kwargs)
        except ValueError as err:
            raise ConfigError(section, str(err)) from err

    mod = build("mod", ModConfig, {"mod.m": "m", "mod.phase_offset": "phase_offset"})
    ale = build("ale", AleConfig, {"ale.taps": "taps", "ale.delay": "delay"})
    lms = build("lms", LmsConfig, {"lms.mu": "mu"})
    pso = build(
        "pso",
        PsoConfig,
        {
            "pso.n_particles": "n_particles",
            "pso.c1": "c1",
            "pso.c2": "c2",
            "pso.max_iters": "max_iters",
            "pso.tol": "tol",
            "pso.patience": "patience",
            "pso.init_range": "init_range",
            "pso.v_max": "v_max",
            "pso.inertia": "inertia",
            "pso.per_dimension_draws": "per_dimension_draws",
        },
    )
    if resolved_kind == "particle_sweep":
        for v in sweep_values:
            if v != int(v) or v < 1:
                raise ConfigError("run.sweep_values", f"particle counts must be positive integers, got {v}")
    if resolved_kind == "step_sweep":
        for v in sweep_values:
            if not v > 0:
                raise ConfigError("run.sweep_values", f"step sizes must be > 0, got {v}")
    try:
        return ExperimentSpec(
            kind=resolved_kind,
            h=values.get("frame.h", 10_000),
            mod=mod,
            ale=ale,
            lms=lms,
            pso=pso,
            snr_grid=snr_grid,
            sweep_values=sweep_values,
            n_seeds=values.get("run.n_seeds", 10),
            base_seed=values.get("run.base_seed", DEFAULT_BASE_SEED),
            decision_stream=values.get("run.decision_stream", "error"),
            profiles=profiles,
        )
    except ValueError as err:
        raise ConfigError("run", str(err)) from err


def spec_to_text(spec: ExperimentSpec) -> str:
    """Echo a spec as config text that parses back to the same spec."""
    lines = [
        f"# alebench {__version__}",
        f"experiment.kind = {spec.kind}",
        f"frame.h = {spec.h}",
        f"mod.m = {spec.mod.m}",
        f"mod.phase_offset = {spec.mod.phase_offset!r}",
        f"ale.taps = {spec.ale.taps}",
        f"ale.delay = {spec.ale.delay}",
        f"lms.mu = {spec.lms.mu!r}",
        f"pso.n_particles = {spec.pso.n_particles}",
        f"pso.c1 = {spec.pso.c1!r}",
        f"pso.c2 = {spec.pso.c2!r}",
        f"pso.max_iters = {spec.pso.max_iters}",
        f"pso.tol = {spec.pso.tol!r}",
        f"pso.patience = {spec.pso.patience}",
        f"pso.init_range = {spec.pso.init_range!r}",
        f"pso.v_max = {spec.pso.v_max!r}",
        f"pso.inertia = {spec.pso.inertia!r}",
        f"pso.per_dimension_draws = {str(spec.pso.per_dimension_draws).lower()}",
        f"run.snr_grid = {', '.join(repr(s) for s in spec.snr_grid)}",
    ]
    if spec.sweep_values:
        lines.append(f"run.sweep_values = {', '.join(repr(v) for v in spec.sweep_values)}")
    lines += [
        f"run.n_seeds = {spec.n_seeds}",
        f"run.base_seed = {spec.base_seed}",
        f"run.decision_stream = {spec.decision_stream}",
    ]
    if spec.profiles:
        lines.append(f"channel.profiles = {', '.join(spec.profiles)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# seeds

def derive_run_seed(base_seed: int, sweep_idx: int, seed_idx: int) -> int:
    """64-bit seed of run (sweep_idx, seed_idx); independent of n_seeds."""
    ss = np.random.SeedSequence(base_seed, spawn_key=(sweep_idx, seed_idx))
    return int(ss.generate_state(1, np.uint64)[0])


def _subsystem_seeds(run_seed: int, count: int) -> list[int]:
    return [
        int(np.random.SeedSequence(run_seed, spawn_key=(k,)).generate_state(1, np.uint64)[0])
        for k in range(count)
    ]


# ---------------------------------------------------------------------------
# per-run pipeline

def _sweep_points(spec: ExperimentSpec) -> list[dict]:
    """Flattened sweep axis; list position is the seed-derivation index."""
    points = []
    if spec.kind in ("particle_sweep", "step_sweep"):
        for value in spec.sweep_values:
            for snr in spec.snr_grid:
                points.append({"value": value, "snr_db": snr})
    elif spec.kind == "ber_nonlinear":
        for name in spec.profiles:
            for snr in spec.snr_grid:
                points.append({"profile": name, "snr_db": snr})
    else:
        for snr in spec.snr_grid:
            points.append({"snr_db": snr})
    return points


def _make_frame(spec: ExperimentSpec, snr_db: float, profile_name: str | None, run_seed: int):
    bits_seed, chan_seed, pso_seed = _subsystem_seeds(run_seed, 3)
    bits = generate_bits(spec.h * spec.mod.bits_per_symbol, bits_seed)
    x = modulate(bits, spec.mod)
    profile = DEFAULT_PROFILES[profile_name] if profile_name else None
    frame = transmit(x, ChannelConfig(snr_db=snr_db, nonlinear=profile, seed=chan_seed))
    return bits, x, frame, pso_seed


def _decisions(spec: ExperimentSpec, bits, x, frame, run) -> tuple[float, float, int]:
    """BER and clean-stream MSE for one filtering run.

    Residual-stream decisions align with the transmitted bits directly;
    output-stream decisions lag by the enhancer delay.
    """
    k = spec.mod.bits_per_symbol
    v0 = run.valid.start
    if spec.decision_stream == "error":
        samples = run.e[v0:]
        tx_bits = bits[k * v0 :]
        clean_ref = x[v0:]
    else:
        samples = run.y[v0:]
        tx_bits = bits[k * (v0 - spec.ale.delay) :]
        clean_ref = x[v0 - spec.ale.delay : len(x) - spec.ale.delay]
    rx_bits = demodulate(samples, spec.mod)
    compared, errors = align_and_compare(tx_bits, rx_bits, 0)
    clean_mse = float(np.mean(np.abs(samples - clean_ref) ** 2))
    return errors / compared, clean_mse, compared


def _metric_rows(spec: ExperimentSpec, point: dict, seed_idx: int, sweep_idx: int) -> list[dict]:
    run_seed = derive_run_seed(spec.base_seed, sweep_idx, seed_idx)
    snr_db = point["snr_db"]
    profile = point.get("profile")
    bits, x, frame, pso_seed = _make_frame(spec, snr_db, profile, run_seed)

    base = {
        "snr_db": snr_db,
        "seed": run_seed,
        "L": spec.ale.taps,
        "delta": spec.ale.delay,
    }
    if spec.kind == "ber_nonlinear":
        base["profile"] = profile

    trace = lms_run(frame.d, spec.lms, spec.ale)
    lms_ber, lms_clean, compared = _decisions(spec, bits, x, frame, trace.run)
    lms_row = dict(base)
    lms_row.update(
        algorithm="LMS",
        ber=lms_ber,
        mse=mse(frame.d, trace.run.y, trace.run.valid),
        mu=spec.lms.mu,
        n_particles=None,
        clean_mse=lms_clean,
        compared_bits=compared,
    )

    weights, state = run_pso(frame.d, replace(spec.pso, seed=pso_seed), spec.ale)
    pso_run = filter_frame(frame.d, weights, spec.ale)
    pso_ber, pso_clean, compared = _decisions(spec, bits, x, frame, pso_run)
    pso_row = dict(base)
    pso_row.update(
        algorithm="PSO",
        ber=pso_ber,
        mse=mse(frame.d, pso_run.y, pso_run.valid),
        mu=None,
        n_particles=spec.pso.n_particles,
        clean_mse=pso_clean,
        compared_bits=compared,
    )
    return [lms_row, pso_row]


def _step_rows(spec: ExperimentSpec, point: dict, seed_idx: int, sweep_idx: int) -> list[dict]:
    run_seed = derive_run_seed(spec.base_seed, sweep_idx, seed_idx)
    mu = point["value"]
    bits, x, frame, _ = _make_frame(spec, point["snr_db"], None, run_seed)
    # the sweep deliberately crosses the stability boundary; a diverged
    # run reports infinite residual power instead of aborting the sweep
    try:
        trace = lms_run(frame.d, LmsConfig(mu=mu, w0=spec.lms.w0), spec.ale)
        value = mse(frame.d, trace.run.y, trace.run.valid)
    except DivergenceError:
        value = math.inf
    return [
        {
            "snr_db": point["snr_db"],
            "algorithm": "LMS",
            "seed": run_seed,
            "mu": mu,
            "mse": value,
            "L": spec.ale.taps,
            "delta": spec.ale.delay,
        }
    ]


def _particle_rows(spec: ExperimentSpec, point: dict, seed_idx: int, sweep_idx: int) -> list[dict]:
    run_seed = derive_run_seed(spec.base_seed, sweep_idx, seed_idx)
    n_particles = int(point["value"])
    bits, x, frame, pso_seed = _make_frame(spec, point["snr_db"], None, run_seed)
    # full-length histories: early stopping is disabled for this sweep
    cfg = replace(spec.pso, n_particles=n_particles, tol=0.0, seed=pso_seed)
    _, state = run_pso(frame.d, cfg, spec.ale)
    return [
        {
            "snr_db": point["snr_db"],
            "algorithm": "PSO",
            "seed": run_seed,
            "n_particles": n_particles,
            "iteration": it + 1,
            "gbest_cost": cost,
            "L": spec.ale.taps,
            "delta": spec.ale.delay,
        }
        for it, cost in enumerate(state.history)
    ]


_RUNNERS = {
    "particle_sweep": _particle_rows,
    "step_sweep": _step_rows,
    "mse_vs_snr": _metric_rows,
    "ber_awgn": _metric_rows,
    "ber_nonlinear": _metric_rows,
}


def _run_task(args: tuple) -> list[dict]:
    spec, sweep_idx, seed_idx = args
    point = _sweep_points(spec)[sweep_idx]
    try:
        return _RUNNERS[spec.kind](spec, point, seed_idx, sweep_idx)
    except DivergenceError as err:
        raise RuntimeError(
            f"{spec.kind} failed at sweep point {point}, seed index {seed_idx}: {err}"
        ) from err


# ---------------------------------------------------------------------------
# tables

_METRIC_COLUMNS = (
    "snr_db", "algorithm", "seed", "ber", "mse", "mu", "n_particles",
    "L", "delta", "clean_mse", "compared_bits",
)
_METRIC_MEAN = (
    "snr_db", "algorithm", "ber", "mse", "clean_mse", "n_seeds", "mu",
    "n_particles", "L", "delta",
)
_STEP_COLUMNS = ("snr_db", "algorithm", "seed", "mu", "mse", "L", "delta")
_STEP_MEAN = ("snr_db", "algorithm", "mu", "mse", "n_seeds", "L", "delta")
_PARTICLE_COLUMNS = (
    "snr_db", "algorithm", "seed", "n_particles", "iteration", "gbest_cost", "L", "delta",
)
_PARTICLE_MEAN = (
    "snr_db", "algorithm", "n_particles", "iteration", "gbest_cost", "n_seeds", "L", "delta",
)


def _columns_for(kind: str) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
    """(raw columns, mean columns, aggregated value columns) per kind."""
    if kind == "particle_sweep":
        return _PARTICLE_COLUMNS, _PARTICLE_MEAN, ("gbest_cost",)
    if kind == "step_sweep":
        return _STEP_COLUMNS, _STEP_MEAN, ("mse",)
    raw = _METRIC_COLUMNS + (("profile",) if kind == "ber_nonlinear" else ())
    mean = _METRIC_MEAN + (("profile",) if kind == "ber_nonlinear" else ())
    return raw, mean, ("ber", "mse", "clean_mse")


def _mean_rows(raw_rows: list[dict], mean_columns: tuple[str, ...],
               value_columns: tuple[str, ...]) -> list[dict]:
    groups: dict[tuple, list[dict]] = {}
    key_columns = tuple(c for c in mean_columns if c not in value_columns and c != "n_seeds")
    for row in raw_rows:
        key = tuple(row[c] for c in key_columns)
        groups.setdefault(key, []).append(row)
    out = []
    for key, rows in groups.items():
        entry = dict(zip(key_columns, key))
        entry["n_seeds"] = len(rows)
        for col in value_columns:
            entry[col] = float(np.mean([row[col] for row in rows]))
        out.append(entry)
    return out


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> ResultTable:
    """Run every (sweep point, seed) task and assemble the result table.

    Tasks are independent; with ``jobs > 1`` they execute in a process
    pool.  Rows are merged in (sweep index, seed index) order, so output
    bytes never depend on the parallelism level.
    """
    points = _sweep_points(spec)
    if not points:
        raise ValueError("experiment has an empty sweep grid")
    tasks = [
        (spec, sweep_idx, seed_idx)
        for sweep_idx in range(len(points))
        for seed_idx in range(spec.n_seeds)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_task, tasks))
    else:
        chunks = [_run_task(task) for task in tasks]
    raw_rows = [row for chunk in chunks for row in chunk]
    raw_columns, mean_columns, value_columns = _columns_for(spec.kind)
    mean_rows = _mean_rows(raw_rows, mean_columns, value_columns)
    return ResultTable(
        kind=spec.kind,
        raw_columns=raw_columns,
        raw_rows=tuple(raw_rows),
        mean_columns=mean_columns,
        mean_rows=tuple(mean_rows),
        metadata=spec_to_text(spec),
    )


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, columns: tuple[str, ...], rows: tuple[dict, ...]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row.get(col)) for col in columns])


def emit_csv(table: ResultTable, out_dir: str | Path) -> list[Path]:
    """Write ``<kind>_raw.csv``, ``<kind>_mean.csv`` and ``<kind>_meta.txt``.

    Numeric cells use shortest round-trip formatting; re-emitting the same
    table produces identical bytes.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    raw_path = out / f"{table.kind}_raw.csv"
    mean_path = out / f"{table.kind}_mean.csv"
    meta_path = out / f"{table.kind}_meta.txt"
    _write_csv(raw_path, table.raw_columns, table.raw_rows)
    _write_csv(mean_path, table.mean_columns, table.mean_rows)
    with open(meta_path, "w", newline="", encoding="utf-8") as fh:
        fh.write(table.metadata)
    return [raw_path, mean_path, meta_path]
