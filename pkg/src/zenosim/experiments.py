"""Experiment harnesses: FID, Zeno measurement trains and XY-4 decoupling.

Two modes share the same machinery. ``nmr`` mode uses the combined
dephasing/relaxation step with finite pulses and the entangler measurement.
``theory`` mode uses the dephasing step with instantaneous ideal
measurements; its time unit is one coupling period, obtained by running the
ms-based maps with ``j_hz = 1000``.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import qmat
from .channels import (
    GRID_TOL,
    FlipNoise,
    MeasurementSpec,
    SpinSystemParams,
    dephasing_step,
    entangler_measurement,
    evolve_step,
    ideal_measurement,
    n_steps,
    pulse_step,
)
from .fitting import EnvelopeFit, fit_envelope
from .trace import SignalTrace, TraceRecorder

INITIAL_STATES = ("pseudopure_plus", "pseudopure_zero", "theory_plus")
TIME_AXES = ("elapsed", "alpha", "cycles")
RESYMMETRIZE_EVERY = 10_000


class ConfigError(ValueError):
    """Inconsistent experiment configuration."""


def aligned(duration: float, dt: float) -> bool:
    r = duration / dt
    return abs(r - round(r)) <= GRID_TOL


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = "nmr"
    params: SpinSystemParams = field(default_factory=SpinSystemParams)
    noise_axis: str = "fixed_y"
    seed: int | None = 0
    dt_ms: float = 0.1
    tau_xy_ms: float = 0.1
    tau_z_ms: float = 0.0
    n_reps: int = 600
    pulse_tau_ms: float = 0.058
    alpha: float = 0.4
    initial: object = "pseudopure_plus"

    def __post_init__(self):
        if self.mode not in ("theory", "nmr"):
            raise ConfigError(f"mode must be 'theory' or 'nmr', got {self.mode!r}")
        if not self.dt_ms > 0:
            raise ConfigError("dt_ms must be positive")
        for name in ("tau_xy_ms", "tau_z_ms", "pulse_tau_ms"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        for name in ("tau_xy_ms", "tau_z_ms"):
            if not aligned(getattr(self, name), self.dt_ms):
                raise ConfigError(f"{name}={getattr(self, name)} is not a multiple of dt_ms={self.dt_ms}")
        if int(self.n_reps) != self.n_reps or self.n_reps < 1:
            raise ConfigError("n_reps must be a positive integer")
        if isinstance(self.initial, str) and self.initial not in INITIAL_STATES:
            raise ConfigError(f"unknown initial state {self.initial!r}")

    @classmethod
    def nmr(cls, t_d_ms=6.5, t1s_ms=300.0, j_hz=215.0, **kw):
        return cls(mode="nmr", params=SpinSystemParams(j_hz, t_d_ms, t1s_ms), **kw)

    @classmethod
    def theory(cls, p_e=0.05, tau_xy=1 / 160, total=None, dt=None, **kw):
        """Theory-mode config; times are in coupling periods."""
        t_d = math.inf if p_e == 0 else 1.0 / (2.0 * p_e)
        dt = tau_xy if dt is None else dt
        if total is not None:
            kw["n_reps"] = int(round(total / tau_xy))
        kw.setdefault("initial", "theory_plus")
        kw.setdefault("pulse_tau_ms", 0.0)
        return cls(
            mode="theory",
            params=SpinSystemParams(1000.0, t_d, math.inf),
            dt_ms=dt,
            tau_xy_ms=tau_xy,
            **kw,
        )

    def make_noise(self) -> FlipNoise:
        return FlipNoise.from_params(self.params, self.noise_axis, self.seed)

    def with_(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)

    def echo(self) -> dict:
        d = asdict(self)
        d["params"] = {
            "j_hz": self.params.j_hz,
            "t_d_ms": self.params.t_d_ms,
            "t1s_ms": self.params.t1s_ms,
        }
        if not isinstance(self.initial, str):
            d["initial"] = "custom"
        return d


def initial_state(config: ExperimentConfig) -> np.ndarray:
    init = config.initial
    if not isinstance(init, str):
        return qmat.check_density(np.asarray(init, dtype=complex))
    if init == "pseudopure_zero":
        return config.params.thermal.copy()
    if init == "pseudopure_plus":
        # pi/2 pulse about y on S applied to the thermal state
        r = qmat.kron(qmat.pauli_exp("Y", math.pi / 2), qmat.I2)
        return qmat.ad(r, config.params.thermal)
    return qmat.kron(qmat.projector(qmat.KET_PLUS), qmat.projector(qmat.KET0))


def free_step_fn(config: ExperimentConfig):
    """Single integration step for the config's mode."""
    if config.mode == "theory":
        return dephasing_step
    return evolve_step


def guard(rho: np.ndarray, steps: int) -> np.ndarray:
    """Re-symmetrize when Hermiticity drift exceeds tolerance on long runs."""
    if steps and steps % RESYMMETRIZE_EVERY == 0 and qmat.hermiticity_error(rho) > qmat.HERMITIAN_TOL:
        return qmat.symmetrize(rho)
    return rho


class _Clock:
    """Elapsed time as integer counts of dt steps and pulses, so every
    harness and the sequence executor produce identical sample times."""

    def __init__(self, dt: float, pulse_tau: float):
        self.dt, self.pulse_tau = dt, pulse_tau
        self.n_dt = 0
        self.n_pulse = 0

    @property
    def t(self) -> float:
        return self.n_dt * self.dt + self.n_pulse * self.pulse_tau


def measure(rho, config: ExperimentConfig, noise: FlipNoise, spec: MeasurementSpec, clock=None):
    """Apply ``spec`` to ``rho`` and advance ``clock`` by its duration."""
    if spec.kind == "ideal":
        return ideal_measurement(rho, spec)
    out = entangler_measurement(rho, config.params, noise, spec, config.dt_ms, config.pulse_tau_ms)
    if clock is not None:
        clock.n_pulse += 2
        clock.n_dt += n_steps(spec.tau_z_ms, config.dt_ms)
    return out


def run_fid(config: ExperimentConfig) -> SignalTrace:
    """Free decay: ``n_reps`` blocks of ``tau_xy``, sampled after each block."""
    noise = config.make_noise()
    step = free_step_fn(config)
    rho = initial_state(config)
    rec = TraceRecorder(rho)
    clock = _Clock(config.dt_ms, config.pulse_tau_ms)
    k = n_steps(config.tau_xy_ms, config.dt_ms)
    for _ in range(config.n_reps):
        for _ in range(k):
            rho = step(rho, config.params, noise, config.dt_ms)
            clock.n_dt += 1
            rho = guard(rho, clock.n_dt)
        rec.sample(clock.t, rho)
    return rec.trace({"experiment": "fid", "config": config.echo()})


def zeno_time_axis(config: ExperimentConfig, spec: MeasurementSpec, n_cycles: int, axis: str, elapsed):
    n = np.arange(1, n_cycles + 1)
    if axis == "elapsed":
        return np.asarray(elapsed, dtype=float)
    if axis == "cycles":
        return n * config.tau_xy_ms
    if axis == "alpha":
        tau_m = 2 * config.pulse_tau_ms if spec.kind == "entangler" else 0.0
        return n * (tau_m * config.alpha + config.tau_xy_ms)
    raise ConfigError(f"time axis must be one of {TIME_AXES}")


def run_zeno(config: ExperimentConfig, spec: MeasurementSpec, time_axis: str = "elapsed") -> SignalTrace:
    """Repeated ``[tau_xy - measurement]`` cycles, sampled after each cycle.

    ``time_axis`` selects the reported x-coordinate: physical elapsed time,
    ``n (alpha tau_M + tau_xy)`` ("alpha") or ``n tau_xy`` ("cycles"). It
    never changes the dynamics.
    """
    if time_axis not in TIME_AXES:
        raise ConfigError(f"time axis must be one of {TIME_AXES}")
    if spec.kind == "entangler" and not aligned(spec.tau_z_ms, config.dt_ms):
        raise ConfigError("tau_z_ms is not a multiple of dt_ms")
    noise = config.make_noise()
    step = free_step_fn(config)
    rho = initial_state(config)
    rec = TraceRecorder(rho)
    clock = _Clock(config.dt_ms, config.pulse_tau_ms)
    k = n_steps(config.tau_xy_ms, config.dt_ms)
    for _ in range(config.n_reps):
        for _ in range(k):
            rho = step(rho, config.params, noise, config.dt_ms)
            clock.n_dt += 1
            rho = guard(rho, clock.n_dt)
        rho = measure(rho, config, noise, spec, clock)
        rec.sample(clock.t, rho)
    trace = rec.trace(
        {
            "experiment": "zeno",
            "measurement": {"kind": spec.kind, "sign": spec.sign, "tau_z_ms": spec.tau_z_ms},
            "time_axis": time_axis,
            "config": config.echo(),
        }
    )
    if time_axis != "elapsed":
        trace = trace.with_times(zeno_time_axis(config, spec, config.n_reps, time_axis, trace.t_ms))
    return trace


XY4_AXES = ("x", "y", "x", "y")


def run_xy4(config: ExperimentConfig, pulse_target: str, interval_ms: float) -> SignalTrace:
    """XY-4 decoupling: ``n_reps`` blocks of four (delay, pi pulse) pairs.

    ``interval_ms`` is the free delay before each pi pulse; the trace is
    sampled after each complete block.
    """
    if pulse_target not in ("S", "E"):
        raise ConfigError("pulse_target must be 'S' or 'E'")
    if interval_ms < config.pulse_tau_ms:
        raise ConfigError("interval_ms must be at least the pulse duration")
    if not aligned(interval_ms, config.dt_ms):
        raise ConfigError("interval_ms is not a multiple of dt_ms")
    noise = config.make_noise()
    step = free_step_fn(config)
    rho = initial_state(config)
    rec = TraceRecorder(rho)
    clock = _Clock(config.dt_ms, config.pulse_tau_ms)
    k = n_steps(interval_ms, config.dt_ms)
    for _ in range(config.n_reps):
        for axis in XY4_AXES:
            for _ in range(k):
                rho = step(rho, config.params, noise, config.dt_ms)
                clock.n_dt += 1
                rho = guard(rho, clock.n_dt)
            rho = pulse_step(rho, config.params, noise, axis, pulse_target, math.pi, config.pulse_tau_ms)
            clock.n_pulse += 1
        rec.sample(clock.t, rho)
    return rec.trace(
        {
            "experiment": "xy4",
            "target": pulse_target,
            "interval_ms": interval_ms,
            "config": config.echo(),
        }
    )


def fitted_t2(trace: SignalTrace) -> EnvelopeFit:
    return fit_envelope(trace.t_ms, trace.magnitude)


def _call(job):
    fn, args = job
    return fn(*args)


def sweep(fn, arg_tuples, max_workers: int | None = None):
    """Run ``fn(*args)`` for each tuple in independent worker processes."""
    jobs = [(fn, tuple(a)) for a in arg_tuples]
    if max_workers == 1 or len(jobs) <= 1:
        return [_call(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(_call, jobs))
