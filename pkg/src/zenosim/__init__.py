"""Zeno-effect suppression of dephasing in a coupled two-spin system.

Submodules: :mod:`qmat` (small dense linear algebra), :mod:`channels`
(step maps), :mod:`theory` (closed forms), :mod:`experiments` (FID, Zeno
and XY-4 harnesses), :mod:`protect` (parity-projection protection),
:mod:`sequence` (pulse-sequence language) and :mod:`cli`.
"""
from .channels import (
    FlipNoise,
    MeasurementSpec,
    RateOverflowError,
    SpinSystemParams,
    dephasing_step,
    entangler_measurement,
    evolve_step,
    ideal_measurement,
    pulse_step,
    relax_step,
)
from .experiments import ExperimentConfig, run_fid, run_xy4, run_zeno
from .fitting import EnvelopeFit, fit_envelope
from .sequence import compile_sequence, execute, parse_sequence
from .trace import SignalTrace

__version__ = "0.1.0"

__all__ = [
    "EnvelopeFit",
    "ExperimentConfig",
    "FlipNoise",
    "MeasurementSpec",
    "RateOverflowError",
    "SignalTrace",
    "SpinSystemParams",
    "compile_sequence",
    "dephasing_step",
    "entangler_measurement",
    "evolve_step",
    "execute",
    "fit_envelope",
    "ideal_measurement",
    "parse_sequence",
    "pulse_step",
    "relax_step",
    "run_fid",
    "run_xy4",
    "run_zeno",
]
