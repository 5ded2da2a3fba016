"""Affine trace-preserving step maps for the S-E spin pair.

Every step acts on a 4x4 density matrix ordered S (qubit 0) then E (qubit 1).
Times are in ms and rates in 1/ms. The coupling Hamiltonian is
``H_J = J Z_S Z_E / 4`` with ``J = 2 pi j_hz`` expressed in rad/ms.

Each map is a convex combination of unitary branches, optionally mixed with a
fixed thermal state, so trace is preserved exactly whenever every branch
weight is non-negative. A weight that would go negative raises
:class:`RateOverflowError` rather than being clamped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import qmat
from .qmat import I2, X, Y, ad, kron, pauli_exp

GRID_TOL = 1e-9
_FLIP_Y = qmat.kron(I2, Y)
_FLIP_Y.flags.writeable = False


class RateOverflowError(ValueError):
    """A branch probability ``rate * dt`` exceeded 1."""


def default_thermal() -> np.ndarray:
    """Pseudopure thermal state ``|0><0| (x) I/2``."""
    return kron(qmat.projector(qmat.KET0), qmat.maximally_mixed(1))


@dataclass(frozen=True)
class SpinSystemParams:
    """Coupling and relaxation constants of the two-spin system.

    ``t1s_ms`` may be ``math.inf`` to switch longitudinal relaxation of S off.
    """

    j_hz: float = 215.0
    t_d_ms: float = 6.5
    t1s_ms: float = 300.0
    thermal: np.ndarray = field(default_factory=default_thermal, compare=False, repr=False)

    def __post_init__(self):
        if not self.j_hz > 0:
            raise ValueError("j_hz must be positive")
        if not self.t_d_ms > 0:
            raise ValueError("t_d_ms must be positive")
        if not self.t1s_ms > 0:
            raise ValueError("t1s_ms must be positive or inf")
        qmat.check_density(self.thermal)

    @property
    def j_ang(self) -> float:
        """Coupling in rad/ms."""
        return 2 * math.pi * self.j_hz / 1000.0

    @property
    def p_e(self) -> float:
        return 1.0 / (2.0 * self.t_d_ms)

    @property
    def p_s(self) -> float:
        return 0.0 if math.isinf(self.t1s_ms) else 1.0 / self.t1s_ms


class FlipNoise:
    """Random pi-flips of spin E at rate ``p_e``.

    In ``fixed_y`` mode the flip is always ``Y`` on E. In ``random_theta`` mode
    each call to :meth:`flip_operator` draws a fresh axis angle from a PRNG
    seeded with ``seed`` and returns ``X cos(theta) + Y sin(theta)``.
    """

    AXIS_MODES = ("fixed_y", "random_theta")

    def __init__(self, p_e: float, axis_mode: str = "fixed_y", seed: int | None = 0):
        if p_e < 0:
            raise ValueError("p_e must be non-negative")
        if axis_mode not in self.AXIS_MODES:
            raise ValueError(f"axis_mode must be one of {self.AXIS_MODES}")
        self.p_e = float(p_e)
        self.axis_mode = axis_mode
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    @classmethod
    def from_params(cls, params: SpinSystemParams, axis_mode: str = "fixed_y", seed: int | None = 0):
        return cls(params.p_e, axis_mode, seed)

    @classmethod
    def off(cls):
        return cls(0.0)

    def flip_operator(self) -> np.ndarray:
        """Flip acting on E, embedded in the S-E register."""
        if self.axis_mode == "fixed_y":
            return _FLIP_Y
        else:
            theta = self.rng.uniform(0.0, 2 * math.pi)
            f = math.cos(theta) * X + math.sin(theta) * Y
        return kron(I2, f)

    def __repr__(self):
        return f"FlipNoise(p_e={self.p_e!r}, axis_mode={self.axis_mode!r}, seed={self.seed!r})"


def _weight(rate: float, dt: float, what: str) -> float:
    w = rate * dt
    if w > 1.0 or w < 0.0:
        raise RateOverflowError(f"{what}: rate*dt = {w:.6g} outside [0, 1]")
    return w


def _checked(rho: np.ndarray) -> np.ndarray:
    if qmat.validation_enabled():
        qmat.check_density(rho)
    return rho


def coupling_unitary(params: SpinSystemParams, t: float) -> np.ndarray:
    """``exp(-i H_J t)``."""
    return pauli_exp("ZZ", params.j_ang * t / 2)


def n_steps(duration: float, dt: float) -> int:
    """Number of integration steps covering ``duration``: ``ceil(duration/dt)``
    with a ``1e-9`` slack so grid-aligned durations are not over-counted."""
    if duration < 0:
        raise ValueError("duration must be non-negative")
    ratio = duration / dt
    r = round(ratio)
    if abs(ratio - r) <= GRID_TOL:
        return int(r)
    return int(math.ceil(ratio))


def dephasing_step(rho, params: SpinSystemParams, noise: FlipNoise, dt: float):
    """Free evolution with stochastic E flips, flip applied after the coupling.

    ``(1 - p_e dt) U rho U^+ + p_e dt (F U) rho (F U)^+`` with ``U = exp(-i H_J dt)``.
    """
    q = _weight(noise.p_e, dt, "dephasing_step")
    u = coupling_unitary(params, dt)
    f = noise.flip_operator()
    return _checked((1 - q) * ad(u, rho) + q * ad(f @ u, rho))


def relax_step(rho, params: SpinSystemParams, dt: float):
    """Free evolution plus longitudinal relaxation of S towards ``params.thermal``."""
    q = _weight(params.p_s, dt, "relax_step")
    u = coupling_unitary(params, dt)
    return _checked((1 - q) * ad(u, rho) + q * params.thermal)


def evolve_step(rho, params: SpinSystemParams, noise: FlipNoise, dt: float):
    """Combined dephasing and relaxation step.

    The flip branch carries no coupling factor (valid for ``J dt << 1``).
    """
    qe = noise.p_e * dt
    qs = params.p_s * dt
    _weight(noise.p_e + params.p_s, dt, "evolve_step")
    u = coupling_unitary(params, dt)
    out = (1 - qe - qs) * ad(u, rho) + qe * ad(noise.flip_operator(), rho)
    if qs:
        out = out + qs * params.thermal
    return _checked(out)


_AXES = {"x": "X", "y": "Y", "-x": "X", "-y": "Y"}
_TARGETS = {"S": 0, "E": 1}


def rotation(axis: str, target: str, angle: float) -> np.ndarray:
    """Ideal rotation ``exp(-i angle sigma_axis / 2)`` on ``target`` ("S" or "E")."""
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {sorted(_AXES)}")
    if target not in _TARGETS:
        raise ValueError("target must be 'S' or 'E'")
    if axis.startswith("-"):
        angle = -angle
    label = ["I", "I"]
    label[_TARGETS[target]] = _AXES[axis]
    return pauli_exp("".join(label), angle)


def pulse_propagator(
    params: SpinSystemParams, axis: str, target: str, angle: float, tau: float, method: str = "exact"
) -> np.ndarray:
    """``exp(-i (angle sigma_axis / 2 + H_J tau))`` for a pulse with the coupling on.

    The drive and ``Z_S Z_E`` anticommute, so ``method="exact"`` uses the
    closed form. ``method="split"`` gives the symmetric product
    ``U_J(tau/2) R U_J(tau/2)``, whose error is first order in ``J tau``
    because the rotation angle is not small.
    """
    if method == "split":
        half = coupling_unitary(params, tau / 2)
        return half @ rotation(axis, target, angle) @ half
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    if axis not in _AXES:
        raise ValueError(f"axis must be one of {sorted(_AXES)}")
    if target not in _TARGETS:
        raise ValueError("target must be 'S' or 'E'")
    if axis.startswith("-"):
        angle = -angle
    label = ["I", "I"]
    label[_TARGETS[target]] = _AXES[axis]
    return qmat.anticommuting_exp(angle / 2, "".join(label), params.j_ang * tau / 4, "ZZ")


def pulse_step(rho, params: SpinSystemParams, noise: FlipNoise, axis: str, target: str, angle: float, tau: float):
    """Rotation of duration ``tau`` with flip and relaxation branches.

    The noise branches carry no rotation, mirroring :func:`evolve_step`.
    """
    if tau < 0:
        raise ValueError("pulse duration must be non-negative")
    qe = noise.p_e * tau
    qs = params.p_s * tau
    _weight(noise.p_e + params.p_s, tau, "pulse_step")
    v = pulse_propagator(params, axis, target, angle, tau)
    out = (1 - qe - qs) * ad(v, rho)
    if qe:
        out = out + qe * ad(noise.flip_operator(), rho)
    if qs:
        out = out + qs * params.thermal
    return _checked(out)


@dataclass(frozen=True)
class MeasurementSpec:
    """One non-selective measurement of S.

    ``kind="ideal"`` is the instantaneous pointer-qubit construction;
    ``kind="entangler"`` is the pulse / coupled-delay / pulse sequence with
    sign ``plus`` or ``minus`` and delay ``tau_z_ms``.
    """

    kind: str = "ideal"
    sign: str = "minus"
    tau_z_ms: float = 0.0
    pointer_prep: np.ndarray = field(
        default_factory=lambda: qmat.projector(qmat.KET_PLUS), compare=False, repr=False
    )
    control_role: str = "pointer_controls"

    def __post_init__(self):
        if self.kind not in ("ideal", "entangler"):
            raise ValueError(f"unknown measurement kind {self.kind!r}")
        if self.sign not in ("plus", "minus"):
            raise ValueError(f"sign must be 'plus' or 'minus', got {self.sign!r}")
        if self.control_role not in ("pointer_controls", "system_controls"):
            raise ValueError(f"unknown control_role {self.control_role!r}")
        if self.tau_z_ms < 0:
            raise ValueError("tau_z_ms must be non-negative")
        qmat.check_density(self.pointer_prep)

    @classmethod
    def entangler(cls, sign: str, tau_z_ms: float):
        return cls(kind="entangler", sign=sign, tau_z_ms=tau_z_ms)


@lru_cache(maxsize=None)
def _measurement_ops(control_role: str, system: int, pointer: int, n: int):
    if control_role == "pointer_controls":
        e1 = qmat.cnot(pointer, system, n)
    else:
        e1 = qmat.cnot(system, pointer, n)
    return e1, qmat.embed(Y, pointer, n) @ e1


def ideal_measurement(rho, spec: MeasurementSpec, system: int = 0, pointer_included: bool = False):
    """Instantaneous non-selective measurement through a fresh pointer qubit.

    The pointer is appended as the last qubit in state ``spec.pointer_prep``,
    entangled by a CNOT and decohered by ``Y`` on the pointer with probability
    1/2. With ``pointer_included`` the last qubit of ``rho`` is the pointer:
    it is reset first and kept in the output. Otherwise the pointer is traced
    out and the output has the input's dimension.
    """
    if spec.kind != "ideal":
        raise ValueError("ideal_measurement needs an ideal MeasurementSpec")
    n = qmat.n_qubits(rho)
    if pointer_included:
        if n < 2:
            raise qmat.DimensionError("pointer_included needs at least two qubits")
        n_sys = n - 1
        base = qmat.ptrace(rho, range(n_sys))
    else:
        n_sys = n
        base = rho
    if not 0 <= system < n_sys:
        raise ValueError(f"system qubit {system} out of range")
    full = kron(base, spec.pointer_prep)
    p = n_sys
    total = n_sys + 1
    e1, e2 = _measurement_ops(spec.control_role, system, p, total)
    out = 0.5 * ad(e1, full) + 0.5 * ad(e2, full)
    if not pointer_included:
        out = qmat.ptrace(out, range(n_sys))
    return _checked(out)


def entangler_angles(sign: str) -> tuple[float, float]:
    """Rotation angles about y on S for the first and last pulse of M_sign."""
    first = -math.pi / 2 if sign == "plus" else math.pi / 2
    return first, -first


def entangler_measurement(
    rho,
    params: SpinSystemParams,
    noise: FlipNoise,
    spec: MeasurementSpec,
    dt: float = 0.1,
    pulse_tau: float = 0.058,
):
    """pi/2 pulse on S, coupled evolution for ``tau_z``, inverse pi/2 pulse."""
    if spec.kind != "entangler":
        raise ValueError("entangler_measurement needs an entangler MeasurementSpec")
    first, last = entangler_angles(spec.sign)
    rho = pulse_step(rho, params, noise, "y", "S", first, pulse_tau)
    for _ in range(n_steps(spec.tau_z_ms, dt)):
        rho = evolve_step(rho, params, noise, dt)
    return pulse_step(rho, params, noise, "y", "S", last, pulse_tau)


def entangler_closed_form(params: SpinSystemParams, sign: str, tau_z: float) -> np.ndarray:
    """``exp(-/+ i J tau_z X_S Z_E / 4)`` (upper sign for ``plus``)."""
    s = 1.0 if sign == "plus" else -1.0
    return pauli_exp("XZ", s * params.j_ang * tau_z / 2)
