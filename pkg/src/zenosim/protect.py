"""Protection of a qubit state by repeated parity projections.

The state ``alpha|0> + beta|1>`` is encoded as ``alpha|++> + beta|-->``. A
single-qubit phase flip (``|+> <-> |->``) on either qubit moves the state into
the odd-parity subspace, which a parity projection removes. Repeating error
and projection ``N`` times over a total time ``T`` leaves weight
``(1 - Gamma^2 (T/N)^2)^N`` on the unchanged encoded state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qmat
from .qmat import I2, KET_MINUS, KET_PLUS, Z, ad, kron

PLUS_PLUS = np.kron(KET_PLUS, KET_PLUS)
MINUS_MINUS = np.kron(KET_MINUS, KET_MINUS)
# (I +- X (x) X) / 2 has exact entries, unlike sums of |++><++| products
P_EVEN = (np.eye(4) + np.kron(qmat.X, qmat.X)) / 2
P_ODD = (np.eye(4) - np.kron(qmat.X, qmat.X)) / 2

_FLIP_1 = kron(Z, I2)
_FLIP_2 = kron(I2, Z)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True)
class ProtectParams:
    alpha: complex = 1.0
    beta: complex = 0.0
    gamma: float = 1.0
    total_t: float = 1.0
    n_meas: int = 10

    def __post_init__(self):
        _check_amplitudes(self.alpha, self.beta)
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")
        if int(self.n_meas) != self.n_meas or self.n_meas < 1:
            raise ValueError("n_meas must be a positive integer")

    @property
    def epsilon(self) -> float:
        return (self.gamma * self.total_t / self.n_meas) ** 2


def _check_amplitudes(alpha, beta):
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1) > 1e-12:
        raise ValueError(f"|alpha|^2 + |beta|^2 = {norm!r}, expected 1")


def encode_ket(alpha, beta) -> np.ndarray:
    _check_amplitudes(alpha, beta)
    return alpha * PLUS_PLUS + beta * MINUS_MINUS


def encode(alpha, beta) -> np.ndarray:
    """Density matrix of ``alpha|++> + beta|-->``."""
    return qmat.projector(encode_ket(alpha, beta))


def encoder() -> np.ndarray:
    """Unitary taking ``(alpha|0> + beta|1>)|0>`` to the encoded state."""
    return kron(_H, _H) @ qmat.cnot(0, 1, 2)


def decode(rho: np.ndarray) -> np.ndarray:
    """Invert the encoding and return the single-qubit state of qubit 0."""
    return qmat.ptrace(ad(encoder().conj().T, rho), [0])


def error_step(rho: np.ndarray, epsilon: float, order: str = "first") -> np.ndarray:
    """Phase-flip error channel of strength ``epsilon``.

    ``order="first"`` is ``(1-eps) rho + eps/2 Z1 rho Z1 + eps/2 Z2 rho Z2``,
    i.e. independent flips with probability ``eps/2`` per qubit with the
    double-flip term dropped. ``order="independent"`` keeps that
    ``eps^2/4`` term, which lands back in the even subspace as a logical error.
    """
    if not 0 <= epsilon <= 1:
        raise ValueError(f"epsilon={epsilon} outside [0, 1]")
    if order == "first":
        return (1 - epsilon) * rho + 0.5 * epsilon * (ad(_FLIP_1, rho) + ad(_FLIP_2, rho))
    if order == "independent":
        q = epsilon / 2
        rho = (1 - q) * rho + q * ad(_FLIP_1, rho)
        return (1 - q) * rho + q * ad(_FLIP_2, rho)
    raise ValueError(f"unknown order {order!r}")


def parity_project(rho: np.ndarray) -> tuple[np.ndarray, float]:
    """Selective even-parity projection; returns the unnormalized state and its weight."""
    even = P_EVEN @ rho @ P_EVEN
    # 1 - odd weight keeps full precision when the leak is small
    odd = float(np.real(np.trace(P_ODD @ rho)))
    return even, float(np.real(np.trace(rho))) - odd


def parity_dephase(rho: np.ndarray) -> np.ndarray:
    """Non-selective parity measurement ``P_even rho P_even + P_odd rho P_odd``."""
    return P_EVEN @ rho @ P_EVEN + P_ODD @ rho @ P_ODD


def ancilla_parity_circuit(rho: np.ndarray, selective: bool = False):
    """Parity measurement realised with a third qubit.

    The ancilla starts in ``|+>`` and controls an X on each data qubit, which
    writes the ``X (x) X`` parity into its x basis. The ancilla is then
    dephased in that basis (pointer scrambling) and traced out. With
    ``selective`` the ancilla is instead projected onto ``|+>`` and the
    unnormalized data state and its weight are returned.
    """
    full = kron(rho, qmat.projector(KET_PLUS))
    ent = qmat.cnot(2, 1, 3) @ qmat.cnot(2, 0, 3)
    full = ad(ent, full)
    if selective:
        proj = qmat.embed(qmat.projector(KET_PLUS), 2, 3)
        kept = qmat.ptrace(proj @ full @ proj, [0, 1])
        return kept, float(np.real(np.trace(kept)))
    za = qmat.embed(Z, 2, 3)
    full = 0.5 * full + 0.5 * ad(za, full)
    return qmat.ptrace(full, [0, 1])


def protect_run(params: ProtectParams, order: str = "first") -> tuple[float, float]:
    """Alternate the error channel and selective parity projection ``n_meas`` times.

    Returns ``(fidelity, survival)``: fidelity of the renormalized final
    state to the encoded state and the accumulated projection weight.
    """
    eps = params.epsilon
    if eps >= 1:
        raise ValueError(f"epsilon = {eps} >= 1; increase n_meas")
    target = encode(params.alpha, params.beta)
    rho = target
    log_survival = 0.0
    for _ in range(params.n_meas):
        rho = error_step(rho, eps, order)
        tr = float(np.real(np.trace(rho)))
        even, _ = parity_project(rho)
        # relative leak via log1p so trace rounding does not accumulate
        leak = float(np.real(np.trace(P_ODD @ rho))) / tr
        log_survival += math.log1p(-leak)
        rho = even / np.real(np.trace(even))
    return qmat.fidelity(target, rho), math.exp(log_survival)


def survival_closed_form(gamma: float, total_t: float, n: int) -> float:
    return (1 - gamma**2 * (total_t / n) ** 2) ** n
