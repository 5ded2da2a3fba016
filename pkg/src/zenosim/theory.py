"""Short-time fidelity of a dephased qubit and the Zeno survival law."""
from __future__ import annotations

import math
from dataclasses import dataclass


class ExpansionRangeError(ValueError):
    """The second-order expansion produced a negative fidelity."""


@dataclass(frozen=True)
class NoiseModel:
    """Fluctuating-field dephasing of strength ``lambda_``.

    ``regime`` is ``"delta_correlated"`` (correlation time ``tau_c`` short
    compared with the observation time) or ``"static"`` (field constant over
    the observation time).
    """

    lambda_: float
    tau_c: float = 0.0
    regime: str = "static"

    def __post_init__(self):
        if self.regime not in ("delta_correlated", "static"):
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.lambda_ < 0:
            raise ValueError("lambda_ must be non-negative")
        if self.regime == "delta_correlated" and not self.tau_c > 0:
            raise ValueError("tau_c must be positive for delta-correlated noise")


def fidelity_short_time(model: NoiseModel, t: float) -> float:
    """Second-order fidelity ``F(t)`` to the initial ``|+>`` state.

    Linear ``1 - 2 lambda^2 tau_c t`` for delta-correlated noise, quadratic
    ``1 - lambda^2 t^2`` for static noise.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    lam2 = model.lambda_**2
    if model.regime == "delta_correlated":
        f = 1.0 - 2.0 * lam2 * model.tau_c * t
    else:
        f = 1.0 - lam2 * t * t
    if f < 0:
        raise ExpansionRangeError(f"expansion gives F = {f:.6g} < 0 at t = {t}")
    return f


def zeno_survival(model: NoiseModel, total_t: float, n: int) -> tuple[float, float]:
    """Survival after ``n`` equally spaced projective measurements in time ``total_t``.

    Returns ``(exact, approx)`` where ``exact = F(T/N)**N`` with the quadratic
    short-time fidelity and ``approx = exp(-lambda^2 T^2 / N)``.
    """
    if model.regime != "static":
        raise ValueError("the Zeno survival law needs static (quadratic) noise")
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    n = int(n)
    exact = fidelity_short_time(model, total_t / n) ** n
    approx = math.exp(-(model.lambda_**2) * total_t**2 / n)
    return exact, approx
