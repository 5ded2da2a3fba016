"""Exponential envelope fits for decaying, possibly oscillating, signals."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MIN_POINTS = 8
NO_DECAY_FACTOR = 100.0
FLOOR = 1e-3


@dataclass(frozen=True)
class EnvelopeFit:
    """Result of fitting ``A exp(-t / T2)``.

    ``t2_ms`` is ``inf`` and ``decaying`` is False when the signal shows no
    decay on the sampled span.
    """

    t2_ms: float
    amplitude: float
    residual: float
    decaying: bool = True
    n_points: int = 0
    used_peaks: bool = False

    def __iter__(self):
        return iter((self.t2_ms, self.amplitude, self.residual))

    def envelope(self, t):
        if not self.decaying:
            return np.full_like(np.asarray(t, dtype=float), self.amplitude)
        return self.amplitude * np.exp(-np.asarray(t, dtype=float) / self.t2_ms)


def local_maxima(a: np.ndarray) -> np.ndarray:
    """Indices of interior local maxima; a plateau resolves to its first point."""
    a = np.asarray(a)
    if len(a) < 3:
        return np.array([], dtype=int)
    rise = a[1:-1] > a[:-2]
    idx = []
    i = 1
    n = len(a)
    while i < n - 1:
        if rise[i - 1]:
            j = i
            while j < n - 1 and a[j + 1] == a[j]:
                j += 1
            if j < n - 1 and a[j + 1] < a[j]:
                idx.append(i)
            i = j + 1
        else:
            i += 1
    return np.array(idx, dtype=int)


def fit_envelope(t, s, min_points: int = MIN_POINTS, floor: float = FLOOR) -> EnvelopeFit:
    """Fit an exponential envelope to ``|s(t)|``.

    When ``|s|`` has at least two interior local maxima the fit uses only
    those peaks; otherwise every sample is used. Samples below
    ``floor * max|s|`` are dropped first, since a residual floor would
    dominate the fit. The fit is linear least squares on ``log|s|``. ``s`` may be complex, or a :class:`SignalTrace`
    may be passed as ``t`` alone with ``s=None``.
    """
    if s is None:
        t, s = t.t_ms, t.magnitude
    t = np.asarray(t, dtype=float)
    a = np.abs(np.asarray(s))
    if len(t) != len(a):
        raise ValueError("t and s differ in length")
    if len(t) < min_points:
        raise ValueError(f"need at least {min_points} samples, got {len(t)}")
    span = float(t[-1] - t[0])

    keep = (a > 0) & (a >= floor * np.max(a))
    peaks = local_maxima(a)
    peaks = peaks[keep[peaks]]
    used_peaks = len(peaks) >= 2
    idx = peaks if used_peaks else np.flatnonzero(keep)
    tt, aa = t[idx], a[idx]
    if len(tt) < 2:
        raise ValueError("not enough non-zero points to fit")

    slope, intercept = np.polyfit(tt, np.log(aa), 1)
    amp = math.exp(intercept)
    if slope >= 0 or -1.0 / slope > NO_DECAY_FACTOR * span:
        level = float(np.mean(aa))
        resid = float(np.sqrt(np.mean((aa - level) ** 2)))
        return EnvelopeFit(math.inf, level, resid, False, len(tt), used_peaks)
    t2 = -1.0 / slope
    resid = float(np.sqrt(np.mean((aa - amp * np.exp(-tt / t2)) ** 2)))
    return EnvelopeFit(t2, amp, resid, True, len(tt), used_peaks)


def first_zero(t, s) -> float:
    """First sign change of ``s``, located by linear interpolation."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    for i in range(len(s) - 1):
        if s[i] == 0:
            return float(t[i])
        if s[i] * s[i + 1] < 0:
            return float(t[i] - s[i] * (t[i + 1] - t[i]) / (s[i + 1] - s[i]))
    raise ValueError("signal has no zero crossing")
