import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from zenosim.fitting import EnvelopeFit, first_zero, fit_envelope, local_maxima
from zenosim.trace import SignalTrace, TraceRecorder, write_atomic


def test_pure_exponential():
    t = np.arange(0, 60, 0.5)
    fit = fit_envelope(t, 0.5 * np.exp(-t / 17))
    assert abs(fit.t2_ms - 17) < 1e-6
    assert fit.amplitude == pytest.approx(0.5)
    assert fit.decaying and not fit.used_peaks


def test_oscillating_exponential():
    t = np.arange(0, 60, 0.1)
    fit = fit_envelope(t, np.cos(2 * np.pi * 0.1075 * t) * np.exp(-t / 17))
    assert fit.used_peaks
    assert fit.t2_ms == pytest.approx(17, rel=0.03)


def test_constant_is_no_decay():
    fit = fit_envelope(np.arange(20.0), np.full(20, 0.3))
    assert not fit.decaying
    assert math.isinf(fit.t2_ms)
    assert_allclose(fit.envelope([0, 5]), [0.3, 0.3])


def test_growing_is_no_decay():
    t = np.arange(20.0)
    assert not fit_envelope(t, np.exp(t / 5)).decaying


def test_too_few_points():
    with pytest.raises(ValueError, match="at least 8"):
        fit_envelope(np.arange(7.0), np.ones(7))


def test_length_mismatch():
    with pytest.raises(ValueError):
        fit_envelope(np.arange(10.0), np.ones(9))


def test_fit_unpacks_and_accepts_trace():
    t = np.arange(1, 40, 0.5)
    s = 0.8 * np.exp(-t / 9)
    tr = SignalTrace(t, s, 0 * s, s, 0.5 + s / 2)
    t2, amp, resid = fit_envelope(tr, None)
    assert t2 == pytest.approx(9)
    assert resid < 1e-12


def test_complex_signal_uses_modulus():
    t = np.arange(0, 30, 0.25)
    s = np.exp(1j * 3 * t - t / 5)
    assert fit_envelope(t, s).t2_ms == pytest.approx(5)


@pytest.mark.parametrize(
    "a,expected",
    [
        ([0, 1, 0, 2, 0], [1, 3]),
        ([0, 1, 1, 0], [1]),
        ([0, 1, 1, 2, 0], [3]),
        ([3, 2, 1], []),
        ([1, 2, 2], []),
        ([1, 2], []),
    ],
)
def test_local_maxima(a, expected):
    assert list(local_maxima(np.array(a, dtype=float))) == expected


@settings(max_examples=50)
@given(st.floats(1.0, 50.0), st.floats(0.05, 2.0), st.floats(0.1, 0.3))
def test_recovers_t2(t2, amp, freq):
    t = np.arange(0, 3 * t2, 0.05)
    fit = fit_envelope(t, amp * np.exp(-t / t2))
    assert fit.t2_ms == pytest.approx(t2, rel=1e-9)


def test_first_zero():
    t = np.linspace(0, 1, 101)
    assert first_zero(t, np.cos(2 * np.pi * t)) == pytest.approx(0.25, abs=1e-4)
    assert first_zero([0, 1, 2], [1, 0, -1]) == 1.0
    with pytest.raises(ValueError):
        first_zero([0, 1], [1, 2])


def make_trace():
    t = np.array([0.1, 0.2, 0.30000000000000004, 1 / 3])
    sx = np.array([0.9, -0.1, 1e-17, 2 / 7])
    sy = np.array([0.0, 0.2, -0.3, 1 / 11])
    return SignalTrace(t, sx, sy, np.hypot(sx, sy), 0.5 + sx / 2, {"experiment": "fid", "j": 215.0})


def test_trace_csv_roundtrip_exact():
    tr = make_trace()
    text = tr.to_csv()
    assert text.splitlines()[0] == "t_ms,s_x,s_y,magnitude,fidelity"
    back = SignalTrace.from_csv(text)
    for c in ("t_ms", "s_x", "s_y", "magnitude", "fidelity"):
        assert np.array_equal(getattr(back, c), getattr(tr, c))


def test_trace_json_roundtrip():
    tr = make_trace()
    back = SignalTrace.from_json(tr.to_json())
    assert np.array_equal(back.s_y, tr.s_y)
    assert back.metadata == tr.metadata


def test_trace_validation():
    with pytest.raises(ValueError):
        SignalTrace([0.2, 0.1], [0, 0], [0, 0], [0, 0], [1, 1])
    with pytest.raises(ValueError):
        SignalTrace([0.1], [0, 0], [0], [0], [1])


def test_write_atomic(tmp_path):
    path = tmp_path / "out.csv"
    path.write_text("old")
    make_trace().write(path)
    assert SignalTrace.from_csv(path.read_text()).t_ms[0] == 0.1
    write_atomic(path, "new")
    assert path.read_text() == "new"
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]


def test_recorder_magnitude_and_fidelity():
    from zenosim import qmat

    plus = qmat.kron(qmat.projector(qmat.KET_PLUS), np.eye(2) / 2)
    rec = TraceRecorder(plus)
    rec.sample(0.1, plus)
    rec.sample(0.2, qmat.kron(qmat.from_bloch(0.3, 0.4, 0), np.eye(2) / 2))
    tr = rec.trace()
    assert_allclose(tr.magnitude, [1, 0.5])
    assert_allclose(tr.fidelity, [1, 0.65])
    assert np.max(np.abs(tr.magnitude - np.hypot(tr.s_x, tr.s_y))) < 1e-12


def test_envelope_fit_dataclass():
    fit = EnvelopeFit(2.0, 1.0, 0.0)
    assert_allclose(fit.envelope([0, 2]), [1, math.exp(-1)])


def test_floor_is_ignored():
    t = np.arange(0, 200, 10.0)
    s = np.exp(-t / 12) + 1e-5
    fit = fit_envelope(t, s)
    assert fit.t2_ms == pytest.approx(12, rel=0.01)
    assert fit_envelope(t, s, floor=0).t2_ms > 14
