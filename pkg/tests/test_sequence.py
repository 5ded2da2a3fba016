import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zenosim.channels import MeasurementSpec
from zenosim.experiments import ExperimentConfig, run_fid, run_xy4, run_zeno
from zenosim.sequence import (
    Acquire,
    Delay,
    EvolveOp,
    GridError,
    Init,
    LexError,
    Measure,
    ParseError,
    Pulse,
    PulseOp,
    Repeat,
    SemanticError,
    SequenceProgram,
    compile_sequence,
    entangler_template,
    execute,
    fid_template,
    format_sequence,
    parse_sequence,
    run_sequence,
    tokenize,
    xy4_template,
    zeno_template,
)

NMR = ExperimentConfig.nmr(n_reps=40)

CORPUS = [
    "",
    "acquire",
    "# only a comment\n",
    "delay 0.3ms",
    "delay 0ms acquire",
    "delay 1e-1ms",
    "delay .5ms",
    "init plus",
    "init zero acquire",
    "init theory_plus repeat 3 { delay 0.1ms acquire }",
    "pulse S y 90",
    "pulse E x -180",
    "pulse S x +45",
    "measure Mplus",
    "measure Mideal acquire",
    "repeat 1 { }",
    "repeat 200 { delay 0.3ms measure Mminus acquire }",
    "repeat 2 { repeat 3 { delay 0.2ms pulse E x 180 } acquire }",
    "repeat 600 { delay 0.1ms acquire }",
    "repeat 5 {\n  delay 0.3ms   # free evolution\n  pulse S y 90\n  delay 2.0ms\n  pulse S y -90\n  acquire\n}",
    "init plus\nrepeat 10 { delay 0.2ms pulse E x 180 delay 0.2ms pulse E y 180 "
    "delay 0.2ms pulse E x 180 delay 0.2ms pulse E y 180 acquire }",
    "repeat 4{delay 0.4ms acquire}repeat 2{measure Mplus}",
    "delay 12.345678901234ms acquire",
]


def test_spec_example():
    prog = parse_sequence("repeat 200 { delay 0.3ms measure Mminus acquire }")
    (rep,) = prog.statements
    assert rep == Repeat(200, (Delay(0.3), Measure("Mminus"), Acquire()))
    assert len(rep.body) == 3


def test_all_statement_kinds():
    prog = parse_sequence("init plus\npulse E x -90\nacquire")
    assert prog.statements == (Init("plus"), Pulse("E", "x", -90), Acquire())
    assert [s.line for s in prog.statements] == [1, 2, 3]


def test_empty_program():
    prog = parse_sequence("  # nothing\n")
    assert prog == SequenceProgram(())
    assert compile_sequence(prog, NMR) == []
    assert format_sequence(prog) == ""


@pytest.mark.parametrize("text", CORPUS)
def test_roundtrip_fixed_point(text):
    prog = parse_sequence(text)
    canon = format_sequence(prog)
    assert parse_sequence(canon) == prog
    assert format_sequence(parse_sequence(canon)) == canon


def test_corpus_size():
    assert len(CORPUS) >= 20


names = st.sampled_from(["plus", "zero", "theory_plus", "pseudopure_plus"])
leaf = st.one_of(
    st.builds(Init, names),
    st.builds(Delay, st.floats(0, 1e4, allow_nan=False, allow_infinity=False)),
    st.builds(Pulse, st.sampled_from("SE"), st.sampled_from("xy"), st.integers(-720, 720)),
    st.builds(Measure, st.sampled_from(["Mplus", "Mminus", "Mideal"])),
    st.builds(Acquire),
)
stmts = st.recursive(
    leaf,
    lambda inner: st.builds(Repeat, st.integers(1, 1000), st.lists(inner, max_size=4).map(tuple)),
    max_leaves=12,
)


@settings(max_examples=200)
@given(st.lists(stmts, max_size=6))
def test_roundtrip_generated(body):
    prog = SequenceProgram(tuple(body))
    assert parse_sequence(format_sequence(prog)) == prog


@pytest.mark.parametrize(
    "text,err,line,col",
    [
        ("delay -1ms", SemanticError, 1, 7),
        ("acquire\n  delay 3", ParseError, 2, 10),
        ("delay 3 s", ParseError, 1, 9),
        ("repeat 0 { acquire }", SemanticError, 1, 8),
        ("repeat 2.5 { }", ParseError, 1, 8),
        ("repeat 2 { acquire", ParseError, 1, 19),
        ("acquire }", ParseError, 1, 9),
        ("measure Mfoo", SemanticError, 1, 9),
        ("init excited", SemanticError, 1, 6),
        ("pulse D x 90", ParseError, 1, 7),
        ("pulse S z 90", ParseError, 1, 9),
        ("pulse S x 90.5", ParseError, 1, 11),
        ("wait 1ms", ParseError, 1, 1),
        ("acquire;", LexError, 1, 8),
        ("delay 1e999ms", SemanticError, 1, 7),
    ],
)
def test_errors_carry_location(text, err, line, col):
    with pytest.raises(err) as info:
        parse_sequence(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert f"line {line}" in str(info.value)


def test_tokenize_tracks_lines():
    toks = tokenize("a\n  b # c\n d")
    assert [(t.text, t.line, t.col) for t in toks] == [("a", 1, 1), ("b", 2, 3), ("d", 3, 2), ("", 3, 3)]


def test_custom_measurement_names():
    prog = parse_sequence("measure Mx", measurements=("Mx",))
    ops = compile_sequence(prog, NMR, {"Mx": MeasurementSpec.entangler("plus", 1.0)})
    assert ops[0].spec.tau_z_ms == 1.0


def test_delay_lowering():
    ops = compile_sequence(parse_sequence("delay 0.3ms"), NMR)
    assert ops == [EvolveOp()] * 3
    assert compile_sequence(parse_sequence("delay 0ms"), NMR) == []


def test_grid_error():
    with pytest.raises(GridError):
        compile_sequence(parse_sequence("acquire\ndelay 0.25ms"), NMR)
    # within the 1e-9 slack
    assert len(compile_sequence(parse_sequence("delay 0.30000000001ms"), NMR)) == 3


def test_pulse_lowering_in_radians():
    (op,) = compile_sequence(parse_sequence("pulse S y -90"), NMR)
    assert op == PulseOp("S", "y", -math.pi / 2)
    (op,) = compile_sequence(parse_sequence("pulse E x 180"), NMR)
    assert op.angle == math.pi


def test_repeat_unrolls():
    ops = compile_sequence(parse_sequence("repeat 3 { delay 0.2ms acquire }"), NMR)
    assert len(ops) == 9


def assert_same_trace(a, b):
    assert np.array_equal(a.t_ms, b.t_ms)
    for c in ("s_x", "s_y", "fidelity"):
        assert np.max(np.abs(getattr(a, c) - getattr(b, c))) <= 1e-12


class TestHarnessEquivalence:
    def test_fid(self):
        assert_same_trace(run_sequence(fid_template(NMR), NMR), run_fid(NMR))

    def test_theory_fid(self):
        cfg = ExperimentConfig.theory(tau_xy=1 / 40, total=2)
        assert_same_trace(run_sequence(fid_template(cfg), cfg), run_fid(cfg))

    @pytest.mark.parametrize("name,sign", [("Mplus", "plus"), ("Mminus", "minus")])
    def test_zeno_measure(self, name, sign):
        cfg = NMR.with_(tau_xy_ms=0.3, tau_z_ms=0.8)
        ref = run_zeno(cfg, MeasurementSpec.entangler(sign, 0.8))
        assert_same_trace(run_sequence(zeno_template(cfg, name), cfg), ref)

    def test_zeno_ideal_theory(self):
        cfg = ExperimentConfig.theory(tau_xy=1 / 40, total=2)
        assert_same_trace(run_sequence(zeno_template(cfg, "Mideal"), cfg), run_zeno(cfg, MeasurementSpec()))

    @pytest.mark.parametrize("sign,tau_z", [("minus", 2.0), ("plus", 0.8), ("minus", 0.0)])
    def test_written_out_entangler(self, sign, tau_z):
        cfg = NMR.with_(tau_xy_ms=0.3, tau_z_ms=tau_z)
        ref = run_zeno(cfg, MeasurementSpec.entangler(sign, tau_z))
        assert_same_trace(run_sequence(entangler_template(cfg, sign), cfg), ref)

    @pytest.mark.parametrize("target,interval", [("E", 0.2), ("S", 0.5)])
    def test_xy4(self, target, interval):
        cfg = NMR.with_(n_reps=10)
        ref = run_xy4(cfg, target, interval)
        assert_same_trace(run_sequence(xy4_template(cfg, target, interval), cfg), ref)


def test_init_resets_state_and_reference():
    cfg = NMR.with_(n_reps=5)
    tr = run_sequence("delay 1.0ms init zero delay 0.1ms acquire", cfg)
    assert tr.fidelity[0] == pytest.approx(1.0)
    assert tr.s_x[0] == pytest.approx(0.0, abs=1e-12)


def test_execute_metadata():
    tr = execute(compile_sequence(parse_sequence("delay 0.1ms acquire"), NMR), NMR, {"source": "x.seq"})
    assert tr.metadata["experiment"] == "sequence"
    assert tr.metadata["source"] == "x.seq"
