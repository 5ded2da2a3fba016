"""A small pulse-sequence language.

Grammar::

    program := stmt*
    stmt    := "init" IDENT
             | "repeat" INT "{" stmt* "}"
             | "delay" NUMBER "ms"
             | "pulse" ("S" | "E") ("x" | "y") SIGNED_INT
             | "measure" IDENT
             | "acquire"

``#`` starts a comment that runs to the end of the line. Pulse angles are
in degrees. Example, a Zeno train with the minus-sign entangler::

    init plus
    repeat 200 {
        delay 0.3ms
        pulse S y 90
        delay 2.0ms
        pulse S y -90
        acquire
    }
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .channels import MeasurementSpec, pulse_step
from .experiments import (
    INITIAL_STATES,
    ExperimentConfig,
    _Clock,
    free_step_fn,
    guard,
    initial_state,
    measure,
)
from .trace import SignalTrace, TraceRecorder

INIT_NAMES = {"plus": "pseudopure_plus", "zero": "pseudopure_zero", "theory_plus": "theory_plus"}
INIT_NAMES.update({k: k for k in INITIAL_STATES})
MEASUREMENT_NAMES = ("Mplus", "Mminus", "Mideal")


class SequenceError(ValueError):
    kind = "error"

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message, self.line, self.col = message, line, col
        super().__init__(f"{self.kind} at line {line}, column {col}: {message}")


class LexError(SequenceError):
    kind = "lexical error"


class ParseError(SequenceError):
    kind = "syntax error"


class SemanticError(SequenceError):
    kind = "semantic error"


class GridError(SequenceError):
    kind = "grid error"


# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class Init:
    name: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Repeat:
    count: int
    body: tuple
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Delay:
    ms: float
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Pulse:
    target: str
    axis: str
    angle_deg: int
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Measure:
    name: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Acquire:
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class SequenceProgram:
    statements: tuple = ()


# ---------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<lbrace>\{)
  | (?P<rbrace>\})
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise LexError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, tokens, measurements):
        self.toks = tokens
        self.i = 0
        self.measurements = measurements

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind, text=None, what=None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = what or (repr(text) if text else kind)
            got = repr(t.text) if t.kind != "eof" else "end of input"
            raise ParseError(f"expected {want}, got {got}", t.line, t.col)
        return self.advance()

    def program(self) -> SequenceProgram:
        stmts = self.block(top=True)
        return SequenceProgram(tuple(stmts))

    def block(self, top=False):
        stmts = []
        while True:
            t = self.tok
            if t.kind == "eof":
                if not top:
                    raise ParseError("missing '}'", t.line, t.col)
                return stmts
            if t.kind == "rbrace":
                if top:
                    raise ParseError("unmatched '}'", t.line, t.col)
                return stmts
            stmts.append(self.stmt())

    def stmt(self):
        t = self.expect("ident", what="a statement keyword")
        kw = t.text
        if kw == "init":
            name = self.expect("ident", what="a state name")
            if name.text not in INIT_NAMES:
                raise SemanticError(f"unknown initial state {name.text!r}", name.line, name.col)
            return Init(name.text, line=t.line)
        if kw == "repeat":
            n = self.expect("number", what="a repeat count")
            if not re.fullmatch(r"[+-]?\d+", n.text):
                raise ParseError("repeat count must be an integer", n.line, n.col)
            count = int(n.text)
            if count < 1:
                raise SemanticError("repeat count must be at least 1", n.line, n.col)
            self.expect("lbrace", what="'{'")
            body = self.block()
            self.expect("rbrace", what="'}'")
            return Repeat(count, tuple(body), line=t.line)
        if kw == "delay":
            n = self.expect("number", what="a duration")
            self.expect("ident", "ms", what="unit 'ms'")
            ms = float(n.text)
            if not math.isfinite(ms):
                raise SemanticError(f"duration {n.text}ms is not finite", n.line, n.col)
            if ms < 0:
                raise SemanticError(f"negative duration {n.text}ms", n.line, n.col)
            return Delay(ms, line=t.line)
        if kw == "pulse":
            tgt = self.expect("ident", what="pulse target S or E")
            if tgt.text not in ("S", "E"):
                raise ParseError(f"pulse target must be S or E, got {tgt.text!r}", tgt.line, tgt.col)
            ax = self.expect("ident", what="pulse axis x or y")
            if ax.text not in ("x", "y"):
                raise ParseError(f"pulse axis must be x or y, got {ax.text!r}", ax.line, ax.col)
            ang = self.expect("number", what="a pulse angle in degrees")
            if not re.fullmatch(r"[+-]?\d+", ang.text):
                raise ParseError("pulse angle must be an integer number of degrees", ang.line, ang.col)
            return Pulse(tgt.text, ax.text, int(ang.text), line=t.line)
        if kw == "measure":
            name = self.expect("ident", what="a measurement name")
            if name.text not in self.measurements:
                raise SemanticError(f"unknown measurement {name.text!r}", name.line, name.col)
            return Measure(name.text, line=t.line)
        if kw == "acquire":
            return Acquire(line=t.line)
        raise ParseError(f"unknown statement {kw!r}", t.line, t.col)


def parse_sequence(text: str, measurements=MEASUREMENT_NAMES) -> SequenceProgram:
    """Parse sequence text; ``measurements`` lists the names ``measure`` may use."""
    return _Parser(tokenize(text), set(measurements)).program()


def format_sequence(program: SequenceProgram, indent: str = "    ") -> str:
    """Canonical text form; parsing it yields an equal program."""
    lines = []

    def emit(stmts, depth):
        pad = indent * depth
        for s in stmts:
            if isinstance(s, Init):
                lines.append(f"{pad}init {s.name}")
            elif isinstance(s, Repeat):
                lines.append(f"{pad}repeat {s.count} {{")
                emit(s.body, depth + 1)
                lines.append(f"{pad}}}")
            elif isinstance(s, Delay):
                lines.append(f"{pad}delay {s.ms!r}ms")
            elif isinstance(s, Pulse):
                lines.append(f"{pad}pulse {s.target} {s.axis} {s.angle_deg}")
            elif isinstance(s, Measure):
                lines.append(f"{pad}measure {s.name}")
            elif isinstance(s, Acquire):
                lines.append(f"{pad}acquire")

    emit(program.statements, 0)
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------- compiler


@dataclass(frozen=True)
class EvolveOp:
    """One free-evolution step of length dt."""


@dataclass(frozen=True)
class PulseOp:
    target: str
    axis: str
    angle: float


@dataclass(frozen=True)
class MeasureOp:
    spec: MeasurementSpec


@dataclass(frozen=True)
class AcquireOp:
    pass


@dataclass(frozen=True)
class InitOp:
    name: str


_EVOLVE = EvolveOp()
_ACQUIRE = AcquireOp()


def default_measurements(config: ExperimentConfig) -> dict:
    return {
        "Mplus": MeasurementSpec.entangler("plus", config.tau_z_ms),
        "Mminus": MeasurementSpec.entangler("minus", config.tau_z_ms),
        "Mideal": MeasurementSpec(),
    }


def compile_sequence(program: SequenceProgram, config: ExperimentConfig, measurements=None) -> list:
    """Lower a program to a flat list of channel operations.

    Delays become ``d/dt`` :class:`EvolveOp` entries and must lie on the dt
    grid (1e-9 slack); repeats are unrolled.
    """
    specs = default_measurements(config)
    if measurements:
        specs.update(measurements)
    dt = config.dt_ms

    def lower(stmts):
        ops = []
        for s in stmts:
            if isinstance(s, Delay):
                ratio = s.ms / dt
                k = round(ratio)
                if abs(ratio - k) > 1e-9:
                    raise GridError(f"delay {s.ms}ms is not a multiple of dt={dt}ms", s.line)
                ops.extend([_EVOLVE] * int(k))
            elif isinstance(s, Pulse):
                ops.append(PulseOp(s.target, s.axis, s.angle_deg * math.pi / 180))
            elif isinstance(s, Measure):
                if s.name not in specs:
                    raise SemanticError(f"unknown measurement {s.name!r}", s.line)
                ops.append(MeasureOp(specs[s.name]))
            elif isinstance(s, Acquire):
                ops.append(_ACQUIRE)
            elif isinstance(s, Init):
                ops.append(InitOp(INIT_NAMES[s.name]))
            elif isinstance(s, Repeat):
                ops.extend(lower(s.body) * s.count)
            else:  # pragma: no cover
                raise TypeError(f"unknown statement {s!r}")
        return ops

    return lower(program.statements)


def execute(ops, config: ExperimentConfig, metadata=None) -> SignalTrace:
    """Run a compiled channel program, sampling at each acquire."""
    noise = config.make_noise()
    step = free_step_fn(config)
    rho = initial_state(config)
    rec = TraceRecorder(rho)
    clock = _Clock(config.dt_ms, config.pulse_tau_ms)
    for op in ops:
        if op is _EVOLVE or isinstance(op, EvolveOp):
            rho = step(rho, config.params, noise, config.dt_ms)
            clock.n_dt += 1
            rho = guard(rho, clock.n_dt)
        elif isinstance(op, PulseOp):
            rho = pulse_step(rho, config.params, noise, op.axis, op.target, op.angle, config.pulse_tau_ms)
            clock.n_pulse += 1
        elif isinstance(op, MeasureOp):
            rho = measure(rho, config, noise, op.spec, clock)
        elif isinstance(op, AcquireOp):
            rec.sample(clock.t, rho)
        elif isinstance(op, InitOp):
            rho = initial_state(config.with_(initial=op.name))
            rec.set_reference(rho)
    meta = {"experiment": "sequence", "config": config.echo()}
    meta.update(metadata or {})
    return rec.trace(meta)


def run_sequence(text: str, config: ExperimentConfig, measurements=None) -> SignalTrace:
    names = set(MEASUREMENT_NAMES) | set(measurements or {})
    program = parse_sequence(text, names)
    return execute(compile_sequence(program, config, measurements), config)


# ---------------------------------------------------------------- templates


def fid_template(config: ExperimentConfig) -> str:
    return f"repeat {config.n_reps} {{ delay {config.tau_xy_ms!r}ms acquire }}\n"


def zeno_template(config: ExperimentConfig, measurement: str = "Mminus") -> str:
    return f"repeat {config.n_reps} {{ delay {config.tau_xy_ms!r}ms measure {measurement} acquire }}\n"


def entangler_template(config: ExperimentConfig, sign: str = "minus") -> str:
    """The Zeno train with the entangler written out as pulse/delay/pulse."""
    a = 90 if sign == "minus" else -90
    return (
        f"repeat {config.n_reps} {{\n"
        f"    delay {config.tau_xy_ms!r}ms\n"
        f"    pulse S y {a}\n"
        f"    delay {config.tau_z_ms!r}ms\n"
        f"    pulse S y {-a}\n"
        f"    acquire\n"
        f"}}\n"
    )


def xy4_template(config: ExperimentConfig, target: str, interval_ms: float) -> str:
    d = f"delay {interval_ms!r}ms"
    return (
        f"repeat {config.n_reps} {{ {d} pulse {target} x 180 {d} pulse {target} y 180 "
        f"{d} pulse {target} x 180 {d} pulse {target} y 180 acquire }}\n"
    )
