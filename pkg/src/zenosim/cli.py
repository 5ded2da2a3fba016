"""Command line front end and manifest runner.

Exit codes: 0 success, 2 parse/validation error, 3 simulation error,
4 I/O error.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import qmat, theory
from .channels import MeasurementSpec, SpinSystemParams
from .experiments import ConfigError, ExperimentConfig, fitted_t2, run_fid, run_xy4, run_zeno, sweep
from .protect import ProtectParams, protect_run, survival_closed_form
from .sequence import (
    SequenceError,
    SequenceProgram,
    compile_sequence,
    execute,
    fid_template,
    parse_sequence,
    xy4_template,
    zeno_template,
)
from .trace import SignalTrace

EXIT_OK, EXIT_INPUT, EXIT_SIM, EXIT_IO = 0, 2, 3, 4

MANIFEST_KEYS = {
    # documented core keys
    "mode": str,
    "j_hz": float,
    "t_d_ms": float,
    "t1s_ms": float,
    "dt_ms": float,
    "tau_xy_ms": float,
    "tau_z_ms": float,
    "n_reps": int,
    "alpha": float,
    "measurement": str,
    "sign": str,
    "output": str,
    "format": str,
    # extensions
    "experiment": str,
    "sequence": str,
    "pulse_tau_ms": float,
    "initial": str,
    "target": str,
    "interval_ms": float,
    "fit": str,
}
EXPERIMENTS = ("fid", "zeno", "xy4", "sequence")


class ManifestError(ValueError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"manifest key {key!r}: {message}")


@dataclass
class RunManifest:
    config: ExperimentConfig
    program: SequenceProgram
    output: Path | None = None
    fmt: str = "csv"
    fit: bool = False
    raw: dict = field(default_factory=dict)


def parse_manifest_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` comments and blank lines ignored."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ManifestError(line, f"line {lineno} is not key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in MANIFEST_KEYS:
            raise ManifestError(key, "unknown key")
        try:
            out[key] = MANIFEST_KEYS[key](value)
        except ValueError:
            raise ManifestError(key, f"cannot parse {value!r} as {MANIFEST_KEYS[key].__name__}") from None
    return out


def config_from_values(v: dict) -> ExperimentConfig:
    mode = v.get("mode", "nmr")
    if mode not in ("nmr", "theory"):
        raise ManifestError("mode", f"must be nmr or theory, got {mode!r}")
    theory_mode = mode == "theory"
    defaults = {
        "j_hz": 1000.0 if theory_mode else 215.0,
        "t_d_ms": 10.0 if theory_mode else 6.5,
        "t1s_ms": math.inf if theory_mode else 300.0,
        "tau_xy_ms": 1 / 160 if theory_mode else 0.1,
        "pulse_tau_ms": 0.0 if theory_mode else 0.058,
        "initial": "theory_plus" if theory_mode else "pseudopure_plus",
    }
    g = {**defaults, **v}
    g.setdefault("dt_ms", g["tau_xy_ms"] if theory_mode else 0.1)
    try:
        params = SpinSystemParams(g["j_hz"], g["t_d_ms"], g["t1s_ms"])
    except ValueError as e:
        key = str(e).split()[0]
        raise ManifestError(key if key in MANIFEST_KEYS else "params", str(e)) from None
    kw = dict(
        mode=mode,
        params=params,
        dt_ms=g["dt_ms"],
        tau_xy_ms=g["tau_xy_ms"],
        tau_z_ms=g.get("tau_z_ms", 0.0),
        n_reps=g.get("n_reps", 600),
        pulse_tau_ms=g["pulse_tau_ms"],
        alpha=g.get("alpha", 0.4),
        initial=g["initial"],
    )
    try:
        return ExperimentConfig(**kw)
    except ConfigError as e:
        msg = str(e)
        key = next((k for k in MANIFEST_KEYS if msg.startswith(k)), None)
        key = key or next((k for k in MANIFEST_KEYS if f" {k}" in msg), "config")
        raise ManifestError(key, msg) from None


def measurement_name(v: dict) -> str:
    m = v.get("measurement", "entangler")
    sign = v.get("sign", "minus")
    if sign not in ("plus", "minus"):
        raise ManifestError("sign", f"must be plus or minus, got {sign!r}")
    if m == "ideal":
        return "Mideal"
    if m == "entangler":
        return "Mplus" if sign == "plus" else "Mminus"
    if m in ("Mplus", "Mminus", "Mideal"):
        return m
    raise ManifestError("measurement", f"must be ideal, entangler, Mplus, Mminus or Mideal, got {m!r}")


def load_manifest(path) -> RunManifest:
    path = Path(path)
    v = parse_manifest_text(path.read_text(encoding="utf-8"))
    config = config_from_values(v)
    experiment = v.get("experiment", "sequence" if "sequence" in v else "fid")
    if experiment not in EXPERIMENTS:
        raise ManifestError("experiment", f"must be one of {EXPERIMENTS}")
    if experiment == "sequence":
        if "sequence" not in v:
            raise ManifestError("sequence", "required when experiment = sequence")
        seq_path = Path(v["sequence"])
        if not seq_path.is_absolute():
            seq_path = path.parent / seq_path
        text = seq_path.read_text(encoding="utf-8")
    elif experiment == "fid":
        text = fid_template(config)
    elif experiment == "zeno":
        text = zeno_template(config, measurement_name(v))
    else:
        target = v.get("target", "E")
        if target not in ("S", "E"):
            raise ManifestError("target", f"must be S or E, got {target!r}")
        interval = v.get("interval_ms", 0.2)
        if interval < config.pulse_tau_ms:
            raise ManifestError("interval_ms", "shorter than the pulse duration")
        text = xy4_template(config, target, interval)
    fmt = v.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ManifestError("format", f"must be csv or json, got {fmt!r}")
    fit = v.get("fit", "no").lower()
    if fit not in ("yes", "no", "true", "false"):
        raise ManifestError("fit", f"must be yes or no, got {fit!r}")
    output = v.get("output")
    if output is not None and not Path(output).is_absolute():
        output = path.parent / output
    return RunManifest(
        config=config,
        program=parse_sequence(text),
        output=Path(output) if output else None,
        fmt=fmt,
        fit=fit in ("yes", "true"),
        raw=v,
    )


def _emit(trace: SignalTrace, output, fmt, out=sys.stdout):
    if output is None:
        out.write(trace.to_csv() if fmt == "csv" else trace.to_json() + "\n")
    else:
        trace.write(output, fmt)


def _report_fit(trace: SignalTrace, label: str = "") -> str:
    fit = fitted_t2(trace)
    t2 = "inf (no decay)" if not fit.decaying else f"{fit.t2_ms:.4g} ms"
    return f"{label}T2 = {t2}, amplitude = {fit.amplitude:.4g}, residual = {fit.residual:.3g}"


def run_manifest(manifest: RunManifest, out=sys.stdout, err=sys.stderr) -> tuple[int, SignalTrace]:
    ops = compile_sequence(manifest.program, manifest.config)
    trace = execute(ops, manifest.config, {"manifest": manifest.raw})
    _emit(trace, manifest.output, manifest.fmt, out)
    print(f"{len(trace)} samples" + (f" -> {manifest.output}" if manifest.output else ""), file=err)
    if manifest.fit:
        print(_report_fit(trace), file=err)
    return EXIT_OK, trace


def _shared(p: argparse.ArgumentParser):
    p.add_argument("--mode", choices=("nmr", "theory"), default="nmr")
    p.add_argument("--j-hz", type=float)
    p.add_argument("--t-d-ms", type=float)
    p.add_argument("--t1s-ms", type=float)
    p.add_argument("--dt-ms", type=float)
    p.add_argument("--tau-xy-ms", type=float)
    p.add_argument("--n-reps", type=int)
    p.add_argument("--pulse-tau-ms", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--fit", action="store_true", help="print the fitted envelope T2")
    p.add_argument("--validate", action="store_true", help="check state invariants after every step")
    p.add_argument("--workers", type=int, default=None)


def _config_from_args(args, **extra) -> ExperimentConfig:
    v = {"mode": args.mode}
    for k in ("j_hz", "t_d_ms", "t1s_ms", "dt_ms", "tau_xy_ms", "n_reps", "pulse_tau_ms", "alpha"):
        if getattr(args, k, None) is not None:
            v[k] = getattr(args, k)
    v.update(extra)
    return config_from_values(v)


def _workers(args):
    # the validation flag is process-global, so validated sweeps stay in-process
    return 1 if args.validate else args.workers


def _suffixed(output, tag, many):
    if output is None or not many:
        return output
    p = Path(output)
    return p.with_name(f"{p.stem}_{tag}{p.suffix}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zenosim", description="Zeno-effect spin simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fid", help="free induction decay")
    _shared(p)

    p = sub.add_parser("zeno", help="repeated-measurement trains")
    _shared(p)
    p.add_argument("--measurement", choices=("ideal", "entangler"), default="entangler")
    p.add_argument("--sign", choices=("plus", "minus"), default="minus")
    p.add_argument("--tau-z-ms", type=float, nargs="+", default=[1.0])
    p.add_argument("--time-axis", choices=("elapsed", "alpha", "cycles"), default="elapsed")

    p = sub.add_parser("xy4", help="XY-4 decoupling scan")
    _shared(p)
    p.add_argument("--target", choices=("S", "E"), default="E")
    p.add_argument("--interval-ms", type=float, nargs="+", default=[0.2])

    p = sub.add_parser("theory", help="short-time fidelity and Zeno survival law")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--tau-c", type=float, default=0.05)
    p.add_argument("--total-t", type=float, default=1.0)
    p.add_argument("--n", type=int, nargs="+", default=[1, 2, 4, 8, 16, 64, 256, 1024, 4096])

    p = sub.add_parser("protect", help="parity-projection state protection")
    p.add_argument("--alpha", type=complex, default=1.0)
    p.add_argument("--beta", type=complex, default=0.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--total-t", type=float, default=1.0)
    p.add_argument("--n", type=int, nargs="+", default=[10])

    p = sub.add_parser("run", help="execute a manifest (key=value) or a .seq sequence file")
    _shared(p)
    p.add_argument("file")
    p.add_argument("--tau-z-ms", type=float)
    return ap


def _cmd_fid(args, out, err):
    trace = run_fid(_config_from_args(args))
    _emit(trace, args.output, args.format, out)
    if args.fit:
        print(_report_fit(trace), file=err)


def _cmd_zeno(args, out, err):
    many = len(args.tau_z_ms) > 1
    configs = [_config_from_args(args, tau_z_ms=tz) for tz in args.tau_z_ms]
    specs = [
        MeasurementSpec() if args.measurement == "ideal" else MeasurementSpec.entangler(args.sign, tz)
        for tz in args.tau_z_ms
    ]
    traces = sweep(run_zeno, [(c, s, args.time_axis) for c, s in zip(configs, specs)], _workers(args))
    for tz, trace in zip(args.tau_z_ms, traces):
        _emit(trace, _suffixed(args.output, f"tz{tz:g}", many), args.format, out)
        if args.fit:
            print(_report_fit(trace, f"tau_z={tz:g} ms: "), file=err)


def _cmd_xy4(args, out, err):
    many = len(args.interval_ms) > 1
    config = _config_from_args(args)
    traces = sweep(run_xy4, [(config, args.target, iv) for iv in args.interval_ms], _workers(args))
    for iv, trace in zip(args.interval_ms, traces):
        _emit(trace, _suffixed(args.output, f"iv{iv:g}", many), args.format, out)
        if args.fit or many:
            print(_report_fit(trace, f"interval={iv:g} ms: "), file=err)


def _cmd_theory(args, out, err):
    static = theory.NoiseModel(args.lam, regime="static")
    delta = theory.NoiseModel(args.lam, args.tau_c, regime="delta_correlated")
    t = args.total_t
    print(f"F_static({t}) = {theory.fidelity_short_time(static, t)!r}", file=out)
    print(f"F_delta({t}) = {theory.fidelity_short_time(delta, t)!r}", file=out)
    print("N,exact,approx", file=out)
    for n in args.n:
        exact, approx = theory.zeno_survival(static, t, n)
        print(f"{n},{exact!r},{approx!r}", file=out)


def _cmd_protect(args, out, err):
    print("N,survival,closed_form,fidelity", file=out)
    for n in args.n:
        params = ProtectParams(args.alpha, args.beta, args.gamma, args.total_t, n)
        fid, surv = protect_run(params)
        closed = survival_closed_form(args.gamma, args.total_t, n)
        print(f"{n},{surv!r},{closed!r},{fid!r}", file=out)


def _cmd_run(args, out, err):
    path = Path(args.file)
    if path.suffix == ".seq":
        extra = {} if args.tau_z_ms is None else {"tau_z_ms": args.tau_z_ms}
        config = _config_from_args(args, **extra)
        program = parse_sequence(path.read_text(encoding="utf-8"))
        trace = execute(compile_sequence(program, config), config, {"sequence": str(path)})
        _emit(trace, args.output, args.format, out)
        if args.fit:
            print(_report_fit(trace), file=err)
        return
    manifest = load_manifest(path)
    run_manifest(manifest, out, err)


COMMANDS = {
    "fid": _cmd_fid,
    "zeno": _cmd_zeno,
    "xy4": _cmd_xy4,
    "theory": _cmd_theory,
    "protect": _cmd_protect,
    "run": _cmd_run,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    qmat.set_validation(getattr(args, "validate", False))
    try:
        COMMANDS[args.command](args, out, err)
    except (ManifestError, SequenceError, ConfigError) as e:
        print(f"error: {e}", file=err)
        return EXIT_INPUT
    except OSError as e:
        print(f"I/O error: {e}", file=err)
        return EXIT_IO
    except (ValueError, ArithmeticError) as e:
        print(f"simulation error: {e}", file=err)
        return EXIT_SIM
    finally:
        qmat.set_validation(False)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
