"""Command-line front end.

Exit codes: 0 success, 2 input/parse error, 3 numerical failure,
4 assumption violation, 5 capability mismatch (e.g. MIMO system for a
transfer-function command).  Every input is parsed and validated before any
computation, and output files are written only once everything succeeded.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (PidParams, effective_case_b, percent_changes,
                       perceive_case_a, pid_under_jitter, recover_perceived_from_data,
                       scale_tf, wrap_frequency)
from .errors import (AliasingRiskError, AssumptionViolationError, DimensionMismatchError,
                     JitterGenerationError, NotSisoError, NumericalError, SystemParseError)
from .io import dumps, load_discrete, load_system
from .jitter import (JitterSequence, generate, load_jitter, parse_descriptor,
                     policy_for_bounds, validate)
from .lti import ContinuousStateSpace, c2d, freq_response, ss2tf, validate_sampling
from .sim import InputSignal, verify_equivalence

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NUMERICAL = 3
EXIT_ASSUMPTION = 4
EXIT_CAPABILITY = 5


def _fmt(x):
    return format(float(x), ".17g")


def _report(*lines):
    for line in lines:
        print(line, file=sys.stderr)


# -- input resolution -------------------------------------------------------

def _system_and_ts(args, need_ts=True):
    if not args.system:
        raise SystemParseError("--system is required")
    sys_, file_ts = load_system(args.system)
    ts = args.ts if args.ts is not None else file_ts
    if need_ts:
        if ts is None:
            raise SystemParseError("sampling time missing: pass --ts or set 'ts' in the system file")
        if not (math.isfinite(ts) and ts > 0):
            raise SystemParseError(f"--ts must be > 0, got {ts!r}")
    return sys_, ts


def _constant_epsilon(args):
    """Constant jitter from --epsilon or a constant --jitter descriptor, else None."""
    if args.epsilon is not None:
        if not args.epsilon > -1.0:
            raise AssumptionViolationError(f"--epsilon must be > -1, got {args.epsilon!r}")
        return float(args.epsilon)
    jit = getattr(args, "jitter", None)
    if jit and not Path(jit).is_file():
        model = parse_descriptor(jit)
        if model.kind == "constant":
            return float(model.value)
    return None


def _jitter_sequence(args, steps):
    jit = args.jitter
    if jit is None:
        if args.epsilon is None:
            raise SystemParseError("jitter missing: pass --jitter or --epsilon")
        if not args.epsilon > -1.0:
            raise AssumptionViolationError(f"--epsilon must be > -1, got {args.epsilon!r}")
        model = parse_descriptor(f"constant:{args.epsilon!r}")
        return generate(model, steps, args.seed)
    if Path(jit).is_file():
        return load_jitter(jit)
    return generate(parse_descriptor(jit), steps, args.seed)


def _check_policy(seq, policy):
    report = validate(seq, policy or policy_for_bounds(seq.bounds))
    for _, msg in report.warnings[:10]:
        _report(f"warning: {msg}")
    if len(report.warnings) > 10:
        _report(f"warning: ... {len(report.warnings) - 10} more samples with eps >= 1")


def _input_signal(text):
    text = text.strip()
    if text in ("step", "pulse", "zero"):
        return InputSignal(text)
    if text.startswith("step:"):
        return InputSignal.step(float(text[5:]))
    if text.startswith("sin:"):
        return InputSignal.sinusoid(float(text[4:]))
    if text.startswith("file:"):
        path = Path(text[5:])
        try:
            raw = path.read_text()
        except OSError as exc:
            raise SystemParseError(f"{path}: cannot read ({exc.strerror})") from None
        if path.suffix == ".json":
            samples = np.asarray(json.loads(raw), dtype=float)
        else:
            rows = [r for r in csv.reader(_io.StringIO(raw)) if r and not r[0].startswith("#")]
            samples = np.asarray([[float(v) for v in r] for r in rows], dtype=float)
        return InputSignal.explicit(samples)
    raise SystemParseError(f"bad --input {text!r}; expected step, pulse, zero, sin:<Hz> or file:<path>")


def _x0(text, n):
    if text is None:
        return np.zeros(n)
    vals = [float(v) for v in text.split(",")]
    if len(vals) != n:
        raise SystemParseError(f"--x0 needs {n} comma-separated values, got {len(vals)}")
    return np.asarray(vals)


def _emit(args, text, path=None):
    target = path or args.out
    if target:
        Path(target).write_text(text)
    else:
        sys.stdout.write(text)


# -- subcommands ------------------------------------------------------------

def cmd_discretize(args):
    sys_, ts = _system_and_ts(args)
    sampling = validate_sampling(sys_, ts)
    dsys = c2d(sys_, ts)
    _report(sampling.report())
    if not sampling.compliant:
        _report("warning: analysis performed anyway; d2c recovery would be ambiguous")
    _emit(args, dumps(dsys.to_dict()))
    return EXIT_OK


def cmd_perceive(args):
    sys_, _ = _system_and_ts(args, need_ts=False)
    case = args.case
    direction = ("Case A (plant measurement): A, B multiplied by (1+eps)" if case == "a"
                 else "Case B (controller implementation): A, B divided by (1+eps)")
    eps = _constant_epsilon(args)
    transform = perceive_case_a if case == "a" else effective_case_b
    if eps is not None:
        scaled = transform(sys_, [eps])[0]
        out = {"case": case, "direction": direction, "epsilon": eps,
               "system": scaled.to_dict()}
        if sys_.is_siso:
            out["transfer_function"] = scale_tf(ss2tf(sys_), eps, case).to_dict()
    else:
        seq = _jitter_sequence(args, args.steps)
        _check_policy(seq, args.policy)
        tv = transform(sys_, seq)
        out = {"case": case, "direction": direction, "jitter": seq.to_dict()}
        out.update(tv.to_dict())
    _report(direction)
    _emit(args, dumps(out))
    return EXIT_OK


def cmd_simulate(args):
    sys_, ts = _system_and_ts(args)
    u = _input_signal(args.input)
    x0 = _x0(args.x0, sys_.n_states)
    if args.format == "csv" and args.out is None:
        raise SystemParseError("--format csv needs --out <path>")
    seq = _jitter_sequence(args, args.steps)
    _check_policy(seq, args.policy)
    sampling = validate_sampling(sys_, ts)
    if not sampling.compliant:
        _report(sampling.report())
    err, jittered, perceived = verify_equivalence(sys_, ts, seq, u, x0,
                                                  return_trajectories=True)
    summary = {"max_relative_error": err, "steps": len(seq), "ts": ts,
               "jitter": seq.to_dict()}
    if args.format == "json":
        _emit(args, dumps({**summary, "jittered": jittered.to_dict(),
                           "perceived": perceived.to_dict()}))
    else:
        out = Path(args.out)
        files = {
            out: jittered.to_csv(),
            out.with_name(f"{out.stem}_perceived{out.suffix or '.csv'}"): perceived.to_csv(),
            out.with_name(f"{out.stem}_summary.json"): dumps(summary),
        }
        for path, text in files.items():
            path.write_text(text)
    print(f"max relative output error: {_fmt(err)}")
    return EXIT_OK


def _bode_grid(tf, points, decades):
    poles = tf.poles()
    center = float(np.max(np.abs(poles))) if poles.size else 1.0
    if center == 0.0:
        center = 1.0
    half = decades / 2.0
    return np.logspace(np.log10(center) - half, np.log10(center) + half, points)


def cmd_bode(args):
    sys_, _ = _system_and_ts(args, need_ts=False)
    if not sys_.is_siso:
        raise NotSisoError(f"bode needs a SISO system; got {sys_.n_inputs} inputs, "
                           f"{sys_.n_outputs} outputs")
    eps = _constant_epsilon(args)
    if eps is None:
        if args.jitter is not None:
            raise SystemParseError("bode needs constant jitter (--epsilon or constant:<eps>)")
        eps = 0.0
    if args.points < 2:
        raise SystemParseError("--points must be >= 2")
    tf = ss2tf(sys_)
    scaled = scale_tf(tf, eps, args.case)
    omegas = _bode_grid(tf, args.points, args.decades)
    H = freq_response(tf, omegas)
    Hs = freq_response(scaled, omegas)
    phase = np.degrees(np.unwrap(np.angle(H)))
    phase_s = np.degrees(np.unwrap(np.angle(Hs)))
    if args.format == "json":
        text = dumps({"epsilon": eps, "case": args.case,
                      "transfer_function": tf.to_dict(), "scaled": scaled.to_dict(),
                      "omega": omegas.tolist(), "mag": np.abs(H).tolist(),
                      "phase_deg": phase.tolist(), "mag_scaled": np.abs(Hs).tolist(),
                      "phase_scaled_deg": phase_s.tolist()})
    else:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["omega", "mag", "phase_deg", "mag_scaled", "phase_scaled_deg"])
        for row in zip(omegas, np.abs(H), phase, np.abs(Hs), phase_s):
            w.writerow([_fmt(v) for v in row])
        text = buf.getvalue()
    _emit(args, text)
    return EXIT_OK


def cmd_pid(args):
    if args.epsilon is None:
        raise SystemParseError("pid needs --epsilon")
    if not args.epsilon > -1.0:
        raise AssumptionViolationError(f"--epsilon must be > -1, got {args.epsilon!r}")
    try:
        nominal = PidParams(args.kp, args.ki, args.kd, args.taud)
    except ValueError as exc:
        raise SystemParseError(str(exc)) from None
    effective = pid_under_jitter(nominal, args.epsilon)
    changes = percent_changes(nominal, effective)
    labels = {"kp": "Kp", "ki": "Ki", "kd": "Kd", "tau_d": "tau_d"}
    lines = [f"effective PID under constant jitter eps = {args.epsilon:g}",
             f"{'param':<6} {'nominal':>14} {'effective':>14} {'change':>9}"]
    for name, label in labels.items():
        pct = changes[name]
        pct_txt = "n/a" if math.isnan(pct) else f"{pct:+.2f}%"
        lines.append(f"{label:<6} {getattr(nominal, name):>14.6g} "
                     f"{getattr(effective, name):>14.6g} {pct_txt:>9}")
    print("\n".join(lines))
    if args.out:
        _emit(args, dumps({"epsilon": args.epsilon, "nominal": nominal.as_dict(),
                           "effective": effective.as_dict(),
                           "percent_change": {k: (None if math.isnan(v) else v)
                                              for k, v in changes.items()}}))
    return EXIT_OK


def cmd_recover(args):
    if not args.system:
        raise SystemParseError("--system is required")
    dsys = load_discrete(args.system, dt=args.ts)
    ts = dsys.dt
    if args.omega_max is not None and args.omega_max * ts > math.pi:
        raise AliasingRiskError(
            f"omega_max*ts = {args.omega_max * ts:.6g} > pi: an oscillation at "
            f"{args.omega_max:g} rad/s would be recovered at "
            f"{abs(wrap_frequency(args.omega_max, ts)):.6g} rad/s")
    A, B = recover_perceived_from_data(dsys.A_d, dsys.B_d, ts)
    rec = ContinuousStateSpace(A, B, dsys.C, dsys.D)
    _report(validate_sampling(rec, ts).report())
    out = rec.to_dict()
    out["ts"] = ts
    _emit(args, dumps(out))
    return EXIT_OK


COMMANDS = {
    "discretize": cmd_discretize,
    "perceive": cmd_perceive,
    "simulate": cmd_simulate,
    "bode": cmd_bode,
    "pid": cmd_pid,
    "recover": cmd_recover,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", help="system JSON file")
    common.add_argument("--ts", type=float, help="nominal sampling time [s]")
    common.add_argument("--jitter", help="jitter descriptor (constant:c, uniform:w, "
                                         "gauss:s,bounds=lo,hi) or jitter JSON path")
    common.add_argument("--epsilon", type=float, help="constant jitter fraction")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--steps", type=int, default=100)
    common.add_argument("--input", default="step", help="step | pulse | zero | sin:<Hz> | file:<path>")
    common.add_argument("--x0", help="initial state, comma-separated")
    common.add_argument("--out", help="output path (stdout if omitted)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--policy", choices=("recommended", "permissive"), default=None)

    parser = argparse.ArgumentParser(
        prog="jitterscale",
        description="Analyse LTI systems sampled with timing jitter.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("discretize", parents=[common], help="exact ZOH discretization")
    p = sub.add_parser("perceive", parents=[common], help="jitter-scaled system (Case A/B)")
    p.add_argument("--case", choices=("a", "b"), default="a")
    sub.add_parser("simulate", parents=[common], help="jittered vs perceived simulation")
    p = sub.add_parser("bode", parents=[common], help="frequency response, nominal vs scaled")
    p.add_argument("--case", choices=("a", "b"), default="a")
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--decades", type=float, default=3.0)
    p = sub.add_parser("pid", parents=[common], help="PID parameters under constant jitter")
    p.add_argument("--kp", type=float, required=True)
    p.add_argument("--ki", type=float, required=True)
    p.add_argument("--kd", type=float, required=True)
    p.add_argument("--taud", type=float, required=True)
    p = sub.add_parser("recover", parents=[common],
                       help="continuous system perceived from discrete matrices")
    p.add_argument("--omega-max", type=float, dest="omega_max",
                   help="known bound on |Im(pole)| [rad/s]; rejects ts beyond pi/omega_max")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command in ("simulate", "bode") else "json"
    if args.steps < 1:
        parser.error("--steps must be >= 1")
    try:
        return COMMANDS[args.command](args)
    except NotSisoError as exc:
        _report(f"error: {exc}")
        return EXIT_CAPABILITY
    except AssumptionViolationError as exc:
        _report(f"error: assumption violated: {exc}")
        return EXIT_ASSUMPTION
    except (NumericalError, JitterGenerationError, np.linalg.LinAlgError) as exc:
        _report(f"error: numerical failure: {exc}")
        return EXIT_NUMERICAL
    except (SystemParseError, DimensionMismatchError, ValueError, OSError) as exc:
        _report(f"error: {exc}")
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
