"""Command-line front end.

Subcommands: spectrum, invert, evolve, sample, collisions, verify,
two-peakon.  Documents are JSON on stdin/stdout (or files); trajectories
and grids are CSV.  Exit codes: 0 success, 2 validation failure,
3 numerical failure; failures emit a machine-readable JSON object on
stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import evolution, forward, inverse, soleval, twopeakon
from .core import (
    dump_json,
    measure_document,
    parse_document,
    spectral_document,
)
from .errors import NumericalError, ValidationError
from .precision import fmt, to_mpf, working_precision
from .verify import verify_document

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _bits_from_digits(digits: int) -> int:
    bits = math.ceil(digits * math.log2(10)) + 4
    if bits < 64:
        raise ValidationError("working precision must be at least 64 bits (20 digits)")
    return bits


def _read_document(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from exc


def _write(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w") as handle:
            handle.write(text)
            if not text.endswith("\n"):
                handle.write("\n")


def _csv(rows, header) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def _spectral_input(doc):
    """Parse a document and return spectral data (forward-transforming
    peak documents)."""
    kind, payload = parse_document(doc)
    if kind == "peaks":
        measure, t0 = payload
        return forward.forward_transform(measure, base_time=t0)
    return payload


def _time_grid(args) -> list:
    t0, t1, n = to_mpf(args.t_start), to_mpf(args.t_end), args.steps
    if n < 1:
        raise ValidationError("time grid needs at least one step")
    if n == 1:
        return [t0]
    return [t0 + (t1 - t0) * i / (n - 1) for i in range(n)]


def _space_grid(x_min, x_max, steps) -> list:
    lo, hi = to_mpf(x_min), to_mpf(x_max)
    if steps < 2 or not lo < hi:
        raise ValidationError("space grid needs x_min < x_max and >= 2 points")
    return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]


# ---------------------------------------------------------------------------
# subcommands


def cmd_spectrum(args) -> int:
    kind, payload = parse_document(_read_document(args.input))
    if kind != "peaks":
        raise ValidationError("spectrum expects a peaks document")
    measure, t0 = payload
    s = forward.forward_transform(measure, base_time=t0)
    w = forward.wronskian(measure)
    i1, i2 = forward.measure_moments(measure)
    doc = {
        "t0": t0,
        "eigenvalues": list(s.eigenvalues),
        "norming": list(s.norming_constants),
        "W_coeffs": list(w.coefficients),
        "I1": i1,
        "I2": i2,
    }
    _write(dump_json(doc), args.out)
    return 0


def cmd_invert(args) -> int:
    doc = _read_document(args.input)
    kind, payload = parse_document(doc)
    if kind == "peaks":
        raise ValidationError("invert expects a spectrum document")
    snapshot = inverse.reconstruct(payload)
    _write(dump_json(measure_document(snapshot.measure, snapshot.time)), args.out)
    return 0


def cmd_evolve(args) -> int:
    s = _spectral_input(_read_document(args.input))
    times = _time_grid(args)
    i1, i2 = evolution.conserved_quantities(s)
    rows = []
    for t in times:
        snap = evolution.solve_at(s, t)
        m = snap.measure
        for n in range(m.n_atoms):
            rows.append(
                [
                    fmt(t),
                    str(n + 1),
                    fmt(m.positions[n]),
                    fmt(m.omega_weights[n]),
                    fmt(m.upsilon_weights[n]),
                    fmt(i1),
                    fmt(i2),
                ]
            )
    header = ["t", "n", "x_n", "omega_n", "upsilon_n", "I1", "I2"]
    if args.format == "json":
        _write(
            dump_json([dict(zip(header, row)) for row in rows]), args.out
        )
    else:
        _write(_csv(rows, header), args.out)

    if args.summary:
        report = evolution.collision_times(s) if s.size >= 2 else None
        summary = {
            "I1": i1,
            "I2": i2,
            "collision_times": [] if report is None else list(report.times),
            "events": []
            if report is None
            else [
                {
                    "t": ev.time,
                    "vanishing_orders": list(ev.vanishing_orders),
                    "snapshot": measure_document(ev.snapshot.measure, ev.time),
                }
                for ev in report.events
            ],
        }
        _write(dump_json(summary), args.summary)

    if args.grid_out:
        grid = _space_grid(args.x_min, args.x_max, args.x_steps)
        grid_rows = []
        for t in times:
            snap = evolution.solve_at(s, t)
            sample = soleval.evaluate_u(snap.measure, grid)
            for x, u in zip(sample.grid, sample.u_values):
                grid_rows.append([fmt(t), fmt(x), fmt(u)])
        _write(_csv(grid_rows, ["t", "x", "u"]), args.grid_out)
    return 0


def cmd_sample(args) -> int:
    s = _spectral_input(_read_document(args.input))
    times = [to_mpf(t) for t in args.at] or [s.base_time]
    grid = _space_grid(args.x_min, args.x_max, args.x_steps)
    rows = []
    atoms = []
    for t in times:
        snap = evolution.solve_at(s, t)
        sample = soleval.evaluate_u(snap.measure, grid)
        for x, u, uxl, uxr, dens in zip(
            sample.grid, sample.u_values, sample.ux_left, sample.ux_right,
            sample.ac_density,
        ):
            rows.append([fmt(t), fmt(x), fmt(u), fmt(uxl), fmt(uxr), fmt(dens)])
        for x, mass in sample.atoms:
            atoms.append({"t": t, "x": x, "mass": mass})
    header = ["t", "x", "u", "ux_left", "ux_right", "density"]
    if args.format == "json":
        _write(dump_json([dict(zip(header, row)) for row in rows]), args.out)
    else:
        _write(_csv(rows, header), args.out)
    if args.summary:
        _write(dump_json({"mu_atoms": atoms}), args.summary)
    return 0


def cmd_collisions(args) -> int:
    s = _spectral_input(_read_document(args.input))
    window = None
    if args.window:
        window = (to_mpf(args.window[0]), to_mpf(args.window[1]))
    if s.size < 2:
        doc = {"times": [], "events": [], "window": None}
    else:
        report = evolution.collision_times(s, window=window)
        doc = {
            "times": list(report.times),
            "events": [
                {
                    "t": ev.time,
                    "vanishing_orders": list(ev.vanishing_orders),
                    "tangential": ev.tangential,
                    "snapshot": measure_document(ev.snapshot.measure, ev.time),
                }
                for ev in report.events
            ],
            "window": list(report.window),
        }
    _write(dump_json(doc), args.out)
    return 0


def cmd_verify(args) -> int:
    kind, payload = parse_document(_read_document(args.input))
    results = verify_document(kind, payload, rel_tol=args.tol)
    if args.format == "json":
        doc = [
            {
                "name": r.name,
                "passed": r.passed,
                "residual": r.residual,
                "tolerance": r.tolerance,
                "detail": r.detail,
            }
            for r in results
        ]
        _write(dump_json(doc), args.out)
    else:
        _write("\n".join(r.line() for r in results) + "\n", args.out)
    return 0 if all(r.passed for r in results) else 1


def cmd_two_peakon(args) -> int:
    data = twopeakon.two_peakon_spectrum(
        args.omega1, args.omega2, args.x1, args.x2, base_time=args.t0
    )
    t_cross = twopeakon.two_peakon_collision_time(data)
    if args.at is not None:
        times = [to_mpf(t) for t in args.at]
    elif args.t_start is not None and args.t_end is not None:
        times = _time_grid(args)
    else:
        times = [data.base_time]
    states = []
    for t in times:
        snap = twopeakon.two_peakon_state(data, t)
        entry = measure_document(snap.measure, t)
        states.append(entry)
    doc = {
        "case": data.case,
        "t0": data.base_time,
        "lambda": [data.lambda1, data.lambda2],
        "gamma2": [data.gamma1_sq, data.gamma2_sq],
        "t_collision": t_cross,
        "singular_mass": twopeakon.two_peakon_singular_mass(data),
        "states": states,
    }
    _write(dump_json(doc), args.out)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peakons",
        description="Conservative Camassa-Holm multi-peakon solver "
        "(inverse spectral transform)",
    )
    parser.add_argument("--digits", type=int, default=60,
                        help="decimal digits of working precision (default 60)")
    parser.add_argument("--tol", type=float, default=1e-9,
                        help="relative tolerance for cross-checks (default 1e-9)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p, output_only=False):
        if not output_only:
            p.add_argument("input", nargs="?", default="-",
                           help="input document path or - for stdin")
        p.add_argument("--out", default="-", help="output path or - for stdout")

    p = sub.add_parser("spectrum", help="forward transform of a peaks document")
    add_io(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("invert", help="reconstruct peaks from a spectrum document")
    add_io(p)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("evolve", help="emit the trajectory over a time grid")
    add_io(p)
    p.add_argument("--t-start", required=True)
    p.add_argument("--t-end", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--summary", help="write collision summary JSON here")
    p.add_argument("--grid-out", help="write a t,x,u grid CSV here")
    p.add_argument("--x-min", default="-10")
    p.add_argument("--x-max", default="10")
    p.add_argument("--x-steps", type=int, default=101)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sample", help="sample u on a space grid")
    add_io(p)
    p.add_argument("--at", action="append", default=[],
                   help="sample time (repeatable; default t0)")
    p.add_argument("--x-min", default="-10")
    p.add_argument("--x-max", default="10")
    p.add_argument("--x-steps", type=int, default=101)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--summary", help="write mu-atom summary JSON here")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("collisions", help="locate all collision times")
    add_io(p)
    p.add_argument("--window", nargs=2, metavar=("LO", "HI"),
                   help="restrict the scan window")
    p.set_defaults(func=cmd_collisions)

    p = sub.add_parser("verify", help="run the invariant suite on a document")
    add_io(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("two-peakon", help="closed-form two-peakon reference")
    add_io(p, output_only=True)
    p.add_argument("--omega1", required=True)
    p.add_argument("--omega2", required=True)
    p.add_argument("--x1", required=True)
    p.add_argument("--x2", required=True)
    p.add_argument("--t0", default="0")
    p.add_argument("--at", action="append", default=None,
                   help="evaluation time (repeatable)")
    p.add_argument("--t-start")
    p.add_argument("--t-end")
    p.add_argument("--steps", type=int, default=11)
    p.set_defaults(func=cmd_two_peakon)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        bits = _bits_from_digits(args.digits)
        with working_precision(bits):
            return args.func(args)
    except ValidationError as exc:
        sys.stderr.write(
            json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}})
            + "\n"
        )
        return EXIT_VALIDATION
    except NumericalError as exc:
        sys.stderr.write(
            json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}})
            + "\n"
        )
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
