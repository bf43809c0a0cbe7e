"""Command-line front end.

Exit codes: 0 success, 2 argument error, 3 numerical-contract violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any, Sequence

import numpy as np

from .dynamics import (
    ProbabilityVector,
    competing_channel_fixed_point,
    convergence_trace,
    derive_transfer_matrix,
    same_vs_different,
    steady_state,
)
from .errors import FockStatError, InvalidArgumentError, NumericalContractError
from .fock import ParticleKind, parse_occupation
from .optics import (
    BeamsplitterSpec,
    SingleParticleUnitary,
    beamsplitter,
    bunching_enhancement,
    fourier_unitary,
    hom_distribution,
    load_unitary,
    phase_unitary,
    transition_amplitude,
)

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_NUMERICAL = 3

# typed decimals like 0.7071 are accepted and rescaled onto t^2 + r^2 = 1
BEAMSPLITTER_INPUT_SLACK = 1e-3


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGUMENT, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def resolve_beamsplitter(t: float | None, r: float | None) -> BeamsplitterSpec:
    if t is None and r is None:
        return BeamsplitterSpec.balanced()
    if t is None:
        t = math.sqrt(max(0.0, 1.0 - r * r))
    elif r is None:
        r = math.sqrt(max(0.0, 1.0 - t * t))
    total = t * t + r * r
    if abs(total - 1.0) > BEAMSPLITTER_INPUT_SLACK:
        raise InvalidArgumentError(f"t^2 + r^2 = {total:.6g} is not 1")
    scale = math.sqrt(total)
    return BeamsplitterSpec(min(t / scale, 1.0), min(r / scale, 1.0))


def _resolve_unitary(args, config: dict) -> SingleParticleUnitary:
    if getattr(args, "matrix", None):
        config["matrix"] = args.matrix
        return load_unitary(args.matrix)
    if getattr(args, "fourier", None):
        config["fourier"] = args.fourier
        return fourier_unitary(args.fourier)
    spec = resolve_beamsplitter(args.t, args.r)
    config["t"], config["r"] = spec.t, spec.r
    return beamsplitter(spec)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _render_table(header: Sequence[str], rows: Sequence[Sequence[Any]], styled: bool) -> str:
    cells = [[str(h) for h in header]] + [[_fmt(c) if isinstance(c, float) else str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for k, row in enumerate(cells):
        line = "  ".join(c.rjust(w) for c, w in zip(row, widths))
        if k == 0 and styled:
            line = f"\033[1m{line}\033[0m"
        lines.append(line)
    return "\n".join(lines) + "\n"


def _render_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(c) if isinstance(c, float) else c for c in row])
    return buf.getvalue()


def render(
    config: dict,
    header: Sequence[str],
    rows: Sequence[Sequence[Any]],
    extra: dict | None,
    fmt: str,
    styled: bool,
) -> str:
    if fmt == "json":
        payload = {"config": config, "columns": list(header), "rows": [list(r) for r in rows]}
        if extra:
            payload.update(extra)
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    preamble = "# config: " + json.dumps(config, sort_keys=True) + "\n"
    if fmt == "csv":
        body = _render_csv(header, rows)
        notes = "".join(f"# {k}: {json.dumps(v, sort_keys=True)}\n" for k, v in (extra or {}).items())
        return preamble + notes + body
    body = _render_table(header, rows, styled)
    notes = "".join(f"{k}: {_describe(v)}\n" for k, v in (extra or {}).items())
    return preamble + body + notes


def _describe(v: Any) -> str:
    if isinstance(v, float):
        return _fmt(v)
    if isinstance(v, list):
        return "(" + ", ".join(_describe(x) for x in v) + ")"
    return str(v)


def cmd_hom(args) -> tuple[dict, list, list, dict | None]:
    spec = resolve_beamsplitter(args.t, args.r)
    occ = parse_occupation(args.input)
    config = {"command": "hom", "t": spec.t, "r": spec.r, "input": occ.to_json()}
    dist = hom_distribution(spec, occ)
    rows = [[str(o), float(p)] for o, p in dist.items()]
    return config, ["occupation", "probability"], rows, None


def cmd_amplitude(args):
    config: dict = {"command": "amplitude"}
    u = _resolve_unitary(args, config)
    inp, out = parse_occupation(args.input), parse_occupation(args.to)
    kind = ParticleKind.parse(args.kind)
    config.update(input=inp.to_json(), to=out.to_json(), kind=kind.value)
    amp = transition_amplitude(u, inp, out, kind)
    rows = [[str(inp), str(out), amp.real, amp.imag, abs(amp) ** 2]]
    return config, ["input", "output", "re", "im", "probability"], rows, None


def cmd_bunching(args):
    config: dict = {"command": "bunching"}
    u = _resolve_unitary(args, config)
    config.update(inputs=list(args.inputs), target=args.target)
    ratio = bunching_enhancement(u, args.inputs, args.target)
    m = len(args.inputs)
    rows = [[m, args.target, ratio, float(math.factorial(m))]]
    return config, ["particles", "target", "enhancement", "factorial"], rows, None


def cmd_thermalize(args):
    if args.steps < 1:
        raise InvalidArgumentError("--steps must be >= 1")
    if args.modes < 2:
        raise InvalidArgumentError("--modes must be >= 2")
    config: dict = {"command": "thermalize", "steps": args.steps, "modes": args.modes}
    if args.matrix:
        config["matrix"] = args.matrix
        u = load_unitary(args.matrix)
        if u.n != args.modes:
            raise InvalidArgumentError(f"matrix has {u.n} modes but --modes is {args.modes}")
    elif args.modes == 2:
        u = beamsplitter()
        config["unitary"] = "beamsplitter-50/50"
    else:
        u = fourier_unitary(args.modes)
        config["unitary"] = f"fourier-{args.modes}"
    if len(args.initial) != 2:
        raise InvalidArgumentError("--initial needs two probabilities: P_same,P_diff")
    initial = ProbabilityVector(("same", "diff"), args.initial)
    config["initial"] = [float(x) for x in initial.probs]
    t = derive_transfer_matrix(u, same_vs_different(args.modes))
    pi = steady_state(t)
    rows = [[k, p[0], p[1], dist] for k, p, dist in convergence_trace(t, initial, args.steps)]
    extra = {
        "transfer_matrix": t.entries.tolist(),
        "steady_state": [float(x) for x in pi.probs],
    }
    return config, ["step", "P_same", "P_diff", "l1_distance_to_steady"], rows, extra


def cmd_fixedpoint(args):
    if args.dim < 2:
        raise InvalidArgumentError("--dim must be >= 2")
    phases = args.phases if args.phases is not None else [float(k) for k in range(args.dim)]
    if len(phases) != args.dim:
        raise InvalidArgumentError(f"--phases needs {args.dim} values, got {len(phases)}")
    config = {"command": "fixedpoint", "dim": args.dim, "phases": phases, "basis": args.basis}
    w = fourier_unitary(args.dim) if args.basis == "fourier" else SingleParticleUnitary(np.eye(args.dim))
    report = competing_channel_fixed_point(phase_unitary(phases), w, args.dim)
    diag = np.real(np.diag(report.fixed_point.matrix))
    rows = [[k, float(p)] for k, p in enumerate(diag)]
    extra = {
        "multiplicity": report.multiplicity,
        "unique": report.is_unique,
        "distance_from_maximally_mixed": report.distance_from_maximally_mixed(),
        "overlap_condition": report.overlap_condition,
        "min_overlap": report.min_overlap,
    }
    return config, ["index", "diagonal"], rows, extra


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--output", help="write to this file instead of stdout")

    bs = argparse.ArgumentParser(add_help=False)
    bs.add_argument("--t", type=float, help="transmission amplitude (default 1/sqrt(2))")
    bs.add_argument("--r", type=float, help="reflection amplitude (default 1/sqrt(2))")

    source = argparse.ArgumentParser(add_help=False, parents=[bs])
    source.add_argument("--matrix", help="JSON unitary file {n, rows: [[[re, im], ...], ...]}")
    source.add_argument("--fourier", type=int, metavar="N", help="use the N-mode discrete Fourier unitary")

    parser = _ArgumentParser(prog="fockstat", description="Identical-particle linear optics and thermalization.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("hom", parents=[common, bs], help="two-mode beamsplitter output statistics")
    p.add_argument("--input", default="1,1", help="input occupation, e.g. 1,1")
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("amplitude", parents=[common, source], help="single transition amplitude")
    p.add_argument("--input", required=True)
    p.add_argument("--to", required=True, help="output occupation")
    p.add_argument("--kind", choices=("boson", "fermion"), default="boson")
    p.set_defaults(func=cmd_amplitude)

    p = sub.add_parser("bunching", parents=[common, source], help="bosonic/classical bunching ratio")
    p.add_argument("--inputs", type=_int_list, default=[0, 1], help="distinct input modes, e.g. 0,1,2")
    p.add_argument("--target", type=int, default=0)
    p.set_defaults(func=cmd_bunching)

    p = sub.add_parser("thermalize", parents=[common], help="iterate the same/diff Markov map")
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--initial", type=_float_list, default=[0.0, 1.0], help="P_same,P_diff")
    p.add_argument("--modes", type=int, default=2)
    p.add_argument("--matrix", help="JSON unitary file overriding the default unitary")
    p.set_defaults(func=cmd_thermalize)

    p = sub.add_parser("fixedpoint", parents=[common], help="fixed point of competing channels")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--phases", type=_float_list, default=None, help="energy-step phases (default 0,1,...)")
    p.add_argument("--basis", choices=("fourier", "identity"), default="fourier")
    p.set_defaults(func=cmd_fixedpoint)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config, header, rows, extra = args.func(args)
    except NumericalContractError as exc:
        print(f"fockstat: numerical contract violated: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (FockStatError, ValueError, OSError) as exc:
        print(f"fockstat: error: {exc}", file=sys.stderr)
        return EXIT_ARGUMENT
    config["format"] = args.format
    if args.output:
        text = render(config, header, rows, extra, args.format, styled=False)
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        styled = "NO_COLOR" not in os.environ and sys.stdout.isatty()
        sys.stdout.write(render(config, header, rows, extra, args.format, styled))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
