"""Command-line front end.

Exit codes distinguish three outcomes so shell pipelines can branch:

* 0 -- success
* 1 -- domain or parse error (bad flag, malformed config, invalid vector)
* 2 -- a negative mathematical result: a contractivity counterexample, an
  n0 search that hit its cap, an iteration that stopped on max_iter, or a
  decomposition whose invariance residual exceeds the threshold

JSON output is deterministic for a fixed config and seed apart from the
``timestamp`` field.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from typing import Sequence

from .decompose import parse_function, verify_decomposition
from .errors import MeanTypeError, NotFoundWithinCap, ParseError
from .invariant import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    MAX_ITER_REACHED,
    InvariantMean,
    gauss_iterate,
    invariance_residual,
    uniqueness_probe,
)
from .mapping import (
    DEFAULT_CAP,
    IterationTrace,
    find_n0,
    load_mapping,
    probe_contractivity,
)
from .means import REALS, eval_mean, parse_interval, parse_mean

SEED_ENV_VAR = "MEANTYPE_SEED"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2


class _CLIError(Exception):
    """Usage error surfaced by argparse; mapped to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; this package reserves 2
    # for negative mathematical results, so route usage errors to 1.
    def error(self, message):
        raise _CLIError(message)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR, "42")
    try:
        return int(raw)
    except ValueError:
        raise _CLIError(f"environment variable {SEED_ENV_VAR}={raw!r} is not an integer")


def parse_vector(text: str) -> tuple[float, ...]:
    """Comma-separated decimals; scientific notation accepted."""
    tokens = [t.strip() for t in text.split(",")]
    values = []
    for tok in tokens:
        if not tok:
            raise ParseError(f"empty component in vector {text!r}", token=tok)
        try:
            values.append(float(tok))
        except ValueError:
            raise ParseError(f"bad vector component {tok!r}", token=tok) from None
    return tuple(values)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="meantype",
        description="Mean-type mappings: Gauss iteration to the invariant mean, "
                    "contractivity probes, and invariance decomposition.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, mapping=True, vector=False, samples=False, iteration=False,
                   cap=False):
        if mapping:
            p.add_argument("--mapping", required=True, metavar="FILE",
                           help="mapping config file (keys p, domain, components)")
        if vector:
            p.add_argument("--vector", required=True, metavar="X1,...,XP",
                           help="comma-separated coordinates")
        if samples:
            p.add_argument("--samples", type=int, default=1000, metavar="N")
            p.add_argument("--seed", type=int, default=_default_seed(), metavar="S")
        if iteration:
            p.add_argument("--tol", type=float, default=DEFAULT_TOL, metavar="T")
            p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER, metavar="N")
            p.add_argument("--readout", choices=["mid", "min", "max", "first"],
                           default="mid")
            p.add_argument("--relative", action="store_true",
                           help="stop on diameter < tol * |midpoint| instead of absolute")
        if cap:
            p.add_argument("--cap", type=int, default=DEFAULT_CAP, metavar="N")
        p.add_argument("--output", choices=["human", "json", "csv"], default="human")

    p = sub.add_parser("mean-eval", help="evaluate a single catalog mean")
    p.add_argument("--mean", required=True, metavar="SPEC",
                   help="canonical mean string, e.g. power:0.5")
    p.add_argument("--vector", required=True, metavar="X1,...,XP")
    p.add_argument("--domain", default=None, metavar="INTERVAL",
                   help="bracket notation, e.g. '(0, inf)'; default the whole line")
    p.add_argument("--output", choices=["human", "json", "csv"], default="human")

    p = sub.add_parser("map-apply", help="apply a mapping to a vector once")
    add_common(p, vector=True)

    p = sub.add_parser("map-iterate", help="iterate a mapping, emitting the trace")
    add_common(p, vector=True)
    p.add_argument("--steps", type=int, default=10, metavar="N",
                   help="number of applications (default 10)")

    p = sub.add_parser("contractive-probe",
                       help="search samples for a contractivity counterexample")
    add_common(p, samples=True)

    p = sub.add_parser("n0", help="smallest n with diam(M^n(v)) < diam(v)")
    add_common(p, vector=True, cap=True)

    p = sub.add_parser("invariant", help="Gauss-iterate to the invariant mean value")
    add_common(p, vector=True, iteration=True)
    p.add_argument("--trace", action="store_true", help="attach the full trace")

    p = sub.add_parser("residual",
                       help="max |K(M(v)) - K(v)| over samples (K defaults to the "
                            "mapping's own invariant mean)")
    add_common(p, samples=True, iteration=True)
    p.add_argument("--mean", default=None, metavar="SPEC",
                   help="use this catalog mean as K instead")

    p = sub.add_parser("uniqueness",
                       help="max disagreement of the invariant mean across readouts")
    add_common(p, samples=True, iteration=True)

    p = sub.add_parser("decompose",
                       help="check F = phi o K for a catalog function F")
    add_common(p, samples=True, iteration=True)
    p.add_argument("--function", required=True, metavar="F",
                   help="product | sum | coord:<k> | const:<c> | mean:<spec> | "
                        "<unary>@<F>")
    p.add_argument("--invariance-threshold", type=float, default=1e-8, metavar="T",
                   help="invariance residual above this exits 2 (default 1e-8)")

    return parser


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def _emit(args, doc: dict, human_lines: list[str], trace: IterationTrace | None = None) -> None:
    if args.output == "json":
        doc = {**doc, "timestamp": _timestamp()}
        print(json.dumps(doc, indent=2))
    elif args.output == "csv":
        if trace is None:
            raise _CLIError("csv output is only available for trace-producing "
                            "commands (map-iterate, invariant --trace)")
        sys.stdout.write(trace.to_csv())
    else:
        for line in human_lines:
            print(line)


def _trace_lines(trace: IterationTrace) -> list[str]:
    lines = []
    for s in trace.steps:
        coords = ", ".join(repr(x) for x in s.vector)
        lines.append(f"step {s.step}: ({coords})  diameter = {s.diameter!r}")
    return lines


def _fmt_vec(v: Sequence[float]) -> str:
    return ", ".join(repr(x) for x in v)


# ---------------------------------------------------------------------------
# Command implementations
# ---------------------------------------------------------------------------

def _cmd_mean_eval(args) -> int:
    vector = parse_vector(args.vector)
    domain = parse_interval(args.domain) if args.domain else REALS
    spec = parse_mean(args.mean, len(vector))
    value = eval_mean(spec, vector, domain)
    doc = {
        "command": "mean-eval",
        "mean": spec.canonical(),
        "domain": str(domain),
        "vector": list(vector),
        "value": value,
    }
    _emit(args, doc, [f"value = {value!r}"])
    return EXIT_OK


def _cmd_map_apply(args) -> int:
    mapping = load_mapping(args.mapping)
    vector = parse_vector(args.vector)
    result = mapping.apply(vector)
    doc = {
        "command": "map-apply",
        "mapping": mapping.describe(),
        "vector": list(vector),
        "result": list(result),
    }
    _emit(args, doc, [f"result = ({_fmt_vec(result)})"])
    return EXIT_OK


def _cmd_map_iterate(args) -> int:
    mapping = load_mapping(args.mapping)
    vector = parse_vector(args.vector)
    if args.steps < 0:
        raise _CLIError(f"--steps must be >= 0, got {args.steps}")
    trace = mapping.iterate(vector, args.steps)
    doc = {
        "command": "map-iterate",
        "steps": args.steps,
        "trace": trace.to_json_dict(),
    }
    _emit(args, doc, _trace_lines(trace), trace=trace)
    return EXIT_OK


def _cmd_contractive_probe(args) -> int:
    mapping = load_mapping(args.mapping)
    verdict = probe_contractivity(mapping, args.samples, args.seed)
    doc = {
        "command": "contractive-probe",
        "mapping": mapping.describe(),
        "samples": args.samples,
        "seed": args.seed,
        "verdict": "counterexample" if verdict.found else "no_counterexample",
        "witness": list(verdict.counterexample) if verdict.found else None,
        "samples_tested": verdict.samples_tested,
        "skipped": verdict.skipped,
    }
    lines = [f"{verdict} (tested {verdict.samples_tested}, skipped {verdict.skipped})"]
    _emit(args, doc, lines)
    return EXIT_NEGATIVE if verdict.found else EXIT_OK


def _cmd_n0(args) -> int:
    mapping = load_mapping(args.mapping)
    vector = parse_vector(args.vector)
    try:
        n0 = find_n0(mapping, vector, args.cap)
    except NotFoundWithinCap as exc:
        doc = {
            "command": "n0",
            "mapping": mapping.describe(),
            "vector": list(vector),
            "cap": args.cap,
            "status": "not_found_within_cap",
            "start_diameter": exc.trace.steps[0].diameter,
            "final_diameter": exc.trace.last.diameter,
        }
        _emit(args, doc, [str(exc)])
        return EXIT_NEGATIVE
    doc = {
        "command": "n0",
        "mapping": mapping.describe(),
        "vector": list(vector),
        "cap": args.cap,
        "n0": n0,
    }
    _emit(args, doc, [f"n0 = {n0}"])
    return EXIT_OK


def _cmd_invariant(args) -> int:
    mapping = load_mapping(args.mapping)
    vector = parse_vector(args.vector)
    est = gauss_iterate(
        mapping, vector,
        tol=args.tol, max_iter=args.max_iter,
        readout=args.readout, relative=args.relative,
        keep_trace=args.trace,
    )
    doc = {
        "command": "invariant",
        "mapping": mapping.describe(),
        "v": list(vector),
        "tol": args.tol,
        "max_iter": args.max_iter,
        "readout": args.readout,
        "value": est.value,
        "steps": est.steps,
        "final_diameter": est.final_diameter,
        "status": est.status,
    }
    lines = []
    if est.trace is not None:
        doc["trace"] = est.trace.to_json_dict()
        lines.extend(_trace_lines(est.trace))
    lines += [
        f"value = {est.value!r}",
        f"steps = {est.steps}",
        f"final_diameter = {est.final_diameter!r}",
        f"status = {est.status}",
    ]
    _emit(args, doc, lines, trace=est.trace)
    return EXIT_NEGATIVE if est.status == MAX_ITER_REACHED else EXIT_OK


def _cmd_residual(args) -> int:
    mapping = load_mapping(args.mapping)
    if args.mean:
        spec = parse_mean(args.mean, mapping.p)
        k = lambda v: eval_mean(spec, v, mapping.domain)
        k_name = spec.canonical()
    else:
        k = InvariantMean(mapping, tol=args.tol, max_iter=args.max_iter,
                          readout=args.readout, relative=args.relative)
        k_name = "invariant"
    residual = invariance_residual(k, mapping, args.samples, args.seed)
    doc = {
        "command": "residual",
        "mapping": mapping.describe(),
        "mean": k_name,
        "samples": args.samples,
        "seed": args.seed,
        "residual": residual,
    }
    _emit(args, doc, [f"residual = {residual!r}"])
    return EXIT_OK


def _cmd_uniqueness(args) -> int:
    mapping = load_mapping(args.mapping)
    readouts = ("mid", "min", "max")
    means = {
        r: InvariantMean(mapping, tol=args.tol, max_iter=args.max_iter, readout=r,
                         relative=args.relative)
        for r in readouts
    }
    worst = 0.0
    for i, r1 in enumerate(readouts):
        for r2 in readouts[i + 1:]:
            diff = uniqueness_probe(means[r1], means[r2], mapping.domain, mapping.p,
                                    args.samples, args.seed)
            worst = max(worst, diff)
    doc = {
        "command": "uniqueness",
        "mapping": mapping.describe(),
        "readouts": list(readouts),
        "samples": args.samples,
        "seed": args.seed,
        "tol": args.tol,
        "max_difference": worst,
    }
    _emit(args, doc, [f"max_difference = {worst!r} (readouts {', '.join(readouts)})"])
    return EXIT_OK


def _cmd_decompose(args) -> int:
    mapping = load_mapping(args.mapping)
    f = parse_function(args.function, mapping)
    report = verify_decomposition(
        f, mapping,
        tol=args.tol, sample_count=args.samples, seed=args.seed,
        max_iter=args.max_iter,
    )
    not_invariant = report.invariance_residual > args.invariance_threshold
    doc = {
        "command": "decompose",
        **report.to_json_dict(),
        "invariance_threshold": args.invariance_threshold,
        "invariant_within_threshold": not not_invariant,
    }
    lines = [
        f"fixture = {report.fixture}",
        f"invariance_residual = {report.invariance_residual!r}",
        f"decomposition_residual = {report.decomposition_residual!r}",
        f"K_steps = min {report.k_steps_min} / mean {report.k_steps_mean:.1f} / "
        f"max {report.k_steps_max}",
        f"max_iter_hits = {report.max_iter_hits}",
    ]
    if not_invariant:
        lines.append(
            f"invariance residual exceeds threshold {args.invariance_threshold!r}: "
            f"the function is not invariant under this mapping at that tolerance"
        )
    if report.max_iter_hits:
        lines.append("warning: some K computations stopped on max_iter; residuals "
                     "are diagnostic only")
    _emit(args, doc, lines)
    if not_invariant or report.max_iter_hits:
        return EXIT_NEGATIVE
    return EXIT_OK


_COMMANDS = {
    "mean-eval": _cmd_mean_eval,
    "map-apply": _cmd_map_apply,
    "map-iterate": _cmd_map_iterate,
    "contractive-probe": _cmd_contractive_probe,
    "n0": _cmd_n0,
    "invariant": _cmd_invariant,
    "residual": _cmd_residual,
    "uniqueness": _cmd_uniqueness,
    "decompose": _cmd_decompose,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except MeanTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
