"""``pnta`` command line.

Exit codes: 0 property true, 1 property false, 2 usage or parse error,
3 engine limitation.
"""

from __future__ import annotations

import argparse
import random
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .abstraction import abstract_spec
from .checker import ENGINES, TooFewInstances, check
from .cutoff import compute_cutoff, enumerate_sizes, parameterized_check
from .lemmalab import SUITES, GenParams, run_suite
from .logic import UnsupportedQuantifierOperator
from .model import ModelError
from .semantics import EngineLimitation, InvalidModel, Network, replay, random_run
from .textio import ParseError, emit_report, emit_trace, load_model, parse_model, parse_property, print_model

EXIT_TRUE, EXIT_FALSE, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


def shipped_models() -> list[str]:
    root = resources.files("pnta") / "models"
    return sorted(p.name[: -len(".pnta")] for p in root.iterdir() if p.name.endswith(".pnta"))


def resolve_model(name: str):
    """A model path, or the name of a shipped model (``fischer_reduced``)."""
    path = Path(name)
    if path.exists():
        return load_model(path)
    stem = name[: -len(".pnta")] if name.endswith(".pnta") else name
    res = resources.files("pnta") / "models" / f"{stem}.pnta"
    if res.is_file():
        return parse_model(res.read_text(encoding="utf-8"))
    raise FileNotFoundError(f"no model file {name!r} (shipped models: {', '.join(shipped_models())})")


def read_property(text: str, spec):
    path = Path(text)
    if len(text) < 256 and path.is_file():
        text = path.read_text(encoding="utf-8")
    return parse_property(text.strip(), spec)


def parse_sizes(text: str) -> tuple:
    try:
        sizes = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}")
    if any(n < 0 for n in sizes):
        raise argparse.ArgumentTypeError("sizes must be non-negative")
    return sizes


def _print_verdict(v, out) -> None:
    print(f"verdict: {'true' if v.truth else 'false'}", file=out)
    if v.formula is not None and not v.truth:
        assignment = ", ".join(f"{k}={i}" for k, i in v.formula.assignment)
        print(f"failing conjunct: {v.formula}" + (f" [{assignment}]" if assignment else ""), file=out)
    print(f"engine: {v.engine}", file=out)
    print(f"states: {v.stats.get('states', 0)}", file=out)
    print(f"time: {v.stats.get('time', 0.0):.2f}s", file=out)
    if v.witness is not None:
        print("witness:" if v.truth else "counterexample:", file=out)
        out.write(emit_trace(v.witness))


def cmd_check(args, out) -> int:
    spec = resolve_model(args.model)
    prop = read_property(args.prop, spec)
    if args.sizes is not None:
        v = check(spec, args.sizes, prop, engine=args.engine, imitl_strict=args.imitl_strict)
        print(f"property: {prop}", file=out)
        print(f"sizes: ({','.join(map(str, args.sizes))})", file=out)
        _print_verdict(v, out)
        return EXIT_TRUE if v.truth else EXIT_FALSE

    def progress(sizes, v):
        if args.verbose:
            print(f"# {sizes}: {'true' if v.truth else 'false'} ({v.stats.get('time', 0.0):.2f}s)",
                  file=sys.stderr, flush=True)

    pv = parameterized_check(spec, prop, engine=args.engine, fail_fast=args.fail_fast,
                             imitl_strict=args.imitl_strict, progress=progress)
    out.write(emit_report(pv))
    cex = pv.counterexample
    if cex is not None and cex.witness is not None:
        print(f"counterexample at {pv.witness_sizes}:", file=out)
        out.write(emit_trace(cex.witness))
    return EXIT_TRUE if pv.truth else EXIT_FALSE


def cmd_cutoff(args, out) -> int:
    spec = resolve_model(args.model)
    prop = read_property(args.prop, spec)
    cut = compute_cutoff(spec, prop)
    print(f"property: {prop}", file=out)
    print(cut.provenance(), file=out)
    sizes = enumerate_sizes(cut, prop)
    print(f"sizes to check: {len(sizes)} ({', '.join(str(s) for s in sizes)})", file=out)
    return EXIT_TRUE


def cmd_simulate(args, out) -> int:
    spec = resolve_model(args.model)
    net = Network(spec, args.sizes)
    run = random_run(net, args.steps, random.Random(args.seed))
    out.write(emit_trace(run))
    final = "deadlocked" if net.is_deadlocked(run.final) else "live"
    print(f"classification: {run.kind.value} (final configuration {final})", file=out)
    print(f"replay: {'ok' if replay(run) else 'FAILED'}", file=out)
    return EXIT_TRUE


def cmd_abstract(args, out) -> int:
    spec = resolve_model(args.model)
    var = args.var
    if var not in spec.variables:
        raise ValueError(f"model declares no variable {var!r}")
    text = print_model(abstract_spec(spec, args.template, var, prune=args.prune))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_TRUE


def cmd_lemma(args, out) -> int:
    params = GenParams(seed=args.seed)
    report = run_suite(args.suite, params, args.trials, dump=args.dump)
    out.write(report.text())
    return EXIT_TRUE if not report.violations else EXIT_FALSE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pnta", description="Parameterized timed model checking with conjunctive guards.")
    ap.add_argument("--version", action="version", version=f"pnta {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="verify a property at fixed sizes or up to the cutoff")
    c.add_argument("model", help="model file or shipped model name")
    c.add_argument("prop", help="property text or a file holding it")
    c.add_argument("--engine", choices=ENGINES, default="zone")
    c.add_argument("--sizes", type=parse_sizes, help="comma-separated instance counts")
    c.add_argument("--fail-fast", action="store_true", help="stop the sweep at the first false size")
    c.add_argument("--imitl-strict", action="store_true", help="reject equality time bounds")
    c.add_argument("-v", "--verbose", action="store_true", help="report progress per size on stderr")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("cutoff", help="print the cutoff vector and where it comes from")
    c.add_argument("model")
    c.add_argument("prop")
    c.set_defaults(func=cmd_cutoff)

    c = sub.add_parser("simulate", help="random run of a fixed instantiation")
    c.add_argument("model")
    c.add_argument("--sizes", type=parse_sizes, required=True)
    c.add_argument("--steps", type=int, default=20)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_simulate)

    c = sub.add_parser("abstract", help="apply the PID abstraction to one template")
    c.add_argument("model")
    c.add_argument("--template", required=True)
    c.add_argument("--var", required=True)
    c.add_argument("--prune", action="store_true", help="drop unreachable product states")
    c.add_argument("-o", "--output", help="write the model here instead of stdout")
    c.set_defaults(func=cmd_abstract)

    c = sub.add_parser("lemma-test", help="randomized falsification of the cutoff lemmas")
    c.add_argument("--suite", choices=SUITES, required=True)
    c.add_argument("--trials", type=int, default=50)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--dump", help="directory for violation artifacts")
    c.set_defaults(func=cmd_lemma)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_TRUE
    try:
        return args.func(args, out)
    except EngineLimitation as e:
        print(f"pnta: engine limitation: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except ParseError as e:
        print(f"pnta: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidModel as e:
        print(f"pnta: invalid model:\n{e}", file=sys.stderr)
        return EXIT_USAGE
    except (UnsupportedQuantifierOperator, TooFewInstances, ModelError, ValueError, KeyError,
            IndexError, FileNotFoundError) as e:
        print(f"pnta: {e}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
