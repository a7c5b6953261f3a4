"""``polybound``: loop bounds for a toy-ISA program.

Exit status is 0 on success, 2 on a parse error, 3 for an irreducible
control-flow graph and 4 when the iteration cap stops the analysis.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import List, Optional

from .fixpoint import analyze
from .loopbound import LoopCounters, format_bound, report
from .program import IrreducibleError, ParseError, load
from .state import dump

EXIT_PARSE, EXIT_IRREDUCIBLE, EXIT_CAP = 2, 3, 4


def _num(x: Fraction):
    return x.numerator if x.denominator == 1 else str(x)


def _relation_text(rel) -> str:
    if rel is None:
        return "none"
    a, b, c = rel
    return f"{_num(a)}*inner + {_num(b)}*outer <= {_num(c)}"


def _bound_value(b):
    return b if isinstance(b, int) else format_bound(b)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polybound", description=__doc__.splitlines()[0])
    ap.add_argument("file", help="assembly source")
    ap.add_argument("--format", choices=["text", "json", "structured"], default="text",
                    help="json and structured are synonyms")
    ap.add_argument("--dump-states", action="store_true", help="print the state of every edge")
    ap.add_argument("--widening-delay", type=int, default=2, metavar="N")
    ap.add_argument("--guarded-widenings", type=int, default=8, metavar="N",
                    help="widenings per header that keep stable octagonal bounds (0 = plain)")
    ap.add_argument("--no-narrowing", action="store_true")
    ap.add_argument("--max-iterations", type=int, default=None, metavar="N",
                    help="worklist cap (default 10 x number of edges)")
    ap.add_argument("--time", action="store_true", help="report wall-clock milliseconds")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.file) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"polybound: {exc}", file=sys.stderr)
        return 1
    try:
        cfg, loops = load(text)
    except ParseError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except IrreducibleError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_IRREDUCIBLE

    t0 = time.perf_counter()
    result = analyze(cfg, loops, LoopCounters(cfg, loops), widening_delay=args.widening_delay,
                     guarded_widenings=args.guarded_widenings, narrowing=not args.no_narrowing, max_iterations=args.max_iterations)
    bounds = report(result)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0

    structured = args.format != "text"
    if structured:
        doc = {
            "program": args.file,
            "loops": [{"header": b.loop.header, "label": b.name,
                       "max": _bound_value(b.max_bound), "total": _bound_value(b.total_bound),
                       "relation": None if b.relation is None else [_num(x) for x in b.relation]}
                      for b in bounds],
            "iterations": result.iterations,
            "stabilized": result.stabilized,
            # wall clock varies between runs; omitted unless asked for
            "elapsed_ms": round(elapsed_ms, 3) if args.time else None,
        }
        if args.dump_states:
            doc["states"] = {cfg.edge_name(e): dump(result.state(e)) for e in cfg.edges}
        print(json.dumps(doc, indent=2))
    else:
        if not loops:
            print("no loops found")
        for b in bounds:
            line = (f"{b.name}: max={format_bound(b.max_bound)} total={format_bound(b.total_bound)}")
            if b.loop.parent is not None:
                line += f" relation={_relation_text(b.relation)}"
            print(line)
            for note in b.notes:
                print(f"  note: {note}")
        if args.dump_states:
            for e in cfg.edges:
                print(f"== {cfg.edge_name(e)}")
                print(dump(result.state(e)))
        if args.time:
            print(f"elapsed: {elapsed_ms:.1f} ms, {result.iterations} iterations")

    if not result.stabilized:
        print(f"polybound: iteration cap reached after {result.iterations} iterations",
              file=sys.stderr)
        return EXIT_CAP
    return 0


if __name__ == "__main__":
    sys.exit(main())
