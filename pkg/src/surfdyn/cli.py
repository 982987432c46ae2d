"""Command-line entry point: ``surfdyn <command> ...``.

Exit codes: 0 success, 1 input or usage error, 2 genericity failure,
3 degree budget truncation (partial output is still printed), 4 a gallery
comparison failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from . import gallery
from .dynamics import (
    FiberCountConfig,
    analyze,
    degree_sequence,
    family_scan,
    involution_invariance_scan,
    topological_degree,
)
from .errors import (
    GenericityError,
    InputError,
    PreconditionError,
    ResourceError,
    SurfDynError,
    UnsupportedConeError,
)
from .mapio import CSV_COLUMNS, MapFile, degree_sequence_rows, emit_report, load_map, parse_rational
from .ratmap import DEFAULT_DEGREE_BUDGET
from .spectral import PullbackMatrix, analyze_matrix, krein_rutman_check, rank_and_trace, result_to_dict
from .surface import NSLattice

EXIT_OK, EXIT_INPUT, EXIT_GENERICITY, EXIT_TRUNCATED, EXIT_GOLDEN = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    # usage errors share the input-error exit code
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _tolerance(text):
    try:
        v = Fraction(Decimal(text))
    except (InvalidOperation, ValueError):
        try:
            v = parse_rational(text)
        except InputError:
            raise argparse.ArgumentTypeError(f"bad tolerance {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def _values(text):
    vals = [t for t in (s.strip() for s in text.split(",")) if t]
    if not vals:
        raise argparse.ArgumentTypeError("empty list of values")
    try:
        return [parse_rational(v) for v in vals]
    except InputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _default_seed():
    raw = os.environ.get("SURFDYN_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"SURFDYN_SEED must be an integer, got {raw!r}") from None


def build_parser(default_seed: int = 0) -> argparse.ArgumentParser:
    p = _Parser(prog="surfdyn", description="Dynamical invariants of rational surface maps.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def seeded(sp):
        sp.add_argument("--trials", type=int, default=3)
        sp.add_argument("--seed", type=int, default=default_seed)
        sp.add_argument("--height", type=int, default=100,
                        help="coefficient height of random shears and targets")

    a = sub.add_parser("analyze", help="full report for one map file")
    a.add_argument("path")
    a.add_argument("--n", type=_positive, default=5)
    seeded(a)
    a.add_argument("--tolerance", type=_tolerance, default=Fraction(1, 10**12))
    a.add_argument("--budget", type=_positive, default=DEFAULT_DEGREE_BUDGET)
    a.add_argument("--json", action="store_true")

    it = sub.add_parser("iterate", help="degree sequence as CSV")
    it.add_argument("path")
    it.add_argument("--n", type=_positive, default=5)
    it.add_argument("--csv", dest="out", default=None, help="output file (default stdout)")
    it.add_argument("--budget", type=_positive, default=DEFAULT_DEGREE_BUDGET)

    fc = sub.add_parser("fiber-count", help="topological degree")
    fc.add_argument("path")
    seeded(fc)

    g = sub.add_parser("gallery", help="run built-in examples against golden values")
    g.add_argument("--name", default="all")
    g.add_argument("--eps", type=parse_rational, default=Fraction(2))
    g.add_argument("--seed", type=int, default=default_seed)
    g.add_argument("--json", action="store_true")

    fs = sub.add_parser("family-scan", help="scan a parameter of a P1xP1 map file")
    fs.add_argument("path")
    fs.add_argument("--param", required=True)
    fs.add_argument("--values", type=_values, required=True)
    fs.add_argument("--deg-top", action="store_true")
    seeded(fs)
    fs.add_argument("--json", action="store_true")

    ic = sub.add_parser("invariance-check", help="compare f o iota with f for Moebius involutions")
    ic.add_argument("path")
    ic.add_argument("--family", choices=("reciprocal", "scaling"), required=True)
    ic.add_argument("--values", type=_values, required=True)
    ic.add_argument("--epsilon", type=parse_rational, default=None)
    ic.add_argument("--seed", type=int, default=default_seed)
    ic.add_argument("--json", action="store_true")

    sp = sub.add_parser("spectral", help="spectral data of a matrix on an abstract lattice")
    sp.add_argument("lattice", help="lattice JSON file")
    sp.add_argument("--matrix", required=True, help='JSON matrix, e.g. "[[2,2],[2,2]]"')
    sp.add_argument("--tolerance", type=_tolerance, default=Fraction(1, 10**12))
    return p


def _out(text: str):
    sys.stdout.write(text)
    sys.stdout.flush()


def _cfg(args) -> FiberCountConfig:
    return FiberCountConfig(trials=args.trials, rng_seed=args.seed, height=args.height)


def cmd_analyze(args) -> int:
    report = analyze(load_map(args.path), args.n, _cfg(args), args.tolerance, args.budget)
    _out(emit_report(report, "json" if args.json else "table").decode("ascii"))
    if report.truncated:
        print("degree budget exceeded; sequence truncated", file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_iterate(args) -> int:
    f = load_map(args.path)
    seq = degree_sequence(f, args.n, args.budget)
    rows = degree_sequence_rows(f.surface, seq.to_list())
    lines = [",".join(CSV_COLUMNS)] + [",".join(str(v) for v in r) for r in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    else:
        _out(text)
    if seq.truncated:
        print(f"degree budget exceeded after n = {len(seq.entries)}", file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def cmd_fiber_count(args) -> int:
    _out(f"{topological_degree(load_map(args.path), _cfg(args))}\n")
    return EXIT_OK


def cmd_gallery(args) -> int:
    names = gallery.ENTRIES if args.name == "all" else (args.name,)
    cfg = FiberCountConfig(rng_seed=args.seed)
    results = [gallery.run_entry(n, cfg, args.eps) for n in names]
    if args.json:
        _out(json.dumps([r.to_dict() for r in results], indent=2) + "\n")
    else:
        _out("".join(c.line(r.entry) + "\n" for r in results for c in r.checks))
    return EXIT_OK if all(r.passed for r in results) else EXIT_GOLDEN


def _table(rows, keys) -> str:
    cells = [[str(k) for k in keys]] + [[json.dumps(r.get(k)) if not isinstance(r.get(k), str)
                                         else r.get(k) for k in keys] for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(keys))]
    return "".join("  ".join(c[i].ljust(widths[i]) for i in range(len(keys))).rstrip() + "\n"
                   for c in cells)


def cmd_family_scan(args) -> int:
    mf = MapFile.read(args.path)
    if args.param not in mf.parameters:
        raise InputError(f"map file has no parameter {args.param!r}")
    scan = family_scan(mf, args.param, args.values, args.deg_top, _cfg(args))
    if args.json:
        _out(json.dumps(scan, indent=2) + "\n")
    else:
        keys = ["value", "degenerate", "base_scheme_length", "matrix"]
        if args.deg_top:
            keys.append("deg_top")
        _out(_table(scan["rows"], keys))
        _out(f"length_constant {json.dumps(scan['length_constant'])}\n"
             f"matrix_constant {json.dumps(scan['matrix_constant'])}\n")
    return EXIT_OK


def cmd_invariance_check(args) -> int:
    rows = involution_invariance_scan(load_map(args.path), args.family, args.values,
                                      epsilon=args.epsilon, seed=args.seed)
    if args.json:
        _out(json.dumps(rows, indent=2) + "\n")
    else:
        keys = ["candidate", "maps_equal", "oracle_equal"]
        if any("obstruction" in r for r in rows):
            keys.append("obstruction")
        _out(_table(rows, keys))
    return EXIT_OK


def cmd_spectral(args) -> int:
    lattice = NSLattice.read(args.lattice)
    try:
        entries = json.loads(args.matrix)
    except json.JSONDecodeError as exc:
        raise InputError(f"matrix is not valid JSON: {exc.msg}") from None
    T = PullbackMatrix(entries, lattice)
    res = analyze_matrix(T, args.tolerance)
    doc = result_to_dict(res)
    rank, trace = rank_and_trace(T)
    doc.update(rank=rank, trace=trace, krein_rutman=krein_rutman_check(T, args.tolerance))
    _out(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "iterate": cmd_iterate,
    "fiber-count": cmd_fiber_count,
    "gallery": cmd_gallery,
    "family-scan": cmd_family_scan,
    "invariance-check": cmd_invariance_check,
    "spectral": cmd_spectral,
}


def main(argv=None) -> int:
    try:
        seed = _default_seed()
    except InputError as exc:
        print(f"surfdyn: {exc}", file=sys.stderr)
        return EXIT_INPUT
    args = build_parser(seed).parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except GenericityError as exc:
        print(f"surfdyn: genericity failure: {exc}", file=sys.stderr)
        return EXIT_GENERICITY
    except ResourceError as exc:
        print(f"surfdyn: {exc}", file=sys.stderr)
        return EXIT_TRUNCATED
    except (InputError, PreconditionError, UnsupportedConeError) as exc:
        print(f"surfdyn: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError) as exc:
        print(f"surfdyn: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SurfDynError as exc:
        print(f"surfdyn: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
