"""Command-line front end.

Reports go to stdout as JSON lines, artifacts to files (``-o``), logs to stderr.
Exit codes: 0 ok, 2 input error, 3 unsupported shape, 4 verification failed.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import circuits
from .corpus import FAMILIES, GenSpec, generate
from .errors import TreeSlpError, UnsupportedShapeError
from .grammar import format_tslp, grammar_depth, is_cnf, parse_tslp, tslp_depth, val
from .report import ALGOS, compress, run_report
from .trees import fcns_decode, fcns_encode, parse_term, print_term

log = logging.getLogger("treeslp")

EXIT_OK, EXIT_INPUT, EXIT_SHAPE, EXIT_VERIFY = 0, 2, 3, 4


class InputError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
        log.info("wrote %s", path)


def _emit(record: dict):
    print(json.dumps(record), flush=True)


def first_mismatch(a, b):
    """Preorder position of the first node where two trees differ, or None."""
    stack = [(0, 0)]
    pos = 0
    while stack:
        u, v = stack.pop()
        if a.labels[u] != b.labels[v] or len(a.children[u]) != len(b.children[v]):
            return pos
        pos += 1
        stack.extend(zip(reversed(a.children[u]), reversed(b.children[v])))
    return None


# -- commands -----------------------------------------------------------------------------

def cmd_compress(args) -> int:
    t = parse_term(_read(args.input), ranked=not args.unranked)
    if args.unranked:
        t = fcns_encode(t)
    if args.k is not None and args.algo == "treebisection":
        log.warning("--k is ignored by treebisection")
    g, rep = compress(t, args.algo, args.k)
    if args.output:
        _write(args.output, format_tslp(g))
    _emit(rep.__dict__)
    return EXIT_OK


def cmd_verify(args) -> int:
    t = parse_term(_read(args.tree))
    g = parse_tslp(_read(args.tslp))
    got = val(g)
    pos = first_mismatch(t, got)
    if pos is None:
        _emit({"verified": True, "n": t.size})
        return EXIT_OK
    _emit({"verified": False, "first_mismatch": pos})
    log.error("trees differ at preorder position %d", pos)
    return EXIT_VERIFY


def cmd_stats(args) -> int:
    g = parse_tslp(_read(args.tslp))
    cnf = is_cnf(g)
    _emit({"size": g.size, "depth": tslp_depth(g) if cnf else grammar_depth(g),
           "cnf": cnf, "nonterminals": len(g.rules), "max_nt_rank": g.max_rank})
    return EXIT_OK


def cmd_decompress(args) -> int:
    _write(args.output, print_term(val(parse_tslp(_read(args.tslp)))) + "\n")
    return EXIT_OK


def cmd_fcns(args) -> int:
    text = _read(args.input)
    t = fcns_decode(parse_term(text)) if args.decode else fcns_encode(parse_term(text, ranked=False))
    _write(args.output, print_term(t) + "\n")
    return EXIT_OK


def cmd_formula2circuit(args) -> int:
    f = parse_term(_read(args.input))
    c = circuits.formula_to_circuit(f, args.algo)
    if args.output:
        _write(args.output, circuits.format_circuit(c))
    record = {"n": f.size, "vars": c.nvars, "algo": args.algo, "gates": c.size, "depth": c.depth}
    code = EXIT_OK
    if args.check_random:
        verdict = circuits.check_equivalence(f, c, args.check_random, args.seed)
        record["verdict"] = str(verdict)
        if not verdict.equivalent:
            code = EXIT_VERIFY
    _emit(record)
    return code


def cmd_gen(args) -> int:
    obj = generate(GenSpec(args.family, args.n, args.sigma, args.seed))
    _write(args.output, (obj if isinstance(obj, str) else print_term(obj)) + "\n")
    return EXIT_OK


def cmd_report(args) -> int:
    sizes = args.sizes or [2 ** e for e in range(10, 17, 2)]
    paths = run_report(args.out_dir, sizes, args.algos, args.sigma, args.seed, not args.no_plots)
    for p in paths:
        log.info("wrote %s", p)
    with open(paths[1]) as fh:
        sys.stdout.write(fh.read())
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treeslp", description="Tree straight-line program toolkit.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    # accepted after the subcommand too; SUPPRESS keeps it from resetting the flag
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def sub_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    c = sub_parser("compress", help="compress a tree into a TSLP")
    c.add_argument("input", help="tree file, or - for stdin")
    c.add_argument("-o", "--output", help="write the TSLP here")
    c.add_argument("--algo", choices=ALGOS, default="combined")
    c.add_argument("--k", type=int, help="merge bound for bushrink/combined")
    c.add_argument("--unranked", action="store_true",
                   help="input is unranked; fcns-encode it first")
    c.set_defaults(func=cmd_compress)

    v = sub_parser("verify", help="check that a TSLP derives a tree")
    v.add_argument("tree")
    v.add_argument("tslp")
    v.set_defaults(func=cmd_verify)

    s = sub_parser("stats", help="size and depth of a TSLP")
    s.add_argument("tslp")
    s.set_defaults(func=cmd_stats)

    d = sub_parser("decompress", help="expand a TSLP into its tree")
    d.add_argument("tslp")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_decompress)

    f = sub_parser("fcns", help="first-child/next-sibling encoding")
    f.add_argument("input")
    f.add_argument("-o", "--output")
    f.add_argument("--decode", action="store_true", help="decode instead of encode")
    f.set_defaults(func=cmd_fcns)

    fc = sub_parser("formula2circuit", help="balance a formula into a circuit")
    fc.add_argument("input")
    fc.add_argument("-o", "--output")
    fc.add_argument("--algo", choices=("combined", "treebisection"), default="combined")
    fc.add_argument("--check-random", type=int, default=0, metavar="N",
                    help="run N random equivalence trials")
    fc.add_argument("--seed", type=int, default=0)
    fc.set_defaults(func=cmd_formula2circuit)

    g = sub_parser("gen", help="generate a corpus input")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--sigma", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    r = sub_parser("report", help="scaling experiment with CSV, JSON lines and figures")
    r.add_argument("--out-dir", default="report")
    r.add_argument("--sizes", type=int, nargs="+")
    r.add_argument("--algos", nargs="+", choices=ALGOS, default=["treebisection", "combined"])
    r.add_argument("--sigma", type=int, default=1)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--no-plots", action="store_true")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UnsupportedShapeError as exc:
        log.error("%s", exc)
        return EXIT_SHAPE
    except (InputError, TreeSlpError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
