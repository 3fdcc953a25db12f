"""Command-line interface.

Every subcommand writes one JSON report to stdout and human-readable notes
to stderr.  Exit status: 0 on success, 1 when a verdict is negative (not
equivalent, not covered, invalid witness), 2 on input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .automaton import (
    UnknownLetterError,
    dump_automaton,
    evaluate,
    hankel_rank,
    load_automaton,
)
from .complexity import (
    CnfError,
    EtrParseError,
    HypercubeFormatError,
    InvalidWitnessError,
    emit_etr,
    expected_variable_count,
    hull_cover,
    hypercube_to_pa,
    load_instance,
    load_points,
    pa_from_witness,
    parse_dimacs,
    restrict,
    sat_to_hypercube,
    witness_from_assignment,
)
from .equivalence import equivalent
from .estimators import check_words
from .image import PGMError, compress, decode, encode, read_pgm, write_pgm
from .linalg import Backend, BackendError, DegenerateInputError, format_scalar
from .minimise import DEFAULT_C, ErrorBudget, error_bound, minimise

__all__ = ["build_parser", "main"]

EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2
DEFAULT_TAU_IMG = 1e-6


class InputError(Exception):
    pass


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, indent=2) + "\n")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(path):
    return load_automaton(path)


def _backend_and_tau(args, default_backend: Backend):
    backend = Backend(args.backend) if args.backend else default_backend
    tau = args.tau
    if tau is not None and tau < 0:
        raise InputError(f"--tau must be nonnegative, got {tau}")
    if backend is Backend.EXACT and tau not in (None, 0):
        raise InputError("--tau must be 0 with --backend exact")
    if backend is Backend.FLOAT and tau == 0:
        raise InputError("--tau 0 requires --backend exact")
    return backend, tau


# ------------------------------------------------------------ subcommands


def cmd_eval(args) -> int:
    a = _load(args.automaton)
    if args.backend:
        a = a.with_backend(args.backend)
    words = check_words(args.word or [""], a.alphabet)
    results = []
    for w in words:
        v = evaluate(a, w)
        results.append({"word": list(w), "value": format_scalar(v)})
        _note(f"L({','.join(w) or 'ε'}) = {v}")
    _emit({"backend": a.backend.value, "results": results})
    return EXIT_OK


def cmd_minimise(args) -> int:
    a = _load(args.input)
    backend, tau = _backend_and_tau(args, a.backend)
    out, report = minimise(a, tau, backend, order=args.order)
    dump_automaton(out, args.output)
    doc = report.to_dict()
    if args.bound_length is not None:
        b = ErrorBudget.for_automaton(a.with_backend(Backend.FLOAT), args.bound_length,
                                      report.tau or 0.0, m=args.m, c=args.c)
        doc["error_bound"] = {"word_length": args.bound_length, "m": b.m, "c": b.c, "value": error_bound(b)}
    _emit(doc)
    _note(f"minimised {report.n} -> {report.n_prime} states ({backend.value} backend)")
    return EXIT_OK


def cmd_equiv(args) -> int:
    v = equivalent(_load(args.first), _load(args.second))
    _emit(v.to_dict())
    if v:
        _note("equivalent")
        return EXIT_OK
    _note(f"not equivalent: counterexample {','.join(v.counterexample) or 'ε'}")
    return EXIT_FALSE


def cmd_rank(args) -> int:
    a = _load(args.automaton).to_exact()
    r = hankel_rank(a)
    _emit({"n": a.n, "hankel_rank": r})
    _note(f"Hankel rank {r} (automaton has {a.n} states)")
    return EXIT_OK


def cmd_img_encode(args) -> int:
    img = read_pgm(args.input)
    a, enc = encode(img, Backend(args.backend or "exact"))
    dump_automaton(a, args.output)
    _emit({"states": a.n, "depth": enc.depth, "side": enc.side, "width": img.width,
           "height": img.height, "maxval": img.maxval})
    _note(f"{img.width}x{img.height} image -> {a.n} states (depth {enc.depth})")
    return EXIT_OK


def cmd_img_decode(args) -> int:
    a = _load(args.input)
    side = 1 << args.depth
    width = args.width if args.width is not None else side
    height = args.height if args.height is not None else side
    img = decode(a, args.depth, width, height, args.maxval)
    write_pgm(img, args.output, args.format)
    _emit({"states": a.n, "depth": args.depth, "width": width, "height": height,
           "maxval": args.maxval, "format": args.format})
    return EXIT_OK


def cmd_img_compress(args) -> int:
    img = read_pgm(args.input)
    tau = DEFAULT_TAU_IMG if args.tau is None else args.tau
    if tau < 0:
        raise InputError(f"--tau must be nonnegative, got {tau}")
    out, recon, stats, report = compress(img, tau, c=args.c, order=args.order)
    write_pgm(recon, args.output, args.format)
    if args.automaton:
        dump_automaton(out, args.automaton)
    _emit({**stats.to_dict(), "backend": report.backend, "order": report.order})
    _note(f"{stats.states_before} -> {stats.states_after} states, "
          f"max pixel error {stats.max_abs_pixel_error:.3g} (bound {stats.error_bound:.3g})")
    return EXIT_OK


def _parse_assignment(text: str, n: int) -> list[bool]:
    bits = text.replace(",", "")
    if len(bits) != n or set(bits) - {"0", "1"}:
        raise InputError(f"--assignment needs {n} characters from {{0,1}}, got {text!r}")
    return [b == "1" for b in bits]


def cmd_sat2cube(args) -> int:
    phi = parse_dimacs(Path(args.input).read_text(encoding="utf-8"))
    inst = sat_to_hypercube(phi)
    flip = None
    if args.restrict is not None:
        corner = None if args.restrict < 0 else args.restrict
        restricted = restrict(inst, corner)
        corner = corner if corner is not None else next(
            i for i, p in enumerate(inst.points) if all(v in (0, 1) for v in p))
        flip = [v == 1 for v in inst.points[corner]]
        inst = restricted
    Path(args.output).write_text(json.dumps(inst.to_dict(), indent=1) + "\n", encoding="utf-8")
    report = {"num_vars": phi.num_vars, "num_clauses": phi.num_clauses, "d": inst.d,
              "points": inst.k, "ell": inst.ell, "restricted": inst.restricted}
    code = EXIT_OK
    if args.assignment is not None:
        truth = _parse_assignment(args.assignment, phi.num_vars)
        wit = witness_from_assignment(phi, truth)
        if flip is not None:
            wit = [tuple(1 - x if f else x for x, f in zip(p, flip)) for p in wit]
        covered, first_fail, _ = hull_cover(inst.points, wit)
        report.update({"satisfies": phi.satisfied_by(truth), "witness_size": len(wit),
                       "covered": covered, "first_failure": first_fail})
        if args.witness_out:
            doc = {"points": [[format_scalar(v) for v in p] for p in wit]}
            Path(args.witness_out).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
        code = EXIT_OK if covered else EXIT_FALSE
    _emit(report)
    _note(f"d={inst.d}, |P|={inst.k}, ell={inst.ell}")
    return code


def cmd_cube2pa(args) -> int:
    inst = load_instance(args.input)
    pa, target = hypercube_to_pa(inst)
    dump_automaton(pa.automaton, args.output)
    _emit({"states": pa.automaton.n, "alphabet": list(pa.automaton.alphabet), "target_size": target})
    _note(f"PA with {pa.automaton.n} states; the instance is positive iff a {target}-state PA exists")
    return EXIT_OK


def cmd_pa_witness(args) -> int:
    inst = load_instance(args.instance)
    q = load_points(args.witness)
    try:
        pa = pa_from_witness(inst, q)
    except InvalidWitnessError as exc:
        _emit({"valid": False, "reason": str(exc)})
        _note(f"invalid witness: {exc}")
        return EXIT_FALSE
    dump_automaton(pa.automaton, args.output)
    _emit({"valid": True, "states": pa.automaton.n, "ell": inst.ell, "within_budget": len(q) <= inst.ell})
    return EXIT_OK


def cmd_hull_check(args) -> int:
    p = load_points(args.points)
    q = load_points(args.witness)
    covered, first_fail, certs = hull_cover(p, q)
    _emit({
        "covered": covered,
        "first_failure": first_fail,
        "certificates": [[format_scalar(v) for v in c.weights] for c in certs],
    })
    _note("covered" if covered else f"point {first_fail} is outside conv(Q)")
    return EXIT_OK if covered else EXIT_FALSE


def cmd_emit_etr(args) -> int:
    a = _load(args.input).to_exact()
    formula = emit_etr(a, args.n2)
    text = formula.to_smtlib()
    Path(args.output).write_text(text, encoding="utf-8")
    _emit({"n1": a.n, "n2": args.n2, "letters": len(a.alphabet),
           "variables": len(formula.declarations),
           "expected_variables": expected_variable_count(a.n, args.n2, len(a.alphabet)),
           "assertions": len(formula.assertions)})
    return EXIT_OK


def cmd_corpus(args) -> int:
    if args.kind == "rational":
        autos = corpus_mod.rational_corpus(args.count, args.seed)
    elif args.kind == "pa":
        autos = corpus_mod.pa_corpus(args.count, args.seed)
    else:
        autos = corpus_mod.orthogonal_corpus(args.count, args.seed)
    corpus_mod.dump_corpus(autos, args.output, kind=args.kind, seed=args.seed)
    _emit({"kind": args.kind, "count": len(autos), "seed": args.seed,
           "sizes": [a.n for a in autos]})
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wamin", description="Weighted automaton minimisation toolkit.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def backend_flag(sp, help_extra=""):
        sp.add_argument("--backend", choices=[b.value for b in Backend],
                        help="arithmetic backend" + help_extra)

    s = sub.add_parser("eval", help="evaluate an automaton on words")
    s.add_argument("automaton")
    s.add_argument("--word", action="append", help="comma-separated letters (repeatable; empty = ε)")
    backend_flag(s)
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("minimise", aliases=["minimize"], help="minimise an automaton")
    s.add_argument("input")
    s.add_argument("output")
    backend_flag(s, " (default: the input's)")
    s.add_argument("--tau", type=float, help="tolerance (default 0 exact, 1e-6 float)")
    s.add_argument("--order", choices=["fb", "bf"], default="fb", help="reduction order")
    s.add_argument("--c", type=float, default=DEFAULT_C, help="constant of the rounding term")
    s.add_argument("--m", type=float, default=None, help="norm bound m (default: measured)")
    s.add_argument("--bound-length", type=_nonneg_int, default=None,
                   help="also report the loss bound for words of this length")
    s.set_defaults(func=cmd_minimise)

    s = sub.add_parser("equiv", help="decide equivalence exactly")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("rank", help="exact Hankel rank (brute force)")
    s.add_argument("automaton")
    s.set_defaults(func=cmd_rank)

    s = sub.add_parser("img-encode", help="PGM image to quadtree automaton")
    s.add_argument("input")
    s.add_argument("output")
    backend_flag(s, " (default exact)")
    s.set_defaults(func=cmd_img_encode)

    s = sub.add_parser("img-decode", help="render an automaton as a PGM image")
    s.add_argument("input")
    s.add_argument("output")
    s.add_argument("--depth", type=_nonneg_int, required=True)
    s.add_argument("--width", type=_nonneg_int)
    s.add_argument("--height", type=_nonneg_int)
    s.add_argument("--maxval", type=int, default=255)
    s.add_argument("--format", choices=["P2", "P5"], default="P5")
    s.set_defaults(func=cmd_img_decode)

    s = sub.add_parser("img-compress", help="lossy compression of a PGM image")
    s.add_argument("input")
    s.add_argument("output")
    s.add_argument("--tau", type=float, help="tolerance (0 = lossless exact run; default 1e-6)")
    s.add_argument("--c", type=float, default=DEFAULT_C)
    s.add_argument("--order", choices=["fb", "bf"], default="bf")
    s.add_argument("--format", choices=["P2", "P5"], default="P5")
    s.add_argument("--automaton", help="also write the compressed automaton here")
    s.set_defaults(func=cmd_img_compress)

    s = sub.add_parser("sat2cube", help="3-CNF (DIMACS) to hypercube instance")
    s.add_argument("input")
    s.add_argument("output")
    s.add_argument("--restrict", type=int, nargs="?", const=-1, default=None, metavar="CORNER",
                   help="move a cube vertex of P to the origin (default: first vertex)")
    s.add_argument("--assignment", help="truth values as a 0/1 string; checks its witness")
    s.add_argument("--witness-out", help="write the assignment's witness points here")
    s.set_defaults(func=cmd_sat2cube)

    s = sub.add_parser("cube2pa", help="restricted hypercube instance to PA")
    s.add_argument("input")
    s.add_argument("output")
    s.set_defaults(func=cmd_cube2pa)

    s = sub.add_parser("pa-witness", help="PA built from a covering point set")
    s.add_argument("instance")
    s.add_argument("witness")
    s.add_argument("output")
    s.set_defaults(func=cmd_pa_witness)

    s = sub.add_parser("hull-check", help="check P is inside conv(Q)")
    s.add_argument("points")
    s.add_argument("witness")
    s.set_defaults(func=cmd_hull_check)

    s = sub.add_parser("emit-etr", help="SMT-LIB formula for PA minimisation")
    s.add_argument("input")
    s.add_argument("output")
    s.add_argument("--n2", type=_nonneg_int, required=True, help="target number of states")
    s.set_defaults(func=cmd_emit_etr)

    s = sub.add_parser("corpus", help="write a seeded random corpus")
    s.add_argument("output")
    s.add_argument("--kind", choices=["rational", "pa", "orthogonal"], default="rational")
    s.add_argument("--count", type=_nonneg_int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_corpus)
    return p


_INPUT_ERRORS = (OSError, ValueError, KeyError, TypeError, InputError, BackendError,
                 DegenerateInputError, UnknownLetterError, CnfError, EtrParseError,
                 HypercubeFormatError, PGMError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        _note(f"error: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    except _INPUT_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        _note(f"error: {msg}")
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
