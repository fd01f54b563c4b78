"""Command-line entry point.

Exit codes: 0 ok, 1 invalid input, 2 capacity or budget exceeded,
3 a checked property failed.
"""

from __future__ import annotations

import argparse
import logging
import random
import sys
from pathlib import Path

from . import approx, corpus, exact, expander, gap
from .automaton import Dfa, StateSet, cerny, dumps_dfa, dumps_word, image, loads_dfa
from .csp import CspInstance, from_cnf, fsat, loads_csp, parse_dimacs
from .errors import CapacityError, LimitReached, PropertyViolation, SynlabError, ValidationError
from .gadgets import build_automaton, compressed_size_bound, reduce, root_behavior_equivalent

EXIT_OK, EXIT_VALIDATION, EXIT_CAPACITY, EXIT_PROPERTY = 0, 1, 2, 3

log = logging.getLogger("synlab")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def load_instance(path: str) -> tuple[CspInstance, bool]:
    """Read a DIMACS CNF or CSP text file; the flag tells whether it was CNF."""
    text = _read(path)
    for line in text.splitlines():
        s = line.strip()
        if s.split()[:1] == ["csp"]:
            return loads_csp(text, source=path), False
        if not s or s.startswith("#") or s.startswith("c"):
            continue
        break
    return from_cnf(parse_dimacs(text, source=path)), True


def _seed(text: str) -> int:
    try:
        return int(text.lower().removeprefix("0x"), 16)
    except ValueError:
        raise ValidationError(f"seed must be a hex string, got {text!r}") from None


def _walk_length(args) -> int:
    if args.k is not None:
        return args.k
    return args.steps + 1


def cmd_cerny(args) -> int:
    _emit(dumps_dfa(cerny(args.n)), args.out)
    return EXIT_OK


def cmd_reduce(args) -> int:
    phi, _ = load_instance(args.input)
    out = reduce(phi, args.mode)
    print(f"N={phi.n_vars} M={phi.n_constraints} states={out.dfa.n_states} mode={out.mode}")
    if args.mode == "compressed":
        k = fsat(phi)
        print(f"K={k} size_bound={compressed_size_bound(phi.n_vars, phi.n_constraints, k)}")
        if args.check and max(len(c.dep_vars) for c in phi.constraints) <= 16:
            tree = build_automaton(phi)
            if not root_behavior_equivalent(tree, out, 2 * (phi.n_vars + 1)):
                raise PropertyViolation("compressed automaton differs from the tree automaton")
            print("bisimulation=ok")
    if out.degenerate:
        print(f"degenerate constraints (no satisfying row): {list(out.degenerate)}; not synchronizing")
    if args.out:
        Path(args.out + ".dfa").write_text(dumps_dfa(out.dfa))
        Path(args.out + ".map").write_text(out.map.dumps())
    else:
        sys.stdout.write(dumps_dfa(out.dfa))
    return EXIT_OK


def _replay(dfa: Dfa, word) -> None:
    if len(image(dfa, StateSet.full(dfa.n_states), word)) != 1:
        raise PropertyViolation("certificate failed to replay")


def cmd_solve(args) -> int:
    dfa = loads_dfa(_read(args.input), source=args.input)
    if args.alg == "exact":
        search = exact.SubsetSearch(dfa, args.budget_nodes)
        try:
            found = search.run(dfa.full_mask, args.limit)
        finally:
            sys.stderr.write(search.stats.to_json() + "\n")
        if found is None:
            print("not synchronizing", file=sys.stderr)
            return EXIT_VALIDATION
        cert = exact.ResetCertificate(found[0], found[1], search.stats)
        _replay(dfa, cert.word)
        _emit(cert.dumps(), args.out)
    else:
        result = approx.approx_reset(dfa, args.k)
        _replay(dfa, result.word)
        _emit(f"{len(result.word)}\n{dumps_word(result.word)}\n" + result.phase_table_csv(), args.out)
    return EXIT_OK


def _corpus_instances(name: str, seed: int):
    if name == "contradiction":
        return [("contradiction", corpus.contradiction_pair(), True)]
    if name == "sat3cnf":
        return [(f"sat3cnf-{i}", from_cnf(f), True) for i, f in enumerate(corpus.satisfiable_3cnf(10, seed))]
    if name == "unsat-cnf":
        return [(f"unsatcnf-{i}", from_cnf(f), True) for i, f in enumerate(corpus.unsatisfiable_cnf(12, seed))]
    if name == "unsat-csp":
        return [(f"unsatcsp-{i}", phi, False) for i, phi in enumerate(corpus.unsatisfiable_csp(12, seed))]
    raise ValidationError(f"unknown corpus {name!r}")


def cmd_gap_report(args) -> int:
    instances = []
    for path in args.input or []:
        phi, is_cnf = load_instance(path)
        instances.append((path, phi, is_cnf))
    for name in args.corpus or []:
        instances.extend(_corpus_instances(name, _seed(args.seed)))
    if not instances:
        raise ValidationError("gap-report needs --input files or --corpus names")
    rows = [gap.gap_row(name, phi, args.mode, is_cnf, args.budget_nodes) for name, phi, is_cnf in instances]
    _emit(gap.rows_csv(rows), args.out)
    bad = [r for r in rows if r.violations]
    for r in bad:
        for v in r.violations:
            print(f"{r.instance}: {v}", file=sys.stderr)
    return EXIT_PROPERTY if bad else EXIT_OK


def cmd_expander(args) -> int:
    g = expander.margulis(args.n)
    if args.action == "lambda":
        est = expander.spectral_lambda(g, method=args.method)
        ok = est.value <= expander.MARGULIS_LAMBDA + 1e-6
        _emit(f"n,method,lambda,iterations,bound\n{args.n},{est.method},{est.value:.9f},"
              f"{est.iterations},{expander.MARGULIS_LAMBDA:.9f}\n", args.out)
        return EXIT_OK if ok else EXIT_PROPERTY
    k = _walk_length(args)
    if args.action == "walk":
        sample = expander.walk(g, expander.bits_from_hex(args.seed), k)
        coords = " ".join(f"({x},{y})" for x, y in map(g.coords, sample.vertices))
        _emit(f"{coords}\nbits_consumed {sample.bits_consumed}\n", args.out)
        return EXIT_OK
    seed = _seed(args.seed)
    size = int(args.beta * g.n_vertices)
    bad = random.Random(seed).sample(range(g.n_vertices), size)
    report = expander.amplification_experiment(g, bad, k, args.trials, seed)
    _emit(expander.reports_csv([report]), args.out)
    return EXIT_OK if report.empirical <= report.bound + 3 * report.std_error else EXIT_PROPERTY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="synlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cerny", help="emit the n-state Cerny automaton")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cerny)

    p = sub.add_parser("reduce", help="compile a DIMACS/CSP file into a gadget automaton")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=("tree", "compressed"), default="tree")
    p.add_argument("--out", help="output prefix; writes PREFIX.dfa and PREFIX.map")
    p.add_argument("--check", action="store_true",
                   help="in compressed mode, also verify root behavior against tree mode")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="find a reset word")
    p.add_argument("--input", required=True)
    p.add_argument("--alg", choices=("exact", "approx"), default="exact")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--limit", type=int)
    p.add_argument("--budget-nodes", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gap-report", help="CSV of length gaps for reduced instances")
    p.add_argument("--input", nargs="*")
    p.add_argument("--corpus", nargs="*", choices=("contradiction", "sat3cnf", "unsat-cnf", "unsat-csp"))
    p.add_argument("--mode", choices=("tree", "compressed"), default="tree")
    p.add_argument("--seed", default="0")
    p.add_argument("--budget-nodes", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gap_report)

    p = sub.add_parser("expander", help="Margulis expander experiments")
    p.add_argument("action", choices=("lambda", "walk", "amplify"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=("auto", "dense", "power"), default="auto")
    p.add_argument("--k", type=int, help="walk length in vertices")
    p.add_argument("--steps", type=int, default=1, help="walk steps (k - 1); ignored when --k is given")
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", default="0", help="hex string")
    p.add_argument("--out")
    p.set_defaults(func=cmd_expander)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PropertyViolation as exc:
        print(f"property violation: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except (CapacityError, LimitReached) as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SynlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
