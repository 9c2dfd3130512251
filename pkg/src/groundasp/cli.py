"""Command-line front end.

Subcommands: `parse` (validate and re-emit aspif), `reify` (fact
output), `solve` (model enumeration under a chosen semantics), `opt`
(branch-and-bound), `inc` (incremental loop), `dl` (difference-logic
solving and optimization), `gc` (two-solver guess-and-check) and `gen`
(built-in instance generators).

Answers are printed clingo style: an `Answer: i` line followed by the
shown symbols sorted lexicographically, then a final verdict.  Exit
codes: 10 when at least one model was found, 20 for unsatisfiable, 30
when an optimum was proven, 65 for input errors, 1 for internal errors.
"""

import argparse
import sys

from . import __version__, aspif, drivers, gtext, oracle, reify as reify_mod
from .dl import DLPropagator
from .gtext import GroundTextError, parse_ground_text
from .program import GroundProgram, ProgramError, compose
from .solver import Solver, SolverError

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_OPTIMUM = 30
EXIT_INPUT = 65


class InputError(Exception):
    pass


def _read_source(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as err:
        raise InputError(str(err)) from None


def _load_program(path):
    """Detect aspif (leading `asp` header) vs ground text and parse."""
    source = _read_source(path)
    stripped = source.lstrip()
    if stripped.startswith("asp ") or stripped.startswith("asp\t"):
        segments = aspif.parse_program(source, on_warning=_warn)
        header = segments[0][0]
        programs = [GroundProgram(stmts) for _, stmts in segments]
        return header, programs
    return None, [parse_ground_text(source)]


def _warn(message):
    print(f"warning: {message}", file=sys.stderr)


def _print_answer(number, symbols):
    print(f"Answer: {number}")
    print(" ".join(symbols))


def _verdict(found):
    print("SATISFIABLE" if found else "UNSATISFIABLE")
    return EXIT_SAT if found else EXIT_UNSAT


def cmd_parse(args):
    source = _read_source(args.file)
    stripped = source.lstrip()
    if stripped.startswith("asp ") or stripped.startswith("asp\t"):
        segments = aspif.parse_program(source, on_warning=_warn)
        issues = []
        for _, statements in segments:
            for st in statements:
                issues.extend(aspif.validate_statement(st))
        if issues:
            for issue in issues:
                print(f"error: {issue}", file=sys.stderr)
            return EXIT_INPUT
        sys.stdout.write(aspif.write_program(segments))
        return 0
    program = parse_ground_text(source)
    sys.stdout.write(aspif.write_program([program.statements]))
    return 0


def cmd_reify(args):
    header, programs = _load_program(args.file)
    program = compose(programs) if len(programs) > 1 else programs[0]
    incremental = header is not None and header.incremental
    facts = reify_mod.reify(program, sccs=args.sccs, incremental=incremental)
    sys.stdout.write(reify_mod.render_facts(facts))
    return 0


def _solve_with_engine(program, args):
    solver = Solver(program)
    found = []

    def on_model(model):
        found.append(None)
        _print_answer(len(found), model.shown)
        return True

    solver.solve(on_model=on_model, max_models=args.models)
    return _verdict(bool(found))


def _named_sorted(program, model):
    return sorted(program.symbol(a) or str(a) for a in model)


def _solve_with_oracle(program, args):
    semantics = args.semantics
    if semantics == "stable":
        models = oracle.stable_models(program)
    elif semantics == "supported":
        models = oracle.supported_models(program)
    elif semantics == "classical":
        models = oracle.classical_models(program)
    elif semantics == "equilibrium":
        models = oracle.equilibrium_models(program)
    else:  # ht
        models = oracle.ht_models(program)
    count = 0
    for model in models:
        if args.models and count >= args.models:
            break
        count += 1
        if semantics == "ht":
            h, t = model
            symbols = sorted(
                [f"({program.symbol(a) or a},t)" for a in t]
                + [f"({program.symbol(a) or a},h)" for a in h]
            )
            _print_answer(count, symbols)
        else:
            _print_answer(count, _named_sorted(program, model))
    return _verdict(count > 0)


def cmd_solve(args):
    _, programs = _load_program(args.file)
    program = compose(programs) if len(programs) > 1 else programs[0]
    if args.semantics == "stable" and not args.oracle:
        return _solve_with_engine(program, args)
    return _solve_with_oracle(program, args)


def cmd_opt(args):
    _, programs = _load_program(args.file)
    program = compose(programs) if len(programs) > 1 else programs[0]
    solver = Solver(program)
    shown = []

    result = drivers.branch_and_bound(solver, quiet=args.quiet)
    if result.optimum is None:
        print("UNSATISFIABLE")
        return EXIT_UNSAT
    _print_answer(1, result.optimum["shown"])
    print(f"Optimization: {result.optimum['cost']}")
    print("OPTIMUM FOUND")
    return EXIT_OPTIMUM


def cmd_inc(args):
    config = drivers.IncConfig(
        imin=args.imin, imax=args.imax, istop=args.istop
    )
    shown = {}

    def on_model(model):
        shown["last"] = model.shown
        return True

    if args.gen == "hanoi":
        generator = drivers.gen_hanoi("incremental")
        status, step, calls = drivers.incremental_solve(
            generator, config, on_model=on_model
        )
    else:
        segments = aspif.parse_program(_read_source(args.file), on_warning=_warn)
        generator = _AspifSegments([GroundProgram(s) for _, s in segments])
        status, step, calls = _incremental_aspif(generator, config, on_model)
    if status == "SAT" and "last" in shown:
        _print_answer(1, shown["last"])
    print(f"Steps: {step + 1}, solve calls: {calls}")
    print("SATISFIABLE" if status == "SAT" else "UNSATISFIABLE")
    return EXIT_SAT if status == "SAT" else EXIT_UNSAT


class _AspifSegments:
    def __init__(self, programs):
        self.programs = programs

    def __len__(self):
        return len(self.programs)

    def segment(self, t):
        return self.programs[t]


def _incremental_aspif(generator, config, on_model):
    """Incremental loop over a plain multi-segment aspif stream: there
    are no query externals, each segment is simply added and solved."""
    solver = Solver()
    step = 0
    calls = 0
    result = None
    while True:
        solver.add_segment(generator.segment(step))
        solver.cleanup()
        result = solver.solve(max_models=1, on_model=on_model)
        calls += 1
        met = (
            result.satisfiable if config.istop == "SAT" else not result.satisfiable
        )
        if step >= config.imin and met:
            break
        if config.imax is not None and step >= config.imax:
            break
        if step + 1 >= len(generator):
            break
        step += 1
    return result.status, step, calls


def cmd_dl(args):
    _, programs = _load_program(args.file)
    program = compose(programs) if len(programs) > 1 else programs[0]
    solver = Solver(program)
    propagator = DLPropagator()
    solver.register_propagator(propagator)

    if args.opt:
        result = drivers.dl_branch_and_bound(
            solver, propagator, bound_var=args.opt, quiet=False
        )
        if result.optimum is None:
            print("UNSATISFIABLE")
            return EXIT_UNSAT
        _print_answer(1, result.optimum["shown"])
        print(f"Optimum: {result.bounds[-1]}")
        print("OPTIMUM FOUND")
        return EXIT_OPTIMUM

    found = []

    def on_model(model):
        propagator.on_model(model)
        found.append(None)
        _print_answer(len(found), model.shown)
        return True

    solver.solve(on_model=on_model, max_models=args.models)
    return _verdict(bool(found))


def cmd_gc(args):
    guess = _load_program(args.guess)[1][0]
    check = _load_program(args.check)[1][0]
    found = []
    models = drivers.guess_check_solve(
        guess, check, max_models=args.models
    )
    for i, projection in enumerate(models, start=1):
        _print_answer(i, sorted(projection))
    return _verdict(len(models) > 0)


def cmd_gen(args):
    constants = {}
    for item in args.const:
        name, _, value = item.partition("=")
        if not value:
            raise InputError(f"bad constant {item!r}, expected name=value")
        constants[name] = value

    if args.instance == "hanoi":
        horizon = int(constants.get("n", 17))
        pegs = int(constants.get("pegs", 3))
        disks = int(constants.get("disks", 4))
        if args.kind == "bounded":
            program = drivers.gen_hanoi("bounded", horizon, pegs, disks)
            sys.stdout.write(gtext.render_ground_text(program))
        else:
            generator = drivers.gen_hanoi("incremental", pegs, disks)
            steps = int(constants.get("steps", horizon))
            segments = []
            for t in range(steps + 1):
                segment, _ = generator.segment(t)
                segments.append(segment.statements)
            sys.stdout.write(aspif.write_program(segments))
        return 0
    if args.instance == "flowshop":
        durations = []
        for name, value in constants.items():
            if name in ("n", "pegs", "disks", "steps"):
                continue
            durations.append((name, tuple(int(x) for x in value.split(","))))
        program = drivers.gen_flowshop(durations or drivers.DEFAULT_FLOWSHOP)
        sys.stdout.write(gtext.render_ground_text(program))
        return 0
    raise InputError(f"unknown instance generator {args.instance!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="groundasp",
        description="Toolkit for ground answer-set programs",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="validate and re-emit aspif")
    p.add_argument("file", nargs="?", default="-")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("reify", help="emit the fact representation")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--sccs", action="store_true",
                   help="emit scc/2 facts for non-trivial components")
    p.set_defaults(func=cmd_reify)

    p = sub.add_parser("solve", help="enumerate models")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("-n", "--models", type=int, default=1,
                   help="number of models (0 for all)")
    p.add_argument("--semantics", default="stable",
                   choices=["stable", "supported", "classical", "ht",
                            "equilibrium"])
    p.add_argument("--oracle", action="store_true",
                   help="use the brute-force oracle even for stable models")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("opt", help="branch-and-bound minimization")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("inc", help="incremental solving")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--gen", choices=["hanoi"],
                   help="use a built-in segment generator instead of a file")
    p.add_argument("--imin", type=int, default=0)
    p.add_argument("--imax", type=int, default=None)
    p.add_argument("--istop", default="SAT", choices=["SAT", "UNSAT"])
    p.set_defaults(func=cmd_inc)

    p = sub.add_parser("dl", help="difference-logic solving")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("-n", "--models", type=int, default=0,
                   help="number of models (0 for all)")
    p.add_argument("--opt", metavar="BOUND-VAR",
                   help="minimize this integer variable")
    p.set_defaults(func=cmd_dl)

    p = sub.add_parser("gc", help="two-solver guess and check")
    p.add_argument("--guess", required=True)
    p.add_argument("--check", required=True)
    p.add_argument("-n", "--models", type=int, default=0)
    p.set_defaults(func=cmd_gc)

    p = sub.add_parser("gen", help="emit a generated ground instance")
    p.add_argument("instance", choices=["hanoi", "flowshop"])
    p.add_argument("--kind", default="bounded",
                   choices=["bounded", "incremental"])
    p.add_argument("-c", "--const", action="append", default=[],
                   metavar="NAME=VALUE")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (aspif.AspifError, GroundTextError, InputError, ProgramError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except SolverError as err:
        print(f"internal error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
