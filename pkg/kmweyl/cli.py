"""Command-line front end: kmweyl <subcommand> [options]."""

import argparse
import json
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from kmweyl.calogero.closed_forms import (
    PARTIAL_SUM_FAMILIES,
    AffineInvariantPotential,
    PartialSumPotential,
)
from kmweyl.calogero.base import BasePotential
from kmweyl.calogero.matching import MATCH_MODES, match_terms, prepare_match
from kmweyl.config import RunConfig, load_config, load_seeds
from kmweyl.dynkin import DynkinDiagram, build_extended_A
from kmweyl.exceptions import (
    ComputationError,
    InputError,
    InvalidWordFormat,
    UnsupportedDiagram,
)
from kmweyl.invariants import (
    bicolour_factorization,
    coxeter_angles,
    invariant_space,
    kostant_check,
    w_monomial_pattern,
)
from kmweyl.logger import get_logger, set_level
from kmweyl.recur import (
    CharRoot,
    RootKind,
    char_poly,
    char_roots,
    fit_coxeter_recurrence,
    orbit_closed_form,
    verify_closed_form,
)
from kmweyl.roots import RootVector, enumerate_real_roots, inner, roots_tsv
from kmweyl.utils import (
    format_complex,
    format_float,
    format_fraction,
    parse_float_list,
    parse_range,
)
from kmweyl.weyl import (
    OrbitCache,
    WeylWord,
    coxeter_order,
    coxeter_word,
    word_matrix,
)

logger = get_logger("cli")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_COMPUTATION = 3

# Flags whose values may start with "-" (negative labels or coordinates).
VALUE_FLAGS = ("--range", "--seed", "--word", "--bounds", "--q")

EVAL_FORMS = ("affine-closed", *PARTIAL_SUM_FAMILIES)


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """Rewrite "--range -10:10" as "--range=-10:10" so argparse accepts it."""
    joined: List[str] = []
    tokens = list(argv)
    index = 0
    while index < len(tokens):
        token = tokens[index]
        if (
            token in VALUE_FLAGS
            and index + 1 < len(tokens)
            and tokens[index + 1].startswith("-")
        ):
            joined.append(f"{token}={tokens[index + 1]}")
            index += 2
            continue
        joined.append(token)
        index += 1
    return joined


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(data: Any) -> None:
    _emit(json.dumps(data, indent=2, sort_keys=False))


def _diagram(config: RunConfig) -> DynkinDiagram:
    return build_extended_A(config.algebra.n, config.algebra.m)


def _word(config: RunConfig) -> WeylWord:
    if config.word is None:
        return coxeter_word(config.algebra.n, config.algebra.m)
    return WeylWord(letters=config.word)


def cmd_diagram(args: argparse.Namespace, config: RunConfig) -> int:
    _emit(_diagram(config).to_json())
    return EXIT_OK


def _seeds(config: RunConfig) -> List[RootVector]:
    """--seed when given, else every seed listed in the seed files."""
    if config.seed is not None:
        return [RootVector(coeffs=config.seed)]
    seeds = load_seeds(config.seed_paths)
    if not seeds:
        raise InvalidWordFormat("<missing>", "--seed with one integer per label")
    return [RootVector(coeffs=coeffs) for coeffs in seeds]


def cmd_orbit(args: argparse.Namespace, config: RunConfig) -> int:
    """C^k seed over --range, one block per seed."""
    cartan = _diagram(config).cartan_matrix()
    seeds = _seeds(config)
    for seed in seeds:
        cartan.check_vector(seed.coeffs, "Seed")
    lo, hi = parse_range(args.range)
    matrix = word_matrix(_word(config), cartan)
    cache = OrbitCache()
    windows = [(seed, cache.orbit(matrix, seed, lo, hi)) for seed in seeds]
    tagged = len(seeds) > 1

    if config.output == "json":
        rows: List[Dict[str, Any]] = []
        for seed, window in windows:
            for k, element in window:
                row: Dict[str, Any] = {
                    "k": k,
                    "coeffs": list(element.coeffs),
                    "norm": element.norm(cartan),
                }
                if tagged:
                    row["seed"] = list(seed.coeffs)
                rows.append(row)
        _emit_json(rows)
        return EXIT_OK

    header = "#k\t" + "\t".join(f"c{label}" for label in cartan.labels) + "\tnorm"
    lines = [header]
    for seed, window in windows:
        if tagged:
            lines.append("# seed=" + ",".join(str(c) for c in seed.coeffs))
        for k, element in window:
            norm = str(element.norm(cartan))
            lines.append("\t".join([str(k), *(str(c) for c in element.coeffs), norm]))
    _emit("\n".join(lines))
    return EXIT_OK


def cmd_order(args: argparse.Namespace, config: RunConfig) -> int:
    cartan = _diagram(config).cartan_matrix()
    order = coxeter_order(word_matrix(_word(config), cartan), args.h_max)
    if config.output == "json":
        _emit_json({"word": str(_word(config)), "order": order})
    else:
        _emit(str(order) if order is not None else "absent")
    return EXIT_OK


def _root_value(root: CharRoot) -> str:
    if root.kind == RootKind.NUMERIC:
        return format_complex(root.value)
    return root.exact()


def cmd_recurrence(args: argparse.Namespace, config: RunConfig) -> int:
    """Minimal recurrence of the word matrix and its classified roots.

    With --seed the closed form of the seed's orbit is solved and its worst
    relative residual over the first 2N powers is reported.
    """
    cartan = _diagram(config).cartan_matrix()
    matrix = word_matrix(_word(config), cartan)
    recurrence = fit_coxeter_recurrence(matrix)
    poly = char_poly(recurrence)
    roots = char_roots(poly)

    residual: Optional[float] = None
    if config.seed is not None:
        seed = RootVector(coeffs=config.seed)
        cartan.check_vector(seed.coeffs, "Seed")
        closed = orbit_closed_form(
            matrix, seed, config.tolerances.closed_form, recurrence
        )
        span = (0, 2 * recurrence.order - 1)
        residual = verify_closed_form(closed, matrix, seed, span)

    if config.output == "json":
        report: Dict[str, Any] = {
            "order": recurrence.order,
            "coeffs": [format_fraction(c) for c in recurrence.coeffs],
            "char_poly": str(poly.as_expr()),
            "roots": [
                {
                    "kind": root.kind.value,
                    "value": _root_value(root),
                    "mult": root.multiplicity,
                }
                for root in roots
            ],
        }
        if residual is not None:
            report["closed_form_residual"] = format_float(residual)
        _emit_json(report)
        return EXIT_OK

    lines = [
        f"order\t{recurrence.order}",
        "coeffs\t" + ",".join(format_fraction(c) for c in recurrence.coeffs),
        f"charpoly\t{poly.as_expr()}",
        "#kind\texact\tvalue\tmultiplicity",
    ]
    for root in roots:
        lines.append(
            f"{root.kind.value}\t{root.exact()}\t"
            f"{format_complex(root.value)}\t{root.multiplicity}"
        )
    if residual is not None:
        lines.append(f"residual\t{format_float(residual)}")
    _emit("\n".join(lines))
    return EXIT_OK


def cmd_invariants(args: argparse.Namespace, config: RunConfig) -> int:
    cartan = _diagram(config).cartan_matrix()
    basis = invariant_space(cartan, args.degree, config.threads)
    supports = []
    if args.w_support:
        tolerances = config.tolerances
        supports = [
            sorted(
                w_monomial_pattern(
                    cartan, poly, tolerances.support, tolerances.conditioning
                )
            )
            for poly in basis
        ]

    if config.output == "json":
        entries = []
        for position, poly in enumerate(basis):
            entry: Dict[str, Any] = {
                "degree": args.degree,
                "monomials": poly.monomials(),
            }
            if supports:
                entry["w_support"] = [list(exps) for exps in supports[position]]
            entries.append(entry)
        _emit_json(entries)
        return EXIT_OK

    lines = [f"# degree={args.degree} dimension={len(basis)}"]
    for position, poly in enumerate(basis):
        lines.append(str(poly.to_sympy()))
        if supports:
            cells = [",".join(str(a) for a in exps) for exps in supports[position]]
            lines.append("# w-support\t" + " ".join(cells))
    _emit("\n".join(lines))
    return EXIT_OK


def cmd_kostant(args: argparse.Namespace, config: RunConfig) -> int:
    diagram = _diagram(config)
    holds = kostant_check(diagram, bicolour_factorization(diagram))
    _emit("kostant: OK" if holds else "kostant: FAILED")
    return EXIT_OK if holds else EXIT_FAILED


def cmd_angles(args: argparse.Namespace, config: RunConfig) -> int:
    cartan = _diagram(config).cartan_matrix()
    angles = coxeter_angles(cartan, config.tolerances.eigen)
    rows = list(zip(angles.eigenvalues, angles.thetas, angles.admissible))
    if config.output == "json":
        _emit_json(
            [
                {
                    "j": j,
                    "eigenvalue": format_float(value),
                    "theta": format_complex(theta),
                    "admissible": ok,
                }
                for j, (value, theta, ok) in enumerate(rows, start=1)
            ]
        )
        return EXIT_OK
    lines = ["#j\teigenvalue\ttheta\tadmissible"]
    for j, (value, theta, ok) in enumerate(rows, start=1):
        lines.append(f"{j}\t{format_float(value)}\t{format_complex(theta)}\t{ok}")
    _emit("\n".join(lines))
    return EXIT_OK


def cmd_roots(args: argparse.Namespace, config: RunConfig) -> int:
    cartan = _diagram(config).cartan_matrix()
    if config.bounds is not None:
        roots = enumerate_real_roots(
            cartan, bounds=config.bounds, threads=config.threads
        )
    else:
        lo, hi = parse_range(args.range)
        roots = enumerate_real_roots(cartan, lo, hi, threads=config.threads)
    if config.output == "json":
        _emit_json(
            [
                {"coeffs": list(root.coeffs), "norm": inner(root, root, cartan)}
                for root in roots
            ]
        )
    else:
        _emit(roots_tsv(roots, cartan))
    return EXIT_OK


def _require_a2m2(config: RunConfig, command: str) -> None:
    if (config.algebra.n, config.algebra.m) != (2, 2):
        raise UnsupportedDiagram(
            config.algebra.n,
            config.algebra.m,
            f"potential {command} is defined on (A_2)_-2 only",
        )


def cmd_potential_match(args: argparse.Namespace, config: RunConfig) -> int:
    """Enumerated terms against orbit generators on (A_2)_-2.

    --bounds replaces the box implied by the mode and --level.
    """
    _require_a2m2(config, "match")
    cache = OrbitCache()
    setup = prepare_match(
        args.mode,
        config.level,
        config.k_window,
        config.coupling,
        config.couplings,
        config.bounds,
        cache=cache,
        threads=config.threads,
    )
    table = match_terms(
        setup.terms,
        setup.generators,
        setup.cartan,
        config.k_window,
        cache=cache,
        threads=config.threads,
    )
    if config.output == "json":
        _emit_json(
            {
                "rows": [
                    {
                        "label": row.label,
                        "form": list(row.form),
                        "orbit": row.orbit_id,
                        "power": row.power,
                        "sign": row.sign,
                        "coupling": row.coupling,
                    }
                    for row in table.rows
                ],
                "generators": [list(gen.rep.coeffs) for gen in setup.generators],
                "unmatched": [term.label for term in table.unmatched],
            }
        )
    else:
        _emit(table.to_tsv())
    return EXIT_OK


def cmd_potential_eval(args: argparse.Namespace, config: RunConfig) -> int:
    """Closed-form potential value and its itemized terms as JSON.

    The affine form reads per-term couplings keyed by sine term name; a
    partial-sum family reads the coupling keyed by its family name.
    """
    _require_a2m2(config, "eval")
    q = parse_float_list(args.q)
    pole = config.tolerances.pole
    potential: BasePotential
    if args.form == "affine-closed":
        potential = AffineInvariantPotential(config.coupling, config.couplings, pole)
    else:
        potential = PartialSumPotential(
            args.form, config.coupling_for(args.form), pole
        )
    value = potential(q)
    terms = [
        {"name": name, "value": format_float(term)}
        for name, term in potential.term_values(q).items()
    ]
    _emit_json({"form": args.form, "value": format_float(value), "terms": terms})
    return EXIT_OK


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", help="Algebra as aNmM, e.g. a2m2 (default a2m2)")
    common.add_argument("--word", help="Weyl word, comma-separated labels")
    common.add_argument("--seed", help="Root coefficients in label order")
    common.add_argument("--bounds", help="Per-label bounds lo:hi,lo:hi,...")
    common.add_argument("--output", choices=("tsv", "json"), help="Report format")
    common.add_argument("--config", help="TOML run configuration file")
    common.add_argument("--threads", type=int, help="Worker threads")
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        help="Level of the JSON log lines on stderr (default WARNING)",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per report."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="kmweyl",
        description="Weyl groups, Coxeter orbits and Calogero potentials "
        "of extended A-series Kac-Moody algebras.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    p_diagram = subparsers.add_parser(
        "diagram", parents=[common], help="Dynkin diagram as JSON"
    )
    p_diagram.set_defaults(handler=cmd_diagram)

    p_orbit = subparsers.add_parser(
        "orbit", parents=[common], help="Orbit of a root under a Weyl word"
    )
    p_orbit.add_argument("--range", default="0:10", help="Powers lo:hi")
    p_orbit.set_defaults(handler=cmd_orbit)

    p_order = subparsers.add_parser(
        "order", parents=[common], help="Order of a Weyl word"
    )
    p_order.add_argument("--h-max", type=int, default=10_000, help="Largest order")
    p_order.set_defaults(handler=cmd_order)

    p_recur = subparsers.add_parser(
        "recurrence", parents=[common], help="Minimal recurrence of a word matrix"
    )
    p_recur.set_defaults(handler=cmd_recurrence)

    p_inv = subparsers.add_parser(
        "invariants", parents=[common], help="Weyl-invariant polynomials"
    )
    p_inv.add_argument("--degree", type=int, default=2, help="Polynomial degree")
    p_inv.add_argument(
        "--w-support",
        action="store_true",
        help="Also list each invariant's monomials in Coxeter eigen-coordinates",
    )
    p_inv.set_defaults(handler=cmd_invariants)

    p_kostant = subparsers.add_parser(
        "kostant", parents=[common], help="Check the bicoloured Kostant identity"
    )
    p_kostant.set_defaults(handler=cmd_kostant)

    p_angles = subparsers.add_parser(
        "angles", parents=[common], help="Exponent angles of the Cartan eigenvalues"
    )
    p_angles.set_defaults(handler=cmd_angles)

    p_roots = subparsers.add_parser(
        "roots", parents=[common], help="Enumerate real roots in a box"
    )
    p_roots.add_argument("--range", default="0:3", help="Uniform bounds lo:hi")
    p_roots.set_defaults(handler=cmd_roots)

    p_potential = subparsers.add_parser("potential", help="Calogero potentials")
    potential_commands = p_potential.add_subparsers(dest="action", required=True)

    p_match = potential_commands.add_parser(
        "match", parents=[common], help="Match enumerated terms to orbits"
    )
    p_match.add_argument("--mode", choices=MATCH_MODES, default="affine")
    p_match.add_argument("--level", type=int, help="Coefficient bound (default 5)")
    p_match.add_argument("--kwindow", type=int, help="Orbit power window")
    p_match.add_argument("--g", type=float, help="Global coupling")
    p_match.set_defaults(handler=cmd_potential_match)

    p_eval = potential_commands.add_parser(
        "eval", parents=[common], help="Evaluate a closed-form potential"
    )
    p_eval.add_argument("--form", choices=EVAL_FORMS, default="affine-closed")
    p_eval.add_argument("--q", required=True, help="Seven ambient coordinates")
    p_eval.add_argument("--g", type=float, help="Global coupling")
    p_eval.set_defaults(handler=cmd_potential_eval)

    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then command-line flags."""
    config = load_config(args.config) if args.config else RunConfig()
    return config.merged(
        algebra=args.algebra,
        word=args.word,
        seed=args.seed,
        bounds=args.bounds,
        output=args.output,
        threads=args.threads,
        level=getattr(args, "level", None),
        k_window=getattr(args, "kwindow", None),
        coupling=getattr(args, "g", None),
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, dispatch, and map errors to exit codes."""
    parser = build_parser()
    args = parser.parse_args(
        _join_negative_values(sys.argv[1:] if argv is None else argv)
    )
    set_level(args.log_level)
    handler: Callable[[argparse.Namespace, RunConfig], int] = args.handler

    try:
        config = resolve_config(args)
        return handler(args, config)
    except (InputError, ValidationError) as e:
        logger.error("Invalid input", extra={"error": str(e)})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ComputationError as e:
        logger.error("Computation failed", extra={"error": str(e)})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_COMPUTATION


def main() -> None:
    sys.exit(run())

