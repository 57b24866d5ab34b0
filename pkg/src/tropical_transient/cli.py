"""Command line interface.

Subcommands: validate, derive, bound, check, transient.  Exit codes:

    0  success
    1  unreadable input or bad usage
    2  assumption (validation) failure
    3  rank-one check failure
    4  work budget exceeded

Reports print to stdout as pretty text or JSON (--format); error
messages go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .bounds import explicit_bound, implicit_bound
from .errors import (
    AssumptionError,
    BudgetExceededError,
    FamilyFileError,
    PivotError,
    TropicalError,
)
from .family import MatrixFamily
from .io import column_tokens, load_expected, load_family, load_sequence, matrix_tokens
from .matrix import rank_one_factor
from .products import estimate_transient, fold
from .report import (
    attach_deviations,
    base_report,
    bound_section,
    boundary_section,
    derived_section,
    lemma_section,
    render,
    transient_section,
    validation_section,
)
from .trellis import build_trellis, check_lemma_bounds, final_weights_all, initial_weights_all

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ASSUMPTION = 2
EXIT_RANK_ONE = 3
EXIT_BUDGET = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad usage; route through our exit codes.
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="tropical-transient",
        description="Max-plus matrix families: validation, transient bounds "
        "and rank-one product checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("family", help="family file (JSON)")
        p.add_argument(
            "--format",
            choices=("json", "pretty"),
            default="pretty",
            help="report format (default: pretty)",
        )

    p = sub.add_parser("validate", help="check the family assumptions")
    add_common(p)

    p = sub.add_parser("derive", help="boundary matrices and path data")
    add_common(p)
    p.add_argument(
        "--force",
        action="store_true",
        help="emit what is computable even when validation fails",
    )
    p.add_argument("--expected", help="expected-value file for a deviations section")

    p = sub.add_parser("bound", help="transient bounds (explicit, plus implicit for a sequence)")
    add_common(p)
    p.add_argument("sequence", nargs="?", help="sequence file for the implicit bound")
    p.add_argument("--expected", help="expected-value file for a deviations section")

    p = sub.add_parser("check", help="fold a sequence and test rank-one factorization")
    add_common(p)
    p.add_argument("sequence", help="sequence file (JSON array of member indices)")
    p.add_argument("--expected", help="expected-value file for a deviations section")
    p.add_argument(
        "--lemmas",
        action="store_true",
        help="also run the walk-structure checks on the trellis",
    )

    p = sub.add_parser("transient", help="scan product lengths for rank-one onset")
    add_common(p)
    p.add_argument("--horizon", type=int, required=True, help="largest length to scan")
    p.add_argument(
        "--mode",
        choices=("exhaustive", "sampled"),
        default="sampled",
        help="scan every sequence or a seeded sample (default: sampled)",
    )
    p.add_argument("--samples", type=int, default=100, help="sequences per length (sampled)")
    p.add_argument("--seed", type=int, default=0, help="generator seed (sampled)")
    p.add_argument("--threads", type=int, default=1, help="fold worker threads")
    p.add_argument(
        "--budget",
        type=int,
        default=None,
        help="override the product-count budget",
    )

    return parser


def _load(args) -> tuple[MatrixFamily, tuple[str, ...]]:
    return load_family(args.family)


def _expected(args):
    path = getattr(args, "expected", None)
    return load_expected(path) if path else None


def cmd_validate(args) -> tuple[int, dict]:
    family, names = _load(args)
    report = base_report("validate", family, names)
    validation = family.validate()
    report["validation"] = validation_section(validation)
    return (EXIT_OK if validation.passed else EXIT_ASSUMPTION), report


def cmd_derive(args) -> tuple[int, dict]:
    family, names = _load(args)
    report = base_report("derive", family, names)
    validation = family.validate()
    report["validation"] = validation_section(validation)
    if not validation.passed and not args.force:
        return EXIT_ASSUMPTION, report
    if validation.passed:
        report["derived"] = derived_section(
            family,
            family.sup_derived,
            family.inf_walk_to_one(),
            family.inf_walk_from_one(),
        )
    else:
        # Forced: only the assumption-free boundary data.
        report["derived"] = boundary_section(family)
    attach_deviations(report, _expected(args))
    return EXIT_OK, report


def cmd_bound(args) -> tuple[int, dict]:
    family, names = _load(args)
    report = base_report("bound", family, names)
    validation = family.validate()
    report["validation"] = validation_section(validation)
    if not validation.passed:
        return EXIT_ASSUMPTION, report
    report["derived"] = derived_section(
        family,
        family.sup_derived,
        family.inf_walk_to_one(),
        family.inf_walk_from_one(),
    )
    explicit = explicit_bound(family)
    bounds = {}
    if args.sequence:
        seq = load_sequence(args.sequence)
        product = fold(family, seq)
        k = len(seq)
        bounds["explicit"] = bound_section(explicit, k)
        bounds["implicit"] = bound_section(implicit_bound(family, product), k)
    else:
        bounds["explicit"] = bound_section(explicit)
    report["bounds"] = bounds
    attach_deviations(report, _expected(args))
    return EXIT_OK, report


def cmd_check(args) -> tuple[int, dict]:
    family, names = _load(args)
    report = base_report("check", family, names)
    validation = family.validate()
    report["validation"] = validation_section(validation)
    if not validation.passed:
        return EXIT_ASSUMPTION, report
    seq = load_sequence(args.sequence)
    product = fold(family, seq)
    trellis = build_trellis(family, seq)
    wstar = initial_weights_all(trellis)
    vstar = final_weights_all(trellis)
    try:
        factors = rank_one_factor(product)
    except PivotError:
        factors = None
    column_ok = [product.entry(i, 0) for i in range(product.rows)] == list(
        wstar.column_weights()
    )
    row_ok = [product.entry(0, j) for j in range(product.cols)] == list(
        vstar.column_weights()
    )
    section = {
        "length": len(seq),
        "product": matrix_tokens(product),
        "rank_one": factors is not None,
        "w_star": column_tokens(wstar),
        "v_star": column_tokens(vstar),
        "column_matches_w_star": column_ok,
        "row_matches_v_star": row_ok,
        "consistent": column_ok and row_ok,
    }
    if factors is not None:
        x, y = factors
        section["factors"] = {"column": column_tokens(x), "row": column_tokens(y)}
    report["check"] = section
    if args.lemmas:
        report["lemma_checks"] = lemma_section(check_lemma_bounds(trellis))
    attach_deviations(report, _expected(args))
    ok = factors is not None and section["consistent"]
    return (EXIT_OK if ok else EXIT_RANK_ONE), report


def cmd_transient(args) -> tuple[int, dict]:
    family, names = _load(args)
    report = base_report("transient", family, names)
    validation = family.validate()
    report["validation"] = validation_section(validation)
    if args.horizon < 1:
        raise UsageError("--horizon must be at least 1")
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    kwargs = {}
    if args.budget is not None:
        kwargs["max_products"] = args.budget
    estimate = estimate_transient(
        family,
        horizon=args.horizon,
        mode=args.mode,
        samples_per_length=args.samples,
        seed=args.seed,
        threads=args.threads,
        **kwargs,
    )
    report["transient"] = transient_section(estimate)
    return EXIT_OK, report


_HANDLERS = {
    "validate": cmd_validate,
    "derive": cmd_derive,
    "bound": cmd_bound,
    "check": cmd_check,
    "transient": cmd_transient,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code, report = _HANDLERS[args.command](args)
        sys.stdout.write(render(report, args.format))
        return code
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FamilyFileError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IndexError, ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssumptionError as exc:
        print(f"assumption failure: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except TropicalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
