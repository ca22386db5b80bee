"""Command-line driver.

Subcommands
-----------
bounds        evaluate every bound for a matrix file and a test subspace
kappa-demo    closed forms vs. computed quantities for the 3x3 family
schrodinger   large-coupling model: series, sandwich, exact solution
fem-periodic  mesh-refinement reference table for the anti-periodic model
verify        run the named property checks on fixed seeds

Exit codes: 0 success, 1 verification failure or unexpected error,
2 usage, 3 input file missing, 4 matrix parse error, 5 operator not
positive definite, 6 hypothesis failure under --strict.

Tables print scientific notation with 4 digits; csv and json carry full
precision and are byte-stable under parse/re-serialize round trips.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import build_report, format_report_table, report_to_csv, report_to_json
from .defect import TestSubspace
from .densela import read_matrix_text, sym_eig
from .errors import (
    HypothesisError,
    MatrixParseError,
    NotPositiveDefiniteError,
    RitzBoundsError,
)
from .models import (
    DEFAULT_ALPHA,
    DEFAULT_K_TRUNC,
    hkappa_matrix,
    hkappa_reference,
    schrodinger_bounds,
    schrodinger_eta2,
    schrodinger_eta2_fd,
    schrodinger_lambda,
    schrodinger_taylor,
    table1_row,
)
from .verify import DEFAULT_SEED, run_checks

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_MISSING_FILE = 3
EXIT_PARSE_ERROR = 4
EXIT_NOT_PD = 5
EXIT_HYPOTHESIS = 6

_LOWEST_RE = re.compile(r"^lowest-(\d+)$")


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _csv_table(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(f"{v:.17g}" if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _text_table(columns, rows) -> str:
    width = 12
    header = "  ".join(f"{c:>{width}s}" for c in columns)
    lines = [header]
    for row in rows:
        cells = [f"{v:.4e}" if isinstance(v, float) else str(v) for v in row]
        lines.append("  ".join(f"{c:>{width}s}" for c in cells))
    return "\n".join(lines) + "\n"


def _parse_float_list(text: str, what: str):
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad {what} list: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError(f"empty {what} list")
    return values


def _load_subspace(args, parser, n: int) -> TestSubspace:
    match = _LOWEST_RE.match(args.subspace)
    if match:
        k = int(match.group(1))
        if args.precond is None:
            parser.error("--subspace lowest-K needs --precond with a matrix file")
        precond = read_matrix_text(args.precond)
        if precond.shape != (n, n):
            parser.error(
                f"preconditioner shape {precond.shape} does not match the "
                f"operator size {n}"
            )
        _, vectors = sym_eig(precond)
        if not 1 <= k < n:
            parser.error(f"lowest-{k} needs 1 <= k < {n}")
        return TestSubspace(vectors[:, :k])
    basis = read_matrix_text(args.subspace)
    if basis.ndim == 1:
        basis = basis[:, None]
    if basis.shape[0] != n:
        parser.error(
            f"subspace has {basis.shape[0]} rows but the operator is {n} x {n}"
        )
    return TestSubspace.from_columns(basis)


def _cmd_bounds(args, parser) -> int:
    try:
        matrix = read_matrix_text(args.matrix)
        subspace = _load_subspace(args, parser, matrix.shape[0])
        report = build_report(matrix, subspace, norm_kind=args.norm, q=args.q)
    except FileNotFoundError as exc:
        print(f"error: input file not found: {exc.filename}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except MatrixParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except NotPositiveDefiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_PD

    if args.format == "json":
        _emit(report_to_json(report), args.out)
    elif args.format == "csv":
        _emit(report_to_csv(report), args.out)
    else:
        _emit(format_report_table(report), args.out)

    if args.strict:
        failed = sorted(name for name, ok in report.flags.items() if not ok)
        if failed:
            print(
                f"hypothesis failure under --strict: {', '.join(failed)}",
                file=sys.stderr,
            )
            return EXIT_HYPOTHESIS
    return EXIT_OK


def _cmd_kappa_demo(args, parser) -> int:
    from .defect import etas_schur, p_diagonal_split

    columns = ("kappa", "res_norm", "eta", "eta_computed", "rel_error", "ratio")
    rows = []
    for kappa in sorted(args.kappas):
        h = hkappa_matrix(kappa)
        ref = hkappa_reference(kappa)
        basis = np.zeros((3, 1))
        basis[0, 0] = 1.0
        split = p_diagonal_split(h, TestSubspace(basis))
        eta_computed = etas_schur(split).eta_max
        lam1 = sym_eig(h)[0][0]
        mu = 1 / 101
        rel_error = (mu - lam1) / mu
        rows.append(
            (
                kappa,
                ref.res_norm,
                ref.eta,
                eta_computed,
                rel_error,
                rel_error / eta_computed**2,
            )
        )
    text = _csv_table(columns, rows) if args.format == "csv" else _text_table(columns, rows)
    _emit(text, args.out)
    return EXIT_OK


def _cmd_schrodinger(args, parser) -> int:
    columns = ("kappa", "eta2", "taylor", "lower", "upper", "exact")
    rows = []
    oracle_lines = []
    for kappa in sorted(args.kappas):
        try:
            lam = schrodinger_lambda(kappa, 1)
            lower, upper = schrodinger_bounds(kappa)
        except HypothesisError as exc:
            print(f"error: kappa={kappa:g}: {exc}", file=sys.stderr)
            return EXIT_HYPOTHESIS
        exact = (np.pi**2 - lam) / np.pi**2
        rows.append(
            (kappa, schrodinger_eta2(kappa), schrodinger_taylor(kappa), lower, upper, exact)
        )
        if args.oracle_fd is not None:
            length, nodes = args.oracle_fd
            fd = schrodinger_eta2_fd(kappa, length=length, nodes=int(nodes))
            oracle_lines.append(
                f"# fd oracle kappa={kappa:g}: eta2={fd:.10e} "
                f"|closed form - oracle| = {abs(fd - schrodinger_eta2(kappa)):.3e}"
            )
    text = _csv_table(columns, rows) if args.format == "csv" else _text_table(columns, rows)
    if oracle_lines:
        text += "\n".join(oracle_lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _cmd_fem_periodic(args, parser) -> int:
    columns = ("N", "lower", "middle", "upper")
    rows = []
    for n_mesh in sorted(int(n) for n in args.n_list):
        if n_mesh < 8:
            parser.error(f"mesh count must be >= 8, got {n_mesh}")
        lower, middle, upper = table1_row(
            n_mesh, alpha=args.alpha, k_trunc=args.k_trunc
        )
        rows.append((n_mesh, lower, middle, upper))
    text = _csv_table(columns, rows) if args.format == "csv" else _text_table(columns, rows)
    _emit(text, args.out)
    return EXIT_OK


def _cmd_verify(args, parser) -> int:
    names = None
    if args.only:
        names = [tok for tok in args.only.split(",") if tok.strip()]
    try:
        results = run_checks(names=names, seed=args.seed)
    except KeyError as exc:
        parser.error(str(exc))
    for r in results:
        status = "ok  " if r.passed else "FAIL"
        print(f"[{status}] {r.name}: {r.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} failing propert{'y' if len(failed) == 1 else 'ies'}: "
              + ", ".join(failed), file=sys.stderr)
        return EXIT_FAILURE
    print(f"all {len(results)} properties hold (seed {args.seed})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ritzbounds",
        description="Relative a-posteriori eigenvalue bounds from Ritz test subspaces.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser(
        "bounds", help="evaluate all bounds for a matrix and a test subspace"
    )
    p_bounds.add_argument("--matrix", required=True, help="operator in matrix text format")
    p_bounds.add_argument(
        "--subspace",
        required=True,
        help="basis columns in matrix text format (orthonormalized on load), "
        "or 'lowest-K' to take K eigenvectors of the --precond matrix",
    )
    p_bounds.add_argument("--precond", help="preconditioner matrix for 'lowest-K'")
    p_bounds.add_argument(
        "--norm", choices=("spectral", "frobenius", "trace"), default="frobenius"
    )
    p_bounds.add_argument("--q", type=int, default=1, help="1-based target eigenvalue index")
    p_bounds.add_argument("--out", help="output path (default stdout)")
    p_bounds.add_argument("--format", choices=("csv", "json", "table"), default="table")
    p_bounds.add_argument(
        "--strict",
        action="store_true",
        help="exit nonzero when any theorem hypothesis fails",
    )

    p_kappa = sub.add_parser("kappa-demo", help="3x3 coupling family demo")
    p_kappa.add_argument(
        "--kappas",
        type=lambda s: _parse_float_list(s, "kappa"),
        default=[10.0, 100.0, 1000.0],
        help="comma-separated coupling values (default 10,100,1000)",
    )
    p_kappa.add_argument("--out", help="output path (default stdout)")
    p_kappa.add_argument("--format", choices=("csv", "table"), default="table")

    p_schro = sub.add_parser("schrodinger", help="large-coupling model sweep")
    p_schro.add_argument(
        "--kappas",
        type=lambda s: _parse_float_list(s, "kappa"),
        default=[5.0, 10.0, 100.0, 1000.0],
        help="comma-separated coupling values (default 5,10,100,1000)",
    )
    p_schro.add_argument(
        "--oracle-fd",
        nargs=2,
        type=float,
        metavar=("L", "N"),
        help="also run the finite-difference defect oracle on [0, L] with N nodes",
    )
    p_schro.add_argument("--out", help="output path (default stdout)")
    p_schro.add_argument("--format", choices=("csv", "table"), default="table")

    p_fem = sub.add_parser("fem-periodic", help="anti-periodic reference table")
    p_fem.add_argument(
        "--n-list",
        type=lambda s: _parse_float_list(s, "mesh"),
        default=[40, 60, 80, 100, 120],
        help="comma-separated mesh counts (default 40,60,80,100,120)",
    )
    p_fem.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="spectral shift (default %(default)s)")
    p_fem.add_argument("--k-trunc", type=int, default=DEFAULT_K_TRUNC, help="frequency cutoff for inverse moments (default %(default)s)")
    p_fem.add_argument("--out", help="output path (default stdout)")
    p_fem.add_argument("--format", choices=("csv", "table"), default="csv")

    p_verify = sub.add_parser("verify", help="run the named property checks")
    p_verify.add_argument("--seed", type=int, default=DEFAULT_SEED, help="rng seed (default %(default)s)")
    p_verify.add_argument("--only", help="comma-separated subset of check names")

    return parser


_COMMANDS = {
    "bounds": _cmd_bounds,
    "kappa-demo": _cmd_kappa_demo,
    "schrodinger": _cmd_schrodinger,
    "fem-periodic": _cmd_fem_periodic,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args, parser)
    except RitzBoundsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
