"""Command line front end: ``cle4pt {eval,constants,verify,mc,bulk}``.

Exit codes: 0 success, 1 verification failure, 2 domain error,
3 convergence failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from .errors import ConvergenceError, DomainError

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 1, 2, 3
EVAL_HEADER = "lambda,V0,Vh,V3h1,R,residual_max"
BULK_HEADER = "lambda,U1,U2,U3,residual_max"
CONJECTURAL_MARKER = "conjectural"


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(x)
    return f"{float(x):.17g}"


def _row(values) -> str:
    return ",".join(v if isinstance(v, str) else _fmt(v) for v in values)


def _kappa(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"cannot read kappa from {text!r}") from None


def _grid(text: str) -> np.ndarray:
    try:
        a, b, n = text.split(":")
        return np.linspace(float(a), float(b), int(n))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:steps, got {text!r}") from None


def _params(args):
    from .ode_core import KappaParams

    p = KappaParams.of(args.kappa)
    if p.conjectural:
        print(f"warning: kappa = {args.kappa} lies outside (4, 8); results there are conjectural", file=sys.stderr)
    return p


# --- commands ---------------------------------------------------------------------

def cmd_eval(args) -> tuple[int, str]:
    p = _params(args)
    if p.conjectural:
        return EXIT_OK, _eval_closed_forms(p, args.grid)
    from .connection import boundary_basis
    from .ode_core import normalized_residual

    b = boundary_basis(p, args.order)
    lines = [EVAL_HEADER]
    for lam in args.grid:
        jets = b.jets(float(lam))
        res = max(abs(normalized_residual(b.spec, j, float(lam))) for j in jets)
        lines.append(_row([lam, jets[0].u, jets[1].u, jets[2].u, b.ratio(float(lam)), res]))
    return EXIT_OK, "\n".join(lines) + "\n"


def _eval_closed_forms(p, grid) -> str:
    """Printed solutions at the special kappa <= 4, marked as conjectural."""
    from .closed_forms import SOLUTIONS, SpecialKappa, v_exact_jet
    from .errors import UnsupportedError
    from .ode_core import make_boundary_ode, normalized_residual

    try:
        sk = SpecialKappa(p.exact)
    except ValueError:
        raise UnsupportedError(f"no printed solutions at kappa = {p.exact}") from None
    labels = list(SOLUTIONS[sk])
    spec = make_boundary_ode(p)
    lines = [",".join(["lambda", *labels, "residual_max", "regime"])]
    for lam in grid:
        jets = [v_exact_jet(sk, lab, float(lam)) for lab in labels]
        res = max(abs(normalized_residual(spec, j, float(lam))) for j in jets)
        lines.append(_row([lam, *(j.u for j in jets), res, CONJECTURAL_MARKER]))
    return "\n".join(lines) + "\n"


def cmd_constants(args) -> tuple[int, str]:
    from .closed_forms import a_fk
    from .connection import boundary_basis
    from .verify import A_EXACT, A_FK_PRINTED

    p = _params(args)
    c = boundary_basis(p, args.order).connection
    lines = ["quantity,value,reference,abs_diff"]
    lines.append(_row(["beta", c.beta, "", ""]))
    lines.append(_row(["C1/C2", c.c1_over_c2, "", ""]))
    lines.append(_row(["A", c.A, "", ""]))
    if p.exact == 6:
        lines.append(_row(["A closed form", c.A, A_EXACT, abs(c.A - A_EXACT)]))
    if p.exact == Fraction(16, 3):
        v = a_fk()
        lines.append(_row(["A_FK", v, A_FK_PRINTED, abs(v - A_FK_PRINTED)]))
    return EXIT_OK, "\n".join(lines) + "\n"


def cmd_verify(args) -> tuple[int, str]:
    from .verify import DEFAULT_KAPPAS, format_report, run_checks

    kappas = DEFAULT_KAPPAS if args.kappa is None else (args.kappa,)
    checks = run_checks(kappas, tol=args.tol, fault=args.inject_fault)
    code = EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY
    return code, format_report(checks)


def cmd_mc(args) -> tuple[int, str]:
    from .perc_mc import CSV_HEADER, McConfig, points_for_lambda, run_box

    lines = [CSV_HEADER]
    for lam in args.grid:
        pts = points_for_lambda(float(lam), args.L, args.aspect, args.w)
        cfg = McConfig(args.L, args.aspect, pts, args.w, args.samples, args.seed, args.workers)
        lines.append(run_box(cfg).csv_row(args.L, args.w))
    return EXIT_OK, "\n".join(lines) + "\n"


def cmd_bulk(args) -> tuple[int, str]:
    from .bulk_boundary import bulk_solution_jet
    from .ode_core import make_bulk_ode, normalized_residual

    p = _params(args)
    spec = make_bulk_ode(p)
    lines = [BULK_HEADER]
    for lam in args.grid:
        lam = float(lam)
        if not 0.01 <= lam <= 1.5:
            raise DomainError(f"bulk lambda = {lam} outside [0.01, 1.5]")
        jets = [bulk_solution_jet(lam, *c, p) for c in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
        res = max(abs(normalized_residual(spec, j, lam)) for j in jets)
        lines.append(_row([lam, *(j.u for j in jets), res]))
    return EXIT_OK, "\n".join(lines) + "\n"


COMMANDS = {
    "eval": cmd_eval,
    "constants": cmd_constants,
    "verify": cmd_verify,
    "mc": cmd_mc,
    "bulk": cmd_bulk,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cle4pt", description="Boundary four-point connectivities of CLE.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, kappa_default="6", grid_default="0.05:0.95:19"):
        sp.add_argument("--kappa", type=_kappa, default=None if kappa_default is None else _kappa(kappa_default))
        sp.add_argument("--grid", type=_grid, default=_grid(grid_default))
        sp.add_argument("--order", type=int, default=200)
        sp.add_argument("--tol", type=float, default=1e-8)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out", default=None, help="output file (default: standard output)")
        return sp

    common(sub.add_parser("eval", help="tabulate V0, Vh, V3h1 and R"))
    common(sub.add_parser("constants", help="beta, C1/C2 and A"))
    v = common(sub.add_parser("verify", help="run the invariant suite"), kappa_default=None)
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    m = common(sub.add_parser("mc", help="percolation Monte Carlo of the universal ratio"), grid_default="0.3:0.7:3")
    m.add_argument("--L", type=int, default=128)
    m.add_argument("--w", type=int, default=3)
    m.add_argument("--aspect", type=float, default=2.0)
    m.add_argument("--samples", type=int, default=10000)
    common(sub.add_parser("bulk", help="bulk ODE solution basis"), grid_default="0.1:1.4:14")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, text = COMMANDS[args.command](args)
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONVERGENCE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
