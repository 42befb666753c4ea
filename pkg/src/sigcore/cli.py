"""``sigcore`` command-line interface.

Exit codes:
    0  success (``check-weibull``: the quality function is Weibull-compatible)
    1  ``check-weibull`` only: not Weibull-compatible
    2  unreadable input (bad JSON, missing or invalid field, bad usage)
    3  inputs do not fit together (component counts, route vs model, non-semicoherent structure)
    4  numerical failure (quadrature did not converge, signature out of tolerance)

Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
import warnings

from . import formats
from ._bits import components_of, level_masks
from .errors import (
    ArityMismatch,
    NotSamplable,
    NotSemicoherent,
    NumericalError,
    RouteError,
    SigcoreError,
)
from .lifetimes import IID
from .oracle import DEFAULT_BATCH, DEFAULT_SAMPLES, monte_carlo_quality, monte_carlo_signature
from .quality import ROUTES, compute_quality, weibull_characterization_check
from .signature import (
    boland_signature,
    projection_residual_check,
    signature_from_quality,
    symmetric_projection,
    tail_probabilities,
)

EXIT_OK, EXIT_REJECT, EXIT_PARSE, EXIT_MISMATCH, EXIT_NUMERIC = 0, 1, 2, 3, 4


def _exit_code(exc: SigcoreError) -> int:
    if isinstance(exc, NumericalError):
        return EXIT_NUMERIC
    if isinstance(exc, (ArityMismatch, NotSemicoherent, RouteError, NotSamplable)):
        return EXIT_MISMATCH
    return EXIT_PARSE


def _bind_n(model, n: int | None):
    if isinstance(model, IID):
        if model.n is not None and n is not None and model.n != n:
            raise ArityMismatch(f"model declares n = {model.n} but the system has {n} components")
        return type(model)(model.n if model.n is not None else n)
    if n is not None and model.n != n:
        raise ArityMismatch(f"model describes {model.n} components but the system has {n}")
    return model


def _emit(payload: dict) -> None:
    sys.stdout.write(formats.dumps(payload) + "\n")


def _csv(header: str, rows) -> None:
    lines = [header] + [",".join(cells) for cells in rows]
    sys.stdout.write("\n".join(lines) + "\n")


def cmd_signature(args) -> int:
    phi, _ = formats.parse_structure(formats.load_json(args.system))
    model = _bind_n(formats.parse_model(formats.load_json(args.model)), phi.n)
    if args.route == "auto" and isinstance(model, IID) and not args.normalize_levels:
        sig = boland_signature(phi)
        q = compute_quality(model, "exchangeable")
    else:
        q = compute_quality(model, args.route, tol=args.tol)
        if args.normalize_levels:
            q = q.normalize_levels()
        sig = signature_from_quality(phi, q)
    tails = tail_probabilities(phi, q)
    payload = formats.signature_to_json(sig, tails)
    if args.csv:
        p = payload["p"]
        _csv("k,p,tail", ((str(k), formats.fmt_float(p[k - 1]), formats.fmt_float(payload["tails"][k - 1])) for k in range(1, sig.n + 1)))
    else:
        _emit(payload)
    return EXIT_OK


def cmd_quality(args) -> int:
    model = formats.parse_model(formats.load_json(args.model))
    if args.n is not None:
        model = _bind_n(model, args.n)
    q = compute_quality(model, args.route, n=args.n, tol=args.tol)
    if args.normalize_levels:
        q = q.normalize_levels()
    payload = formats.quality_to_json(q, with_tilde=args.tilde)
    if args.csv:
        header = "set,value,tilde" if args.tilde else "set,value"
        rows = []
        for row in payload["q"]:
            cells = [" ".join(str(c) for c in row["set"]), formats.fmt_float(row["value"])]
            if args.tilde:
                cells.append(formats.fmt_float(row["tilde"]))
            rows.append(cells)
        _csv(header, rows)
    else:
        _emit(payload)
    return EXIT_OK


def cmd_project(args) -> int:
    f = formats.parse_table(formats.load_json(args.function), "function")
    w = formats.parse_table(formats.load_json(args.weights), "weights")
    if f.shape != w.shape:
        raise ArityMismatch(f"function has {f.size} entries but weights have {w.size}")
    approx = symmetric_projection(f, w)
    residual = projection_residual_check(f, w, approx)
    _emit(formats.projection_to_json(approx, residual))
    return EXIT_OK


def cmd_simulate(args) -> int:
    phi, paths = formats.parse_structure(formats.load_json(args.system))
    model_json = formats.load_json(args.model)
    model = _bind_n(formats.parse_model(model_json), phi.n)
    report = monte_carlo_signature(paths if paths is not None else phi, model, args.samples, args.seed, args.batch_size)
    payload = {
        "p_hat": report.estimates.tolist(),
        "se": report.standard_errors.tolist(),
        "n_samples": report.samples,
        "seed": report.seed,
        "batch_size": report.batch_size,
        "model": model_json,
    }
    if args.quality:
        qrep = monte_carlo_quality(model, args.samples, args.seed, args.batch_size)
        est, se = qrep.estimates, qrep.standard_errors
        order = [int(m) for lv in level_masks(phi.n) for m in lv]
        payload["q_hat"] = [{"set": list(components_of(m)), "value": float(est[m]), "se": float(se[m])} for m in order]
    if args.csv:
        _csv("k,p_hat,se", ((str(k), formats.fmt_float(payload["p_hat"][k - 1]), formats.fmt_float(payload["se"][k - 1])) for k in range(1, phi.n + 1)))
    else:
        _emit(payload)
    return EXIT_OK


def cmd_check_weibull(args) -> int:
    q = formats.parse_quality(formats.load_json(args.quality))
    result = weibull_characterization_check(q, args.tol)
    payload = {
        "is_weibull_compatible": result.is_weibull_compatible,
        "recovered_rates": list(result.recovered_rates) if result.recovered_rates else None,
        "max_deviation": result.max_deviation if result.max_deviation != float("inf") else None,
        "reason": result.reason,
    }
    _emit(payload)
    if not result.is_weibull_compatible:
        print(f"sigcore: not Weibull-compatible: {result.reason}", file=sys.stderr)
        return EXIT_REJECT
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sigcore", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def output_flags(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--json", action="store_true", help="JSON output (default)")
        g.add_argument("--csv", action="store_true", help="CSV output")

    routes = list(ROUTES)

    p = sub.add_parser("signature", help="generalized signature p_k = Pr(T = X_{k:n})")
    p.add_argument("--system", required=True, metavar="FILE")
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--route", choices=routes, default="auto")
    p.add_argument("--normalize-levels", action="store_true", help="rescale each level of q to sum to one")
    p.add_argument("--tol", type=_positive_float, default=1e-9, help="quadrature tolerance per subset")
    output_flags(p)
    p.set_defaults(func=cmd_signature)

    p = sub.add_parser("quality", help="relative quality function q")
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--n", type=_positive_int, default=None, help="component count for i.i.d. models")
    p.add_argument("--route", choices=routes, default="auto")
    p.add_argument("--tilde", action="store_true", help="also report C(n,|S|) q(S)")
    p.add_argument("--normalize-levels", action="store_true")
    p.add_argument("--tol", type=_positive_float, default=1e-9)
    output_flags(p)
    p.set_defaults(func=cmd_quality)

    p = sub.add_parser("project", help="best symmetric approximation under weights")
    p.add_argument("--function", required=True, metavar="FILE")
    p.add_argument("--weights", required=True, metavar="FILE")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of the signature")
    p.add_argument("--system", required=True, metavar="FILE")
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=_positive_int, default=DEFAULT_BATCH)
    p.add_argument("--quality", action="store_true", help="also estimate q")
    output_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check-weibull", help="test whether q comes from Weibull lifetimes")
    p.add_argument("--quality", required=True, metavar="FILE")
    p.add_argument("--tol", type=_positive_float, default=1e-9)
    p.set_defaults(func=cmd_check_weibull)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except SigcoreError as exc:
        print(f"sigcore: error: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
