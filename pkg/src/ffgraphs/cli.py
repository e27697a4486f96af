"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 bad parameters.  JSON output is
key-sorted and carries the full run configuration; wall-clock times live only
under ``metadata`` (omitted with ``--compare``).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .combinat import RamseyError, SearchBudget, ramsey_witness
from .distance import DistanceError, ExperimentConfig, run_experiment
from .ffield import FieldError, field_for_order, make_field
from .graphs import (
    ORTHOGONAL_FAMILIES,
    GraphError,
    build_alon_graph,
    build_code_graph,
    build_euclidean,
    build_halfplane,
    build_orthogonal,
    halfplane_ext,
)
from .qforms import KINDS, FormError, form_summary, make_form
from .spectral import SpectralError, certify

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=str) + "\n"


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args) -> dict:
    skip = {"func", "output"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# subcommands


def cmd_field(args) -> int:
    F = make_field(args.p, args.r)
    _emit(_dump({"config": _config(args), "field": F.summary()}), args.output)
    return EXIT_OK


def cmd_form(args) -> int:
    F = field_for_order(args.q)
    Q = make_form(F, args.kind, args.dim)
    _emit(_dump({"config": _config(args), "form": form_summary(Q)}), args.output)
    return EXIT_OK


def _build_graph(args):
    fam = args.family
    if fam == "euclidean":
        _need(args, "q", "d", "kind", "a")
        Q = make_form(field_for_order(args.q), args.kind, args.d)
        return build_euclidean(Q, args.a % args.q)
    if fam == "halfplane":
        _need(args, "q", "a")
        return build_halfplane(halfplane_ext(args.q), args.a % args.q)
    if fam == "orthogonal":
        _need(args, "q", "m", "i", "orth_family")
        kind, dim = {
            "odd_theta": ("odd_std", 2 * args.m + 1),
            "odd_omega": ("odd_std", 2 * args.m + 1),
            "even_plus": ("plus_even", 2 * args.m),
            "even_minus": ("minus_even", 2 * args.m),
        }[args.orth_family]
        return build_orthogonal(args.orth_family, make_form(field_for_order(args.q), kind, dim), args.i)
    if fam == "bch":
        _need(args, "k")
        return build_code_graph(args.k)
    if fam == "alon":
        _need(args, "k")
        return build_alon_graph(args.k)
    raise UsageError(f"unknown family {fam!r}")


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"--family {args.family} needs " + ", ".join("--" + n.replace("_", "-") for n in missing))


def cmd_graph(args) -> int:
    G = _build_graph(args)
    out = {"config": _config(args), "family_tag": G.family_tag, "n": G.n}
    code = EXIT_OK
    if args.certify:
        cert = certify(G)
        out["certificate"] = cert.to_dict()
        if cert.passed is False:
            code = EXIT_CHECK
    if G.family_tag.get("valency_ok") is False:
        code = EXIT_CHECK
    if args.format == "adjlist":
        text = G.to_adjlist()
        if args.output:
            Path(args.output).write_text(text)
            sys.stdout.write(_dump(out))
        else:
            sys.stdout.write(text)
        return code
    out["graph"] = G.to_dict()
    _emit(_dump(out), args.output)
    return code


def cmd_ramsey(args) -> int:
    budget = SearchBudget(wall_limit_seconds=args.budget_seconds)
    w = ramsey_witness(args.q, args.a, exact_alpha=True if args.exact_alpha else None, budget=budget)
    _emit(_dump({"config": _config(args), "witness": w.to_dict()}), args.output)
    return EXIT_OK if w.valid else EXIT_CHECK


def cmd_distance(args) -> int:
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file {args.config} not found")
        try:
            cfg = ExperimentConfig.from_dict(json.loads(path.read_text()))
        except json.JSONDecodeError as exc:
            raise UsageError(f"config is not valid JSON: {exc}") from exc
    else:
        if args.space is None or args.q is None:
            raise UsageError("distance needs --config or --space and --q")
        cfg = ExperimentConfig(
            space=args.space,
            q=args.q,
            d=args.d or 2,
            kind=args.kind,
            sizes=args.sizes or [],
            trials=args.trials,
            seed=args.seed,
            mode=args.mode,
            pair=args.pair,
            exhaustive=args.exhaustive,
            max_size=args.max_size,
        )
        if not cfg.exhaustive and not cfg.sizes:
            raise UsageError("give --sizes or --exhaustive")
    rep = run_experiment(cfg)
    fmt = args.format or ("csv" if cfg.exhaustive else "json")
    _emit(rep.to_csv() if fmt == "csv" else _dump(rep.to_dict()), args.output)
    return EXIT_CHECK if rep.violations else EXIT_OK


def cmd_suite(args) -> int:
    from .suite import TITLES, run_suite

    if args.list:
        for n, title in TITLES.items():
            sys.stdout.write(f"{n:>2}  {title}\n")
        return EXIT_OK
    numbers = args.only or None
    if numbers and any(n not in TITLES for n in numbers):
        raise UsageError(f"criteria are numbered 1..{len(TITLES)}")
    log = (lambda line: sys.stderr.write(line + "\n")) if not args.quiet else None
    results = run_suite(numbers, corrupt=args.inject_corruption, log=log)
    report = {"config": _config(args), "criteria": [r.to_dict() for r in results],
              "all_passed": all(r.passed for r in results)}
    if not args.compare:
        report["metadata"] = {"seconds": {str(r.number): round(r.seconds, 3) for r in results}}
    _emit(_dump(report), args.output)
    return EXIT_OK if report["all_passed"] else EXIT_CHECK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ffgraphs", description="Finite Euclidean and non-Euclidean graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", help="summarise GF(p^r)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("form", help="quadratic form, Gram matrix and sphere sizes")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_form)

    p = sub.add_parser("graph", help="build (and optionally certify) a graph")
    p.add_argument("--family", choices=["euclidean", "halfplane", "orthogonal", "bch", "alon"], required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--a", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--i", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--orth-family", choices=ORTHOGONAL_FAMILIES)
    p.add_argument("--certify", action="store_true")
    p.add_argument("--format", choices=["json", "adjlist"], default="json")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("ramsey", help="triangle-free witness from E_q(2, Q+, a)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--exact-alpha", action="store_true")
    p.add_argument("--budget-seconds", type=float, default=300.0)
    p.set_defaults(func=cmd_ramsey)

    p = sub.add_parser("distance", help="distance-set experiments")
    p.add_argument("--config")
    p.add_argument("--space", choices=["euclidean", "halfplane"])
    p.add_argument("--q", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--sizes", type=int, nargs="+")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=list(ExperimentConfig.MODES), default="uniform")
    p.add_argument("--pair", action="store_true")
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--max-size", type=int, default=5)
    p.add_argument("--format", choices=["json", "csv"])
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("suite", help="run the acceptance criteria")
    p.add_argument("--list", action="store_true")
    p.add_argument("--only", type=int, nargs="+")
    p.add_argument("--inject-corruption", action="store_true", help="test hook: corrupt every adjacency")
    p.add_argument("--compare", action="store_true", help="omit timing metadata")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_suite)

    for sp in sub.choices.values():
        sp.add_argument("--output", "-o")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, FieldError, FormError, GraphError, RamseyError, DistanceError, SpectralError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
