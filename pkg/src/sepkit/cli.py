"""Command-line entry point.

Subcommands: ``bounds ball|cube|cascade|max-m``, ``sample``,
``check point|pairs|cascade|oracle``, ``correct build|audit``,
``experiment fig2|remark1|cascade|validate``.

Exit codes: 0 success, 1 internal error (including unwritable output),
2 invalid arguments, 3 failed experiment assertion.  The resolved
configuration (including the seed) is echoed to stderr before any
computation, so every run can be reproduced from its log.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import bounds, corrector, experiments, geometry, separability
from .errors import SepkitError

_INV_SQRT2 = math.sqrt(0.5)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_ASSERTION = 3


def _radius(token: str) -> float:
    """Radius flag value; the literal ``inv-sqrt2`` avoids decimal truncation."""
    if token == "inv-sqrt2":
        return _INV_SQRT2
    try:
        return float(token)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"--r must be a float or 'inv-sqrt2', got {token!r}") from exc


def _parse_generator(token: str) -> geometry.CoordinateGenerator:
    kind, _, arg = token.partition("(")
    arg = arg.rstrip(")")
    if kind == "u":
        a, b = (float(v) for v in arg.split(","))
        return geometry.UniformInterval(a, b)
    if kind == "b":
        return geometry.Bernoulli(float(arg))
    if kind == "m":
        pairs = [p.split(":") for p in arg.split(",")]
        return geometry.DiscreteMixture(values=tuple(float(v) for v, _ in pairs),
                                        weights=tuple(float(w) for _, w in pairs))
    raise argparse.ArgumentTypeError(f"bad generator {token!r}; use u(a,b), b(p) or m(v:w,...)")


def _parse_product_gens(pattern: str, n: int) -> tuple[geometry.CoordinateGenerator, ...]:
    """Expand 'u(0,1)x50,b(0.3)x50' into per-coordinate generators."""
    gens: list[geometry.CoordinateGenerator] = []
    for chunk in pattern.split(";"):
        token, _, count = chunk.partition("x")
        gens.extend([_parse_generator(token)] * (int(count) if count else 1))
    if len(gens) != n:
        raise argparse.ArgumentTypeError(f"generator pattern covers {len(gens)} coordinates, --n is {n}")
    return tuple(gens)


def _echo_config(args: argparse.Namespace) -> None:
    resolved = {k: v for k, v in sorted(vars(args).items()) if not callable(v) and k != "func"}
    print(f"sepkit config: {json.dumps(resolved, default=str)}", file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w") as fh:
        fh.write(text)


def _bound_json(result: bounds.BoundResult, extra: dict) -> str:
    doc = dict(extra)
    doc.update({
        "probability_lower_bound": result.probability_lower_bound,
        "log_complement": result.log_complement,
        "complement": math.exp(result.log_complement) if result.log_complement < 700 else math.inf,
        "vacuous": result.vacuous,
    })
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_bounds_ball(args) -> int:
    params = bounds.BallBoundParams(n=args.n, m=args.m, r=args.r)
    fn = {"single": bounds.ball_single, "pairwise": bounds.ball_pairwise,
          "angle": bounds.ball_angle}[args.kind]
    res = fn(params)
    _emit(_bound_json(res, {"bound": f"ball-{args.kind}", "n": args.n, "M": args.m, "r": args.r}),
          args.out)
    return EXIT_OK


def _cmd_bounds_cube(args) -> int:
    if args.simplified:
        fn = {"single": bounds.cube_single_simplified, "pairwise": bounds.cube_pairwise_simplified}[args.kind]
        res = fn(args.n, args.m, args.sigma0sq)
        extra = {"bound": f"cube-{args.kind}-simplified", "n": args.n, "M": args.m,
                 "sigma0sq": args.sigma0sq}
    else:
        params = bounds.CubeBoundParams(n=args.n, m=args.m, delta=args.delta,
                                        sigma0sq=args.sigma0sq, r0sq=args.r0sq)
        fn = {"single": bounds.cube_single, "pairwise": bounds.cube_pairwise}[args.kind]
        res = fn(params)
        extra = {"bound": f"cube-{args.kind}", "n": args.n, "M": args.m, "delta": args.delta,
                 "sigma0sq": args.sigma0sq, "R0sq": params.r0sq}
    _emit(_bound_json(res, extra), args.out)
    return EXIT_OK


def _cmd_bounds_cascade(args) -> int:
    res = bounds.cascade_bound(args.n, args.r, args.m)
    _emit(_bound_json(res, {"bound": "cascade", "n": args.n, "M": args.m, "r": args.r}), args.out)
    return EXIT_OK


def _cmd_bounds_max_m(args) -> int:
    if args.family == "ball-single":
        mm = bounds.ball_max_m_single(args.n, args.r, args.theta)
    elif args.family == "ball-pairwise":
        mm = bounds.ball_max_m_pairwise(args.n, args.r, args.theta)
    elif args.family == "ball-simple":
        mm = bounds.ball_max_m_simple(args.n, args.r, args.theta)
    elif args.family == "cube-single":
        mm = bounds.cube_max_m_single(args.n, args.sigma0sq, args.theta)
    else:
        mm = bounds.cube_max_m_pairwise(args.n, args.sigma0sq, args.theta)
    doc = {"family": args.family, "n": args.n, "theta": args.theta,
           "max_m": mm.value, "max_m_floor": mm.floor}
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def _make_sample(args) -> geometry.SampleSet:
    if args.dist == "ball":
        return geometry.sample_ball(args.n, args.m, args.seed)
    if args.dist == "cube":
        return geometry.sample_cube(args.n, args.m, args.seed)
    gens = _parse_product_gens(args.product_gens, args.n)
    spec = geometry.product_spec(gens, args.sigma0sq)
    return geometry.sample_product(spec, args.n, args.m, args.seed)


def _cmd_sample(args) -> int:
    sample = _make_sample(args)
    if args.format == "binary":
        if args.out in (None, "-"):
            raise SepkitError("binary output needs --out PATH")
        geometry.write_binary(sample, args.out)
    else:
        if args.out in (None, "-"):
            geometry.write_csv(sample, "/dev/stdout")
        else:
            geometry.write_csv(sample, args.out)
    return EXIT_OK


def _cmd_check(args) -> int:
    sample = _make_sample(args)
    if args.what == "point":
        verdict = separability.check_point_separable(sample, args.probe_index, kind=args.kind, r=args.r)
        doc = {"check": args.kind, "probe_index": args.probe_index,
               "separable": verdict.separable, "margin": verdict.margin,
               "violator_count": verdict.violator_count}
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    elif args.what == "pairs":
        report = separability.check_all_pairs(sample, args.r, kind=args.kind)
        _emit(report.to_csv() if args.format == "csv" else report.to_json(), args.out)
    elif args.what == "cascade":
        sep = separability.cascade_separate(sample, args.probe_index, args.r)
        doc = {"check": "cascade", "probe_index": args.probe_index,
               "violators": list(sep.violators),
               "first": {"weights": sep.first.weights.tolist(), "offset": sep.first.offset},
               "second": {"weights": sep.second.weights.tolist(), "offset": sep.second.offset}}
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        decision = separability.oracle_separable(sample, args.probe_index)
        doc = {"check": "oracle", "probe_index": args.probe_index,
               "separable": decision.separable,
               "certificate": None if decision.certificate is None else decision.certificate.tolist(),
               "residual": decision.residual}
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def _correction_parts(args):
    correct = _make_sample(args)
    rng = geometry.spawn_rng(args.seed, 1001)
    if args.dist == "ball":
        z = rng.standard_normal(args.n)
        error_point = z / np.linalg.norm(z) * rng.random() ** (1.0 / args.n)
    else:
        error_point = rng.random(args.n)
    return correct, error_point


def _cmd_correct(args) -> int:
    correct, error_point = _correction_parts(args)
    built = corrector.build_corrector(correct, error_point, args.label,
                                      whitening_on=not args.no_whiten)
    if args.what == "build":
        _emit(built.to_json(), args.out)
        return EXIT_OK
    held_seed = geometry.derive_key(args.seed, 1002) & (2**64 - 1)
    if args.dist == "ball":
        held = geometry.sample_ball(args.n, args.m, held_seed)
    else:
        held = geometry.sample_cube(args.n, args.m, held_seed)
    audit = corrector.audit_corrector(built, held, error_point)
    doc = {"true_positive": audit.true_positive,
           "false_positive_rate": audit.false_positive_rate,
           "margin": audit.margin}
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    if args.what == "fig2":
        if args.paper_scale:
            config = experiments.Fig2Config.paper_scale(dims=args.dims, seed=args.seed)
        else:
            config = experiments.Fig2Config(dims=args.dims, m=args.m, n_probe=args.n_probe,
                                            trials=args.trials, seed=args.seed,
                                            max_coords=args.budget)
        table = experiments.run_fig2(config)
        _emit(table.to_csv() if args.format == "csv" else table.to_json(), args.out)
        return EXIT_OK if table.passed else EXIT_ASSERTION
    if args.what == "remark1":
        report = experiments.run_remark1()
        _emit(report.to_json(), args.out)
        return EXIT_OK if report.passed else EXIT_ASSERTION
    if args.what == "cascade":
        report = experiments.run_cascade_examples()
        _emit(report.to_json(), args.out)
        return EXIT_OK if report.passed else EXIT_ASSERTION
    table = experiments.run_bound_validation(trials=args.trials, seed=args.seed,
                                             max_coords=args.budget)
    _emit(table.to_csv() if args.format == "csv" else table.to_json(), args.out)
    return EXIT_OK if table.passed else EXIT_ASSERTION


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _add_sample_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dist", choices=("ball", "cube", "product"), default="ball")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=experiments.DEFAULT_SEED)
    p.add_argument("--sigma0sq", type=float, default=1.0 / 48.0,
                   help="variance floor for product distributions")
    p.add_argument("--product-gens", default=None,
                   help="per-coordinate generators, e.g. 'u(0,1)x50;b(0.3)x50'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sepkit",
                                     description="Separation bounds for random point sets.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_bounds = sub.add_parser("bounds", help="evaluate closed-form bounds")
    bsub = p_bounds.add_subparsers(dest="which", required=True)

    pb = bsub.add_parser("ball")
    pb.add_argument("--n", type=int, required=True)
    pb.add_argument("--m", type=float, required=True)
    pb.add_argument("--r", type=_radius, required=True)
    pb.add_argument("--kind", choices=("single", "pairwise", "angle"), default="pairwise")
    _add_common(pb)
    pb.set_defaults(func=_cmd_bounds_ball)

    pc = bsub.add_parser("cube")
    pc.add_argument("--n", type=int, required=True)
    pc.add_argument("--m", type=float, required=True)
    pc.add_argument("--delta", type=float, default=0.5)
    pc.add_argument("--sigma0sq", type=float, required=True)
    pc.add_argument("--r0sq", type=float, default=None)
    pc.add_argument("--kind", choices=("single", "pairwise"), default="pairwise")
    pc.add_argument("--simplified", action="store_true",
                    help="use the delta=1/2, R0^2=n*sigma0^2 specialization")
    _add_common(pc)
    pc.set_defaults(func=_cmd_bounds_cube)

    pk = bsub.add_parser("cascade")
    pk.add_argument("--n", type=int, required=True)
    pk.add_argument("--m", type=float, required=True)
    pk.add_argument("--r", type=_radius, required=True)
    _add_common(pk)
    pk.set_defaults(func=_cmd_bounds_cascade)

    pm = bsub.add_parser("max-m")
    pm.add_argument("--family", choices=("ball-single", "ball-pairwise", "ball-simple",
                                         "cube-single", "cube-pairwise"), required=True)
    pm.add_argument("--n", type=int, required=True)
    pm.add_argument("--r", type=_radius, default=_INV_SQRT2)
    pm.add_argument("--theta", type=float, required=True)
    pm.add_argument("--sigma0sq", type=float, default=1.0 / 12.0)
    _add_common(pm)
    pm.set_defaults(func=_cmd_bounds_max_m)

    ps = sub.add_parser("sample", help="draw a seeded sample set")
    _add_sample_flags(ps)
    ps.add_argument("--format", choices=("csv", "binary"), default="csv")
    ps.add_argument("--out", default=None)
    ps.set_defaults(func=_cmd_sample)

    pch = sub.add_parser("check", help="separability checks on a fresh sample")
    pch.add_argument("what", choices=("point", "pairs", "cascade", "oracle"))
    _add_sample_flags(pch)
    pch.add_argument("--probe-index", type=int, default=0)
    pch.add_argument("--kind", default=None,
                     help="point: fisher|whitened|pairwise-r; pairs: pairwise|angle")
    pch.add_argument("--r", type=_radius, default=_INV_SQRT2)
    _add_common(pch)
    pch.set_defaults(func=_cmd_check)

    pco = sub.add_parser("correct", help="build or audit a one-shot corrector")
    pco.add_argument("what", choices=("build", "audit"))
    _add_sample_flags(pco)
    pco.add_argument("--label", default="corrected")
    pco.add_argument("--no-whiten", action="store_true")
    _add_common(pco)
    pco.set_defaults(func=_cmd_correct)

    pex = sub.add_parser("experiment", help="run a verification experiment")
    pex.add_argument("what", choices=("fig2", "remark1", "cascade", "validate"))
    pex.add_argument("--dims", type=lambda s: tuple(int(v) for v in s.split(",")),
                     default=(100, 500, 1000, 2000, 5000))
    pex.add_argument("--m", type=int, default=2000)
    pex.add_argument("--n-probe", type=int, default=400)
    pex.add_argument("--trials", type=int, default=None)
    pex.add_argument("--seed", type=int, default=experiments.DEFAULT_SEED)
    pex.add_argument("--paper-scale", action="store_true")
    pex.add_argument("--budget", type=float, default=experiments.DESK_BUDGET)
    _add_common(pex)
    pex.set_defaults(func=_cmd_experiment)

    return parser


def _normalize(args: argparse.Namespace) -> None:
    if args.command == "check":
        if args.kind is None:
            args.kind = "fisher" if args.what == "point" else "pairwise"
        if args.what == "point" and args.kind not in ("fisher", "whitened", "pairwise-r"):
            raise SepkitError(f"--kind {args.kind!r} is not a point check")
        if args.what == "pairs" and args.kind not in ("pairwise", "angle"):
            raise SepkitError(f"--kind {args.kind!r} is not a pair check")
    if args.command == "sample" and args.dist == "product" and not args.product_gens:
        raise SepkitError("--dist product needs --product-gens")
    if getattr(args, "command", None) == "check" and args.dist == "product" and not args.product_gens:
        raise SepkitError("--dist product needs --product-gens")
    if args.command == "experiment" and args.trials is None:
        args.trials = 20 if args.what == "fig2" else 200


def dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        _normalize(args)
        _echo_config(args)
        return args.func(args)
    except SepkitError as exc:
        print(f"sepkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"sepkit: i/o error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - defensive
        print(f"sepkit: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
