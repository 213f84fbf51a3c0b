"""The graev command line: instance files in, JSON run reports out.

Exit status: 0 all checks pass, 1 a check failed, 2 bad input, 3 a numeric
decision was inconclusive.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from .core import validate_space
from .freelcs import solve_seminorm, tu_check
from .graev import graev_norm
from .report import EXIT_INPUT, FAIL, INCONCLUSIVE, PASS, RunReport
from .rolewicz import (
    DEFAULT_GRID_STEP,
    ApproximationContradiction,
    ConstructionError,
    OmegaTorusModel,
    TruncationFloorError,
    approximate_target,
    construct_generator,
    verify_certificate,
)
from .serialize import (
    InputError,
    combination_to_json,
    fixture_path,
    parse_certificate,
    parse_lincomb,
    parse_model,
    parse_space,
    parse_torus_point,
    parse_word,
    read_json,
)
from .suites import (
    duality_sweep,
    embed_suite,
    graev_property_suite,
    lipschitz_sweep,
    net_oracle_sweep,
    rolewicz_suite,
    torus_examples,
    tu_sweep,
)
from .torus import CONVENTIONS, POWERS_FROM_1, InconclusiveError, kronecker_search, net_check

SUITE_SPACES = ("space_discrete3.json", "space_path4.json", "space_pseudo3.json")
SUITE_MODEL = "model_e2_m3_n3.json"


def _rational_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


class _Inputs:
    """Loads instance files (or inline JSON) and records their digests."""

    def __init__(self, report: RunReport):
        self.report = report

    def load(self, label: str, value: str):
        text = value.strip()
        if text[:1] in "{[" or text.startswith('"'):
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise InputError(f"<inline {label}>", "<document>", f"invalid JSON: {exc}") from None
            self.report.inputs[label] = hashlib.sha256(text.encode()).hexdigest()
            return data, f"<inline {label}>"
        data, digest = read_json(value)
        self.report.inputs[label] = digest
        return data, value


def cmd_norm(args, report, inputs):
    space = parse_space(*inputs.load("space", args.space))
    data, path = inputs.load("word", args.word)
    w = parse_word(data, space, path)
    value, cert = graev_norm(space, w)
    report.result = {"value": str(value), "certificate": {
        "pairs": [[space.points[a], space.points[b]] for a, b in cert.pairs],
        "total_cost": str(cert.total_cost)}}
    report.expect("graev.certificate", cert.is_valid_for(space, w),
                  combination_to_json(space, w))


def cmd_seminorm(args, report, inputs):
    space = parse_space(*inputs.load("space", args.space))
    data, path = inputs.load("lincomb", args.lincomb)
    v = parse_lincomb(data, space, path)
    res = solve_seminorm(space, v)
    report.result = {
        "value": str(res.value),
        "flow": [[space.points[i], space.points[j], str(a)]
                 for (i, j), a in sorted(res.certificate.flow.items()) if a],
        "dual": {space.points[i]: str(f) for i, f in enumerate(res.dual.f)},
    }
    report.expect("seminorm.flow_certificate", res.certificate.is_valid_for(space, v),
                  combination_to_json(space, v))
    report.expect("seminorm.strong_duality", res.dual.objective(v) == res.value,
                  combination_to_json(space, v))
    report.expect("seminorm.dual_feasible", res.dual.is_feasible(space),
                  {space.points[i]: str(f) for i, f in enumerate(res.dual.f)})


def cmd_tu_check(args, report, inputs):
    space = parse_space(*inputs.load("space", args.space))
    data, path = inputs.load("word", args.word)
    w = parse_word(data, space, path)
    tu = tu_check(space, w)
    report.result = tu.to_json()
    wit = combination_to_json(space, w)
    report.expect("tu.one_sided", tu.one_sided_ok, wit)
    report.expect("tu.equality", tu.equal, wit)


def cmd_validate(args, report, inputs):
    data, path = inputs.load("space", args.space)
    space = parse_space(data, path, validate=False)
    rep = validate_space(space)
    report.result = {"ok": rep.ok, "violations": [
        {"axiom": v.axiom, "points": [space.points[i] for i in v.indices], "detail": v.detail}
        for v in rep.violations]}
    first = report.result["violations"][0] if rep.violations else None
    report.expect("space.pseudometric", rep.ok, first)


def cmd_check(args, report, inputs):
    space = parse_space(*inputs.load("space", args.space))
    rng = random.Random(args.seed)
    report.result = graev_property_suite(report, space, rng, args.trials,
                                         args.coeff_bound or 3)


def cmd_kronecker(args, report, inputs):
    x = parse_torus_point(*inputs.load("x", args.x))
    target = parse_torus_point(*inputs.load("target", args.target))
    if x.dim != target.dim:
        raise InputError("<target>", "target", f"dimension {target.dim} differs from x ({x.dim})")
    try:
        hit = kronecker_search(x, target, args.eps, args.max_m)
    except InconclusiveError as exc:
        report.add("torus.kronecker", INCONCLUSIVE, detail=str(exc))
        return
    if hit is None:
        report.result = {"m": None, "max_m": args.max_m}
        report.add("torus.kronecker", FAIL, witness={"max_m": args.max_m},
                   detail="no exponent up to max_m is within eps (exhaustive)")
    else:
        report.result = {"m": hit.m, "distance": hit.distance.to_json()}
        report.add("torus.kronecker", PASS, float(args.eps - hit.distance.hi))


def cmd_net(args, report, inputs):
    data, path = inputs.load("points", args.points)
    if not isinstance(data, list) or not data:
        raise InputError(path, "points", "expected a nonempty list of torus points")
    pts = [parse_torus_point(p, path, f"points[{i}]") for i, p in enumerate(data)]
    k = pts[0].dim
    if any(p.dim != k for p in pts):
        raise InputError(path, "points", "points have different dimensions")
    res = net_check(pts, k, args.eps, args.grid or Fraction(1, 1000), method=args.method)
    report.result = res.to_json()
    status = {"certified": PASS, "refuted": FAIL}.get(res.status, INCONCLUSIVE)
    report.add("torus.net", status, res.margin,
               [str(q) for q in res.witness] if res.witness and status != PASS else None)


def cmd_rolewicz_build(args, report, inputs):
    model = OmegaTorusModel(args.depth)
    grid = args.grid or DEFAULT_GRID_STEP
    try:
        cert = construct_generator(model, grid, args.convention)
    except ConstructionError as exc:
        report.add("rolewicz.construct", FAIL, witness={
            "level": exc.level, "reason": exc.reason,
            "suggested_grid": str(exc.suggested_grid) if exc.suggested_grid else None})
        return
    except ValueError as exc:
        raise InputError("<args>", "grid", str(exc)) from None
    report.result = cert.to_json()
    for r in cert.condition_reports:
        report.add(f"rolewicz.condition{r.condition}.level{r.level}",
                   PASS if r.ok else FAIL, r.margin)


def cmd_rolewicz_verify(args, report, inputs):
    data, path = inputs.load("cert", args.cert)
    cert = parse_certificate(data, path)
    try:
        ver = verify_certificate(cert.model, cert, args.grid)
    except ValueError as exc:
        raise InputError(path, "certificate", str(exc)) from None
    report.result = ver.to_json()
    for r in ver.reports:
        status = PASS if r.ok else (INCONCLUSIVE if r.status == "inconclusive" else FAIL)
        report.add(f"rolewicz.condition{r.condition}.level{r.level}", status, r.margin,
                   r.witness if status != PASS or r.status == "advisory" else None, r.detail)
    report.expect("rolewicz.monotone", ver.monotone, {"n": list(cert.n)})


def cmd_rolewicz_approx(args, report, inputs):
    data, path = inputs.load("cert", args.cert)
    cert = parse_certificate(data, path)
    z = parse_torus_point(*inputs.load("target", args.target))
    try:
        a = approximate_target(cert.model, cert, z, args.eps)
    except TruncationFloorError as exc:
        raise InputError("<args>", "eps", str(exc)) from None
    except ValueError as exc:
        raise InputError("<target>", "target", str(exc)) from None
    except ApproximationContradiction as exc:
        report.add("rolewicz.approximate", FAIL, witness={"target": z.to_json()}, detail=str(exc))
        return
    report.result = {"m": a.m, "distance": a.distance.to_json(), "eps": str(a.eps),
                     "floor": str(a.floor)}
    report.add("rolewicz.approximate", PASS, float(a.eps - a.distance.hi))


def cmd_embed_check(args, report, inputs):
    data, path = inputs.load("model", args.model)
    model, metrics = parse_model(data, path)
    rng = random.Random(args.seed)
    report.result = embed_suite(report, model, metrics, rng, args.coeff_bound or 3, args.trials)


def cmd_suite(args, report, inputs):
    """Every property suite on the bundled fixtures with one seed."""
    rng = random.Random(args.seed)
    trials = args.trials
    out = {"graev": {}}
    for name in SUITE_SPACES:
        data, _ = inputs.load(name, str(fixture_path(name)))
        space = parse_space(data, name)
        out["graev"][name] = graev_property_suite(report, space, rng, trials,
                                                  args.coeff_bound or 3,
                                                  prefix=f"graev.{Path(name).stem}")
    out["tu"] = tu_sweep(report, rng, trials)
    out["seminorm"] = duality_sweep(report, rng, trials)
    out["extension"] = lipschitz_sweep(report, rng, trials)
    out["torus"] = net_oracle_sweep(report, rng, trials)
    out["torus"].update(torus_examples(report))
    out["rolewicz"] = rolewicz_suite(report, rng, (1, 2), min(trials, 50),
                                     args.grid or DEFAULT_GRID_STEP, args.convention)
    data, _ = inputs.load(SUITE_MODEL, str(fixture_path(SUITE_MODEL)))
    model, metrics = parse_model(data, SUITE_MODEL)
    out["embed"] = embed_suite(report, model, metrics, rng, args.coeff_bound or 2,
                               min(trials, 100))
    report.result = out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--coeff-bound", type=int, default=None)
    common.add_argument("--grid", type=_rational_arg, default=None,
                        help="grid step 1/G for net certification")
    common.add_argument("--csv", metavar="PATH", help="also write a CSV summary")
    common.add_argument("--convention", choices=CONVENTIONS, default=POWERS_FROM_1)

    parser = argparse.ArgumentParser(prog="graev", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_, parent=sub):
        p = parent.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    p = add("norm", cmd_norm, "Graev norm of a word with its matching certificate")
    p.add_argument("--space", required=True)
    p.add_argument("--word", required=True)
    p = add("seminorm", cmd_seminorm, "maximal seminorm of a rational combination")
    p.add_argument("--space", required=True)
    p.add_argument("--lincomb", required=True)
    p = add("tu-check", cmd_tu_check, "compare the Graev norm with the seminorm")
    p.add_argument("--space", required=True)
    p.add_argument("--word", required=True)
    p = add("check", cmd_check, "seeded property suite on one space")
    p.add_argument("--space", required=True)
    p = add("validate", cmd_validate, "list pseudometric axiom violations")
    p.add_argument("--space", required=True)

    torus = sub.add_parser("torus", help="Kronecker search and net certification")
    tsub = torus.add_subparsers(dest="torus_command", required=True, metavar="ACTION")
    p = add("kronecker", cmd_kronecker, "least power within eps of a target", tsub)
    p.add_argument("--x", required=True, help="point as JSON (inline or file)")
    p.add_argument("--target", required=True)
    p.add_argument("--eps", type=_rational_arg, required=True)
    p.add_argument("--max-m", type=int, required=True)
    p = add("net", cmd_net, "certify or refute an eps-net", tsub)
    p.add_argument("--points", required=True, help="list of points as JSON (inline or file)")
    p.add_argument("--eps", type=_rational_arg, required=True)
    p.add_argument("--method", choices=("auto", "exact", "grid"), default="auto")

    rw = sub.add_parser("rolewicz", help="generators of truncated omega-tori")
    rsub = rw.add_subparsers(dest="rolewicz_command", required=True, metavar="ACTION")
    p = add("build", cmd_rolewicz_build, "construct and verify a generator certificate", rsub)
    p.add_argument("--depth", type=int, required=True)
    p = add("verify", cmd_rolewicz_verify, "re-verify a certificate", rsub)
    p.add_argument("--cert", required=True)
    p = add("approx", cmd_rolewicz_approx, "approximate a target by a power", rsub)
    p.add_argument("--cert", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--eps", type=_rational_arg, required=True)

    emb = sub.add_parser("embed", help="lattice quotient checks")
    esub = emb.add_subparsers(dest="embed_command", required=True, metavar="ACTION")
    p = add("check", cmd_embed_check, "full separation/discreteness/density/period suite", esub)
    p.add_argument("--model", required=True)

    add("suite", cmd_suite, "every property suite on the bundled fixtures")
    return parser


def run(argv: list[str] | None = None, stdout=None) -> tuple[int, RunReport]:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    report = RunReport(command=["graev"] + argv, seed=args.seed)
    start = time.perf_counter()
    try:
        args.func(args, report, _Inputs(report))
    except InputError as exc:
        report.wall_time = time.perf_counter() - start
        report.result = {"error": exc.to_json()}
        report.add("input", FAIL, witness=exc.to_json())
        print(report.dumps(), file=stdout)
        print(f"graev: {exc}", file=sys.stderr)
        return EXIT_INPUT, report
    report.wall_time = time.perf_counter() - start
    print(report.dumps(), file=stdout)
    if args.csv:
        Path(args.csv).write_text(report.csv_summary())
    return report.exit_code, report


def main(argv: list[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
