"""Seeded property suites shared by the command line and the tests.

Each suite appends :class:`~graevlab.report.Tally` entries to a
:class:`~graevlab.report.RunReport` and returns a small summary dict for the
report's result section.  Trials are generated and evaluated in index order
from a single ``random.Random`` so reports are reproducible from the seed.
"""

from __future__ import annotations

import random
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from .core import PointedSpace, Word, pair_word, word_to_lincomb
from .embedding import (
    AmbientModel,
    LatticeElement,
    circle_period_check,
    density_witness,
    embed_e,
    lattice_min_norm,
    quotient_distance_bounds,
    random_close_pair,
    random_e_point,
    random_lattice_element,
    separation_check,
    separation_sweep,
)
from .freelcs import solve_seminorm
from .graev import ORACLE_LETTER_BOUND, brute_force_norm, graev_distance, graev_norm, \
    homomorphic_extension_check
from .report import FAIL, INCONCLUSIVE, PASS, RunReport, Tally
from .rolewicz import (
    ApproximationContradiction,
    ConstructionError,
    OmegaTorusModel,
    approximate_target,
    construct_generator,
    verify_certificate,
)
from .sampling import random_lincomb, random_lipschitz_map, random_space, random_word
from .serialize import combination_to_json, space_to_json
from .torus import (
    POWERS_FROM_1,
    Angle,
    TorusPoint,
    basis_prime,
    independence_check,
    kronecker_search,
    orbit_net_check,
)


def _wj(space: PointedSpace, w) -> dict:
    return combination_to_json(space, w)


def kuratowski_bound(space: PointedSpace, w: Word) -> Fraction:
    """``max_y |sum_x k_x (rho(x, y) - rho(*, y))|``, a lower bound for the Graev norm.

    Each ``x -> rho(x, y) - rho(*, y)`` is 1-Lipschitz and vanishes at the
    basepoint, so its homomorphic extension is dominated by the norm.
    """
    base = space.basepoint_index
    return max((abs(sum((k * (space.d(x, y) - space.d(base, y)) for x, k in w.items()), Fraction(0)))
                for y in range(space.size)), default=Fraction(0))


def graev_property_suite(report: RunReport, space: PointedSpace, rng: random.Random,
                         trials: int, coeff_bound: int = 3, prefix: str = "graev") -> dict:
    """Norm axioms, oracle agreement, extension, maximality and the norm/seminorm equality."""
    t = {k: Tally(f"{prefix}.{k}") for k in (
        "nonnegative", "symmetric", "triangle", "certificate", "brute_force", "maximality",
        "extension", "tu_equality", "isometric_embedding", "seminorm_homogeneity")}
    zero, _ = graev_norm(space, Word())
    t["nonnegative"].record(zero == 0, {"word": {"coeffs": {}}})
    for x in range(space.size):
        for y in range(x + 1, space.size):
            w = pair_word(x, y, space.basepoint_index)
            g, _ = graev_norm(space, w)
            p = solve_seminorm(space, word_to_lincomb(w)).value
            t["extension"].record(g == space.d(x, y) == p,
                                  lambda: {"pair": [space.points[x], space.points[y]],
                                           "graev": str(g), "seminorm": str(p)})
    for _ in range(trials):
        u = random_word(rng, space, coeff_bound=coeff_bound)
        v = random_word(rng, space, coeff_bound=coeff_bound)
        gu, cert = graev_norm(space, u)
        gv, _ = graev_norm(space, v)
        t["nonnegative"].record(gu >= 0, lambda: {"word": _wj(space, u)})
        t["symmetric"].record(graev_norm(space, -u)[0] == gu, lambda: {"word": _wj(space, u)})
        guv = graev_norm(space, u + v)[0]
        t["triangle"].record(guv <= gu + gv, lambda: {"u": _wj(space, u), "v": _wj(space, v)},
                             float(gu + gv - guv))
        t["certificate"].record(cert.is_valid_for(space, u) and cert.total_cost == gu,
                                lambda: {"word": _wj(space, u)})
        if u.letter_count <= ORACLE_LETTER_BOUND:
            b = brute_force_norm(space, u)
            t["brute_force"].record(b == gu, lambda: {"word": _wj(space, u), "graev": str(gu),
                                                      "brute_force": str(b)})
        kb = kuratowski_bound(space, u)
        t["maximality"].record(kb <= gu, lambda: {"word": _wj(space, u)}, float(gu - kb))
        p = solve_seminorm(space, word_to_lincomb(u)).value
        t["tu_equality"].record(p == gu, lambda: {"word": _wj(space, u), "graev": str(gu),
                                                  "seminorm": str(p)})
        d = graev_distance(space, u, v)
        pd = solve_seminorm(space, word_to_lincomb(u) - word_to_lincomb(v)).value
        t["isometric_embedding"].record(d == pd, lambda: {"u": _wj(space, u), "v": _wj(space, v)})
        lam = Fraction(rng.randint(-6, 6), rng.randint(1, 6))
        pl = solve_seminorm(space, word_to_lincomb(u) * lam).value
        t["seminorm_homogeneity"].record(pl == abs(lam) * p,
                                         lambda: {"word": _wj(space, u), "lambda": str(lam)})
    for tally in t.values():
        report.add_tally(tally)
    return {"space": space_to_json(space), "trials": trials}


def tu_sweep(report: RunReport, rng: random.Random, trials: int, max_points: int = 5,
             max_letters: int = 6, coeff_bound: int = 3, prefix: str = "tu") -> dict:
    """Random spaces and words: matching value, flow value and brute force all agree,
    and every flow comes with an exactly optimal 1-Lipschitz dual."""
    eq = Tally(f"{prefix}.equality")
    brute = Tally(f"{prefix}.brute_force")
    duality = Tally(f"{prefix}.duality")
    feasible = Tally(f"{prefix}.dual_feasible")
    primal = Tally(f"{prefix}.flow_certificate")
    one_sided = Tally(f"{prefix}.one_sided")
    for _ in range(trials):
        space = random_space(rng, rng.randint(2, max_points))
        w = random_word(rng, space, max_letters=max_letters, coeff_bound=coeff_bound)
        g, _ = graev_norm(space, w)
        v = word_to_lincomb(w)
        res = solve_seminorm(space, v)

        def wit():
            return {"space": space_to_json(space), "word": _wj(space, w),
                    "graev": str(g), "seminorm": str(res.value)}

        one_sided.record(res.value <= g, wit)
        eq.record(res.value == g, wit)
        b = brute_force_norm(space, w)
        brute.record(b == g, wit)
        duality.record(res.dual.objective(v) == res.value, wit)
        feasible.record(res.dual.is_feasible(space), wit)
        primal.record(res.certificate.is_valid_for(space, v), wit)
    for tally in (one_sided, eq, brute, duality, feasible, primal):
        report.add_tally(tally)
    return {"instances": trials}


def duality_sweep(report: RunReport, rng: random.Random, trials: int,
                  prefix: str = "seminorm") -> dict:
    """Rational (not only integral) combinations on 5-point spaces."""
    strong = Tally(f"{prefix}.strong_duality")
    weak = Tally(f"{prefix}.weak_duality")
    for _ in range(trials):
        space = random_space(rng, 5)
        v = random_lincomb(rng, space)
        res = solve_seminorm(space, v)
        strong.record(res.dual.objective(v) == res.value and res.dual.is_feasible(space),
                      lambda: {"space": space_to_json(space), "lincomb": _wj(space, v)})
        # Any 1-Lipschitz f vanishing at the basepoint is a feasible dual.
        y = rng.randrange(space.size)
        f = [space.d(x, y) - space.d(space.basepoint_index, y) for x in range(space.size)]
        obj = sum((c * f[i] for i, c in v.items()), Fraction(0))
        weak.record(obj <= res.value, lambda: {"space": space_to_json(space),
                                               "lincomb": _wj(space, v)}, float(res.value - obj))
    report.add_tally(strong)
    report.add_tally(weak)
    return {"instances": trials}


def lipschitz_sweep(report: RunReport, rng: random.Random, trials: int, words_per_map: int = 5,
                    max_points: int = 4, prefix: str = "extension") -> dict:
    """Homomorphic extensions of random 1-Lipschitz maps never exceed the Graev norm."""
    tally = Tally(f"{prefix}.lipschitz")
    for _ in range(trials):
        space = random_space(rng, rng.randint(2, max_points))
        f = random_lipschitz_map(rng, space)
        sample = [random_word(rng, space, max_letters=6) for _ in range(words_per_map)]
        rep = homomorphic_extension_check(space, f, 1, sample)
        margin = min((float(c.bound - c.image_norm) for c in rep.checks), default=None)
        tally.record(rep.ok, lambda: {"space": space_to_json(space),
                                      "word": _wj(space, rep.violations[0].word)}, margin)
    report.add_tally(tally)
    return {"maps": trials, "words_per_map": words_per_map}


def _decimal_value(angle: Angle, m: int) -> Decimal:
    total = Decimal(angle.coords[0].numerator) / Decimal(angle.coords[0].denominator)
    for k, c in enumerate(angle.coords[1:], start=1):
        if c:
            total += Decimal(c.numerator) / Decimal(c.denominator) * Decimal(basis_prime(k)).sqrt()
    return (total * m) % 1


def decimal_covering_radius(angle: Angle, exponents: Sequence[int], digits: int = 60) -> Decimal:
    """Half the largest cyclic gap of ``{m * angle}``, in decimal arithmetic."""
    with localcontext() as ctx:
        ctx.prec = digits
        vals = sorted(_decimal_value(angle, m) for m in exponents)
        gaps = [b - a for a, b in zip(vals, vals[1:])] + [vals[0] + 1 - vals[-1]]
        return max(gaps) / 2


def random_orbit_angle(rng: random.Random) -> Angle:
    p = rng.choice([2, 3, 5, 7, 11, 13])
    return Angle.sqrt(p, Fraction(rng.randint(1, 9), rng.randint(1, 9)),
                      Fraction(rng.randint(0, 7), 8))


def net_oracle_sweep(report: RunReport, rng: random.Random, trials: int,
                     grid_step=Fraction(1, 1024), prefix: str = "torus") -> dict:
    """Circle net decisions against an independent sorted-gap computation."""
    exact = Tally(f"{prefix}.net_oracle_exact")
    grid = Tally(f"{prefix}.net_oracle_grid")
    slack = Fraction(grid_step) / 2
    for _ in range(trials):
        x = random_orbit_angle(rng)
        exps = list(range(1, rng.randint(1, 60) + 1))
        eps = Fraction(rng.randint(1, 64), 128)
        radius = decimal_covering_radius(x, exps)
        lhs = radius + Decimal(slack.numerator) / slack.denominator
        rhs = Decimal(eps.numerator) / eps.denominator
        oracle = lhs < rhs
        res = orbit_net_check(TorusPoint([x]), exps, eps, grid_step, method="exact")

        def wit():
            return {"x": x.to_json(), "n": len(exps), "eps": str(eps),
                    "oracle_radius": str(radius), "status": res.status}

        if abs(lhs - rhs) < Decimal(10) ** -30 or abs(radius - rhs) < Decimal(10) ** -30:
            exact.record(res.status == "inconclusive" or res.certified == oracle, wit)
        else:
            refuted_ok = (res.status == "refuted") == (radius >= rhs)
            exact.record(res.certified == oracle and refuted_ok, wit)
        g = orbit_net_check(TorusPoint([x]), exps, eps, grid_step, method="grid")
        # Grid answers must never contradict the true covering radius.
        sound = not (g.certified and not oracle) and not (g.status == "refuted" and radius < rhs)
        grid.record(sound, wit)
    report.add_tally(exact)
    report.add_tally(grid)
    return {"prefixes": trials}


def torus_examples(report: RunReport) -> dict:
    quarter = TorusPoint([Angle.rational(Fraction(1, 4))])
    hit = kronecker_search(quarter, TorusPoint([Angle.rational(Fraction(1, 2))]), Fraction(1, 100), 10)
    report.expect("torus.kronecker_rational_hit", hit is not None and hit.m == 2,
                  {"found": None if hit is None else hit.m})
    miss = kronecker_search(quarter, TorusPoint([Angle.rational(Fraction(1, 3))]),
                            Fraction(1, 100), 1000)
    report.expect("torus.kronecker_proven_absence", miss is None,
                  {"found": None if miss is None else miss.m})
    root2 = TorusPoint([Angle.sqrt(2)])
    found = kronecker_search(root2, TorusPoint.zero(1), Fraction(1, 20), 100)
    report.expect("torus.kronecker_sqrt2", found is not None, {"max_m": 100})
    ind = [independence_check([Angle.sqrt(2)]).independent,
           not independence_check([Angle.rational(Fraction(1, 4))]).independent,
           not independence_check([Angle.sqrt(2), Angle.sqrt(2, 1, Fraction(1, 3))]).independent]
    report.expect("torus.independence_examples", all(ind), {"outcomes": ind})
    return {"kronecker_sqrt2_m": found.m if found else None}


def rolewicz_suite(report: RunReport, rng: random.Random, depths: Sequence[int] = (1, 2),
                   targets: int = 50, grid_step=Fraction(1, 512),
                   convention: str = POWERS_FROM_1) -> dict:
    """Build, independently verify and exercise generators; targets are approximated at level 2."""
    out = {}
    for depth in depths:
        name = f"rolewicz.depth{depth}"
        model = OmegaTorusModel(depth)
        try:
            cert = construct_generator(model, grid_step, convention)
        except ConstructionError as exc:
            report.add(f"{name}.construct", FAIL, witness={"level": exc.level,
                                                             "reason": exc.reason})
            continue
        ver = verify_certificate(model, cert)
        for r in ver.reports:
            report.add(f"{name}.condition{r.condition}.level{r.level}",
                       PASS if r.ok else (INCONCLUSIVE if r.status == "inconclusive" else FAIL),
                       r.margin, r.witness, r.detail)
        report.expect(f"{name}.monotone", ver.monotone, {"n": list(cert.n)})
        report.expect(f"{name}.independent", ver.independent,
                      {"relation": list(ver.relation or ())})
        out[f"depth{depth}"] = {"x": [a.to_json() for a in cert.x], "n": list(cert.n)}
        if depth == max(depths) and targets:
            level = depth
            eps = model.floor(level)
            G = int(1 / Fraction(grid_step))
            tally = Tally(f"{name}.approximate_targets", detail=f"eps = {eps}")
            for _ in range(targets):
                z = TorusPoint(Angle.rational(Fraction(rng.randrange(G), G)) for _ in range(level))
                try:
                    a = approximate_target(model, cert, z, eps)
                    tally.record(a.m <= cert.n[level - 1],
                                 {"target": z.to_json(), "m": a.m},
                                 float(eps - a.distance.hi))
                except ApproximationContradiction:
                    tally.record(False, {"target": z.to_json()})
            report.add_tally(tally)
    return out


def embed_suite(report: RunReport, model: AmbientModel, metrics: Sequence[str],
                rng: random.Random, coeff_bound: int = 3, trials: int = 100,
                sweep_points: int = 3, period_samples: int = 8) -> dict:
    """Separation, discreteness, density, quotient isometry and periodicity per metric."""
    sections = {}
    idx = model.indices()
    for metric in metrics:
        mdl = model.with_metric(metric)
        pre = f"embed.{metric}"
        sec: dict = {"M": mdl.M, "N": mdl.N, "coeff_bound": coeff_bound}

        axioms = Tally(f"{pre}.metric_axioms")
        for _ in range(trials):
            a, b, c = (random_e_point(rng, mdl) for _ in range(3))
            ok = (mdl.d(a, a) == 0 and mdl.d(a, b) == mdl.d(b, a) and
                  mdl.d(a, c) <= mdl.d(a, b) + mdl.d(b, c) and
                  (mdl.d(a, b) > 0) == (a != b))
            axioms.record(ok, lambda: {"triple": [[str(v) for v in p] for p in (a, b, c)]})
        report.add_tally(axioms)

        ys = [(Fraction(0),) * mdl.e_dim] + [random_e_point(rng, mdl) for _ in range(sweep_points)]
        sweep = separation_sweep(mdl, coeff_bound, ys)
        report.add(f"{pre}.separation.exhaustive", PASS if sweep.ok else FAIL,
                   float(sweep.closest_distance.value.lo - 1),
                   None if sweep.ok else _lattice_json(sweep.failures[0][0]) if sweep.failures
                   else _lattice_json(sweep.closest),
                   trials=sweep.checked)
        sampled = Tally(f"{pre}.separation.sampled")
        for _ in range(trials):
            k = random_lattice_element(rng, mdl, coeff_bound)
            y = random_e_point(rng, mdl)
            r = separation_check(mdl, k, y)
            sampled.record(r.ok, lambda: _lattice_json(k), float(r.distance.value.lo - 1))
        report.add_tally(sampled)
        sec["separation"] = {"pairs_checked": sweep.checked,
                             "closest": _lattice_json(sweep.closest),
                             "closest_distance": sweep.closest_distance.value.to_json(),
                             "statement": "d~(k, y) >= ||sum k e|| >= 1 for nonzero k"}

        mn = lattice_min_norm(mdl, coeff_bound)
        report.expect(f"{pre}.discreteness", mn.value.is_exact and mn.square == 1,
                      {"min_square_norm": mn.square})
        sec["discreteness"] = {"min_norm": mn.value.to_json(), "minimizers": mn.minimizers}

        dens = Tally(f"{pre}.density")
        for m, n in idx:
            try:
                v = density_witness(mdl, m, n)
                dens.record(v == Fraction(1, n), {"m": m, "n": n})
            except AssertionError as exc:
                dens.record(False, {"m": m, "n": n, "detail": str(exc)})
        report.add_tally(dens)
        sec["density"] = {f"{m},{n}": str(Fraction(1, n)) for m, n in idx}

        iso = Tally(f"{pre}.quotient_isometry")
        for _ in range(trials):
            a, b = random_close_pair(rng, mdl)
            q = quotient_distance_bounds(mdl, embed_e(mdl, a), embed_e(mdl, b), coeff_bound)
            d = mdl.d(a, b)
            iso.record(q.certified and q.upper.lo == q.upper.hi == d,
                       lambda: {"y1": [str(v) for v in a], "y2": [str(v) for v in b]},
                       float(q.excluded_bound - d))
        report.add_tally(iso)
        sec["quotient_isometry"] = {"pairs": trials}

        per = Tally(f"{pre}.periodicity")
        for m, n in idx:
            pr = circle_period_check(mdl, m, n, period_samples)
            per.record(pr.ok, {"m": m, "n": n, "periodic": pr.periodic,
                               "nondegenerate": pr.nondegenerate},
                       float(pr.half_period.lower))
        report.add_tally(per)
        sec["periodicity"] = {"samples": period_samples}
        sections[metric] = sec
    return {"model": model.to_json(), "sections": sections}


def _lattice_json(k: LatticeElement) -> dict:
    return {"k": {f"{m},{n}": v for (m, n), v in k.k}}
