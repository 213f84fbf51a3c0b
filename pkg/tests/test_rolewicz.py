import dataclasses
import random
from fractions import Fraction

import mpmath
import pytest

from graevlab.rolewicz import (
    MAX_DEPTH,
    ApproximationContradiction,
    ConstructionError,
    GeneratorCertificate,
    MalformedCertificate,
    OmegaTorusModel,
    TruncationFloorError,
    approximate_target,
    construct_generator,
    verify_certificate,
)
from graevlab.torus import POWERS_FROM_0, Angle, TorusPoint, independence_check

from oracles import angle_mp, covering_radius_oracle, orbit_values

GRID = Fraction(1, 512)


@pytest.fixture(scope="module")
def depth1():
    model = OmegaTorusModel(1)
    return model, construct_generator(model, GRID)


@pytest.fixture(scope="module")
def depth2():
    model = OmegaTorusModel(2)
    return model, construct_generator(model, GRID)


def oracle_net_ok(model, cert, n, level=1):
    """1-D sorted-gap covering radius (60 digits) against the level radius."""
    w, r = model.weights[level - 1], model.radii[level - 1]
    slack = w * GRID / 2
    radius = covering_radius_oracle(orbit_values(cert.x[level - 1].coords, range(1, n + 1)))
    return radius * mpmath.mpf(w.numerator) / w.denominator + float(slack) < float(r)


class TestModel:
    def test_defaults_halve(self):
        m = OmegaTorusModel(3)
        assert m.weights == m.radii == (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))
        assert m.tail_bound == Fraction(1, 8)

    def test_floor(self):
        m = OmegaTorusModel(2)
        assert m.floor(2) == Fraction(1, 2)
        assert m.floor(1) == Fraction(1, 2) + Fraction(1, 8) + Fraction(1, 4)

    def test_invalid(self):
        with pytest.raises(ValueError):
            OmegaTorusModel(0)
        with pytest.raises(ValueError):
            OmegaTorusModel(2, weights=(1,))
        with pytest.raises(ValueError):
            OmegaTorusModel(1, weights=(0,))

    def test_json(self):
        m = OmegaTorusModel(2, weights=("1", "1/3"))
        assert OmegaTorusModel.from_json(m.to_json()) == m


class TestConstruct:
    def test_depth1(self, depth1):
        model, cert = depth1
        assert cert.x[0] == Angle.sqrt(2, Fraction(1, 2))
        assert independence_check(list(cert.x)).independent
        (n1,) = cert.n
        assert oracle_net_ok(model, cert, n1)
        assert all(r.ok for r in cert.condition_reports)

    def test_depth1_unit_weight(self):
        model = OmegaTorusModel(1, weights=(1,))
        cert = construct_generator(model, GRID)
        n1 = cert.n[0]
        # Minimality against the 1-D oracle: n1 powers suffice and n1 - 1 do not.
        assert oracle_net_ok(model, cert, n1)
        assert n1 == 1 or not oracle_net_ok(model, cert, n1 - 1)
        assert n1 == 2

    def test_depth2(self, depth2):
        model, cert = depth2
        assert len(cert.x) == 2 and cert.x[1].coords[2] != 0
        assert cert.n[0] <= cert.n[1]
        assert all(r.ok for r in cert.condition_reports)
        assert {(r.condition, r.level) for r in cert.condition_reports} == {
            (1, 1), (2, 1), (1, 2), (2, 2), (3, 1)}

    def test_magnitude_rule(self, depth2):
        model, cert = depth2
        n1 = cert.n[0]
        x2 = angle_mp(cert.x[1].coords)
        bound = float(model.radii[1] / model.weights[1])
        assert n1 * x2 < bound
        # Doubling x2 would break the rule, so L is the least admissible power of two.
        assert 2 * n1 * x2 >= bound

    def test_powers_from_zero(self):
        model = OmegaTorusModel(2)
        cert = construct_generator(model, GRID, convention=POWERS_FROM_0)
        assert cert.convention == POWERS_FROM_0
        assert verify_certificate(model, cert).ok

    def test_coarse_grid_aborts(self):
        model = OmegaTorusModel(1, radii=(Fraction(1, 1000),))
        with pytest.raises(ConstructionError) as err:
            construct_generator(model, Fraction(1, 128))
        assert err.value.level == 1
        assert err.value.suggested_grid == Fraction(1, 256)

    def test_depth_bound(self):
        with pytest.raises(ValueError):
            construct_generator(OmegaTorusModel(MAX_DEPTH + 1))


class TestVerify:
    def test_round_trip(self, depth2):
        model, cert = depth2
        rep = verify_certificate(model, cert)
        assert rep.ok and rep.independent and rep.monotone
        assert rep.to_json()["ok"] is True

    def test_too_few_powers_refuted(self):
        model = OmegaTorusModel(1, weights=(1,))
        cert = construct_generator(model, GRID)
        bad = dataclasses.replace(cert, n=(1,), condition_reports=())
        rep = verify_certificate(model, bad)
        c2 = rep.condition(2, 1)
        assert c2.status == "fail"
        assert c2.witness is not None
        # The witness is a point at distance >= r from the single power x.
        w = Fraction(c2.witness[0])
        dist = abs(float(w) - float(angle_mp(cert.x[0].coords)) % 1)
        assert min(dist, 1 - dist) >= 0.5 - 1 / 512

    def test_rational_generator_flagged(self, depth2):
        model, cert = depth2
        bad = dataclasses.replace(cert, x=(cert.x[0], Angle.rational(Fraction(1, 64))),
                                  condition_reports=())
        rep = verify_certificate(model, bad)
        assert not rep.independent
        adv = rep.condition(0, 2)
        assert adv.status == "advisory" and adv.ok
        c0, c1, c2 = adv.witness
        assert c0 + c2 * Fraction(1, 64) == 0 and c1 == 0

    def test_condition_three_detects_large_generator(self, depth2):
        model, cert = depth2
        big = dataclasses.replace(cert, x=(cert.x[0], Angle.sqrt(3, Fraction(1, 4))),
                                  condition_reports=())
        rep = verify_certificate(model, big)
        if cert.n[0] * float(angle_mp(big.x[1].coords)) >= 0.5:
            assert rep.condition(3, 1).status == "fail"

    def test_shape_mismatch(self, depth2):
        model, cert = depth2
        with pytest.raises(MalformedCertificate):
            verify_certificate(OmegaTorusModel(3), cert)
        with pytest.raises(MalformedCertificate):
            verify_certificate(model, dataclasses.replace(cert, n=(1,)))

    def test_json_round_trip(self, depth2):
        model, cert = depth2
        again = GeneratorCertificate.from_json(cert.to_json())
        assert again == cert
        with pytest.raises(MalformedCertificate):
            GeneratorCertificate.from_json({"x": []})


class TestApproximate:
    def test_zero_target(self, depth2):
        model, cert = depth2
        a = approximate_target(model, cert, TorusPoint.zero(2), model.floor(2))
        assert a.m <= cert.n[1] and a.distance.certainly_lt(model.floor(2))

    def test_half_half(self, depth2):
        model, cert = depth2
        z = TorusPoint([Angle.rational(Fraction(1, 2))] * 2)
        a = approximate_target(model, cert, z, Fraction(1, 2))
        assert 1 <= a.m <= cert.n[1]

    def test_exact_power(self, depth2):
        model, cert = depth2
        m0 = cert.n[1]
        z = cert.generator() * m0
        a = approximate_target(model, cert, z, model.floor(2))
        assert a.m == m0 and a.distance.hi == 0

    def test_floor_refusal(self, depth2):
        model, cert = depth2
        with pytest.raises(TruncationFloorError):
            approximate_target(model, cert, TorusPoint.zero(2), Fraction(1, 3))

    def test_contradiction_flagged(self, depth2):
        model, cert = depth2
        bad = dataclasses.replace(cert, n=(1, 1), condition_reports=())
        z = TorusPoint([Angle.rational(Fraction(1, 2)), Angle.rational(Fraction(1, 2))])
        x = cert.generator()
        if model.rho(x, z).certainly_ge(Fraction(1, 2)):
            with pytest.raises(ApproximationContradiction):
                approximate_target(model, bad, z, Fraction(1, 2))

    def test_lower_level_target(self, depth2):
        model, cert = depth2
        z = TorusPoint([Angle.rational(Fraction(3, 10))])
        a = approximate_target(model, cert, z, model.floor(1))
        assert a.m <= cert.n[0]

    def test_random_targets_against_mpmath(self, depth2):
        model, cert = depth2
        rng = random.Random(11)
        xs = [angle_mp(a.coords) for a in cert.x]
        for _ in range(20):
            z = [Fraction(rng.randrange(512), 512) for _ in range(2)]
            a = approximate_target(model, cert, TorusPoint(map(Angle.rational, z)), Fraction(1, 2))
            with mpmath.workdps(60):
                rho = 0
                for w, x, zz in zip(model.weights, xs, z):
                    d = mpmath.frac(a.m * x - mpmath.mpf(zz.numerator) / zz.denominator)
                    rho += mpmath.mpf(w.numerator) / w.denominator * min(d, 1 - d)
            assert rho < 0.5
