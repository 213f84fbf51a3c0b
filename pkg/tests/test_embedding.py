import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from graevlab.embedding import (
    AmbientModel,
    AmbientVector,
    LatticeElement,
    ZeroLatticeElement,
    circle_period_check,
    density_witness,
    e_distance,
    embed_e,
    lattice_min_norm,
    quotient_distance_bounds,
    random_close_pair,
    random_e_point,
    random_lattice_element,
    separation_check,
    separation_sweep,
    tilde_distance,
    xi_vector,
)
from graevlab.serialize import fixture_path, parse_model, read_json

from oracles import lattice_min_oracle, quotient_oracle

F = Fraction


def mp(q):
    return mpmath.mpf(q.numerator) / q.denominator


@pytest.fixture(scope="module")
def model():
    data, _ = read_json(fixture_path("model_e2_m3_n3.json"))
    return parse_model(data)[0]


def small_model(metric="l1"):
    return AmbientModel(2, [[1, 0], [0, 1]], 2, metric)


class TestModel:
    def test_shape(self, model):
        assert (model.M, model.N, model.e_dim) == (3, 3, 2)
        assert model.indices()[:4] == [(1, 1), (1, 2), (1, 3), (2, 1)]

    def test_bad_index(self, model):
        with pytest.raises(IndexError):
            xi_vector(model, 4, 1)
        with pytest.raises(IndexError):
            xi_vector(model, 1, 0)

    def test_bad_metric(self):
        with pytest.raises(ValueError):
            AmbientModel(2, [[1, 0]], 1, "l2")

    @given(st.lists(st.fractions(-5, 5, max_denominator=9), min_size=6, max_size=6),
           st.sampled_from(["l1", "linf"]))
    def test_metric_axioms(self, xs, metric):
        a, b, c = xs[:2], xs[2:4], xs[4:]
        d = lambda u, v: e_distance(metric, u, v)
        assert d(a, a) == 0
        assert d(a, b) == d(b, a) >= 0
        assert d(a, c) <= d(a, b) + d(b, c)


class TestVectors:
    def test_reduction(self):
        v = AmbientVector([1, 2], {(1, 1): 0, (2, 1): F(1, 2)})
        assert v.l2 == {(2, 1): F(1, 2)}
        assert v - v == AmbientVector([0, 0])

    def test_lattice_vector(self, model):
        k = LatticeElement({(1, 2): 3, (3, 1): -1, (2, 2): 0})
        v = k.vector(model)
        assert v.e_part == (F(6) - F(1, 2), F(1, 3))
        assert v.l2 == {(1, 2): 3, (3, 1): -1}
        assert k.square_norm == 10
        assert not LatticeElement({(1, 1): 0})


class TestTildeDistance:
    def test_equal_points(self, model):
        h = AmbientVector([F(1, 3), 2], {(2, 3): F(5, 7)})
        assert tilde_distance(model, h, h).exact == 0

    def test_xi_to_origin(self, model):
        for m, n in model.indices():
            xi = xi_vector(model, m, n)
            got = tilde_distance(model, xi, AmbientVector.zero(model)).exact
            assert got == model.d([n * c for c in model.x_points[m - 1]], [0, 0]) + 1

    def test_irrational_l2(self, model):
        h = AmbientVector([0, 0], {(1, 1): 1, (2, 1): 1})
        t = tilde_distance(model, h, AmbientVector.zero(model))
        assert t.exact is None and t.l2_square == 2
        with mpmath.workdps(60):
            assert mp(t.value.lo) <= mpmath.sqrt(2) <= mp(t.value.hi)
        assert t.value.width < F(1, 10 ** 40)

    def test_foreign_vector(self, model):
        with pytest.raises(ValueError):
            tilde_distance(model, AmbientVector([1, 2, 3]), AmbientVector.zero(model))


class TestSeparation:
    def test_example(self, model):
        k = LatticeElement({(1, 1): 1, (2, 1): 2})
        r = separation_check(model, k, [5, 5])
        assert r.ok and r.l2_square == 5
        # e-part (1, 2), distance 7 in l1, plus sqrt(5)
        assert r.distance.e_distance == 7
        with mpmath.workdps(60):
            assert mp(r.distance.value.lo) <= 7 + mpmath.sqrt(5) <= mp(r.distance.value.hi)

    def test_root_five_bound(self, model):
        rng = random.Random(2)
        k = LatticeElement({(1, 1): 2, (2, 3): -1})
        for y in [(0, 0)] + [random_e_point(rng, model) for _ in range(5)]:
            r = separation_check(model, k, y)
            assert r.l2_square == 5 and r.ok
            assert r.distance.value.lo >= r.l2_bound.lo

    def test_zero_rejected(self, model):
        with pytest.raises(ZeroLatticeElement):
            separation_check(model, LatticeElement({(1, 1): 0}), [0, 0])

    def test_sampled(self, model):
        rng = random.Random(3)
        for _ in range(500):
            k = random_lattice_element(rng, model)
            r = separation_check(model, k, random_e_point(rng, model))
            assert r.ok

    def test_exhaustive(self, model):
        sweep = separation_sweep(model, 1, [(0, 0), (F(1, 2), F(-1, 3))])
        assert sweep.ok
        assert sweep.checked == (3 ** 9 - 1) * 2
        assert sweep.closest_distance.value.certainly_ge(1)

    def test_boundary_attained(self):
        # y equal to the e-part of a unit lattice element puts d~ exactly at 1.
        sweep = separation_sweep(small_model(), 1, [(1, 0)])
        assert sweep.ok and sweep.closest_distance.exact == 1


class TestMinNorm:
    @pytest.mark.parametrize("B", [1, 3])
    def test_fixture(self, model, B):
        r = lattice_min_norm(model, B)
        assert r.square == 1 and r.value.is_exact and r.value.lo == 1
        assert r.minimizers == 9

    def test_against_oracle(self):
        r = lattice_min_norm(small_model(), 2)
        assert (r.square, r.minimizers) == lattice_min_oracle(2, 2, 2) == (1, 4)

    def test_bad_bound(self, model):
        with pytest.raises(ValueError):
            lattice_min_norm(model, 0)


class TestDensity:
    @pytest.mark.parametrize("m,n,expected", [(1, 1, F(1)), (2, 3, F(1, 3)), (3, 3, F(1, 3))])
    def test_fixture(self, model, m, n, expected):
        assert density_witness(model, m, n) == expected

    @pytest.mark.parametrize("m,n", [(2, 4), (1, 1000)])
    def test_wide(self, m, n):
        wide = AmbientModel(1, [[1], [F(-2, 3)]], n)
        assert density_witness(wide, m, n) == F(1, n)


class TestQuotient:
    def test_equal_classes(self, model):
        h = AmbientVector([1, 1], {(1, 1): F(1, 2)})
        q = quotient_distance_bounds(model, h, h, 2)
        assert q.certified and q.upper.hi == 0

    def test_lattice_translate_is_zero(self, model):
        h = embed_e(model, [F(1, 3), 0])
        q = quotient_distance_bounds(model, h + xi_vector(model, 2, 3), h, 2)
        assert q.certified and q.upper.hi == 0

    def test_e_points_isometric(self, model):
        rng = random.Random(5)
        for _ in range(30):
            a, b = random_close_pair(rng, model)
            q = quotient_distance_bounds(model, embed_e(model, a), embed_e(model, b), 2)
            assert q.certified
            assert q.upper.lo == q.upper.hi == model.d(a, b)

    @settings(max_examples=15, deadline=None)
    @given(st.lists(st.fractions(-2, 2, max_denominator=4), min_size=2, max_size=2),
           st.dictionaries(st.sampled_from([(1, 1), (1, 2), (2, 1), (2, 2)]),
                           st.fractions(-2, 2, max_denominator=4), max_size=4))
    def test_against_enumeration(self, e, l2):
        small = small_model()
        h = AmbientVector(e, l2)
        q = quotient_distance_bounds(small, h, AmbientVector.zero(small), 3)
        brute = quotient_oracle(small.x_points, small.N, small.e_metric, h.e_part, h.l2, 3)
        assert float(q.upper.lo) - 1e-9 <= brute <= float(q.upper.hi) + 1e-9

    def test_uncertified_when_far(self, model):
        h = AmbientVector([0, 0], {(1, 1): F(5, 2)})
        q = quotient_distance_bounds(model, h, AmbientVector.zero(model), 0)
        assert not q.certified and q.value is None
        assert q.lower_status == "upper bound only"


class TestPeriod:
    @pytest.mark.parametrize("m,n", [(1, 1), (3, 2)])
    def test_period_one(self, model, m, n):
        r = circle_period_check(model, m, n, 4)
        assert r.periodic and r.nondegenerate and r.ok

    def test_samples(self, model):
        with pytest.raises(ValueError):
            circle_period_check(model, 1, 1, 1)


def test_dual_metric(model):
    dual = model.with_metric("linf")
    assert dual.e_metric == "linf" and dual.x_points == model.x_points
    assert separation_sweep(dual, 1, [(0, 0)]).ok
    assert density_witness(dual, 3, 2) == F(1, 2)
