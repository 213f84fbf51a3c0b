"""Hypothesis strategies for spaces, words and combinations."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from graevlab.core import LinComb, Word
from graevlab.sampling import random_space


@st.composite
def spaces(draw, min_points=2, max_points=5):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    n = draw(st.integers(min_points, max_points))
    return random_space(random.Random(seed), n)


@st.composite
def words(draw, space, max_coeff=3, max_letters=6):
    pts = space.non_basepoints()
    coeffs = draw(st.dictionaries(st.sampled_from(pts), st.integers(-max_coeff, max_coeff),
                                  max_size=len(pts)))
    while sum(abs(v) for v in coeffs.values()) > max_letters:
        key = max(coeffs, key=lambda k: abs(coeffs[k]))
        coeffs[key] -= 1 if coeffs[key] > 0 else -1
    return Word(coeffs)


rationals = st.builds(Fraction, st.integers(-24, 24), st.integers(1, 8))


@st.composite
def lincombs(draw, space):
    pts = space.non_basepoints()
    return LinComb(draw(st.dictionaries(st.sampled_from(pts), rationals, max_size=len(pts))))


@st.composite
def space_and_words(draw, count=1, **kw):
    space = draw(spaces(**kw))
    return (space,) + tuple(draw(words(space)) for _ in range(count))
