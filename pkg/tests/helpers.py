"""Shared hypothesis strategies and brute-force oracles."""
from fractions import Fraction as F
from itertools import product

import numpy as np
from hypothesis import strategies as st

from wamin import WeightedAutomaton, evaluate, words_up_to
from wamin.linalg import rational_rank

small_rational = st.builds(F, st.integers(-2, 2), st.integers(1, 4))


@st.composite
def rational_wa(draw, max_n=4, max_letters=2, min_n=1):
    n = draw(st.integers(min_n, max_n))
    k = draw(st.integers(1, max_letters))
    letters = ("a", "b", "c")[:k]
    grid = lambda shape: np.array(draw(st.lists(small_rational, min_size=int(np.prod(shape)),
                                                max_size=int(np.prod(shape))))
                                  , dtype=object).reshape(shape)
    trans = {x: grid((n, n)) for x in letters}
    return WeightedAutomaton(letters, trans, grid((n,)), grid((n,)))


def brute_hankel_rank(a, max_len=None):
    """Rank of the full Hankel block over words of length <= max_len (default n)."""
    ell = a.n if max_len is None else max_len
    words = list(words_up_to(a.alphabet, ell))
    h = np.empty((len(words), len(words)), dtype=object)
    for i, x in enumerate(words):
        for j, y in enumerate(words):
            h[i, j] = F(evaluate(a, x + y))
    return rational_rank(h)


def brute_span_dim(vectors):
    vs = [list(v) for v in vectors]
    if not vs:
        return 0
    return rational_rank(np.array(vs, dtype=object))
