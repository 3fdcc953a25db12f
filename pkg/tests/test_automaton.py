import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import exact, exact_vec, scalar_wa
from helpers import brute_hankel_rank, rational_wa
from wamin import (
    AutomatonFormatError,
    ProbabilisticAutomaton,
    UnknownLetterError,
    WeightedAutomaton,
    difference,
    dump_automaton,
    evaluate,
    hankel_block,
    hankel_rank,
    load_automaton,
    validate_pa,
    words_up_to,
)
from wamin.automaton import forward_vector
from wamin.linalg import Backend, BackendError, rational_rank


def test_evaluate_examples(plane_pa):
    a = scalar_wa(2)
    assert evaluate(a, ()) == 1
    assert evaluate(a, ("a",) * 3) == 8
    assert a("aaa") == 8
    assert evaluate(plane_pa, ("a2", "b2")) == F(3, 4)


def test_evaluate_empty_word_is_alpha_dot_eta():
    a = WeightedAutomaton(("x",), {"x": exact([[0, 0], [0, 0]])}, exact_vec([2, 3]), exact_vec([5, 7]))
    assert evaluate(a, ()) == 31


def test_unknown_letter():
    with pytest.raises(UnknownLetterError):
        evaluate(scalar_wa(2), ("b",))


def test_constructor_invariants():
    with pytest.raises(ValueError):
        WeightedAutomaton(("a", "a"), {"a": exact([[1]])}, exact_vec([1]), exact_vec([1]))
    with pytest.raises(ValueError):
        WeightedAutomaton(("a",), {"a": exact([[1, 0]])}, exact_vec([1]), exact_vec([1]))
    with pytest.raises(ValueError):
        WeightedAutomaton(("a",), {"b": exact([[1]])}, exact_vec([1]), exact_vec([1]))


def test_automaton_is_immutable():
    a = scalar_wa(2)
    with pytest.raises(ValueError):
        a.transitions["a"][0, 0] = F(3)


def test_validate_pa_examples(plane_witness_pa):
    dfa = WeightedAutomaton(("a", "b"), {"a": exact([[0, 1], [1, 0]]), "b": exact([[1, 0], [0, 1]])},
                            exact_vec([1, 0]), exact_vec([0, 1]))
    assert isinstance(validate_pa(dfa), ProbabilisticAutomaton)
    assert isinstance(validate_pa(plane_witness_pa), ProbabilisticAutomaton)
    bad = WeightedAutomaton(("a",), {"a": exact([[0, 0], [0, 0]])}, np.array([0.6, 0.6]).astype(object),
                            exact_vec([0, 0])).to_float()
    viol = validate_pa(bad)
    assert [v.kind for v in viol] == ["initial-sum"]


def test_validate_pa_lists_every_violation():
    a = WeightedAutomaton(("a",), {"a": exact([[F(3, 4), F(1, 2)], [-1, 0]])}, exact_vec([-1, 0]), exact_vec([2, 0]))
    kinds = sorted(v.kind for v in validate_pa(a))
    assert kinds == ["final-range", "initial-negative", "row-sum", "transition-negative"]


def test_validate_pa_float_slack():
    ok = WeightedAutomaton(("a",), {"a": np.array([[1 + 1e-13]])}, np.array([1.0]), np.array([1.0]))
    assert isinstance(validate_pa(ok), ProbabilisticAutomaton)
    bad = WeightedAutomaton(("a",), {"a": np.array([[1 + 1e-9]])}, np.array([1.0]), np.array([1.0]))
    assert isinstance(validate_pa(bad), list)


def test_difference_examples(plane_pa, plane_witness_pa):
    d = difference(plane_pa, plane_witness_pa)
    assert d.n == 10
    assert all(evaluate(d, w) == 0 for w in words_up_to(plane_pa.alphabet, 4))
    one = scalar_wa(1, eta=1)
    zero = scalar_wa(1, eta=0)
    assert evaluate(difference(one, zero), ()) == 1
    with pytest.raises(ValueError):
        difference(one, scalar_wa(1, letter="b"))


@given(rational_wa(max_n=3), st.lists(st.lists(st.sampled_from("ab"), max_size=6), min_size=1, max_size=10))
def test_difference_language(a, words):
    b = WeightedAutomaton(a.alphabet, {x: m * 2 for x, m in a.transitions.items()}, a.initial, a.final)
    d = difference(a, b)
    for w in words:
        w = tuple(x for x in w if x in a.alphabet)
        assert evaluate(d, w) == evaluate(a, w) - evaluate(b, w)
    self_diff = difference(a, a)
    assert all(evaluate(self_diff, tuple(x for x in w if x in a.alphabet)) == 0 for w in words)


def test_difference_mixed_backends_is_exact():
    a = scalar_wa(F(1, 2))
    d = difference(a, a.to_float())
    assert d.backend is Backend.EXACT and evaluate(d, "aa") == 0


@given(rational_wa(max_n=3), st.lists(st.lists(st.sampled_from("ab"), max_size=5), min_size=1, max_size=5))
def test_difference_float_backend(a, words):
    fa = a.to_float()
    fb = WeightedAutomaton(a.alphabet, {x: m * 0.5 for x, m in fa.transitions.items()}, fa.initial, fa.final)
    d = difference(fa, fb)
    for w in words:
        w = tuple(x for x in w if x in a.alphabet)
        lhs, rhs = evaluate(d, w), evaluate(fa, w) - evaluate(fb, w)
        assert abs(lhs - rhs) <= 1e-10 * (1 + abs(rhs))


def test_hankel_rank_examples(plane_pa):
    assert hankel_rank(scalar_wa(2)) == 1
    assert hankel_rank(scalar_wa(2, eta=0)) == 0
    assert hankel_rank(plane_pa) == 4
    assert hankel_rank(WeightedAutomaton.zero(("a",))) == 0
    with pytest.raises(BackendError):
        hankel_rank(scalar_wa(2).to_float())


def test_hankel_block_layout():
    a = scalar_wa(2)
    h = hankel_block(a, 1)
    assert h.row_words == ((), ("a",))
    assert [[int(v) for v in row] for row in h.entries] == [[1, 2], [2, 4]]


@given(rational_wa(max_n=3, max_letters=2))
def test_hankel_rank_matches_full_block(a):
    r = hankel_rank(a)
    assert r == brute_hankel_rank(a)
    assert r <= a.n


@given(rational_wa(max_n=4), st.randoms(use_true_random=False))
def test_hankel_rank_permutation_invariant(a, rnd):
    perm = list(range(a.n))
    rnd.shuffle(perm)
    assert hankel_rank(a.permuted(perm)) == hankel_rank(a)


def _random_dfa(rng, n, letters):
    trans = {}
    for x in letters:
        m = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            j = rng.integers(-1, n)  # -1: missing transition
            if j >= 0:
                m[i, j] = 1
        trans[x] = m.astype(object) * F(1)
    alpha = exact_vec([1] + [0] * (n - 1))
    eta = exact_vec(rng.integers(0, 2, n))
    return WeightedAutomaton(letters, trans, alpha, eta)


def _hankel_by_vectors(a):
    """Block ``H[x, y] = (alpha M(x)) . (M(y) eta)`` over words of length <= n."""
    words = list(words_up_to(a.alphabet, a.n))
    fwd = np.array([list(forward_vector(a, w)) for w in words], dtype=object)
    bwd = np.array([list(forward_vector(a.reversed(), w[::-1])) for w in words], dtype=object)
    return fwd @ bwd.T


def _myhill_nerode_rows(a):
    """Distinct nonzero residual rows ``y -> L(xy)``."""
    rows = {tuple(r) for r in _hankel_by_vectors(a)}
    return [r for r in rows if any(r)]


def test_hankel_rank_of_dfas_against_myhill_nerode():
    rng = np.random.default_rng(3)
    strict = 0
    for _ in range(80):
        n = int(rng.integers(1, 6))
        a = _random_dfa(rng, n, ("a", "b")[: int(rng.integers(1, 3))])
        classes = _myhill_nerode_rows(a)
        r = hankel_rank(a)
        assert r == rational_rank(_hankel_by_vectors(a))
        # distinct 0/1 residual rows can still be linearly dependent over the reals
        assert r <= len(classes)
        strict += r < len(classes)
    assert strict < 80


def test_hankel_rank_equals_classes_on_chain_dfa():
    # a^k accepted iff k = 3 (mod 4): four live, pairwise distinct residuals
    m = np.zeros((4, 4), dtype=object)
    m.fill(F(0))
    for i in range(4):
        m[i, (i + 1) % 4] = F(1)
    a = WeightedAutomaton(("a",), {"a": m}, exact_vec([1, 0, 0, 0]), exact_vec([0, 0, 0, 1]))
    assert hankel_rank(a) == len(_myhill_nerode_rows(a)) == 4


def test_json_roundtrip(tmp_path, plane_pa):
    p = tmp_path / "a.json"
    dump_automaton(plane_pa, p)
    b = load_automaton(p)
    assert b.alphabet == plane_pa.alphabet
    assert b.to_dict() == plane_pa.to_dict()
    f = plane_pa.to_float()
    dump_automaton(f, p)
    g = load_automaton(p)
    assert g.backend is Backend.FLOAT
    for x in f.alphabet:
        np.testing.assert_array_equal(g.transitions[x], f.transitions[x])


@pytest.mark.parametrize("mutate, fragment", [
    (lambda d: d.update(extra=1), "unknown fields"),
    (lambda d: d.pop("final"), "missing fields"),
    (lambda d: d.update(size=-1), "size"),
    (lambda d: d["initial"].__setitem__(0, "1/0"), "initial[0]"),
    (lambda d: d["transitions"]["a"][0].__setitem__(0, "x"), "transitions['a'][0][0]"),
    (lambda d: d.update(backend="decimal"), "backend"),
    (lambda d: d["transitions"].pop("a"), "do not match"),
])
def test_json_rejects_malformed(mutate, fragment):
    d = scalar_wa(2).to_dict()
    mutate(d)
    with pytest.raises(AutomatonFormatError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
        WeightedAutomaton.from_dict(d)


def test_json_document_shape():
    d = scalar_wa(F(1, 2)).to_dict()
    assert d == {"backend": "exact", "size": 1, "alphabet": ["a"], "initial": ["1"], "final": ["1"],
                 "transitions": {"a": [["1/2"]]}}
    assert json.loads(json.dumps(d)) == d


def test_zero_state_automaton():
    z = WeightedAutomaton.zero(("a", "b"))
    assert z.n == 0 and evaluate(z, "ab") == 0


def test_reversed_reads_backwards():
    a = WeightedAutomaton(("a", "b"), {"a": exact([[1, 2], [0, 1]]), "b": exact([[0, 1], [3, 0]])},
                          exact_vec([1, 2]), exact_vec([1, -1]))
    for w in words_up_to(a.alphabet, 4):
        assert evaluate(a.reversed(), w[::-1]) == evaluate(a, w)
