import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wamin import equivalent, evaluate, minimise, validate_pa
from wamin.automaton import ProbabilisticAutomaton
from wamin.complexity import (
    Cnf3,
    CnfError,
    EtrParseError,
    HullCertificate,
    HypercubeInstance,
    InvalidWitnessError,
    emit_etr,
    expected_variable_count,
    hull_cover,
    hull_membership,
    hypercube_to_pa,
    load_instance,
    pa_from_witness,
    parse_dimacs,
    parse_smtlib,
    random_cnf3,
    restrict,
    sat_to_hypercube,
    to_dimacs,
    unsat_cube_formula,
    witness_from_assignment,
)

from conftest import PLANE_POINTS, PLANE_Q

ALLOWED = {F(0), F(1, 3), F(1, 2), F(2, 3), F(1)}


def words_upto(alphabet, n):
    for k in range(n + 1):
        yield from itertools.product(alphabet, repeat=k)


# ------------------------------------------------------------------ CNF


def test_dimacs_roundtrip_and_comments():
    phi = parse_dimacs("c hello\np cnf 3 2\n1 -2 3 0\n-1 2\n-3 0\n")
    assert phi == Cnf3(3, ((1, -2, 3), (-1, 2, -3)))
    assert parse_dimacs(to_dimacs(phi)) == phi


@pytest.mark.parametrize("text", [
    "p cnf 3 1\n1 2 0\n",
    "p cnf 3 1\n1 1 2 0\n",
    "p cnf 3 2\n1 2 3 0\n3 2 1 0\n",
    "p cnf 3 1\n1 2 4 0\n",
    "p cnf 3 2\n1 2 3 0\n",
    "1 2 3 0\n",
    "p cnf 3 1\n1 x 3 0\n",
])
def test_dimacs_errors(text):
    with pytest.raises(CnfError):
        parse_dimacs(text)


def test_unsat_formula(data_dir):
    phi = unsat_cube_formula()
    assert phi.num_clauses == 8 and phi.satisfying_assignments() == []
    assert parse_dimacs((data_dir / "unsat_cube.cnf").read_text()) == phi


def test_single_variable_clause_impossible():
    with pytest.raises(CnfError):
        random_cnf3(1, 1, np.random.default_rng(0))
    with pytest.raises(CnfError):
        Cnf3(1, ((1, 1, 1),))


# ------------------------------------------------------------------ 3SAT -> hypercube


def test_sat_to_hypercube_sizes_small():
    inst = sat_to_hypercube(Cnf3(3, ((1, 2, -3),)))
    assert (inst.d, inst.k, inst.ell) == (10, 13, 12)


def test_clause_point_coordinates():
    inst = sat_to_hypercube(Cnf3(3, ((1, 2, -3),)))
    pc = dict(zip(inst.names, inst.points[-1]))
    assert pc["cbar1"] == F(2, 3)
    assert pc["y1"] == pc["y2"] == pc["y3"] == F(1, 3)
    assert pc["z3"] == 0 and pc["z1"] == pc["z2"] == F(1, 3)
    assert pc["xbar1"] == pc["xbar2"] == pc["xbar3"] == 0


def test_coordinate_order():
    inst = sat_to_hypercube(Cnf3(3, ((1, 2, 3), (-1, -2, -3))))
    assert inst.names == ("xbar1", "xbar2", "xbar3", "y1", "y2", "y3", "z1", "z2", "z3", "cbar1", "cbar2")


@st.composite
def formulas(draw, max_vars=5, max_clauses=8):
    n = draw(st.integers(3, max_vars))
    m = draw(st.integers(1, max_clauses))
    return random_cnf3(n, m, np.random.default_rng(draw(st.integers(0, 2**32 - 1))))


@given(formulas())
def test_sat_to_hypercube_invariants(phi):
    n, m = phi.num_vars, phi.num_clauses
    inst = sat_to_hypercube(phi)
    assert (inst.d, inst.k, inst.ell) == (3 * n + m, 3 * n + 4 * m, 3 * n + 3 * m)
    assert all(v in ALLOWED for p in inst.points for v in p)


@given(formulas(max_vars=4, max_clauses=5), st.data())
def test_witness_covers_for_satisfying(phi, data):
    inst = sat_to_hypercube(phi)
    sigma = tuple(data.draw(st.lists(st.booleans(), min_size=phi.num_vars, max_size=phi.num_vars)))
    q = witness_from_assignment(phi, sigma)
    assert len(q) == inst.ell
    ok, bad, certs = hull_cover(inst.points, q)
    if phi.satisfied_by(sigma):
        assert ok and all(c.verify(p, q) for c, p in zip(certs, inst.points))
    else:
        # an unsatisfied clause's point is the one that escapes
        assert not ok and bad >= 3 * phi.num_vars + 3 * phi.num_clauses


def test_all_false_witness_is_y():
    phi = Cnf3(3, ((1, 2, 3),))
    inst = sat_to_hypercube(phi)
    q = witness_from_assignment(phi, (False,) * 3)
    for i, s in enumerate(q[-3:], 1):
        assert dict(zip(inst.names, s)) == {nm: F(nm == f"y{i}") for nm in inst.names}


def test_unsat_every_witness_fails():
    phi = unsat_cube_formula()
    inst = sat_to_hypercube(phi)
    # P_var (2N), P_cla (3M), p(x_i) (N), then the clause points p(c_j)
    first_clause_point = 3 * 3 + 3 * 8
    for sigma in phi.assignments():
        ok, bad, _ = hull_cover(inst.points, witness_from_assignment(phi, sigma))
        assert not ok and bad >= first_clause_point


def test_witness_length_checked():
    with pytest.raises(ValueError):
        witness_from_assignment(Cnf3(3, ((1, 2, 3),)), (True,))


# ------------------------------------------------------------------ hull


def test_hull_member_point():
    ok, cert = hull_membership((0, 1), PLANE_Q)
    assert ok and cert.weights == (0, 1, 0)


def test_hull_plane_weights():
    ok, cert = hull_membership((F(1, 4), F(1, 2)), PLANE_Q)
    assert ok and cert.weights == (F(3, 8), F(3, 8), F(1, 4))


def test_hull_not_member():
    assert hull_membership((1, 1), [(0, 0), (1, 0)]) == (False, None)
    assert hull_membership((0,), []) == (False, None)


def test_hull_dimension_mismatch():
    with pytest.raises(ValueError):
        hull_membership((0, 0), [(0,)])


def test_hull_cover_plane():
    ok, bad, certs = hull_cover(PLANE_POINTS, PLANE_Q)
    assert ok and bad is None and len(certs) == 5
    ok, bad, _ = hull_cover(PLANE_POINTS, PLANE_Q[:2])
    # the first point off the segment {(0,0),(0,1)} is (1/4, 1/2), index 2
    assert not ok and bad == 2 and PLANE_POINTS[bad] == (F(1, 4), F(1, 2))
    # with that point removed the next failure is (1/2, 1/4)
    rest = PLANE_POINTS[:2] + PLANE_POINTS[3:]
    assert hull_cover(rest, PLANE_Q[:2])[1] == 2 and rest[2] == (F(1, 2), F(1, 4))


def test_hull_cover_self():
    assert hull_cover(PLANE_POINTS, PLANE_POINTS)[0]


def test_certificate_verify_rejects():
    q = [(0,), (1,)]
    assert HullCertificate((F(1, 2), F(1, 2))).verify((F(1, 2),), q)
    assert not HullCertificate((F(1, 2), F(1, 3))).verify((F(1, 2),), q)
    assert not HullCertificate((F(3, 2), F(-1, 2))).verify((F(-1, 2),), q)
    assert not HullCertificate((F(1),)).verify((0,), q)


rat = st.fractions(min_value=0, max_value=1, max_denominator=6)


@given(st.lists(st.tuples(rat, rat, rat), min_size=1, max_size=6),
       st.lists(st.fractions(min_value=0, max_value=10, max_denominator=5), min_size=6, max_size=6))
def test_hull_convex_combination_found(q, w):
    w = w[: len(q)]
    if sum(w) == 0:
        w = [F(1)] + [F(0)] * (len(q) - 1)
    lam = [x / sum(w) for x in w]
    p = tuple(sum(l * x[s] for l, x in zip(lam, q)) for s in range(3))
    ok, cert = hull_membership(p, q)
    assert ok and cert.verify(p, q)


@given(st.lists(st.tuples(rat, rat), min_size=1, max_size=5), st.tuples(rat, rat))
def test_hull_answer_matches_vertex_enumeration(q, p):
    ok, cert = hull_membership(p, q)
    if ok:
        assert cert.verify(p, q)
    else:
        # p is outside: some pair of points (or single point) cannot produce it;
        # check that no brute-force barycentric combination of any <= 3 points does
        for r in range(1, min(3, len(q)) + 1):
            for sub in itertools.combinations(q, r):
                assert not _in_simplex(p, sub)


def _in_simplex(p, pts):
    """Exact test for p in conv(pts) with up to 3 planar points."""
    if len(pts) == 1:
        return tuple(F(v) for v in p) == tuple(F(v) for v in pts[0])
    if len(pts) == 2:
        (ax, ay), (bx, by) = pts
        if (ax, ay) == (bx, by):
            return _in_simplex(p, pts[:1])
        cross = (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax)
        dot = (p[0] - ax) * (bx - ax) + (p[1] - ay) * (by - ay)
        return cross == 0 and 0 <= dot <= (bx - ax) ** 2 + (by - ay) ** 2
    a, b, c = pts
    def side(u, v, w):
        return (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])
    s1, s2, s3 = side(a, b, p), side(b, c, p), side(c, a, p)
    if side(a, b, c) == 0:
        return any(_in_simplex(p, pair) for pair in itertools.combinations(pts, 2))
    return (s1 >= 0 and s2 >= 0 and s3 >= 0) or (s1 <= 0 and s2 <= 0 and s3 <= 0)


# ------------------------------------------------------------------ hypercube -> PA


def test_plane_pa(plane_instance, plane_pa):
    pa, target = hypercube_to_pa(plane_instance)
    assert isinstance(pa, ProbabilisticAutomaton) and target == 4
    a = plane_pa
    assert a.n == 6 and a.alphabet == ("a2", "a3", "a4", "a5", "b1", "b2")
    assert evaluate(a, ("a2", "b2")) == F(3, 4)
    for i in range(2, 6):
        for s in (1, 2):
            assert evaluate(a, (f"a{i}", f"b{s}")) == PLANE_POINTS[i - 1][s - 1]
    assert evaluate(a, ("b1",)) == 0 and evaluate(a, ("a2",)) == 0


@given(formulas(max_vars=3, max_clauses=2))
def test_hypercube_to_pa_values(phi):
    inst = restrict(sat_to_hypercube(phi))
    a = hypercube_to_pa(inst)[0].automaton
    assert validate_pa(a) is not None and not isinstance(validate_pa(a), list)
    assert a.n == inst.k + 1


def test_other_words_vanish(plane_pa):
    a = plane_pa
    expected = {(f"a{i}", f"b{s}"): PLANE_POINTS[i - 1][s - 1] for i in range(2, 6) for s in (1, 2)}
    for w in words_upto(a.alphabet, 3):
        assert evaluate(a, w) == expected.get(w, 0)


def test_degenerate_single_origin():
    pa, target = hypercube_to_pa(HypercubeInstance(2, [(0, 0)], 1))
    a = pa.automaton
    assert a.n == 2 and target == 2 and a.alphabet == ("b1", "b2")
    assert all(evaluate(a, w) == 0 for w in words_upto(a.alphabet, 3))


def test_unrestricted_rejected():
    with pytest.raises(ValueError):
        hypercube_to_pa(HypercubeInstance(1, [(1,)], 1))


def test_restrict_moves_vertex():
    inst = HypercubeInstance(2, [(F(1, 2), F(1, 2)), (1, 0)], 2)
    r = restrict(inst)
    assert r.points == ((0, 0), (F(1, 2), F(1, 2)))
    with pytest.raises(ValueError):
        restrict(inst, 0)
    with pytest.raises(ValueError):
        restrict(HypercubeInstance(1, [(F(1, 2),)], 1))


def test_instance_validation():
    with pytest.raises(ValueError):
        HypercubeInstance(2, [(0, 2)], 1)
    with pytest.raises(ValueError):
        HypercubeInstance(2, [(0,)], 1)
    with pytest.raises(ValueError):
        HypercubeInstance(1, [(0,)], -1)


def test_instance_file(data_dir, plane_instance):
    inst = load_instance(data_dir / "plane_instance.json")
    assert inst.points == plane_instance.points and inst.ell == 3
    assert HypercubeInstance.from_dict(inst.to_dict()) == inst


def test_minimise_plane(plane_pa):
    assert minimise(plane_pa)[0].n == 4


def test_pa_from_witness_plane(plane_instance, plane_pa, plane_witness_pa):
    b = plane_witness_pa
    assert b.n == 4
    assert b.transitions["a3"][0, 1] == F(3, 8) and b.transitions["a3"][0, 2] == F(1, 4)
    assert b.transitions["b2"][2, 3] == F(1, 2)
    assert equivalent(plane_pa, b)


def test_pa_from_witness_identity(plane_instance, plane_pa):
    b = pa_from_witness(plane_instance, PLANE_POINTS).automaton
    assert b.n == 6 and equivalent(plane_pa, b)


def test_pa_from_witness_origin_not_first(plane_instance, plane_pa):
    q = [PLANE_Q[2], PLANE_Q[0], PLANE_Q[1]]
    assert equivalent(plane_pa, pa_from_witness(plane_instance, q).automaton)


def test_pa_from_witness_errors(plane_instance):
    with pytest.raises(InvalidWitnessError):
        pa_from_witness(plane_instance, PLANE_Q[:2])
    with pytest.raises(InvalidWitnessError):
        pa_from_witness(plane_instance, [(0, 1), (1, F(1, 2))])
    with pytest.raises(InvalidWitnessError):
        pa_from_witness(plane_instance, [(0, 0), (0, 2)])
    _, _, certs = hull_cover(PLANE_POINTS, PLANE_Q)
    bad = list(certs)
    bad[2] = HullCertificate((F(1, 2), F(1, 4), F(1, 4)))
    with pytest.raises(InvalidWitnessError):
        pa_from_witness(plane_instance, PLANE_Q, bad)
    assert pa_from_witness(plane_instance, PLANE_Q, certs).automaton.n == 4


@given(formulas(max_vars=3, max_clauses=2), st.data())
def test_witness_pa_equivalent_for_sat_instances(phi, data):
    sats = phi.satisfying_assignments()
    sigma = data.draw(st.sampled_from(sats))
    inst = sat_to_hypercube(phi)
    # the first variable point is a cube vertex; reflect it to the origin
    r = restrict(inst, 0)
    flip = [v == 1 for v in inst.points[0]]
    q = [tuple(1 - v if f else v for v, f in zip(x, flip)) for x in witness_from_assignment(phi, sigma)]
    b = pa_from_witness(r, q).automaton
    assert b.n == inst.ell + 1
    assert equivalent(hypercube_to_pa(r)[0].automaton, b)


# ------------------------------------------------------------------ ETR


def test_etr_golden(plane_pa, data_dir):
    text = emit_etr(plane_pa, 4).to_smtlib()
    assert text == (data_dir / "plane_n2_4.smt2").read_text()
    assert text == emit_etr(plane_pa, 4).to_smtlib()


def test_etr_reparse_and_count(plane_pa):
    f = emit_etr(plane_pa, 4)
    g = parse_smtlib(f.to_smtlib())
    assert g == f
    assert len(f.declarations) == expected_variable_count(6, 4, 6) == 804
    assert f.variables_used() == set(f.declarations)
    assert f.to_smtlib().rstrip().endswith("(check-sat)")
    assert "(set-logic QF_NRA)" in f.to_smtlib()


@pytest.mark.parametrize("n2", [0, 1, 2, 6])
def test_etr_sizes(plane_pa, n2):
    f = emit_etr(plane_pa, n2)
    assert len(f.declarations) == expected_variable_count(6, n2, 6)
    assert parse_smtlib(f.to_smtlib()) == f
    assert f.variables_used() == set(f.declarations)


def test_etr_rational_constants(plane_pa):
    text = emit_etr(plane_pa, 1).to_smtlib()
    assert "(/ 3 4)" in text


def test_etr_n2_negative(plane_pa):
    with pytest.raises(ValueError):
        emit_etr(plane_pa, -1)


@pytest.mark.parametrize("text", [
    "(assert (= x 0))",
    "(set-logic QF_NRA)\n(declare-fun x () Int)\n(check-sat)\n",
    "(set-logic QF_NRA)\n(push 1)\n(check-sat)\n",
    "(set-logic QF_NRA)\n(assert (= x 0)\n",
])
def test_smtlib_errors(text):
    with pytest.raises(EtrParseError):
        parse_smtlib(text)


def test_etr_intended_model_satisfies(plane_pa, plane_witness_pa):
    """Plug the 4-state witness PA and an F built from both reductions into
    the emitted constraints; every assertion must evaluate to true."""
    from wamin.automaton import difference
    from wamin.reduction import forward_reduction

    f = emit_etr(plane_pa, 4)
    a1, a2 = plane_pa, plane_witness_pa
    red = forward_reduction(difference(a1, a2))
    r, big = red.size, a1.n + a2.n
    assert list(red.F[0]) == list(a1.initial) + list(a2.initial)
    fm = np.full((big, big), F(0), dtype=object)
    fm[:r] = red.F
    model = {}
    for i in range(4):
        model[f"alpha2_{i + 1}"] = a2.initial[i]
        model[f"eta2_{i + 1}"] = a2.final[i]
    for x in a1.alphabet:
        for i in range(4):
            for j in range(4):
                model[f"M2_{x}_{i + 1}_{j + 1}"] = a2.transitions[x][i, j]
        mf = np.full((big, big), F(0), dtype=object)
        mf[:r, :r] = red.MF[x]
        for i in range(big):
            for j in range(big):
                model[f"F_{i + 1}_{j + 1}"] = fm[i, j]
                model[f"MF_{x}_{i + 1}_{j + 1}"] = mf[i, j]
    for t in f.assertions:
        assert _eval_term(t, model), t


def _eval_term(t, env):
    if isinstance(t, str):
        return env[t]
    if not isinstance(t, tuple):
        return F(t)
    op, *args = t
    v = [_eval_term(x, env) for x in args]
    if op == "+":
        return sum(v, F(0))
    if op == "*":
        out = F(1)
        for x in v:
            out *= x
        return out
    if op == "-":
        return -v[0] if len(v) == 1 else v[0] - sum(v[1:], F(0))
    if op == "/":
        return v[0] / v[1]
    return {"=": v[0] == v[1], "<=": v[0] <= v[1], ">=": v[0] >= v[1],
            "<": v[0] < v[1], ">": v[0] > v[1]}[op]
