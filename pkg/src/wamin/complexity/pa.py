"""Hypercube instances as PA minimisation instances, and back from witnesses."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..automaton import ProbabilisticAutomaton, WeightedAutomaton, validate_pa
from ..linalg import Backend, zeros
from .hull import HullCertificate, hull_cover
from .hypercube import HypercubeInstance

__all__ = ["InvalidWitnessError", "a_letter", "b_letter", "hypercube_to_pa", "pa_from_witness"]


class InvalidWitnessError(ValueError):
    pass


def a_letter(i: int) -> str:
    return f"a{i}"


def b_letter(s: int) -> str:
    return f"b{s}"


def _alphabet(k: int, d: int) -> tuple[str, ...]:
    return tuple(a_letter(i) for i in range(2, k + 1)) + tuple(b_letter(s) for s in range(1, d + 1))


def _pa(a: WeightedAutomaton) -> ProbabilisticAutomaton:
    res = validate_pa(a)
    if isinstance(res, list):
        raise AssertionError(f"construction produced a non-PA: {[str(v) for v in res]}")
    return res


def hypercube_to_pa(inst: HypercubeInstance) -> tuple[ProbabilisticAutomaton, int]:
    """PA with ``k + 1`` states whose value on ``a_i b_s`` is ``p_i[s]``.

    A PA with ``ell + 1`` states is equivalent to it iff ``ell`` cube points
    have a hull containing ``P``.  Returns the PA and that target size.
    """
    if not inst.restricted:
        raise ValueError("the first point must be the origin (see hypercube.restrict)")
    k, d = inst.k, inst.d
    n = k + 1
    alphabet = _alphabet(k, d)
    trans = {a: zeros((n, n), Backend.EXACT) for a in alphabet}
    for i in range(2, k + 1):
        trans[a_letter(i)][0, i - 1] = Fraction(1)
        for s in range(1, d + 1):
            trans[b_letter(s)][i - 1, k] = inst.points[i - 1][s - 1]
    alpha = zeros(n, Backend.EXACT)
    eta = zeros(n, Backend.EXACT)
    alpha[0] = Fraction(1)
    eta[k] = Fraction(1)
    return _pa(WeightedAutomaton(alphabet, trans, alpha, eta)), inst.ell + 1


def pa_from_witness(inst: HypercubeInstance, q: Sequence[Sequence],
                    certificates: Sequence[HullCertificate] | None = None) -> ProbabilisticAutomaton:
    """PA with ``|Q| + 1`` states built from a covering point set ``Q``.

    ``Q`` must contain the origin; it is moved to the front.  Certificates
    (one per point of ``P``, weights in the given ``Q`` order) are computed
    when omitted and verified otherwise.  The origin's weight absorbs the
    slack, so only the other points get transitions.
    """
    if not inst.restricted:
        raise ValueError("the first point must be the origin")
    pts = [tuple(Fraction(v) for v in x) for x in q]
    if any(len(x) != inst.d for x in pts):
        raise InvalidWitnessError(f"witness points must have {inst.d} coordinates")
    if any(v < 0 or v > 1 for x in pts for v in x):
        raise InvalidWitnessError("witness points must lie in the unit hypercube")
    origin = next((j for j, x in enumerate(pts) if all(v == 0 for v in x)), None)
    if origin is None:
        raise InvalidWitnessError("Q must contain the origin")
    if certificates is None:
        ok, bad, certificates = hull_cover(inst.points, pts)
        if not ok:
            raise InvalidWitnessError(f"conv(Q) does not contain point {bad} of P")
    else:
        if len(certificates) != inst.k:
            raise InvalidWitnessError("need one certificate per point of P")
        for i, (p, cert) in enumerate(zip(inst.points, certificates)):
            if not cert.verify(p, pts):
                raise InvalidWitnessError(f"certificate {i} does not verify")
    order = [origin] + [j for j in range(len(pts)) if j != origin]
    ell = len(pts)
    n = ell + 1
    k, d = inst.k, inst.d
    alphabet = _alphabet(k, d)
    trans = {a: zeros((n, n), Backend.EXACT) for a in alphabet}
    for i in range(2, k + 1):
        lam = certificates[i - 1].weights
        for state, j in enumerate(order[1:], start=1):
            trans[a_letter(i)][0, state] = lam[j]
    for state, j in enumerate(order[1:], start=1):
        for s in range(1, d + 1):
            trans[b_letter(s)][state, ell] = pts[j][s - 1]
    alpha = zeros(n, Backend.EXACT)
    eta = zeros(n, Backend.EXACT)
    alpha[0] = Fraction(1)
    eta[ell] = Fraction(1)
    return _pa(WeightedAutomaton(alphabet, trans, alpha, eta))
