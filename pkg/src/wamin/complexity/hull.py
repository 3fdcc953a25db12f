"""Exact convex-hull membership over the rationals.

Feasibility of ``sum_j lam_j q_j = p, sum_j lam_j = 1, lam >= 0`` is decided
with a phase-1 simplex using Bland's rule, which cannot cycle.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

__all__ = ["HullCertificate", "hull_cover", "hull_membership"]

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class HullCertificate:
    """Convex weights ``lam[j]`` for the points of ``Q`` (in ``Q``'s order)."""

    weights: tuple[Fraction, ...]

    def verify(self, p: Sequence, q: Sequence[Sequence]) -> bool:
        lam = self.weights
        if len(lam) != len(q) or any(x < 0 for x in lam) or sum(lam) != 1:
            return False
        return all(
            sum((lam[j] * Fraction(q[j][s]) for j in range(len(q))), Fraction(0)) == Fraction(p[s])
            for s in range(len(p))
        )


def _as_point(x) -> Point:
    return tuple(Fraction(v) for v in x)


def _phase_one(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """A feasible ``x >= 0`` with ``a x = b``, or None."""
    m, nv = len(a), len(a[0]) if a else 0
    rows = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        rows.append([sign * v for v in a[i]] + [Fraction(int(k == i)) for k in range(m)] + [sign * b[i]])
    width = nv + m
    basis = [nv + i for i in range(m)]
    # reduced costs of the phase-1 objective sum(artificials)
    cost = [-sum((rows[i][j] for i in range(m)), Fraction(0)) for j in range(nv)] + [Fraction(0)] * m
    cost.append(-sum((rows[i][-1] for i in range(m)), Fraction(0)))
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            if rows[i][enter] > 0:
                ratio = rows[i][-1] / rows[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            # unbounded direction; cannot happen for a phase-1 objective bounded below by 0
            raise RuntimeError("phase-1 simplex reported unbounded")
        piv = rows[leave][enter]
        rows[leave] = [v / piv for v in rows[leave]]
        prow = rows[leave]
        for i in range(m):
            if i != leave and rows[i][enter] != 0:
                f = rows[i][enter]
                rows[i] = [v - f * pv for v, pv in zip(rows[i], prow)]
        f = cost[enter]
        cost = [v - f * pv for v, pv in zip(cost, prow)]
        basis[leave] = enter
    if cost[-1] != 0:
        return None
    x = [Fraction(0)] * nv
    for i, j in enumerate(basis):
        if j < nv:
            x[j] = rows[i][-1]
    return x


def hull_membership(p, q: Sequence) -> tuple[bool, HullCertificate | None]:
    """Is ``p`` in the convex hull of the points ``q``?  Exact."""
    p = _as_point(p)
    pts = [_as_point(x) for x in q]
    if any(len(x) != len(p) for x in pts):
        raise ValueError(f"dimension mismatch: point has {len(p)} coordinates")
    if not pts:
        return False, None
    for j, x in enumerate(pts):
        if x == p:
            cert = HullCertificate(tuple(Fraction(int(k == j)) for k in range(len(pts))))
            return True, cert
    cand = list(range(len(pts)))
    coords = list(range(len(p)))
    if all(v >= 0 for v in p) and all(v >= 0 for x in pts for v in x):
        # nonnegative data: a point with weight > 0 cannot be positive where p is 0
        zero = [s for s in coords if p[s] == 0]
        cand = [j for j in cand if all(pts[j][s] == 0 for s in zero)]
        coords = [s for s in coords if p[s] != 0]
    if not cand:
        return False, None
    a = [[pts[j][s] for j in cand] for s in coords] + [[Fraction(1)] * len(cand)]
    b = [p[s] for s in coords] + [Fraction(1)]
    x = _phase_one(a, b)
    if x is None:
        return False, None
    lam = [Fraction(0)] * len(pts)
    for j, v in zip(cand, x):
        lam[j] = v
    cert = HullCertificate(tuple(lam))
    if not cert.verify(p, pts):
        raise AssertionError("simplex returned an invalid hull certificate")
    return True, cert


def hull_cover(p_set: Sequence, q: Sequence) -> tuple[bool, int | None, list[HullCertificate]]:
    """Check ``conv(Q) >= P`` point by point in input order.

    Returns ``(covered, index of first uncovered point or None, certificates
    for the points checked so far)``.
    """
    certs = []
    for i, p in enumerate(p_set):
        ok, cert = hull_membership(p, q)
        if not ok:
            return False, i, certs
        certs.append(cert)
    return True, None, certs
