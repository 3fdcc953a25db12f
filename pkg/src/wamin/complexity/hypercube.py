"""The hypercube problem and the 3SAT reduction to it.

Given points ``P`` in ``[0,1]^d`` and a budget ``ell``, the question is
whether some ``ell`` points of the cube have a convex hull containing ``P``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from ..linalg import format_scalar, parse_scalar
from .cnf import Cnf3

__all__ = [
    "HypercubeFormatError",
    "HypercubeInstance",
    "load_instance",
    "load_points",
    "restrict",
    "sat_to_hypercube",
    "witness_from_assignment",
]

Point = tuple[Fraction, ...]
HALF, THIRD = Fraction(1, 2), Fraction(1, 3)


class HypercubeFormatError(ValueError):
    pass


@dataclass(frozen=True)
class HypercubeInstance:
    d: int
    points: tuple[Point, ...]
    ell: int
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        pts = tuple(tuple(Fraction(v) for v in p) for p in self.points)
        for i, p in enumerate(pts):
            if len(p) != self.d:
                raise ValueError(f"point {i} has {len(p)} coordinates, expected d={self.d}")
            if any(v < 0 or v > 1 for v in p):
                raise ValueError(f"point {i} leaves the unit hypercube")
        if self.names is not None and len(self.names) != self.d:
            raise ValueError("need one name per coordinate")
        if self.ell < 0:
            raise ValueError("ell must be nonnegative")
        object.__setattr__(self, "points", pts)
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))

    @property
    def k(self) -> int:
        return len(self.points)

    @property
    def restricted(self) -> bool:
        """True if the first point is the origin (the restricted problem)."""
        return bool(self.points) and all(v == 0 for v in self.points[0])

    def to_dict(self) -> dict:
        doc = {
            "d": self.d,
            "ell": self.ell,
            "points": [[format_scalar(v) for v in p] for p in self.points],
        }
        if self.names is not None:
            doc["names"] = list(self.names)
        return doc

    @classmethod
    def from_dict(cls, doc) -> "HypercubeInstance":
        if not isinstance(doc, dict):
            raise HypercubeFormatError("instance must be a JSON object")
        unknown = set(doc) - {"d", "ell", "points", "names"}
        if unknown:
            raise HypercubeFormatError(f"unknown fields: {sorted(unknown)}")
        for key in ("d", "ell", "points"):
            if key not in doc:
                raise HypercubeFormatError(f"missing field {key!r}")
        try:
            return cls(doc["d"], _parse_points(doc["points"]), doc["ell"], doc.get("names"))
        except ValueError as exc:
            raise HypercubeFormatError(str(exc)) from None


def _parse_points(rows) -> list[Point]:
    if not isinstance(rows, list):
        raise HypercubeFormatError("points must be an array of arrays")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise HypercubeFormatError(f"points[{i}] must be an array")
        try:
            out.append(tuple(parse_scalar(v, "exact") for v in row))
        except ValueError as exc:
            raise HypercubeFormatError(f"points[{i}]: {exc}") from None
    return out


def load_instance(path) -> HypercubeInstance:
    return HypercubeInstance.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def load_points(path) -> list[Point]:
    """Read a point set: an instance file or ``{"points": [...]}``."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict) or "points" not in doc:
        raise HypercubeFormatError(f"{path}: expected an object with a 'points' field")
    unknown = set(doc) - {"d", "ell", "points", "names"}
    if unknown:
        raise HypercubeFormatError(f"{path}: unknown fields {sorted(unknown)}")
    return _parse_points(doc["points"])


# --------------------------------------------------------------- 3SAT


class _Coords:
    """Coordinate layout xbar_1..N, y_1..N, z_1..N, cbar_1..M."""

    def __init__(self, n: int, m: int):
        self.n, self.m = n, m
        self.d = 3 * n + m

    def xbar(self, i): return i - 1
    def y(self, i): return self.n + i - 1
    def z(self, i): return 2 * self.n + i - 1
    def cbar(self, j): return 3 * self.n + j - 1

    def names(self):
        n, m = self.n, self.m
        return tuple([f"xbar{i}" for i in range(1, n + 1)] + [f"y{i}" for i in range(1, n + 1)]
                     + [f"z{i}" for i in range(1, n + 1)] + [f"cbar{j}" for j in range(1, m + 1)])

    def vec(self, entries: dict) -> Point:
        v = [Fraction(0)] * self.d
        for idx, val in entries.items():
            v[idx] += Fraction(val)
        return tuple(v)

    def f(self, lit: int) -> dict:
        i = abs(lit)
        return {self.y(i): 1} if lit < 0 else {self.y(i): 1, self.z(i): 1}


def _merge(*parts: tuple[dict, Fraction]) -> dict:
    out: dict = {}
    for entries, scale in parts:
        for k, v in entries.items():
            out[k] = out.get(k, Fraction(0)) + scale * v
    return out


def _var_and_clause_points(phi: Cnf3, c: _Coords) -> tuple[list[Point], list[Point]]:
    p_var = []
    for i in range(1, phi.num_vars + 1):
        p_var.append(c.vec(_merge(({c.xbar(i): 1}, 1), (c.f(-i), 1))))
        p_var.append(c.vec(_merge(({c.xbar(i): 1}, 1), (c.f(i), 1))))
    p_cla = []
    for j, clause in enumerate(phi.clauses, 1):
        for lit in clause:
            p_cla.append(c.vec(_merge(({c.cbar(j): 1}, 1), (c.f(lit), 1))))
    return p_var, p_cla


def sat_to_hypercube(phi: Cnf3) -> HypercubeInstance:
    """Hypercube instance that is a yes-instance iff ``phi`` is satisfiable.

    ``d = 3N + M``, ``|P| = 3N + 4M``, ``ell = 3N + 3M``.
    """
    n, m = phi.num_vars, phi.num_clauses
    c = _Coords(n, m)
    p_var, p_cla = _var_and_clause_points(phi, c)
    p_x = [c.vec({c.xbar(i): HALF, c.y(i): 1, c.z(i): HALF}) for i in range(1, n + 1)]
    p_c = []
    for j, clause in enumerate(phi.clauses, 1):
        parts = [({c.cbar(j): 1}, Fraction(2, 3))] + [(c.f(lit), THIRD) for lit in clause]
        p_c.append(c.vec(_merge(*parts)))
    return HypercubeInstance(c.d, tuple(p_var + p_cla + p_x + p_c), 3 * n + 3 * m, c.names())


def witness_from_assignment(phi: Cnf3, assignment: Sequence[bool]) -> list[Point]:
    """The ``3N + 3M`` points ``P_var + P_cla + {s_i}``; their hull covers the
    instance's points when ``assignment`` satisfies ``phi``."""
    if len(assignment) != phi.num_vars:
        raise ValueError(f"assignment must give {phi.num_vars} truth values")
    c = _Coords(phi.num_vars, phi.num_clauses)
    p_var, p_cla = _var_and_clause_points(phi, c)
    s = [c.vec(c.f(i if assignment[i - 1] else -i)) for i in range(1, phi.num_vars + 1)]
    return p_var + p_cla + s


def restrict(inst: HypercubeInstance, corner: int | None = None) -> HypercubeInstance:
    """Reflect coordinates so that a cube vertex of ``P`` becomes the origin,
    and move it to the front.

    ``corner`` indexes ``P``; by default the first vertex found is used.
    Reflections ``x -> 1 - x`` preserve the cube and convex hulls, so the
    answer to the instance is unchanged.
    """
    if corner is None:
        corner = next((i for i, p in enumerate(inst.points) if all(v in (0, 1) for v in p)), None)
        if corner is None:
            raise ValueError("no point of P is a vertex of the hypercube")
    v = inst.points[corner]
    if not all(x in (0, 1) for x in v):
        raise ValueError(f"point {corner} is not a vertex of the hypercube")
    flip = [x == 1 for x in v]
    pts = [tuple(1 - x if fl else x for x, fl in zip(p, flip)) for p in inst.points]
    pts = [pts[corner]] + pts[:corner] + pts[corner + 1 :]
    return HypercubeInstance(inst.d, tuple(pts), inst.ell, inst.names)
