"""3-CNF formulas and DIMACS I/O."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

__all__ = ["Cnf3", "CnfError", "parse_dimacs", "random_cnf3", "to_dimacs", "unsat_cube_formula"]


class CnfError(ValueError):
    pass


@dataclass(frozen=True)
class Cnf3:
    """Variables are ``1..num_vars``; a literal is ``+i`` or ``-i`` as in DIMACS."""

    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        seen = set()
        for j, c in enumerate(clauses):
            if len(c) != 3:
                raise CnfError(f"clause {j + 1} has {len(c)} literals, expected 3")
            vs = [abs(l) for l in c]
            if any(v < 1 or v > self.num_vars for v in vs):
                raise CnfError(f"clause {j + 1} mentions a variable outside 1..{self.num_vars}")
            if len(set(vs)) != 3:
                raise CnfError(f"clause {j + 1} repeats a variable: {c}")
            key = frozenset(c)
            if key in seen:
                raise CnfError(f"clause {j + 1} duplicates an earlier clause: {c}")
            seen.add(key)
        object.__setattr__(self, "clauses", clauses)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        """``assignment[i - 1]`` is the truth value of variable ``i``."""
        return all(any((l > 0) == assignment[abs(l) - 1] for l in c) for c in self.clauses)

    def assignments(self) -> Iterator[tuple[bool, ...]]:
        return itertools.product((False, True), repeat=self.num_vars)

    def satisfying_assignments(self) -> list[tuple[bool, ...]]:
        return [s for s in self.assignments() if self.satisfied_by(s)]


def parse_dimacs(text: str) -> Cnf3:
    num_vars = num_clauses = None
    lits: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise CnfError(f"line {lineno}: malformed problem line {line!r}")
            num_vars, num_clauses = int(parts[2]), int(parts[3])
            continue
        if num_vars is None:
            raise CnfError(f"line {lineno}: clause before the problem line")
        try:
            lits.extend(int(t) for t in line.split())
        except ValueError:
            raise CnfError(f"line {lineno}: non-integer literal in {line!r}") from None
    if num_vars is None:
        raise CnfError("missing 'p cnf' problem line")
    clauses, cur = [], []
    for l in lits:
        if l == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(l)
    if cur:
        raise CnfError("last clause is not terminated by 0")
    if len(clauses) != num_clauses:
        raise CnfError(f"problem line announces {num_clauses} clauses, found {len(clauses)}")
    return Cnf3(num_vars, tuple(clauses))


def to_dimacs(phi: Cnf3) -> str:
    lines = [f"p cnf {phi.num_vars} {phi.num_clauses}"]
    lines += [" ".join(str(l) for l in c) + " 0" for c in phi.clauses]
    return "\n".join(lines) + "\n"


def random_cnf3(num_vars: int, num_clauses: int, rng: np.random.Generator) -> Cnf3:
    if num_vars < 3:
        raise CnfError("a 3-literal clause with distinct variables needs at least 3 variables")
    clauses, seen = [], set()
    while len(clauses) < num_clauses:
        vs = rng.choice(np.arange(1, num_vars + 1), size=3, replace=False)
        signs = rng.choice([-1, 1], size=3)
        c = tuple(int(v * s) for v, s in zip(vs, signs))
        if frozenset(c) not in seen:
            seen.add(frozenset(c))
            clauses.append(c)
    return Cnf3(num_vars, tuple(clauses))


def unsat_cube_formula() -> Cnf3:
    """All 8 sign patterns over variables 1, 2, 3: every assignment falsifies one."""
    return Cnf3(3, tuple(
        (s1 * 1, s2 * 2, s3 * 3) for s1 in (1, -1) for s2 in (1, -1) for s3 in (1, -1)
    ))
