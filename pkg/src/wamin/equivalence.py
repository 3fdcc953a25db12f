"""Exact zero-testing and equivalence of weighted automata.

An automaton is zero iff its forward space is orthogonal to ``eta``.  The
forward space is explored breadth-first over exact rationals, so a
violation always comes with the shortest-first witness word.
"""
from __future__ import annotations

from dataclasses import dataclass

from .automaton import WeightedAutomaton, difference, evaluate
from .linalg import RowBasis, SparseRows, format_scalar, is_all_zero

__all__ = ["EquivalenceVerdict", "equivalent", "is_zero"]


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    counterexample: tuple[str, ...] | None = None
    values: tuple | None = None
    dimension: int = 0

    def __bool__(self) -> bool:
        return self.equivalent

    def to_dict(self) -> dict:
        return {
            "equivalent": self.equivalent,
            "counterexample": None if self.counterexample is None else list(self.counterexample),
            "values": None if self.values is None else [format_scalar(v) for v in self.values],
            "dimension": self.dimension,
        }


def is_zero(a: WeightedAutomaton) -> EquivalenceVerdict:
    """Decide ``L_A == 0`` exactly.

    Float automata are converted losslessly to rationals first.
    """
    a = a.to_exact()
    if a.n == 0 or is_all_zero(a.initial):
        return EquivalenceVerdict(True, dimension=0)
    eta = a.final
    sparse = {letter: SparseRows.from_dense(a.transitions[letter]) for letter in a.alphabet}
    basis = RowBasis(a.n)
    queue: list[tuple[tuple[str, ...], object]] = [((), a.initial)]
    basis.extend(a.initial)
    head = 0
    while head < len(queue):
        word, v = queue[head]
        head += 1
        value = v @ eta
        if value != 0:
            return EquivalenceVerdict(False, word, (value,), len(basis))
        for letter in a.alphabet:
            x = sparse[letter].left_multiply(v)
            member, _ = basis.extend(x)
            if not member:
                queue.append((word + (letter,), x))
    return EquivalenceVerdict(True, dimension=len(basis))


def equivalent(a1: WeightedAutomaton, a2: WeightedAutomaton) -> EquivalenceVerdict:
    """``L_A1 == L_A2`` via zero-testing of the difference automaton."""
    verdict = is_zero(difference(a1.to_exact(), a2.to_exact()))
    if verdict.equivalent:
        return verdict
    w = verdict.counterexample
    return EquivalenceVerdict(
        False, w, (evaluate(a1.to_exact(), w), evaluate(a2.to_exact(), w)), verdict.dimension
    )
