"""Existential-theory-of-the-reals queries for PA minimisation.

:func:`emit_etr` asks for a PA ``A2`` with ``n2`` states together with
matrices ``F`` and ``M_F(a)`` witnessing that the difference of ``A1`` and
``A2`` is zero: ``F[1,.] = (alpha1, alpha2)``, ``F (eta1, -eta2) = 0`` and
``F diag(M1(a), M2(a)) = M_F(a) F``.  The query is serialised as SMT-LIB 2
(logic ``QF_NRA``); deciding it is left to an external solver.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from ..automaton import ProbabilisticAutomaton, WeightedAutomaton

__all__ = ["EtrFormula", "EtrParseError", "emit_etr", "expected_variable_count", "parse_smtlib"]

Term = Union[str, Fraction, tuple]

_SYMBOL_RE = re.compile(r"[A-Za-z0-9_]+")


class EtrParseError(ValueError):
    pass


@dataclass(frozen=True)
class EtrFormula:
    declarations: tuple[str, ...]
    assertions: tuple[Term, ...]
    logic: str = "QF_NRA"
    comment: str = ""

    def to_smtlib(self) -> str:
        lines = []
        if self.comment:
            lines += [f"; {line}" for line in self.comment.splitlines()]
        lines.append(f"(set-logic {self.logic})")
        lines += [f"(declare-fun {v} () Real)" for v in self.declarations]
        lines += [f"(assert {_render(t)})" for t in self.assertions]
        lines.append("(check-sat)")
        return "\n".join(lines) + "\n"

    def variables_used(self) -> set[str]:
        used: set[str] = set()
        for t in self.assertions:
            _collect(t, used)
        return used


def _collect(t: Term, out: set) -> None:
    if isinstance(t, str):
        out.add(t)
    elif isinstance(t, tuple):
        for x in t[1:]:
            _collect(x, out)


def _render(t: Term) -> str:
    if isinstance(t, Fraction):
        mag = abs(t)
        s = str(mag.numerator) if mag.denominator == 1 else f"(/ {mag.numerator} {mag.denominator})"
        return f"(- {s})" if t < 0 else s
    if isinstance(t, str):
        return t
    return "(" + " ".join([t[0]] + [_render(x) for x in t[1:]]) + ")"


# ------------------------------------------------------------------ parsing

_TOKEN_RE = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|([^\s()]+))")


def _tokens(text: str):
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip():
                raise EtrParseError(f"unexpected input at offset {pos}")
            return
        pos = m.end()
        if m.group(1):
            continue
        tok = m.group(2) or m.group(3) or m.group(4)
        if tok:
            yield tok


def _sexprs(text: str) -> list:
    stack: list[list] = [[]]
    for tok in _tokens(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise EtrParseError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise EtrParseError("unbalanced '('")
    return stack[0]


def _term(x) -> Term:
    if isinstance(x, str):
        if x.isdigit():
            return Fraction(int(x))
        return x
    if not x:
        raise EtrParseError("empty application")
    op, args = x[0], [_term(a) for a in x[1:]]
    if op == "/" and len(args) == 2 and all(isinstance(a, Fraction) and a >= 0 and a.denominator == 1 for a in args):
        return args[0] / args[1]
    if op == "-" and len(args) == 1 and isinstance(args[0], Fraction):
        return -args[0]
    return (op, *args)


def parse_smtlib(text: str) -> EtrFormula:
    """Parse the subset of SMT-LIB 2 produced by :meth:`EtrFormula.to_smtlib`."""
    comment = "\n".join(
        line[2:] if line.startswith("; ") else line[1:]
        for line in text.splitlines() if line.startswith(";")
    )
    logic, decls, asserts, saw_check = None, [], [], False
    for cmd in _sexprs(text):
        if not isinstance(cmd, list) or not cmd:
            raise EtrParseError(f"expected a command, got {cmd!r}")
        head = cmd[0]
        if head == "set-logic":
            logic = cmd[1]
        elif head == "declare-fun":
            if len(cmd) != 4 or cmd[2] != [] or cmd[3] != "Real":
                raise EtrParseError(f"unsupported declaration {cmd!r}")
            decls.append(cmd[1])
        elif head == "assert":
            if len(cmd) != 2:
                raise EtrParseError("assert takes one term")
            asserts.append(_term(cmd[1]))
        elif head == "check-sat":
            saw_check = True
        else:
            raise EtrParseError(f"unsupported command {head!r}")
    if logic is None or not saw_check:
        raise EtrParseError("missing set-logic or check-sat")
    return EtrFormula(tuple(decls), tuple(asserts), logic, comment)


# ------------------------------------------------------------------ emitting


def _sum(terms: list) -> Term:
    if not terms:
        return Fraction(0)
    return terms[0] if len(terms) == 1 else ("+", *terms)


def _scaled(c: Fraction, *factors: str) -> Term:
    if c == 1:
        return factors[0] if len(factors) == 1 else ("*", *factors)
    return ("*", c, *factors)


def _letter_names(alphabet) -> dict:
    names, used = {}, set()
    for idx, a in enumerate(alphabet):
        name = a if _SYMBOL_RE.fullmatch(a) else f"L{idx}"
        while name in used:
            name += "_"
        used.add(name)
        names[a] = name
    return names


def expected_variable_count(n1: int, n2: int, num_letters: int) -> int:
    big = n1 + n2
    return n2 * (n2 * num_letters + 2) + big * big * (num_letters + 1)


def emit_etr(a1: WeightedAutomaton | ProbabilisticAutomaton, n2: int) -> EtrFormula:
    """Query satisfiable iff a PA with ``n2`` states is equivalent to ``a1``."""
    if isinstance(a1, ProbabilisticAutomaton):
        a1 = a1.automaton
    if n2 < 0:
        raise ValueError("n2 must be nonnegative")
    a1 = a1.to_exact()
    n1, alphabet = a1.n, a1.alphabet
    big = n1 + n2
    ln = _letter_names(alphabet)
    r = range(1, n2 + 1)
    R = range(1, big + 1)
    alpha2 = [f"alpha2_{i}" for i in r]
    eta2 = [f"eta2_{i}" for i in r]
    m2 = {a: [[f"M2_{ln[a]}_{i}_{j}" for j in r] for i in r] for a in alphabet}
    F = [[f"F_{i}_{j}" for j in R] for i in R]
    mf = {a: [[f"MF_{ln[a]}_{i}_{j}" for j in R] for i in R] for a in alphabet}

    decls = list(alpha2) + list(eta2)
    for a in alphabet:
        decls += [v for row in m2[a] for v in row]
    decls += [v for row in F for v in row]
    for a in alphabet:
        decls += [v for row in mf[a] for v in row]

    zero, one = Fraction(0), Fraction(1)
    asserts: list[Term] = []
    # (i) A2 is a PA
    asserts += [(">=", v, zero) for v in alpha2]
    if alpha2:
        asserts.append(("<=", _sum(alpha2), one))
    for v in eta2:
        asserts += [(">=", v, zero), ("<=", v, one)]
    for a in alphabet:
        for row in m2[a]:
            asserts += [(">=", v, zero) for v in row]
            asserts.append(("<=", _sum(row), one))
    if big:
        # (ii) first row of F is (alpha1, alpha2)
        for j in range(n1):
            asserts.append(("=", F[0][j], Fraction(a1.initial[j])))
        for j in range(n2):
            asserts.append(("=", F[0][n1 + j], alpha2[j]))
        # (iii) F (eta1, -eta2)^T = 0
        for i in range(big):
            terms = [_scaled(Fraction(a1.final[j]), F[i][j]) for j in range(n1) if a1.final[j] != 0]
            terms += [("*", -one, F[i][n1 + j], eta2[j]) for j in range(n2)]
            asserts.append(("=", _sum(terms), zero))
        # (iv) F diag(M1(a), M2(a)) = M_F(a) F
        for a in alphabet:
            m1 = a1.transitions[a]
            for i in range(big):
                for j in range(big):
                    if j < n1:
                        lhs = [_scaled(Fraction(m1[k, j]), F[i][k]) for k in range(n1) if m1[k, j] != 0]
                    else:
                        lhs = [("*", F[i][n1 + k], m2[a][k][j - n1]) for k in range(n2)]
                    rhs = [("*", mf[a][i][k], F[k][j]) for k in range(big)]
                    asserts.append(("=", _sum(lhs), _sum(rhs)))
    comment = (f"PA minimisation query: is there a PA with {n2} states equivalent to a "
               f"{n1}-state PA over {len(alphabet)} letters?")
    return EtrFormula(tuple(decls), tuple(asserts), "QF_NRA", comment)
