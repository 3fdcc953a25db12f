"""Weighted and probabilistic automata over Q or binary64.

A weighted automaton ``(n, Sigma, M, alpha, eta)`` assigns the word
``w = a1 ... ak`` the value ``alpha M(a1) ... M(ak) eta``.  Letters are
arbitrary strings so that generated automata can use names like ``"a2"``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .linalg import (
    Backend,
    BackendError,
    RowBasis,
    as_exact,
    as_float,
    backend_of,
    format_scalar,
    is_all_zero,
    parse_scalar,
    rational_rank,
    zeros,
)

__all__ = [
    "AutomatonFormatError",
    "HankelBlock",
    "PAViolation",
    "ProbabilisticAutomaton",
    "UnknownLetterError",
    "WeightedAutomaton",
    "difference",
    "dump_automaton",
    "evaluate",
    "hankel_block",
    "hankel_rank",
    "load_automaton",
    "validate_pa",
    "words_up_to",
]

Word = tuple[str, ...]

PA_SLACK = 1e-12


class UnknownLetterError(KeyError):
    pass


class AutomatonFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WeightedAutomaton:
    alphabet: tuple[str, ...]
    transitions: Mapping[str, np.ndarray]
    initial: np.ndarray
    final: np.ndarray

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        if len(set(alphabet)) != len(alphabet):
            raise ValueError(f"duplicate letters in alphabet {alphabet}")
        initial = np.asarray(self.initial)
        final = np.asarray(self.final)
        if initial.ndim != 1 or final.shape != initial.shape:
            raise ValueError(
                f"initial/final must be vectors of equal length, got {initial.shape} and {final.shape}"
            )
        n = initial.shape[0]
        if n == 0:
            # empty arrays carry no scalars, pick the backend from the matrices if any
            backend = Backend.EXACT if initial.dtype == object else Backend.FLOAT
        else:
            backend = backend_of(initial)
        trans = {}
        if set(self.transitions) != set(alphabet):
            raise ValueError(
                f"transition letters {sorted(self.transitions)} do not match alphabet {list(alphabet)}"
            )
        for a in alphabet:
            m = np.asarray(self.transitions[a])
            if m.shape != (n, n):
                raise ValueError(f"M({a}) has shape {m.shape}, expected {(n, n)}")
            if n and backend_of(m) is not backend:
                raise BackendError(f"M({a}) uses a different scalar backend than alpha")
            trans[a] = _frozen(m)
        if n and backend_of(final) is not backend:
            raise BackendError("eta uses a different scalar backend than alpha")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "transitions", trans)
        object.__setattr__(self, "initial", _frozen(initial))
        object.__setattr__(self, "final", _frozen(final))

    @property
    def n(self) -> int:
        return self.initial.shape[0]

    @property
    def backend(self) -> Backend:
        return Backend.EXACT if self.initial.dtype == object else Backend.FLOAT

    def __repr__(self) -> str:
        return f"WeightedAutomaton(n={self.n}, alphabet={list(self.alphabet)}, backend={self.backend.value})"

    def __call__(self, word) -> object:
        return evaluate(self, word)

    def to_exact(self) -> "WeightedAutomaton":
        if self.backend is Backend.EXACT:
            return self
        return WeightedAutomaton(
            self.alphabet,
            {a: as_exact(m) for a, m in self.transitions.items()},
            as_exact(self.initial),
            as_exact(self.final),
        )

    def to_float(self) -> "WeightedAutomaton":
        if self.backend is Backend.FLOAT:
            return self
        return WeightedAutomaton(
            self.alphabet,
            {a: as_float(m) for a, m in self.transitions.items()},
            as_float(self.initial),
            as_float(self.final),
        )

    def with_backend(self, backend) -> "WeightedAutomaton":
        return self.to_exact() if Backend(backend) is Backend.EXACT else self.to_float()

    def reversed(self) -> "WeightedAutomaton":
        """Transposed automaton: its value on ``w`` is the value of ``self`` on
        ``w`` read backwards."""
        return WeightedAutomaton(
            self.alphabet,
            {a: m.T for a, m in self.transitions.items()},
            self.final,
            self.initial,
        )

    def permuted(self, perm: Sequence[int]) -> "WeightedAutomaton":
        """Rename state ``perm[i]`` to ``i``."""
        p = list(perm)
        return WeightedAutomaton(
            self.alphabet,
            {a: m[np.ix_(p, p)] for a, m in self.transitions.items()},
            self.initial[p],
            self.final[p],
        )

    @classmethod
    def zero(cls, alphabet: Sequence[str], backend=Backend.EXACT) -> "WeightedAutomaton":
        """The 0-state automaton; its language is identically 0."""
        return cls(tuple(alphabet), {a: zeros((0, 0), backend) for a in alphabet},
                   zeros(0, backend), zeros(0, backend))

    # ---------------------------------------------------------------- I/O
    def to_dict(self) -> dict:
        return {
            "backend": self.backend.value,
            "size": self.n,
            "alphabet": list(self.alphabet),
            "initial": [format_scalar(v) for v in self.initial],
            "final": [format_scalar(v) for v in self.final],
            "transitions": {
                a: [[format_scalar(v) for v in row] for row in self.transitions[a]]
                for a in self.alphabet
            },
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "WeightedAutomaton":
        return _from_dict(doc)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


_FORMAT_KEYS = {"backend", "size", "alphabet", "initial", "final", "transitions"}


def _from_dict(doc: Mapping) -> WeightedAutomaton:
    if not isinstance(doc, Mapping):
        raise AutomatonFormatError("automaton document must be a JSON object")
    unknown = set(doc) - _FORMAT_KEYS
    if unknown:
        raise AutomatonFormatError(f"unknown fields: {sorted(unknown)}")
    missing = {"size", "alphabet", "initial", "final", "transitions"} - set(doc)
    if missing:
        raise AutomatonFormatError(f"missing fields: {sorted(missing)}")
    backend_name = doc.get("backend")
    if backend_name is None:
        # infer: any string scalar means exact
        backend_name = "exact" if any(isinstance(v, str) for v in doc["initial"]) else "float"
    try:
        backend = Backend(backend_name)
    except ValueError:
        raise AutomatonFormatError(f"backend must be 'exact' or 'float', got {backend_name!r}") from None
    n = doc["size"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise AutomatonFormatError(f"size must be a nonnegative integer, got {n!r}")
    alphabet = doc["alphabet"]
    if not isinstance(alphabet, list) or not all(isinstance(a, str) for a in alphabet):
        raise AutomatonFormatError("alphabet must be an array of strings")

    def vec(name, values):
        if not isinstance(values, list) or len(values) != n:
            raise AutomatonFormatError(f"{name} must be an array of {n} scalars")
        out = zeros(n, backend)
        for i, v in enumerate(values):
            try:
                out[i] = parse_scalar(v, backend)
            except ValueError as exc:
                raise AutomatonFormatError(f"{name}[{i}]: {exc}") from None
        return out

    initial = vec("initial", doc["initial"])
    final = vec("final", doc["final"])
    trans_doc = doc["transitions"]
    if not isinstance(trans_doc, Mapping):
        raise AutomatonFormatError("transitions must be an object letter -> matrix")
    if set(trans_doc) != set(alphabet):
        raise AutomatonFormatError(
            f"transition letters {sorted(trans_doc)} do not match alphabet {alphabet}"
        )
    trans = {}
    for a in alphabet:
        rows = trans_doc[a]
        if not isinstance(rows, list) or len(rows) != n:
            raise AutomatonFormatError(f"transitions[{a!r}] must have {n} rows")
        m = zeros((n, n), backend)
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise AutomatonFormatError(f"transitions[{a!r}][{i}] must have {n} entries")
            for j, v in enumerate(row):
                try:
                    m[i, j] = parse_scalar(v, backend)
                except ValueError as exc:
                    raise AutomatonFormatError(f"transitions[{a!r}][{i}][{j}]: {exc}") from None
        trans[a] = m
    try:
        return WeightedAutomaton(tuple(alphabet), trans, initial, final)
    except ValueError as exc:
        raise AutomatonFormatError(str(exc)) from None


def load_automaton(path) -> WeightedAutomaton:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AutomatonFormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None
    return _from_dict(doc)


def dump_automaton(a: WeightedAutomaton, path) -> None:
    Path(path).write_text(json.dumps(a.to_dict(), indent=1) + "\n", encoding="utf-8")


# -------------------------------------------------------------- semantics


def _zero_scalar(a: WeightedAutomaton):
    return Fraction(0) if a.backend is Backend.EXACT else 0.0


def _as_word(a: WeightedAutomaton, word) -> Word:
    if isinstance(word, str):
        # a bare string is a word of single-character letters, unless it is a letter itself
        word = (word,) if word in a.transitions else tuple(word)
    word = tuple(word)
    for letter in word:
        if letter not in a.transitions:
            raise UnknownLetterError(f"letter {letter!r} not in alphabet {list(a.alphabet)}")
    return word


def evaluate(a: WeightedAutomaton, word) -> object:
    """``alpha M(w) eta``, multiplied left to right as vector-matrix products."""
    word = _as_word(a, word)
    if a.n == 0:
        return _zero_scalar(a)
    x = a.initial
    for letter in word:
        x = x @ a.transitions[letter]
    return x @ a.final


def forward_vector(a: WeightedAutomaton, word) -> np.ndarray:
    x = a.initial
    for letter in _as_word(a, word):
        x = x @ a.transitions[letter]
    return x


def words_up_to(alphabet: Sequence[str], max_len: int) -> Iterator[Word]:
    """All words of length <= max_len in length-lexicographic order."""
    for length in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=length)


def difference(a1: WeightedAutomaton, a2: WeightedAutomaton) -> WeightedAutomaton:
    """Block-diagonal automaton whose language is ``L1 - L2``."""
    if set(a1.alphabet) != set(a2.alphabet):
        raise ValueError(f"alphabet mismatch: {list(a1.alphabet)} vs {list(a2.alphabet)}")
    if a1.backend is not a2.backend:
        # promote to exact: float values convert losslessly
        a1, a2 = a1.to_exact(), a2.to_exact()
    backend = a1.backend
    n1, n2 = a1.n, a2.n
    trans = {}
    for letter in a1.alphabet:
        m = zeros((n1 + n2, n1 + n2), backend)
        m[:n1, :n1] = a1.transitions[letter]
        m[n1:, n1:] = a2.transitions[letter]
        trans[letter] = m
    alpha = np.concatenate([a1.initial, a2.initial]) if n1 + n2 else zeros(0, backend)
    eta = np.concatenate([a1.final, -a2.final]) if n1 + n2 else zeros(0, backend)
    return WeightedAutomaton(a1.alphabet, trans, alpha, eta)


# ------------------------------------------------------------ PA validation


@dataclass(frozen=True)
class PAViolation:
    kind: str  # "initial-negative", "initial-sum", "transition-negative", "row-sum", "final-range"
    where: tuple
    value: object

    def __str__(self) -> str:
        return f"{self.kind} at {self.where}: {self.value}"


@dataclass(frozen=True)
class ProbabilisticAutomaton:
    """A weighted automaton that passed :func:`validate_pa`."""

    automaton: WeightedAutomaton
    slack: float = 0.0

    def __getattr__(self, name):
        return getattr(self.automaton, name)

    def __call__(self, word):
        return evaluate(self.automaton, word)


def validate_pa(a: WeightedAutomaton):
    """Return a :class:`ProbabilisticAutomaton`, or the full list of
    :class:`PAViolation` if ``a`` is not a PA.

    Stochastic means nonnegative with sum at most 1.  The float backend allows
    a slack of 1e-12 on the sum and range constraints.
    """
    slack = 0 if a.backend is Backend.EXACT else PA_SLACK
    viol: list[PAViolation] = []
    for i, v in enumerate(a.initial):
        if v < -slack:
            viol.append(PAViolation("initial-negative", (i,), v))
    s = sum(a.initial, _zero_scalar(a))
    if s > 1 + slack:
        viol.append(PAViolation("initial-sum", (), s))
    for letter in a.alphabet:
        m = a.transitions[letter]
        for i in range(a.n):
            row = [(j, v) for j, v in enumerate(m[i]) if v]
            for j, v in row:
                if v < -slack:
                    viol.append(PAViolation("transition-negative", (letter, i, j), v))
            rs = sum((v for _, v in row), _zero_scalar(a))
            if rs > 1 + slack:
                viol.append(PAViolation("row-sum", (letter, i), rs))
    for i, v in enumerate(a.final):
        if v < -slack or v > 1 + slack:
            viol.append(PAViolation("final-range", (i,), v))
    if viol:
        return viol
    return ProbabilisticAutomaton(a, float(slack))


# ---------------------------------------------------------------- Hankel


@dataclass(frozen=True, eq=False)
class HankelBlock:
    row_words: tuple[Word, ...]
    col_words: tuple[Word, ...]
    entries: np.ndarray = field(repr=False)


def hankel_block(a: WeightedAutomaton, max_len: int, col_max_len: int | None = None) -> HankelBlock:
    """``H[x, y] = L(xy)`` over all words up to the given lengths."""
    col_max_len = max_len if col_max_len is None else col_max_len
    rows = tuple(words_up_to(a.alphabet, max_len))
    cols = tuple(words_up_to(a.alphabet, col_max_len))
    h = zeros((len(rows), len(cols)), a.backend)
    for i, x in enumerate(rows):
        for j, y in enumerate(cols):
            h[i, j] = evaluate(a, x + y)
    return HankelBlock(rows, cols, h)


def _distinct_vectors(a: WeightedAutomaton, max_len: int) -> Iterator[tuple[Word, np.ndarray]]:
    """``(w, alpha M(w))`` for every word of length <= max_len, in
    length-lexicographic order, skipping repeats.

    Words whose vector is zero or equals that of an earlier word are not
    extended: equal vectors have equal extensions, so no new vector is lost.
    """
    seen = set()
    level = [((), a.initial)]
    for length in range(max_len + 1):
        nxt = []
        for w, v in level:
            key = tuple(v)
            if key in seen or is_all_zero(v):
                continue
            seen.add(key)
            yield w, v
            if length < max_len:
                nxt.extend((w + (x,), v @ a.transitions[x]) for x in a.alphabet)
        level = nxt


def _spanning_words(vectors: Iterable[tuple[Word, np.ndarray]], dim: int) -> list[Word]:
    basis = RowBasis(dim)
    chosen = []
    for w, v in vectors:
        member, _ = basis.extend(v)
        if not member:
            chosen.append(w)
            if len(basis) == dim:
                break
    return chosen


def hankel_rank(a: WeightedAutomaton) -> int:
    """Exact rank of the Hankel matrix of ``L_A``.

    The block over words of length <= n on both axes already has full rank,
    since forward and backward spaces saturate within n extension steps.
    That block factors as ``Fh @ Bh`` (rows ``alpha M(x)``, columns
    ``M(y) eta``), so its rank equals the rank of the square sub-block
    indexed by words whose vectors span the rows of ``Fh`` and the columns
    of ``Bh``.  Those words are found by enumerating all words (merging
    words with identical vectors), not by the reduction engine.
    """
    if a.backend is not Backend.EXACT:
        raise BackendError("hankel_rank requires the exact backend (use to_exact())")
    n = a.n
    if n == 0:
        return 0
    xs = _spanning_words(_distinct_vectors(a, n), n)
    ys = [w[::-1] for w in _spanning_words(_distinct_vectors(a.reversed(), n), n)]
    h = zeros((len(xs), len(ys)), Backend.EXACT)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            h[i, j] = evaluate(a, x + y)
    return rational_rank(h)
