"""Seeded random automata for testing and benchmarking.

Every generator takes a ``numpy.random.Generator`` (or a seed) and is fully
deterministic for a given seed.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .automaton import WeightedAutomaton
from .linalg import Backend

__all__ = [
    "dump_corpus",
    "load_corpus",
    "orthogonal_corpus",
    "pa_corpus",
    "random_orthogonal_wa",
    "random_rational_wa",
    "random_stochastic_pa",
    "rational_corpus",
]

LETTERS = ("a", "b", "c")


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_rational_wa(seed=None, *, max_n: int = 6, max_letters: int = 3,
                       n: int | None = None) -> WeightedAutomaton:
    """Random exact WA with entries ``p/q``, ``p in -2..2``, ``q in 1..4``.

    A density in {0.25, 0.5, 1} is drawn per automaton, and with probability
    1/3 one state is made a scaled copy of another, so that a good share of
    the instances are not minimal.
    """
    rng = _rng(seed)
    n = int(rng.integers(1, max_n + 1)) if n is None else n
    k = int(rng.integers(1, max_letters + 1))
    density = float(rng.choice([0.25, 0.5, 1.0]))

    def entries(shape):
        num = rng.integers(-2, 3, size=shape)
        den = rng.integers(1, 5, size=shape)
        keep = rng.random(shape) < density
        out = np.empty(shape, dtype=object)
        for idx in np.ndindex(*shape):
            out[idx] = Fraction(int(num[idx]), int(den[idx])) if keep[idx] else Fraction(0)
        return out

    alphabet = LETTERS[:k]
    trans = {x: entries((n, n)) for x in alphabet}
    alpha, eta = entries((n,)), entries((n,))
    if n >= 2 and rng.random() < 1 / 3:
        # state j duplicates state i's future (same outgoing rows and eta)
        i, j = (int(v) for v in rng.choice(n, size=2, replace=False))
        for x in alphabet:
            trans[x][j, :] = trans[x][i, :]
        eta[j] = eta[i]
    return WeightedAutomaton(alphabet, trans, alpha, eta)


def rational_corpus(count: int = 200, seed: int = 20240601, **kw) -> list[WeightedAutomaton]:
    rng = _rng(seed)
    return [random_rational_wa(rng, **kw) for _ in range(count)]


def _stochastic_rows(rng, rows: int, cols: int, density: float, mass: float = 1.0) -> np.ndarray:
    w = rng.random((rows, cols)) * (rng.random((rows, cols)) < density)
    for r in range(rows):
        if not w[r].any():
            w[r, rng.integers(cols)] = 1.0
    return mass * w / w.sum(axis=1, keepdims=True)


def random_stochastic_pa(seed=None, n: int = 10, *, letters: int = 2,
                         lumped: int | None = None, density: float = 0.3) -> WeightedAutomaton:
    """Random float PA with row-stochastic transition matrices.

    Each ``M(a)`` has rows summing to 1.  With ``lumped = k`` the automaton is
    the lifting of a random ``k``-state PA in which every state is split into
    several copies, so its language has rank at most ``k``.
    """
    rng = _rng(seed)
    alphabet = LETTERS[:letters]
    alpha = rng.random(n)
    alpha /= alpha.sum()
    if lumped is None:
        trans = {x: _stochastic_rows(rng, n, n, density) for x in alphabet}
        eta = rng.random(n)
        return WeightedAutomaton(alphabet, trans, alpha, eta)
    k = lumped
    if not 1 <= k <= n:
        raise ValueError(f"lumped must be in 1..{n}, got {k}")
    cls = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
    rng.shuffle(cls)
    small = {x: _stochastic_rows(rng, k, k, max(density, 0.5)) for x in alphabet}
    small_eta = rng.random(k)
    trans = {}
    for x in alphabet:
        m = np.zeros((n, n))
        for c in range(k):
            members = np.flatnonzero(cls == c)
            share = rng.random(len(members)) + 0.1
            share /= share.sum()
            # every state of class d sends small[d, c] into class c, split arbitrarily
            for i in range(n):
                m[i, members] = small[x][cls[i], c] * share
        trans[x] = m
    return WeightedAutomaton(alphabet, trans, alpha, small_eta[cls])


def pa_corpus(count: int = 50, seed: int = 7, sizes: Sequence[int] = (10, 25, 50)) -> list[WeightedAutomaton]:
    """Mix of generic and lumpable PAs, sizes cycling through ``sizes``."""
    rng = _rng(seed)
    out = []
    for i in range(count):
        n = sizes[i % len(sizes)]
        lumped = None if i % 2 == 0 else int(rng.integers(2, max(3, n // 3)))
        out.append(random_stochastic_pa(rng, n, letters=2, lumped=lumped))
    return out


def random_orthogonal_wa(seed=None, n: int = 6, *, letters: int = 2, scale: float = 0.9) -> WeightedAutomaton:
    """Float WA whose matrices are ``scale`` times random orthogonal matrices,
    with unit-norm random ``alpha`` and ``eta``.  Almost surely minimal."""
    rng = _rng(seed)
    alphabet = LETTERS[:letters]
    trans = {}
    for x in alphabet:
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        trans[x] = scale * q * np.sign(np.diag(r))
    alpha = rng.standard_normal(n)
    eta = rng.standard_normal(n)
    return WeightedAutomaton(alphabet, trans, alpha / np.linalg.norm(alpha), eta / np.linalg.norm(eta))


def orthogonal_corpus(count: int = 100, seed: int = 11, max_n: int = 8) -> list[WeightedAutomaton]:
    rng = _rng(seed)
    return [random_orthogonal_wa(rng, int(rng.integers(2, max_n + 1)), letters=int(rng.integers(1, 4)))
            for _ in range(count)]


def dump_corpus(automata: Sequence[WeightedAutomaton], path, **meta) -> None:
    doc = {**meta, "automata": [a.to_dict() for a in automata]}
    Path(path).write_text(json.dumps(doc, separators=(",", ":")) + "\n", encoding="utf-8")


def load_corpus(path) -> list[WeightedAutomaton]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return [WeightedAutomaton.from_dict(d) for d in doc["automata"]]
