"""Forward and backward reductions of weighted automata.

A forward reduction ``(F, M_F)`` has rows spanning the forward space
``<alpha M(w)>`` and satisfies ``F M(a) = M_F(a) F``.  Two engines compute
one:

* :func:`householder_forward_reduction` - binary64, orthonormal ``F`` built
  from Householder reflectors, lossy with tolerance ``tau``;
* :func:`exact_forward_reduction` - rationals, ``F`` made of the raw vectors
  ``alpha M(w)``, residual identically zero.

Backward reductions run the same engines on the transposed system.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .automaton import WeightedAutomaton
from .linalg import (
    UNIT_ROUNDOFF,
    Backend,
    BackendError,
    Reflector,
    RowBasis,
    SparseRows,
    apply_reflector,
    as_float,
    backend_of,
    is_all_zero,
    make_reflector,
    matrix_two_norm_estimate,
    two_norm,
    two_norm_sq,
    zeros,
)

__all__ = [
    "BackwardReduction",
    "ForwardReduction",
    "InconsistentReductionError",
    "ResidualReport",
    "backward_automaton",
    "backward_reduction",
    "exact_forward_reduction",
    "forward_automaton",
    "forward_reduction",
    "householder_forward_reduction",
    "residual_report",
]

Word = tuple[str, ...]


class InconsistentReductionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ForwardReduction:
    F: np.ndarray
    MF: Mapping[str, np.ndarray]
    canonical: bool
    witness_words: tuple[Word, ...]
    reflectors: tuple[Reflector, ...] | None = None
    tau: float | None = None

    @property
    def size(self) -> int:
        return self.F.shape[0]

    @property
    def backend(self) -> Backend:
        return Backend.EXACT if self.F.dtype == object else Backend.FLOAT

    def transposed(self) -> "BackwardReduction":
        return BackwardReduction(
            self.F.T, {a: m.T for a, m in self.MF.items()}, self.canonical,
            self.witness_words, self.reflectors, self.tau,
        )


@dataclass(frozen=True, eq=False)
class BackwardReduction:
    B: np.ndarray
    MB: Mapping[str, np.ndarray]
    canonical: bool
    witness_words: tuple[Word, ...]
    reflectors: tuple[Reflector, ...] | None = None
    tau: float | None = None

    @property
    def size(self) -> int:
        return self.B.shape[1]

    @property
    def backend(self) -> Backend:
        return Backend.EXACT if self.B.dtype == object else Backend.FLOAT

    def transposed(self) -> ForwardReduction:
        return ForwardReduction(
            self.B.T, {a: m.T for a, m in self.MB.items()}, self.canonical,
            self.witness_words, self.reflectors, self.tau,
        )


def _alphabet(M: Mapping[str, np.ndarray], alphabet: Sequence[str] | None) -> tuple[str, ...]:
    alphabet = tuple(M) if alphabet is None else tuple(alphabet)
    if set(alphabet) != set(M):
        raise ValueError("alphabet does not match the transition letters")
    return alphabet


def householder_forward_reduction(alpha, M: Mapping[str, np.ndarray], tau: float,
                                  alphabet: Sequence[str] | None = None) -> ForwardReduction:
    """Canonical forward reduction via Householder reflectors.

    The basis grows only when the part of ``f_l M(a)`` outside the current
    span (measured in the reflected coordinates) has 2-norm above ``tau``.
    Letters are scanned in alphabet order.  A zero ``alpha`` yields the
    0-row reduction.
    """
    alpha = np.asarray(alpha)
    if backend_of(alpha) is not Backend.FLOAT:
        raise BackendError("householder_forward_reduction needs float input (use exact_forward_reduction)")
    if tau < 0 or math.isnan(tau):
        raise ValueError(f"tau must be >= 0, got {tau}")
    alphabet = _alphabet(M, alphabet)
    n = alpha.shape[0]
    if n == 0 or two_norm(alpha) == 0.0:
        return _empty_forward(n, alphabet, Backend.FLOAT, canonical=True, tau=tau)

    mats = {a: np.asarray(M[a], dtype=np.float64) for a in alphabet}
    unit = alpha / two_norm(alpha)
    refl = [make_reflector(unit, n)]
    e = np.zeros(n)
    e[0] = 1.0
    f = [apply_reflector(e, refl[0])]
    witness: list[Word] = [()]
    mf = {a: np.zeros((n, n)) for a in alphabet}
    ell, j = 0, 1
    while ell < j:
        ell += 1
        for a in alphabet:
            row = f[ell - 1] @ mats[a]
            for p in refl:
                row = apply_reflector(row, p)
            if j + 1 <= n and two_norm(row[j:]) > tau:
                j += 1
                p_new = make_reflector(row[j - 1 :], n)
                refl.append(p_new)
                row = apply_reflector(row, p_new)
                fj = np.zeros(n)
                fj[j - 1] = 1.0
                for p in reversed(refl):
                    fj = apply_reflector(fj, p)
                f.append(fj)
                witness.append(witness[ell - 1] + (a,))
            mf[a][ell - 1] = row
    F = np.vstack(f)
    return ForwardReduction(
        F, {a: mf[a][:j, :j].copy() for a in alphabet}, True, tuple(witness), tuple(refl), tau
    )


def exact_forward_reduction(alpha, M: Mapping[str, np.ndarray],
                            alphabet: Sequence[str] | None = None) -> ForwardReduction:
    """Forward reduction over Q with an exact membership test.

    Basis rows are the vectors ``alpha M(w)`` for the breadth-first witness
    words, so ``F[0] = alpha`` and ``F M(a) = M_F(a) F`` holds exactly.
    """
    alpha = np.asarray(alpha)
    alphabet = _alphabet(M, alphabet)
    n = alpha.shape[0]
    if n and backend_of(alpha) is not Backend.EXACT:
        raise BackendError("exact_forward_reduction needs exact input")
    if n == 0 or is_all_zero(alpha):
        return _empty_forward(n, alphabet, Backend.EXACT, canonical=False)
    basis = RowBasis(n)
    basis.extend(alpha)
    witness: list[Word] = [()]
    coeff_rows: dict[str, list] = {a: [] for a in alphabet}
    sparse = {a: SparseRows.from_dense(M[a]) for a in alphabet}
    ell = 0
    while ell < len(basis):
        ell += 1
        for a in alphabet:
            x = sparse[a].left_multiply(basis.vectors[ell - 1])
            member, coeff = basis.extend(x)
            if member:
                coeff_rows[a].append(coeff)
            else:
                witness.append(witness[ell - 1] + (a,))
                coeff_rows[a].append({len(basis) - 1: Fraction(1)})
    j = len(basis)
    mf = {}
    for a in alphabet:
        m = zeros((j, j), Backend.EXACT)
        for i, c in enumerate(coeff_rows[a]):
            if isinstance(c, dict):
                for col, v in c.items():
                    m[i, col] = v
            else:
                m[i, : len(c)] = c
        mf[a] = m
    F = np.array(np.vstack(basis.vectors), dtype=object)
    return ForwardReduction(F, mf, False, tuple(witness))


def _empty_forward(n, alphabet, backend, canonical, tau=None) -> ForwardReduction:
    return ForwardReduction(
        zeros((0, n), backend), {a: zeros((0, 0), backend) for a in alphabet},
        canonical, (), () if backend is Backend.FLOAT else None, tau,
    )


def forward_reduction(a: WeightedAutomaton, tau: float | None = None) -> ForwardReduction:
    """Dispatch on the automaton's backend (``tau`` is ignored when exact)."""
    if a.backend is Backend.EXACT:
        return exact_forward_reduction(a.initial, a.transitions, a.alphabet)
    if tau is None:
        raise ValueError("the float engine needs a tolerance tau")
    return householder_forward_reduction(a.initial, a.transitions, tau, a.alphabet)


def forward_automaton(a: WeightedAutomaton, red: ForwardReduction) -> WeightedAutomaton:
    """``A_F = (n_F, Sigma, M_F, alpha_F, F eta)`` with ``alpha = alpha_F F``."""
    if red.F.shape[1] != a.n:
        raise InconsistentReductionError(f"base has {red.F.shape[1]} columns, automaton has {a.n} states")
    nf = red.size
    backend = red.backend
    if nf == 0:
        if not is_all_zero(a.initial):
            raise InconsistentReductionError("empty base but nonzero initial vector")
        return WeightedAutomaton.zero(a.alphabet, backend)
    if backend is Backend.EXACT:
        alpha = a.to_exact().initial
        eta = a.to_exact().final
        basis = RowBasis(a.n)
        for row in red.F:
            basis.extend(row)
        if len(basis) != nf:
            raise InconsistentReductionError("base rows are linearly dependent")
        alpha_f = basis.coefficients(alpha)
        if alpha_f is None:
            raise InconsistentReductionError("initial vector is not in the span of the base")
    else:
        alpha = as_float(a.initial)
        eta = as_float(a.final)
        if red.canonical:
            alpha_f = np.zeros(nf)
            alpha_f[0] = float(alpha @ red.F[0])
        else:
            alpha_f = np.linalg.lstsq(red.F.T, alpha, rcond=None)[0]
    return WeightedAutomaton(a.alphabet, dict(red.MF), alpha_f, red.F @ eta)


def backward_reduction(a: WeightedAutomaton, tau: float | None = None) -> BackwardReduction:
    """Backward reduction ``M(a) B = B M_B(a)``: the forward engine applied to
    ``(eta^T, M(a)^T)`` and transposed back."""
    return forward_reduction(a.reversed(), tau).transposed()


def backward_automaton(a: WeightedAutomaton, red: BackwardReduction) -> WeightedAutomaton:
    """``A_B = (n_B, Sigma, M_B, alpha B, eta_B)`` with ``eta = B eta_B``."""
    return forward_automaton(a.reversed(), red.transposed()).reversed()


# ---------------------------------------------------------------- residuals


@dataclass(frozen=True)
class ResidualReport:
    """Residuals ``E(a) = F M(a) - M_F(a) F`` (forward) or
    ``M(a) B - B M_B(a)`` (backward, reported per column)."""

    kind: str
    row_norms: Mapping[str, tuple[float, ...]]
    frobenius: Mapping[str, float]
    two_norm_estimate: Mapping[str, float]
    exact_zero: bool | None
    tau: float | None
    unit_roundoff: float
    n: int
    m: float
    n_reduced: int
    orthonormality_error: float | None = None

    @property
    def max_row_norm(self) -> float:
        return max((max(r) for r in self.row_norms.values() if r), default=0.0)

    def prop2_bound(self, c: float) -> float:
        """``2 sqrt(n) tau + c m n^3 u`` for the whole matrix ``E(a)``."""
        tau = self.tau or 0.0
        return 2.0 * math.sqrt(self.n) * tau + c * self.m * self.n**3 * self.unit_roundoff

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "n_reduced": self.n_reduced,
            "tau": self.tau,
            "unit_roundoff": self.unit_roundoff,
            "m": self.m,
            "max_row_norm": self.max_row_norm,
            "row_norms": {a: list(r) for a, r in self.row_norms.items()},
            "frobenius": dict(self.frobenius),
            "two_norm_estimate": dict(self.two_norm_estimate),
            "exact_zero": self.exact_zero,
            "orthonormality_error": self.orthonormality_error,
        }


def _spectral_norm(m: np.ndarray) -> float:
    m = as_float(m)
    return float(np.linalg.norm(m, 2)) if m.size else 0.0


def residual_report(a: WeightedAutomaton, red: ForwardReduction | BackwardReduction) -> ResidualReport:
    """Recompute the commutation residuals of ``red`` against ``a``."""
    backward = isinstance(red, BackwardReduction)
    fwd = red.transposed() if backward else red
    src = a.reversed() if backward else a
    exact = fwd.backend is Backend.EXACT
    if exact:
        src = src.to_exact()
    else:
        src = src.to_float()
    F = fwd.F
    rows, fros, ests = {}, {}, {}
    all_zero = True
    for letter in src.alphabet:
        if not F.shape[0]:
            e = zeros((0, src.n), fwd.backend)
        elif exact:
            sp = SparseRows.from_dense(src.transitions[letter])
            sf = SparseRows.from_dense(F)
            e = np.array([sp.left_multiply(row) - sf.left_multiply(c)
                          for row, c in zip(F, fwd.MF[letter])], dtype=object)
        else:
            e = F @ src.transitions[letter] - fwd.MF[letter] @ F
        if exact:
            sq = [two_norm_sq(r) for r in e]
            all_zero = all_zero and all(s == 0 for s in sq)
            rows[letter] = tuple(math.sqrt(float(s)) for s in sq)
        else:
            rows[letter] = tuple(float(np.linalg.norm(r)) for r in e)
        fros[letter] = float(math.sqrt(sum(r * r for r in rows[letter])))
        ests[letter] = matrix_two_norm_estimate(e) if e.size else 0.0
    m = max((_spectral_norm(src.transitions[x]) for x in src.alphabet), default=0.0)
    ortho = None
    if fwd.canonical and F.shape[0]:
        ff = as_float(F)
        ortho = float(np.linalg.norm(ff @ ff.T - np.eye(F.shape[0])))
    return ResidualReport(
        kind="backward" if backward else "forward",
        row_norms=rows,
        frobenius=fros,
        two_norm_estimate=ests,
        exact_zero=all_zero if exact else None,
        tau=None if exact else fwd.tau,
        unit_roundoff=0.0 if exact else UNIT_ROUNDOFF,
        n=src.n,
        m=m,
        n_reduced=fwd.size,
        orthonormality_error=ortho,
    )
