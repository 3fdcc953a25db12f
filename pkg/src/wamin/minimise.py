"""End-to-end minimisation and the a-priori loss bound."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .automaton import PAViolation, WeightedAutomaton, evaluate, validate_pa
from .linalg import UNIT_ROUNDOFF, Backend, as_float
from .reduction import (
    ResidualReport,
    backward_automaton,
    backward_reduction,
    forward_automaton,
    forward_reduction,
    residual_report,
)

__all__ = [
    "DEFAULT_C",
    "DEFAULT_TAU",
    "ErrorBudget",
    "LossReport",
    "MinimisationReport",
    "error_bound",
    "minimise",
    "verify_loss",
]

DEFAULT_TAU = 1e-6
#: Stand-in for the unspecified constant multiplying ``n^3 u``.
DEFAULT_C = 1e3


@dataclass
class MinimisationReport:
    n: int
    n_forward: int
    n_prime: int
    backend: str
    tau: float | None
    order: str
    m: float
    m_forward: float
    m_prime: float
    first_stage: ResidualReport
    second_stage: ResidualReport
    first_witnesses: tuple
    second_witnesses: tuple
    pa_violations: list = field(default_factory=list)

    @property
    def m_max(self) -> float:
        return max(self.m, self.m_forward, self.m_prime)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "n_forward": self.n_forward,
            "n_prime": self.n_prime,
            "backend": self.backend,
            "tau": self.tau,
            "order": self.order,
            "m": {"input": self.m, "intermediate": self.m_forward, "output": self.m_prime},
            "residuals": [self.first_stage.to_dict(), self.second_stage.to_dict()],
            "witness_words": {
                "first_stage": [list(w) for w in self.first_witnesses],
                "second_stage": [list(w) for w in self.second_witnesses],
            },
            "stochastic_violations": [str(v) for v in self.pa_violations],
        }


def _max_norm(a: WeightedAutomaton) -> float:
    return max((float(np.linalg.norm(as_float(m), 2)) if m.size else 0.0
                for m in a.transitions.values()), default=0.0)


def _check_tau(tau, backend: Backend):
    if tau is None:
        tau = 0.0 if backend is Backend.EXACT else DEFAULT_TAU
    if not isinstance(tau, (int, float)) or math.isnan(tau) or tau < 0:
        raise ValueError(f"tau must be a nonnegative number, got {tau!r}")
    if backend is Backend.EXACT and tau != 0:
        raise ValueError("the exact backend is lossless; tau must be 0")
    if backend is Backend.FLOAT and tau == 0:
        raise ValueError("tau = 0 is only allowed on the exact backend")
    return float(tau)


def minimise(a: WeightedAutomaton, tau: float | None = None, backend=None,
             order: str = "fb") -> tuple[WeightedAutomaton, MinimisationReport]:
    """Minimise ``a`` by a forward then a backward reduction (``order="fb"``)
    or the reverse (``"bf"``).

    On the exact backend the result is minimal and equivalent.  On the float
    backend the size is not guaranteed minimal; the language changes by at
    most :func:`error_bound`.
    """
    backend = a.backend if backend is None else Backend(backend)
    tau = _check_tau(tau, backend)
    if order not in ("fb", "bf"):
        raise ValueError(f"order must be 'fb' or 'bf', got {order!r}")
    src = a.with_backend(backend)
    t = None if backend is Backend.EXACT else tau
    if order == "fb":
        red1 = forward_reduction(src, t)
        mid = forward_automaton(src, red1)
        red2 = backward_reduction(mid, t)
        out = backward_automaton(mid, red2)
    else:
        red1 = backward_reduction(src, t)
        mid = backward_automaton(src, red1)
        red2 = forward_reduction(mid, t)
        out = forward_automaton(mid, red2)
    report = MinimisationReport(
        n=src.n,
        n_forward=mid.n,
        n_prime=out.n,
        backend=backend.value,
        tau=t,
        order=order,
        m=_max_norm(src),
        m_forward=_max_norm(mid),
        m_prime=_max_norm(out),
        first_stage=residual_report(src, red1),
        second_stage=residual_report(mid, red2),
        first_witnesses=red1.witness_words,
        second_witnesses=red2.witness_words,
    )
    if not isinstance(validate_pa(src), list):
        # minimisation is over WAs; report where a PA input lost stochasticity
        res = validate_pa(out)
        report.pa_violations = res if isinstance(res, list) else []
    return out, report


@dataclass(frozen=True)
class ErrorBudget:
    word_length: int
    alpha_norm: float
    eta_norm: float
    m: float
    n: int
    tau: float
    u: float = UNIT_ROUNDOFF
    c: float = DEFAULT_C

    def __post_init__(self):
        for name in ("word_length", "alpha_norm", "eta_norm", "m", "n", "tau", "u", "c"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {v!r}")

    @classmethod
    def for_automaton(cls, a: WeightedAutomaton, word_length: int, tau: float, *,
                      m: float | None = None, u: float = UNIT_ROUNDOFF, c: float = DEFAULT_C):
        alpha, eta = as_float(a.initial), as_float(a.final)
        return cls(word_length, float(np.linalg.norm(alpha)), float(np.linalg.norm(eta)),
                   _max_norm(a) if m is None else m, a.n, tau, u, c)


def error_bound(b: ErrorBudget) -> float:
    """Two-term bound on ``|L_A(w) - L_A'(w)|`` for words of length ``|w|``.

    ``4 |w| |alpha| m^(|w|-1) |eta| sqrt(n) tau + c max(|w|,1) |alpha| m^|w| |eta| n^3 u``
    """
    w = b.word_length
    tau_term = 0.0
    if w > 0:
        tau_term = 4.0 * w * b.alpha_norm * b.m ** (w - 1) * b.eta_norm * math.sqrt(b.n) * b.tau
    u_term = b.c * max(w, 1) * b.alpha_norm * b.m**w * b.eta_norm * b.n**3 * b.u
    return tau_term + u_term


@dataclass
class LossReport:
    max_deviation: float
    table: list  # (word, L_A, L_A', deviation, bound)
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_loss(a: WeightedAutomaton, a_prime: WeightedAutomaton, words: Iterable,
                tau: float = 0.0, *, m: float | None = None, u: float | None = None,
                c: float = DEFAULT_C) -> LossReport:
    """Compare both languages on ``words``; flag words above the bound.

    ``m`` defaults to the largest spectral norm among the transition
    matrices of both automata.  ``u`` defaults to 0 when both automata are
    exact and to binary64 unit roundoff otherwise.
    """
    if set(a.alphabet) != set(a_prime.alphabet):
        raise ValueError("alphabet mismatch")
    if u is None:
        u = 0.0 if a.backend is Backend.EXACT and a_prime.backend is Backend.EXACT else UNIT_ROUNDOFF
    if m is None:
        m = max(_max_norm(a), _max_norm(a_prime))
    alpha_norm = float(np.linalg.norm(as_float(a.initial)))
    eta_norm = float(np.linalg.norm(as_float(a.final)))
    bounds: dict[int, float] = {}
    table, bad = [], []
    worst = 0.0
    for w in words:
        w = tuple(w)
        x, y = evaluate(a, w), evaluate(a_prime, w)
        dev = abs(float(x - y))
        if len(w) not in bounds:
            bounds[len(w)] = error_bound(ErrorBudget(len(w), alpha_norm, eta_norm, m, a.n, tau, u, c))
        bound = bounds[len(w)]
        table.append((w, x, y, dev, bound))
        worst = max(worst, dev)
        if dev > bound:
            bad.append(w)
    return LossReport(worst, table, bad)
