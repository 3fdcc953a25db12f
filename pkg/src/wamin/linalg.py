"""Dense linear algebra over two scalar backends.

The *exact* backend stores :class:`fractions.Fraction` values in numpy
``object`` arrays, the *float* backend uses ``float64`` arrays.  Both share
the numpy operator surface (``@``, slicing, broadcasting) so most automaton
code is backend-agnostic; the few places where they differ (square roots,
pivot tests) go through the helpers below.

Indices are 0-based throughout: a 1-based ``alpha[1]`` is
``alpha[0]`` here.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Backend",
    "BackendError",
    "DegenerateInputError",
    "RowBasis",
    "SparseRows",
    "Reflector",
    "UNIT_ROUNDOFF",
    "apply_reflector",
    "as_exact",
    "as_float",
    "backend_of",
    "format_scalar",
    "frobenius_norm",
    "make_reflector",
    "matrix_two_norm_estimate",
    "parse_scalar",
    "rational_rank",
    "two_norm",
    "two_norm_sq",
    "zeros",
]

#: Unit roundoff of IEEE binary64 (2**-53).
UNIT_ROUNDOFF = 2.0**-53


class Backend(str, enum.Enum):
    EXACT = "exact"
    FLOAT = "float"


class BackendError(TypeError):
    """Raised when an operation is not available for, or mixes, backends."""


class DegenerateInputError(ValueError):
    """Raised for inputs the algorithms explicitly exclude (e.g. zero vectors)."""


def backend_of(x: np.ndarray) -> Backend:
    if x.dtype == object:
        return Backend.EXACT
    if np.issubdtype(x.dtype, np.floating):
        return Backend.FLOAT
    raise BackendError(f"unsupported array dtype {x.dtype}")


def zeros(shape, backend: Backend) -> np.ndarray:
    if Backend(backend) is Backend.EXACT:
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out
    return np.zeros(shape, dtype=np.float64)


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (bool, np.bool_)):
        raise BackendError("booleans are not scalars")
    if isinstance(v, (int, np.integer, Rational)):
        return Fraction(int(v)) if isinstance(v, np.integer) else Fraction(v)
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            raise ValueError(f"non-finite value {v!r}")
        # binary64 values are dyadic rationals, so this is lossless
        return Fraction(float(v))
    if isinstance(v, str):
        return parse_scalar(v, Backend.EXACT)
    raise BackendError(f"cannot convert {type(v).__name__} to an exact scalar")


def as_exact(x) -> np.ndarray:
    """Losslessly convert an array-like to the exact backend."""
    arr = np.asarray(x, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = _to_fraction(v)
    return out


def as_float(x) -> np.ndarray:
    """Convert an array-like to binary64 (rounding exact values once)."""
    arr = np.asarray(x)
    if arr.dtype == object:
        flat = [float(v) if v else 0.0 for v in arr.ravel()]
        return np.array(flat, dtype=np.float64).reshape(arr.shape)
    return arr.astype(np.float64)


_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_scalar(text, backend: Backend):
    """Parse one scalar of the automaton file format.

    Exact scalars are strings ``"p/q"`` or ``"p"`` with optional sign (JSON
    integers are also accepted); float scalars are JSON numbers.
    """
    backend = Backend(backend)
    if backend is Backend.EXACT:
        if isinstance(text, bool):
            raise ValueError(f"invalid exact scalar {text!r}")
        if isinstance(text, int):
            return Fraction(text)
        if not isinstance(text, str):
            raise ValueError(f"exact scalars must be strings 'p/q', got {text!r}")
        m = _RATIONAL_RE.match(text)
        if m is None:
            raise ValueError(f"invalid rational literal {text!r}")
        q = int(m.group(2)) if m.group(2) is not None else 1
        if q == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(m.group(1)), q)
    if isinstance(text, bool) or not isinstance(text, (int, float)):
        raise ValueError(f"float scalars must be JSON numbers, got {text!r}")
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {text!r}")
    return v


def format_scalar(v):
    """Inverse of :func:`parse_scalar` (JSON-ready)."""
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return float(v)


# --------------------------------------------------------------------- norms


def two_norm_sq(x: np.ndarray):
    x = np.asarray(x)
    if backend_of(x) is Backend.EXACT:
        return sum((v * v for v in x.ravel() if v), Fraction(0))
    return float(np.dot(x.ravel(), x.ravel()))


def two_norm(x: np.ndarray) -> float:
    x = np.asarray(x)
    if backend_of(x) is Backend.EXACT:
        raise BackendError("two_norm needs the float backend; use two_norm_sq for exact vectors")
    # np.linalg.norm scales internally, avoiding overflow in the squares
    return float(np.linalg.norm(x.ravel()))


def frobenius_norm(a: np.ndarray) -> float:
    a = np.asarray(a)
    if backend_of(a) is Backend.EXACT:
        return math.sqrt(two_norm_sq(a))
    return float(np.linalg.norm(a.ravel()))


def matrix_two_norm_estimate(a: np.ndarray, iterations: int = 100, seed: int = 0) -> float:
    """Power-iteration estimate of the spectral norm.

    Reported for information only; it is a lower bound that converges from
    below, so assertions use per-row and Frobenius norms instead.
    """
    a = as_float(a)
    if a.size == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(a.shape[1])
    est = 0.0
    for _ in range(iterations):
        y = a.T @ (a @ x)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        est = math.sqrt(ny)
    return float(np.linalg.norm(a @ x)) if est else 0.0


# --------------------------------------------------------------- reflectors


@dataclass(frozen=True)
class Reflector:
    """Householder reflector ``diag(I_{n-k}, I_k - 2 v^T v)`` stored as ``v``.

    The n x n matrix is never formed; :func:`apply_reflector` works in O(n).
    """

    n: int
    v: np.ndarray

    @property
    def k(self) -> int:
        return len(self.v)

    def matrix(self) -> np.ndarray:
        """Dense form, for tests and debugging only."""
        p = np.eye(self.n)
        p[self.n - self.k :, self.n - self.k :] -= 2.0 * np.outer(self.v, self.v)
        return p


def make_reflector(x, n: int) -> Reflector:
    """Reflector acting on the last ``len(x)`` of ``n`` coordinates that maps
    ``x`` to ``(-sign(x[0]) * ||x||, 0, ..., 0)``, with ``sign(0) = +1``."""
    x = np.asarray(x)
    if backend_of(x) is not Backend.FLOAT:
        raise BackendError("Householder reflectors are float-only")
    k = len(x)
    if not 1 <= k <= n:
        raise ValueError(f"reflector length {k} not in 1..{n}")
    nx = two_norm(x)
    if nx == 0.0:
        raise DegenerateInputError("Householder reflector of a zero vector")
    v = np.array(x, dtype=np.float64, copy=True)
    v[0] += nx if v[0] >= 0.0 else -nx
    v /= np.linalg.norm(v)
    v.setflags(write=False)
    return Reflector(n, v)


def apply_reflector(y, p: Reflector) -> np.ndarray:
    """Return ``y P`` for a row vector ``y`` of length ``p.n``."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (p.n,):
        raise ValueError(f"dimension mismatch: vector of shape {y.shape}, reflector n={p.n}")
    out = y.copy()
    tail = out[p.n - p.k :]
    tail -= 2.0 * float(tail @ p.v) * p.v
    return out


# ------------------------------------------------------------ exact spans


class RowBasis:
    """Incrementally maintained row space over the rationals.

    Keeps the inserted ("original") vectors together with an echelon form in
    which every echelon row remembers its expansion in the original vectors,
    so membership queries return coefficients w.r.t. the original basis.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.vectors: list[np.ndarray] = []
        # pivot, row, coeffs; rows and coeffs are sparse {index: value} dicts
        self._echelon: list[tuple[int, dict, dict]] = []

    def __len__(self) -> int:
        return len(self.vectors)

    def _reduce(self, x: np.ndarray) -> tuple[dict, dict]:
        rest = {i: v for i, v in enumerate(x) if v != 0}
        coeff: dict = {}
        for pivot, row, rc in self._echelon:
            f = rest.get(pivot)
            if f is None:
                continue
            f = f / row[pivot]
            for j, v in row.items():
                nv = rest.get(j, 0) - f * v
                if nv:
                    rest[j] = nv
                else:
                    rest.pop(j, None)
            for j, v in rc.items():
                nv = coeff.get(j, 0) + f * v
                if nv:
                    coeff[j] = nv
                else:
                    coeff.pop(j, None)
        return rest, coeff

    def _dense(self, coeff: dict) -> np.ndarray:
        out = zeros(len(self.vectors), Backend.EXACT)
        for j, v in coeff.items():
            out[j] = v
        return out

    def coefficients(self, x) -> np.ndarray | None:
        """Coefficients of ``x`` in the original vectors, or ``None`` if ``x``
        is not in the span."""
        rest, coeff = self._reduce(self._check(x))
        return None if rest else self._dense(coeff)

    def extend(self, x) -> tuple[bool, np.ndarray | None]:
        """``(True, coeffs)`` if ``x`` is a member, else append it and return
        ``(False, None)``."""
        x = self._check(x)
        rest, coeff = self._reduce(x)
        if not rest:
            return True, self._dense(coeff)
        r = len(self.vectors)
        # rest = x - sum(coeff * originals) and x becomes original number r
        rc = {j: -v for j, v in coeff.items()}
        rc[r] = Fraction(1)
        self.vectors.append(x)
        self._echelon.append((min(rest), rest, rc))
        return False, None

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x)
        if backend_of(x) is not Backend.EXACT:
            raise BackendError("RowBasis requires exact vectors")
        if x.shape != (self.dim,):
            raise ValueError(f"expected vector of length {self.dim}, got shape {x.shape}")
        return x


class SparseRows:
    """Row-wise nonzero lists of an exact matrix, for fast ``x @ M``.

    Automata produced by encoders and reductions are often very sparse, and
    dense products of ``object`` arrays cost a Python call per entry.
    """

    def __init__(self, shape, rows):
        self.shape = shape
        self.rows = rows  # rows[i] = [(j, value), ...]

    @classmethod
    def from_dense(cls, m) -> "SparseRows":
        m = np.asarray(m)
        rows = [[(j, v) for j, v in enumerate(row) if v != 0] for row in m]
        return cls(m.shape, rows)

    def left_multiply(self, x) -> np.ndarray:
        out = zeros(self.shape[1], Backend.EXACT)
        for i, xi in enumerate(x):
            if xi != 0:
                for j, v in self.rows[i]:
                    out[j] += xi * v
        return out


def rational_rank(a) -> int:
    """Exact rank by Gaussian elimination over Q."""
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError("rational_rank expects a matrix")
    if backend_of(a) is not Backend.EXACT:
        raise BackendError("rational_rank requires the exact backend")
    rows, cols = a.shape
    m = a.copy()
    rank = 0
    for col in range(cols):
        piv = next((r for r in range(rank, rows) if m[r, col] != 0), None)
        if piv is None:
            continue
        if piv != rank:
            m[[rank, piv]] = m[[piv, rank]]
        prow = m[rank]
        for r in range(rank + 1, rows):
            if m[r, col] != 0:
                m[r] = m[r] - (m[r, col] / prow[col]) * prow
        rank += 1
        if rank == rows:
            break
    return rank


def stack_rows(rows: Sequence[np.ndarray], width: int, backend: Backend) -> np.ndarray:
    if not rows:
        return zeros((0, width), backend)
    return np.array(np.vstack(rows), dtype=object if Backend(backend) is Backend.EXACT else np.float64)


def is_all_zero(x: Iterable) -> bool:
    return all(v == 0 for v in np.asarray(x).ravel())
