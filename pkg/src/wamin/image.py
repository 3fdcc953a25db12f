"""Grey-scale images as weighted automata.

A ``2^D x 2^D`` image is addressed by words over the quadrant letters
``q0`` (top-left), ``q1`` (top-right), ``q2`` (bottom-left) and ``q3``
(bottom-right).  :func:`encode` builds one state per distinct quadrant
content; the final weight of a state is the mean grey value of its quadrant
(scaled to ``[0, 1]``), so words shorter than ``D`` address block averages.
Pixel states loop to themselves on every letter, making the value of a
pixel constant at all finer resolutions.

PGM files (``P2`` ASCII and ``P5`` binary) are read and written here too.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .automaton import WeightedAutomaton, evaluate
from .linalg import UNIT_ROUNDOFF, Backend, SparseRows, as_float, zeros
from .minimise import DEFAULT_C, ErrorBudget, MinimisationReport, error_bound, minimise

__all__ = [
    "QUADRANTS",
    "CompressionStats",
    "GrayImage",
    "PGMError",
    "QuadTreeEncoding",
    "compress",
    "decode",
    "encode",
    "parse_pgm",
    "pixel_word",
    "read_pgm",
    "write_pgm",
]

QUADRANTS = ("q0", "q1", "q2", "q3")


class PGMError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GrayImage:
    pixels: np.ndarray  # (height, width) integers
    maxval: int = 255

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError("pixels must be a 2-D grid")
        if px.size and not np.issubdtype(px.dtype, np.integer):
            if not np.all(np.equal(np.mod(px, 1), 0)):
                raise ValueError("pixel values must be integers")
        px = px.astype(np.int64)
        if not 1 <= self.maxval <= 65535:
            raise ValueError(f"maxval must be in 1..65535, got {self.maxval}")
        if px.size and (px.min() < 0 or px.max() > self.maxval):
            raise ValueError(f"pixel values must lie in [0, {self.maxval}]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def __eq__(self, other) -> bool:
        return (isinstance(other, GrayImage) and self.maxval == other.maxval
                and self.pixels.shape == other.pixels.shape
                and bool(np.array_equal(self.pixels, other.pixels)))


@dataclass(frozen=True)
class QuadTreeEncoding:
    depth: int
    width: int
    height: int
    maxval: int
    letters: tuple[str, ...]
    states: tuple[tuple[int, int, int], ...]  # (side, row, col) of the first quadrant with that content

    @property
    def side(self) -> int:
        return 1 << self.depth


def depth_for(width: int, height: int) -> int:
    side = max(width, height)
    return 0 if side <= 1 else math.ceil(math.log2(side))


def pixel_word(row: int, col: int, depth: int) -> tuple[str, ...]:
    """Address of pixel ``(row, col)`` in a ``2^depth`` square, coarsest first."""
    word = []
    for level in range(depth - 1, -1, -1):
        word.append(QUADRANTS[2 * ((row >> level) & 1) + ((col >> level) & 1)])
    return tuple(word)


def encode(img: GrayImage, backend=Backend.EXACT) -> tuple[WeightedAutomaton, QuadTreeEncoding]:
    """Quadtree automaton of ``img`` (zero-padded to a power-of-two square)."""
    if img.width == 0 or img.height == 0:
        raise ValueError("cannot encode an empty image")
    depth = depth_for(img.width, img.height)
    side = 1 << depth
    grid = np.zeros((side, side), dtype=np.int64)
    grid[: img.height, : img.width] = img.pixels

    index: dict[tuple[int, bytes], int] = {}
    states: list[tuple[int, int, int]] = []
    children: list[tuple[int, ...] | None] = []
    sums: list[int] = []
    queue: list[int] = []

    def state_of(size, r, c) -> int:
        block = grid[r : r + size, c : c + size]
        key = (size, block.tobytes())
        s = index.get(key)
        if s is None:
            s = len(states)
            index[key] = s
            states.append((size, r, c))
            children.append(None)
            sums.append(int(block.sum()))
            queue.append(s)
        return s

    state_of(side, 0, 0)
    head = 0
    while head < len(queue):
        s = queue[head]
        head += 1
        size, r, c = states[s]
        if size > 1:
            h = size // 2
            children[s] = tuple(state_of(h, r + (q // 2) * h, c + (q % 2) * h) for q in range(4))

    n = len(states)
    trans = {q: zeros((n, n), Backend.EXACT) for q in QUADRANTS}
    one = Fraction(1)
    for s in range(n):
        for q, letter in enumerate(QUADRANTS):
            target = s if children[s] is None else children[s][q]
            trans[letter][s, target] = one
    alpha = zeros(n, Backend.EXACT)
    alpha[0] = one
    eta = zeros(n, Backend.EXACT)
    for s, (size, _, _) in enumerate(states):
        eta[s] = Fraction(sums[s], size * size * img.maxval)
    wa = WeightedAutomaton(QUADRANTS, trans, alpha, eta).with_backend(backend)
    return wa, QuadTreeEncoding(depth, img.width, img.height, img.maxval, QUADRANTS, tuple(states))


def _check_alphabet(a: WeightedAutomaton):
    if set(a.alphabet) != set(QUADRANTS):
        raise ValueError(f"image automata use the alphabet {list(QUADRANTS)}, got {list(a.alphabet)}")


def pixel_values(a: WeightedAutomaton, depth: int) -> np.ndarray:
    """``L(word)`` for every word of length ``depth``, as a square grid."""
    _check_alphabet(a)
    side = 1 << depth
    if a.n == 0:
        out = np.empty((side, side), dtype=object if a.backend is Backend.EXACT else np.float64)
        out.fill(Fraction(0) if a.backend is Backend.EXACT else 0.0)
        return out
    if a.backend is Backend.FLOAT:
        vecs = a.initial.reshape(1, 1, a.n)
        for _ in range(depth):
            s = vecs.shape[0]
            nxt = np.empty((2 * s, 2 * s, a.n))
            for q, letter in enumerate(QUADRANTS):
                nxt[q // 2 :: 2, q % 2 :: 2] = vecs @ a.transitions[letter]
            vecs = nxt
        return vecs @ a.final
    sparse = {q: SparseRows.from_dense(a.transitions[q]) for q in QUADRANTS}
    vecs = np.empty((1, 1), dtype=object)
    vecs[0, 0] = a.initial
    for _ in range(depth):
        s = vecs.shape[0]
        nxt = np.empty((2 * s, 2 * s), dtype=object)
        for r in range(s):
            for c in range(s):
                for q, letter in enumerate(QUADRANTS):
                    nxt[2 * r + q // 2, 2 * c + q % 2] = sparse[letter].left_multiply(vecs[r, c])
        vecs = nxt
    out = np.empty(vecs.shape, dtype=object)
    for idx, v in np.ndenumerate(vecs):
        out[idx] = sum((x * y for x, y in zip(v, a.final) if x != 0), Fraction(0))
    return out


def _round_half_up(x) -> int:
    return math.floor(x + Fraction(1, 2)) if isinstance(x, Fraction) else math.floor(float(x) + 0.5)


def decode(a: WeightedAutomaton, depth: int, width: int, height: int, maxval: int = 255) -> GrayImage:
    """Render ``a`` at resolution ``2^depth`` and crop to ``width x height``."""
    if width > (1 << depth) or height > (1 << depth):
        raise ValueError(f"a {width}x{height} image does not fit depth {depth}")
    values = pixel_values(a, depth)
    px = np.empty((height, width), dtype=np.int64)
    for r in range(height):
        for c in range(width):
            px[r, c] = min(max(_round_half_up(values[r, c] * maxval), 0), maxval)
    return GrayImage(px, maxval)


@dataclass(frozen=True)
class CompressionStats:
    states_before: int
    states_after: int
    max_abs_pixel_error: float
    max_rounded_pixel_error: int
    error_bound: float
    tau: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def compress(img: GrayImage, tau: float = 1e-6, *, c: float = DEFAULT_C, order: str = "bf"):
    """Lossy compression: encode, minimise with tolerance ``tau``, decode.

    ``tau = 0`` runs the exact backend (lossless).  Returns the minimised
    automaton, the reconstructed image, the statistics and the minimisation
    report.  ``max_abs_pixel_error`` is ``max |L(w) - L'(w)| * maxval`` over
    pixel words, the quantity governed by :func:`error_bound` with ``m = 1``.

    Minimisation runs backward-first by default: the forward space of a
    quadtree encoding is spanned by all its states, while the backward space
    has the dimension of the (usually small) minimal automaton.
    """
    wa, enc = encode(img, Backend.EXACT)
    if tau == 0:
        out, report = minimise(wa, 0, Backend.EXACT, order=order)
    else:
        out, report = minimise(wa.to_float(), tau, Backend.FLOAT, order=order)
    before = pixel_values(wa, enc.depth)
    after = pixel_values(out, enc.depth)
    h, w = img.height, img.width
    dev = max((abs(float(before[r, col] - after[r, col])) for r in range(h) for col in range(w)), default=0.0)
    recon = decode(out, enc.depth, w, h, img.maxval)
    rounded = int(np.max(np.abs(recon.pixels - img.pixels))) if img.pixels.size else 0
    eta_norm = float(np.linalg.norm(as_float(wa.final)))
    bound = error_bound(ErrorBudget(enc.depth, 1.0, eta_norm, 1.0, wa.n, float(tau),
                                    0.0 if tau == 0 else UNIT_ROUNDOFF, c))
    stats = CompressionStats(wa.n, out.n, dev * img.maxval, rounded, bound * img.maxval, float(tau))
    return out, recon, stats, report


# --------------------------------------------------------------------- PGM

_HEADER_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


def parse_pgm(data: bytes) -> GrayImage:
    """Parse a P2 or P5 PGM file."""
    pos = 0
    tokens = []
    for _ in range(4):
        m = _HEADER_TOKEN.match(data, pos)
        if m is None:
            raise PGMError("truncated PGM header")
        tokens.append(m.group(1))
        pos = m.end()
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise PGMError(f"unsupported magic number {magic!r} (expected P2 or P5)")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise PGMError("non-integer width, height or maxval") from None
    if width < 0 or height < 0 or not 1 <= maxval <= 65535:
        raise PGMError(f"invalid header values {width}x{height} maxval {maxval}")
    if magic == b"P5":
        if maxval > 255:
            raise PGMError("P5 files with maxval > 255 are not supported")
        if pos >= len(data) or not data[pos : pos + 1].isspace():
            raise PGMError("missing whitespace after the P5 header")
        pos += 1
        raster = data[pos : pos + width * height]
        if len(raster) != width * height:
            raise PGMError(f"P5 raster has {len(raster)} bytes, expected {width * height}")
        px = np.frombuffer(raster, dtype=np.uint8).reshape(height, width).astype(np.int64)
    else:
        body = re.sub(rb"#[^\n]*", b" ", data[pos:]).split()
        if len(body) != width * height:
            raise PGMError(f"P2 raster has {len(body)} values, expected {width * height}")
        try:
            px = np.array([int(t) for t in body], dtype=np.int64).reshape(height, width)
        except ValueError:
            raise PGMError("non-integer value in P2 raster") from None
    try:
        return GrayImage(px, maxval)
    except ValueError as exc:
        raise PGMError(str(exc)) from None


def read_pgm(path) -> GrayImage:
    return parse_pgm(Path(path).read_bytes())


def format_pgm(img: GrayImage, fmt: str = "P5") -> bytes:
    header = f"{fmt}\n{img.width} {img.height}\n{img.maxval}\n".encode("ascii")
    if fmt == "P5":
        if img.maxval > 255:
            raise PGMError("P5 output supports maxval <= 255 only")
        return header + img.pixels.astype(np.uint8).tobytes()
    if fmt == "P2":
        rows = [" ".join(str(int(v)) for v in row) for row in img.pixels]
        return header + ("\n".join(rows) + "\n").encode("ascii") if rows else header
    raise PGMError(f"unknown PGM format {fmt!r}")


def write_pgm(img: GrayImage, path, fmt: str = "P5") -> None:
    Path(path).write_bytes(format_pgm(img, fmt))
