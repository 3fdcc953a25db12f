"""scikit-learn style wrappers and input validation helpers.

The functional API (:func:`wamin.minimise`, :func:`wamin.image.compress`)
is the core; these estimators only hold hyper-parameters and fitted state
so the tools compose with ``get_params``/``set_params``/``clone``.
"""
from __future__ import annotations

import os
from collections.abc import Mapping

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .automaton import UnknownLetterError, WeightedAutomaton, evaluate, load_automaton
from .image import GrayImage, QUADRANTS, compress, read_pgm
from .linalg import Backend
from .minimise import DEFAULT_C, minimise

__all__ = [
    "QuadtreeImageCompressor",
    "WAMinimiser",
    "check_automaton",
    "check_image",
    "check_words",
]


def check_automaton(x, backend=None) -> WeightedAutomaton:
    """Accept a :class:`WeightedAutomaton`, its JSON dict, or a path to one."""
    if isinstance(x, WeightedAutomaton):
        a = x
    elif isinstance(x, Mapping):
        a = WeightedAutomaton.from_dict(x)
    elif isinstance(x, (str, os.PathLike)):
        a = load_automaton(x)
    else:
        raise TypeError(f"expected a WeightedAutomaton, dict or path, got {type(x).__name__}")
    return a if backend is None else a.with_backend(backend)


def check_image(x, maxval: int | None = None) -> GrayImage:
    """Accept a :class:`GrayImage`, a 2-D integer array, or a PGM path."""
    if isinstance(x, GrayImage):
        if maxval is not None and maxval != x.maxval:
            raise ValueError(f"image has maxval {x.maxval}, expected {maxval}")
        return x
    if isinstance(x, (str, os.PathLike)):
        return read_pgm(x)
    arr = np.asarray(x)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D pixel array, got shape {arr.shape}")
    return GrayImage(arr, 255 if maxval is None else maxval)


def check_words(words, alphabet) -> list[tuple[str, ...]]:
    """Normalise words to letter tuples.

    A string is split on commas (``"a2,b2"``); the empty string is the empty
    word.  Letters outside ``alphabet`` raise :class:`UnknownLetterError`.
    """
    if isinstance(words, (str, tuple)):
        words = [words]
    letters = set(alphabet)
    out = []
    for w in words:
        if isinstance(w, str):
            w = tuple(w.split(",")) if w else ()
        w = tuple(w)
        for i, x in enumerate(w):
            if x not in letters:
                raise UnknownLetterError(f"letter {x!r} at position {i} of word {w} is not in {list(alphabet)}")
        out.append(w)
    return out


class WAMinimiser(TransformerMixin, BaseEstimator):
    """Minimise weighted automata.

    ``fit`` minimises one automaton and keeps the result; ``transform``
    minimises any automaton with the same settings; ``predict`` evaluates the
    fitted minimal automaton on words.

    Parameters
    ----------
    tau : float or None
        Tolerance.  ``None`` means 0 on the exact backend and 1e-6 on floats.
    backend : {"exact", "float"} or None
        ``None`` keeps the input's backend.
    order : {"fb", "bf"}
        Which reduction runs first.
    """

    def __init__(self, tau=None, backend=None, order="fb"):
        self.tau = tau
        self.backend = backend
        self.order = order

    def _run(self, x):
        a = check_automaton(x)
        return minimise(a, self.tau, self.backend, order=self.order)

    def fit(self, X, y=None):
        out, report = self._run(X)
        self.automaton_ = out
        self.report_ = report
        self.n_states_in_ = report.n
        self.n_states_ = out.n
        return self

    def transform(self, X):
        return self._run(X)[0]

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X).automaton_

    def predict(self, words):
        check_is_fitted(self, "automaton_")
        a = self.automaton_
        vals = [evaluate(a, w) for w in check_words(words, a.alphabet)]
        return np.array(vals, dtype=object if a.backend is Backend.EXACT else np.float64)


class QuadtreeImageCompressor(TransformerMixin, BaseEstimator):
    """Lossy image compression through automaton minimisation.

    ``fit`` compresses one image; ``transform`` returns the reconstruction
    of any image at the configured tolerance; ``predict`` evaluates the
    fitted automaton on quadrant words.
    """

    def __init__(self, tau=1e-6, order="bf", c=DEFAULT_C):
        self.tau = tau
        self.order = order
        self.c = c

    def fit(self, X, y=None):
        img = check_image(X)
        out, recon, stats, report = compress(img, self.tau, c=self.c, order=self.order)
        self.automaton_ = out
        self.reconstruction_ = recon
        self.stats_ = stats
        self.report_ = report
        return self

    def transform(self, X):
        return compress(check_image(X), self.tau, c=self.c, order=self.order)[1]

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X).reconstruction_

    def predict(self, words):
        check_is_fitted(self, "automaton_")
        vals = [evaluate(self.automaton_, w) for w in check_words(words, QUADRANTS)]
        return np.array([float(v) for v in vals])

