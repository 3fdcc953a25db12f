"""Weighted automaton minimisation."""
from .automaton import (
    AutomatonFormatError,
    PAViolation,
    ProbabilisticAutomaton,
    UnknownLetterError,
    WeightedAutomaton,
    difference,
    dump_automaton,
    evaluate,
    hankel_block,
    hankel_rank,
    load_automaton,
    validate_pa,
    words_up_to,
)
from .equivalence import EquivalenceVerdict, equivalent, is_zero
from .estimators import QuadtreeImageCompressor, WAMinimiser, check_automaton, check_image, check_words
from .linalg import Backend, BackendError, DegenerateInputError
from .minimise import (
    DEFAULT_C,
    DEFAULT_TAU,
    ErrorBudget,
    LossReport,
    MinimisationReport,
    error_bound,
    minimise,
    verify_loss,
)
from .reduction import (
    ResidualReport,
    backward_automaton,
    backward_reduction,
    forward_automaton,
    forward_reduction,
    residual_report,
)

__version__ = "0.1.0"

__all__ = [
    "AutomatonFormatError",
    "Backend",
    "BackendError",
    "DEFAULT_C",
    "DEFAULT_TAU",
    "DegenerateInputError",
    "EquivalenceVerdict",
    "ErrorBudget",
    "LossReport",
    "MinimisationReport",
    "PAViolation",
    "ProbabilisticAutomaton",
    "QuadtreeImageCompressor",
    "ResidualReport",
    "UnknownLetterError",
    "WAMinimiser",
    "WeightedAutomaton",
    "backward_automaton",
    "backward_reduction",
    "check_automaton",
    "check_image",
    "check_words",
    "difference",
    "dump_automaton",
    "equivalent",
    "error_bound",
    "evaluate",
    "forward_automaton",
    "forward_reduction",
    "hankel_block",
    "hankel_rank",
    "is_zero",
    "load_automaton",
    "minimise",
    "residual_report",
    "validate_pa",
    "verify_loss",
    "words_up_to",
]
