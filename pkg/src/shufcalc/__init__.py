"""Call-by-value lambda calculus with shuffling rules and a quantitative type system."""

from .rewrite import Rule, Trace, normalize, balanced_size, redexes, apply_step
from .semantics import interpret_bounded, counterexample_check
from .syntax import parse, print_term, alpha_eq, classify
from .transport import count_beta_steps, derive, subject_reduce, subject_expand
from .typesys import check_derivation, size

__all__ = [
    "Rule",
    "Trace",
    "alpha_eq",
    "apply_step",
    "balanced_size",
    "check_derivation",
    "classify",
    "count_beta_steps",
    "counterexample_check",
    "derive",
    "interpret_bounded",
    "normalize",
    "parse",
    "print_term",
    "redexes",
    "size",
    "subject_expand",
    "subject_reduce",
]
