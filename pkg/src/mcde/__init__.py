"""Exact symbolic calculus of distributed products in multiple complexes."""
from .calculus import (
    PLAIN,
    TRANSFER,
    ClosureVerdict,
    Identity,
    derive_identity,
    differentiate,
    hierarchy,
    is_closed,
    saturate_conditions,
    transfer_cancel,
)
from .errors import McdeError, ParseError, SemanticError
from .rules import Condition, FactorPattern, Ideal, RuleSet, reduce, vanishes
from .scalars import GaussianRational, gauss
from .search import Catalog, SearchBounds, search_closed
from .specdsl import parse_expr, parse_monomial, parse_spec, render_expr, render_spec
from .terms import (
    Atom,
    DifferentialLabel,
    Expression,
    Factor,
    Monomial,
    MultiIndex,
    OperatorWord,
    make_word,
    multi_index,
    normalize_word,
)

__version__ = "0.1.0"

__all__ = [
    "PLAIN",
    "TRANSFER",
    "ClosureVerdict",
    "Identity",
    "derive_identity",
    "differentiate",
    "hierarchy",
    "is_closed",
    "saturate_conditions",
    "transfer_cancel",
    "Atom",
    "DifferentialLabel",
    "Expression",
    "Factor",
    "Monomial",
    "MultiIndex",
    "OperatorWord",
    "make_word",
    "multi_index",
    "normalize_word",
    "McdeError",
    "ParseError",
    "SemanticError",
    "Condition",
    "FactorPattern",
    "Ideal",
    "RuleSet",
    "reduce",
    "vanishes",
    "GaussianRational",
    "gauss",
    "Catalog",
    "SearchBounds",
    "search_closed",
    "parse_expr",
    "parse_monomial",
    "parse_spec",
    "render_expr",
    "render_spec",
]
