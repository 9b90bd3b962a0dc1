"""effrew: rewriting and termination certification for algebraic-effect
terms in a monadic metalanguage.

The pieces:

  terms      term/type syntax, substitution, alpha-equivalence, printing
  parser     s-expression surface syntax for terms and types
  typecheck  monomorphic type inference
  rewrite    metalanguage and user-rule redexes, strategies, traces
  graph      exhaustive reduction-graph exploration
  rpo        recursive path ordering, certification, precedence search
  theories   builtin and file-defined effect theories, composition
  cli        the effrew command
"""

from .graph import ReductionGraph, reduction_graph
from .parser import ParseError, parse_term, parse_type
from .rewrite import (
    FuelExhausted,
    Redex,
    RewriteRule,
    RuleError,
    StaleRedexError,
    Trace,
    all_redexes,
    left_nesting_measure,
    make_rule,
    match_pattern,
    ml_redexes,
    normalize,
    step,
    symbolic_redexes,
)
from .rpo import (
    CertReport,
    Precedence,
    RpoDerivation,
    certify_ruleset,
    lex_greater,
    rpo_geq,
    rpo_greater,
    search_precedence,
    validate_derivation,
)
from .signature import EffectDecl, FunctionDecl, Signature, SignatureError
from .terms import (
    App,
    Arrow,
    Base,
    Eff,
    Lam,
    Let,
    Pure,
    SymApp,
    Term,
    Var,
    alpha_eq,
    canonical_key,
    free_vars,
    print_term,
    substitute,
    term_size,
)
from .theories import (
    Theory,
    TheoryError,
    builtin,
    builtin_names,
    compose,
    load_theory,
    parse_theory,
    peano_numeral,
)
from .typecheck import TypingError, infer_type

__version__ = "0.1.0"

__all__ = [
    "App", "Arrow", "Base", "CertReport", "Eff", "EffectDecl", "FuelExhausted",
    "FunctionDecl", "Lam", "Let", "ParseError", "Precedence", "Pure", "Redex",
    "ReductionGraph", "RewriteRule", "RpoDerivation", "RuleError", "Signature",
    "SignatureError", "StaleRedexError", "SymApp", "Term", "Theory", "TheoryError",
    "Trace", "TypingError", "Var", "all_redexes", "alpha_eq", "builtin",
    "builtin_names", "canonical_key", "certify_ruleset", "compose", "free_vars",
    "infer_type", "left_nesting_measure", "lex_greater", "load_theory", "make_rule",
    "match_pattern", "ml_redexes", "normalize", "parse_term", "parse_theory",
    "parse_type", "peano_numeral", "print_term", "reduction_graph", "rpo_geq",
    "rpo_greater", "search_precedence", "step", "substitute", "symbolic_redexes",
    "term_size", "validate_derivation",
]
